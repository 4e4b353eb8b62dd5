// Block-fading MIMO channel for one section: Y = A sqrt(diag(gamma)) H + Z,
// plus the power parameterizations tying SNR, Eb/N0 and sigma^2 together.
#pragma once

#include <armadillo>
#include <cstdint>
#include <utility>
#include <vector>

#include "ura/codebook.hpp"

namespace ura {

struct ActivityVector {
  arma::vec gamma;                     // length N, received power per column
  std::vector<arma::uword> support;    // ascending indices with gamma > 0
};

struct ReceivedBlock {
  arma::cx_mat samples;  // D x M
  double sigma2 = 1.0;   // noise variance per complex dimension

  arma::uword rows() const { return samples.n_rows; }      // D
  arma::uword antennas() const { return samples.n_cols; }  // M
};

// Several users landing on one column superpose their LSFCs; the covariance
// of the sum equals the summed power, which is all the decoders here see.
ActivityVector build_activity(
    const std::vector<std::pair<arma::uword, double>>& users, arma::uword N);

// H and Z entries are i.i.d. CN(0,1) and CN(0,sigma2); deterministic per seed.
ReceivedBlock simulate_block(const Codebook& cb, const ActivityVector& act,
                             arma::uword M, double sigma2, std::uint64_t seed);

// sigma^2 = L*D*g / (B * 10^(ebn0_db/10)) and its inverse.
double ebn0_to_sigma2(double ebn0_db, int L, arma::uword D, int B, double g);
double sigma2_to_ebn0(double sigma2, int L, arma::uword D, int B, double g);

// Eb/N0 that puts an active user of LSFC g at the given per-user SNR.
double ebn0_db_for_snr_db(double snr_db, int L, arma::uword D, int B);

struct PowerSpec {
  double ebn0_db = 0.0;
  double snr_db = 0.0;
  double lsfc = 1.0;    // g
  double sigma2 = 1.0;
  int info_bits = 0;    // B
  int sections = 0;     // L
  arma::uword rows = 0;     // D
  arma::uword rows_total = 0;  // D_total = L*D
  double rate = 0.0;    // R = B / D_total
};

PowerSpec make_power_spec(double ebn0_db, int L, arma::uword D, int B, double g);

}  // namespace ura
