// Inner SPARC decoders, all covariance based: one-step IHT, iterative IHT,
// coordinate-wise relaxed ML with Sherman-Morrison inverse maintenance, NNLS
// by cyclic coordinate descent, and the two-stage AccML (screen, then ML on
// the screened support).
#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "ura/codebook.hpp"
#include "ura/covariance.hpp"

namespace ura {

struct DecoderConfig {
  double rho = 1.0;        // screening threshold multiplier
  arma::uword k_hat = 1;   // sparsity for the IHT variants
  double alpha = 1.0;      // IHT step size, applied as alpha / D^2
  int max_sweeps = 15;
  double tol = 1e-6;       // sweep-level relative-change stop
  std::uint64_t seed = 0;  // ML traversal shuffle
};

struct GammaEstimate {
  arma::vec gamma_hat;                  // length N
  std::vector<arma::uword> active_set;  // strictly positive entries, ascending
  int sweeps_used = 0;
  std::vector<double> objective_trace;  // initial value, then one per sweep

  // diagnostics
  long long screen_size = -1;  // coordinates the solver actually swept
  bool empty_screen = false;
  int step_guard_events = 0;      // Sherman-Morrison denominator rescues
  int inverse_rebuilds = 0;       // maintained inverse rebuilt from scratch
  double max_inverse_error = 0.0; // worst ||Sinv Sigma(gamma) - I||_F seen
};

// Indices of the k_hat largest entries of the one-step IHT gradient
// (equivalently of the screening statistic, shifted by sigma2 * D).
// Selection is by value with ties broken by lowest index; the returned set is
// in ascending index order.
std::vector<arma::uword> one_step_iht(const Codebook& cb,
                                      const HermitianMatrix& sigmahat,
                                      double sigma2, arma::uword k_hat);

// Projected gradient descent with a keep-top-k_hat projection on the lifted
// least-squares objective. Nonnegativity is not enforced, so the returned
// gamma may carry negative entries.
GammaEstimate iht(const Codebook& cb, const HermitianMatrix& sigmahat,
                  double sigma2, arma::uword k_hat, double alpha,
                  int max_iter, double tol);

// S0 = { k : Y_k > rho * mean(Y) }, strict inequality; may be empty.
std::vector<arma::uword> threshold_screen(const ScreeningStatistic& stat,
                                          double rho);

// Coordinate-wise relaxed ML restricted to `support` (pass all indices for
// full ML). Starts from gamma = 0 unless initial_gamma is supplied, in which
// case initial_gamma must vanish outside `support`. Steps are clamped so
// gamma stays nonnegative and the maintained inverse always matches
// Sigma(gamma).
GammaEstimate ml_coordinate_descent(const Codebook& cb,
                                    const HermitianMatrix& sigmahat,
                                    double sigma2,
                                    const std::vector<arma::uword>& support,
                                    const DecoderConfig& cfg,
                                    const arma::vec* initial_gamma = nullptr);

// min ||Sigma(gamma) - Sigma_hat||_F over gamma >= 0, cyclic coordinate
// descent with the exact per-coordinate minimizer.
GammaEstimate nnls(const Codebook& cb, const HermitianMatrix& sigmahat,
                   double sigma2, const DecoderConfig& cfg);

// Two-stage decoder: threshold screening, then ML restricted to the screen.
GammaEstimate accml(const Codebook& cb, const HermitianMatrix& sigmahat,
                    double sigma2, const DecoderConfig& cfg);

// Same, fed with the raw block; picks the cheaper screening path and uses
// blk.sigma2.
GammaEstimate accml(const Codebook& cb, const ReceivedBlock& blk,
                    const DecoderConfig& cfg);

// Indices of the T largest entries, descending value, ties by lowest index;
// zero entries pad the list when fewer than T are positive.
std::vector<arma::uword> select_top(const arma::vec& gamma, arma::uword T);
std::vector<arma::uword> select_top(const GammaEstimate& est, arma::uword T);

inline std::vector<arma::uword> full_support(arma::uword N) {
  std::vector<arma::uword> s(N);
  for (arma::uword k = 0; k < N; ++k) s[k] = k;
  return s;
}

namespace detail {
// Inner NNLS solver on a fixed support, shared with the brute-force oracle.
// Returns the estimate and the exact final residual norm ||Sigma_hat -
// Sigma(gamma)||_F recomputed from scratch.
struct RestrictedNnlsResult {
  arma::vec gamma;
  double residual_norm = 0.0;
  int sweeps_used = 0;
};
RestrictedNnlsResult nnls_on_support(const Codebook& cb,
                                     const HermitianMatrix& sigmahat,
                                     double sigma2,
                                     const std::vector<arma::uword>& support,
                                     int max_sweeps, double tol,
                                     std::vector<double>* trace = nullptr);
}  // namespace detail

}  // namespace ura
