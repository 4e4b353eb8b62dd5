#include "ura/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "ura/rng.hpp"

namespace ura {

ActivityVector build_activity(
    const std::vector<std::pair<arma::uword, double>>& users, arma::uword N) {
  ActivityVector act;
  act.gamma.zeros(N);
  for (const auto& [index, lsfc] : users) {
    if (index >= N) {
      throw std::invalid_argument("build_activity: column index out of range");
    }
    if (lsfc <= 0.0) {
      throw std::invalid_argument("build_activity: LSFC must be positive");
    }
    act.gamma(index) += lsfc;
  }
  for (arma::uword k = 0; k < N; ++k) {
    if (act.gamma(k) > 0.0) act.support.push_back(k);
  }
  return act;
}

ReceivedBlock simulate_block(const Codebook& cb, const ActivityVector& act,
                             arma::uword M, double sigma2, std::uint64_t seed) {
  const arma::uword D = cb.rows();
  const arma::uword N = cb.cols();
  if (act.gamma.n_elem != N) {
    throw std::invalid_argument("simulate_block: activity length must equal N");
  }
  if (M < 1) throw std::invalid_argument("simulate_block: M must be positive");
  if (sigma2 <= 0.0) {
    throw std::invalid_argument("simulate_block: sigma2 must be positive");
  }

  rng::Engine eng = rng::make_engine(seed);

  // Channel rows for active columns first (ascending index), then noise,
  // so the draw order is pinned.
  const arma::uword S = act.support.size();
  arma::cx_mat active_rows(S, M);
  for (arma::uword s = 0; s < S; ++s) {
    for (arma::uword m = 0; m < M; ++m) {
      active_rows(s, m) = rng::complex_gaussian(eng);
    }
  }

  ReceivedBlock blk;
  blk.sigma2 = sigma2;
  blk.samples.set_size(D, M);
  const double noise_scale = std::sqrt(sigma2);
  for (arma::uword m = 0; m < M; ++m) {
    for (arma::uword i = 0; i < D; ++i) {
      blk.samples(i, m) = noise_scale * rng::complex_gaussian(eng);
    }
  }

  if (S > 0) {
    arma::cx_mat weighted(D, S);
    for (arma::uword s = 0; s < S; ++s) {
      weighted.col(s) =
          cb.entries.col(act.support[s]) * std::sqrt(act.gamma(act.support[s]));
    }
    blk.samples += weighted * active_rows;
  }
  return blk;
}

namespace {

void check_power_args(int L, arma::uword D, int B, double g) {
  if (L < 1 || D < 1 || B < 1 || g <= 0.0) {
    throw std::invalid_argument("power spec: L, D, B, g must be positive");
  }
}

}  // namespace

double ebn0_to_sigma2(double ebn0_db, int L, arma::uword D, int B, double g) {
  check_power_args(L, D, B, g);
  const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
  return static_cast<double>(L) * static_cast<double>(D) * g /
         (static_cast<double>(B) * ebn0);
}

double sigma2_to_ebn0(double sigma2, int L, arma::uword D, int B, double g) {
  check_power_args(L, D, B, g);
  if (sigma2 <= 0.0) {
    throw std::invalid_argument("power spec: sigma2 must be positive");
  }
  return 10.0 * std::log10(static_cast<double>(L) * static_cast<double>(D) * g /
                           (static_cast<double>(B) * sigma2));
}

double ebn0_db_for_snr_db(double snr_db, int L, arma::uword D, int B) {
  check_power_args(L, D, B, 1.0);
  const double rate = static_cast<double>(B) /
                      (static_cast<double>(L) * static_cast<double>(D));
  return snr_db - 10.0 * std::log10(rate);
}

PowerSpec make_power_spec(double ebn0_db, int L, arma::uword D, int B, double g) {
  PowerSpec spec;
  spec.ebn0_db = ebn0_db;
  spec.lsfc = g;
  spec.info_bits = B;
  spec.sections = L;
  spec.rows = D;
  spec.rows_total = static_cast<arma::uword>(L) * D;
  spec.rate = static_cast<double>(B) / static_cast<double>(spec.rows_total);
  spec.sigma2 = ebn0_to_sigma2(ebn0_db, L, D, B, g);
  spec.snr_db = 10.0 * std::log10(g / spec.sigma2);
  return spec;
}

}  // namespace ura
