#include "ura/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ura/decoders.hpp"
#include "ura/rng.hpp"

namespace ura::oracle {

namespace {

// C(n, k) with saturation, to compare against the evaluation cap.
std::size_t binomial_capped(arma::uword n, arma::uword k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (arma::uword i = 1; i <= k; ++i) {
    const double next = static_cast<double>(result) *
                        static_cast<double>(n - k + i) / static_cast<double>(i);
    if (next > static_cast<double>(cap) * 2.0) return cap * 2;
    result = static_cast<std::size_t>(next + 0.5);
  }
  return result;
}

}  // namespace

MomentEstimate moment_oracle(arma::uword D, std::size_t samples,
                             std::uint64_t seed, const OracleBudget& budget) {
  if (D < 1) throw std::invalid_argument("moment_oracle: D must be positive");
  if (samples < budget.min_samples) {
    throw BudgetError("moment_oracle: at least " +
                      std::to_string(budget.min_samples) +
                      " samples are required");
  }

  rng::Engine eng = rng::make_engine(seed, {0x6f72});
  const double Dd = static_cast<double>(D);

  // Per draw: s4 = sum_i |a_i|^4. Coordinate averages give the per-sample
  // statistics; sum_i |a_i|^2 = D exactly pins the cross moment to
  // (D^2 - s4) / (D (D-1)).
  double sum4 = 0.0, sumsq4 = 0.0, sum22 = 0.0, sumsq22 = 0.0;
  arma::cx_vec a(D);
  for (std::size_t n = 0; n < samples; ++n) {
    double nrm = 0.0;
    do {
      for (arma::uword i = 0; i < D; ++i) a(i) = rng::complex_gaussian(eng);
      nrm = arma::norm(a);
    } while (nrm < 1e-12);
    a *= std::sqrt(Dd) / nrm;

    double s4 = 0.0;
    for (arma::uword i = 0; i < D; ++i) s4 += std::norm(a(i)) * std::norm(a(i));
    const double x4 = s4 / Dd;
    sum4 += x4;
    sumsq4 += x4 * x4;
    if (D > 1) {
      const double x22 = (Dd * Dd - s4) / (Dd * (Dd - 1.0));
      sum22 += x22;
      sumsq22 += x22 * x22;
    }
  }

  const double n = static_cast<double>(samples);
  MomentEstimate est;
  est.samples = samples;
  est.m4 = sum4 / n;
  est.m4_se = std::sqrt(std::max(0.0, sumsq4 / n - est.m4 * est.m4) / n);
  if (D > 1) {
    est.m22 = sum22 / n;
    est.m22_se = std::sqrt(std::max(0.0, sumsq22 / n - est.m22 * est.m22) / n);
  }
  return est;
}

std::vector<arma::uword> brute_force_support(const Codebook& cb,
                                             const HermitianMatrix& sigmahat,
                                             double sigma2, arma::uword K,
                                             const OracleBudget& budget) {
  const arma::uword N = cb.cols();
  if (K < 1 || K > N) {
    throw std::invalid_argument("brute_force_support: K must lie in [1, N]");
  }
  if (N > budget.max_cols) {
    throw BudgetError("brute_force_support: N exceeds the oracle budget");
  }
  if (std::min(K, N - K) > budget.max_subset) {
    throw BudgetError("brute_force_support: subset size exceeds the budget");
  }
  if (binomial_capped(N, K, budget.max_subset_evals) > budget.max_subset_evals) {
    throw BudgetError("brute_force_support: too many subsets to enumerate");
  }

  std::vector<arma::uword> subset(K);
  for (arma::uword i = 0; i < K; ++i) subset[i] = i;

  std::vector<arma::uword> best = subset;
  double best_value = std::numeric_limits<double>::infinity();
  for (;;) {
    const auto fit = ura::detail::nnls_on_support(cb, sigmahat, sigma2, subset,
                                                  /*max_sweeps=*/500,
                                                  /*tol=*/1e-10);
    if (fit.residual_norm < best_value) {  // strict: first subset wins ties
      best_value = fit.residual_norm;
      best = subset;
    }

    // next subset in lexicographic order
    arma::sword pos = static_cast<arma::sword>(K) - 1;
    while (pos >= 0 &&
           subset[static_cast<arma::uword>(pos)] ==
               N - K + static_cast<arma::uword>(pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++subset[static_cast<arma::uword>(pos)];
    for (arma::uword i = static_cast<arma::uword>(pos) + 1; i < K; ++i) {
      subset[i] = subset[i - 1] + 1;
    }
  }
  return best;
}

arma::cx_mat materialized_lift(const Codebook& cb, const OracleBudget& budget) {
  const arma::uword D = cb.rows();
  const arma::uword N = cb.cols();
  if (N > budget.max_cols) {
    throw BudgetError("materialized_lift: N exceeds the oracle budget");
  }
  arma::cx_mat lift(D * D, N);
  for (arma::uword k = 0; k < N; ++k) {
    const arma::cx_vec a = cb.entries.col(k);
    lift.col(k) = arma::vectorise(a * a.t());
  }
  return lift;
}

}  // namespace ura::oracle
