#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ura/channel.hpp"
#include "ura/codebook.hpp"
#include "ura/covariance.hpp"
#include "ura/oracle.hpp"
#include "ura/rng.hpp"

using namespace ura;

namespace {

// Entrywise reference for the sample covariance.
arma::cx_mat sample_cov_loops(const arma::cx_mat& y) {
  arma::cx_mat out(y.n_rows, y.n_rows, arma::fill::zeros);
  for (arma::uword i = 0; i < y.n_rows; ++i) {
    for (arma::uword j = 0; j < y.n_rows; ++j) {
      for (arma::uword m = 0; m < y.n_cols; ++m) {
        out(i, j) += y(i, m) * std::conj(y(j, m));
      }
      out(i, j) /= double(y.n_cols);
    }
  }
  return out;
}

// Double-sum reference for the screening statistic.
double statistic_loops(const Codebook& cb, const arma::cx_mat& sigma,
                       arma::uword k) {
  std::complex<double> acc = 0.0;
  for (arma::uword i = 0; i < cb.rows(); ++i) {
    for (arma::uword j = 0; j < cb.rows(); ++j) {
      acc += std::conj(cb.entries(i, k)) * cb.entries(j, k) * sigma(i, j);
    }
  }
  return acc.real();
}

arma::cx_mat random_hermitian(arma::uword D, std::uint64_t seed) {
  rng::Engine eng = rng::make_engine(seed);
  arma::cx_mat m(D, D);
  for (auto& v : m) v = rng::complex_gaussian(eng);
  return 0.5 * (m + m.t()).eval();
}

}  // namespace

TEST_CASE("sample covariance matches the entrywise definition") {
  ReceivedBlock blk;
  blk.sigma2 = 1.0;
  blk.samples.zeros(3, 2);
  CHECK(arma::norm(sample_covariance(blk).mat(), "fro") == 0.0);

  rng::Engine eng = rng::make_engine(5);
  for (auto& v : blk.samples) v = rng::complex_gaussian(eng);
  const arma::cx_mat got = sample_covariance(blk).mat();
  CHECK(arma::norm(got - sample_cov_loops(blk.samples), "fro") < 1e-12);

  // M = 1 rank-one identity
  ReceivedBlock one;
  one.sigma2 = 1.0;
  one.samples.set_size(3, 1);
  for (auto& v : one.samples) v = rng::complex_gaussian(eng);
  const arma::cx_vec y = one.samples.col(0);
  CHECK(arma::norm(sample_covariance(one).mat() - y * y.t(), "fro") < 1e-12);
}

TEST_CASE("hermitian wrapper symmetrizes") {
  arma::cx_mat m = random_hermitian(4, 9);
  m(1, 2) += std::complex<double>(0.0, 1e-3);  // break symmetry slightly
  const HermitianMatrix h(m);
  CHECK(arma::norm(h.mat() - h.mat().t(), "fro") < 1e-14);
  CHECK_THROWS_AS(HermitianMatrix(arma::cx_mat(2, 3)), std::invalid_argument);
}

TEST_CASE("model covariance closed forms") {
  const Codebook cb = gen_sphere_uniform(6, 12, 1);
  const double sigma2 = 0.4;

  arma::vec zero(12, arma::fill::zeros);
  const arma::cx_mat noise_only = model_covariance(cb, zero, sigma2).mat();
  CHECK(arma::norm(noise_only - sigma2 * arma::eye<arma::cx_mat>(6, 6),
                   "fro") < 1e-14);

  // single active column: trace = g*D + sigma2*D
  arma::vec single = zero;
  single(4) = 1.7;
  const arma::cx_mat sig = model_covariance(cb, single, sigma2).mat();
  CHECK(arma::trace(sig).real() ==
        doctest::Approx(1.7 * 6 + sigma2 * 6).epsilon(1e-12));

  // full DFT with gamma = 1: A A^* = D I
  const Codebook dft = gen_subsampled_fourier(8, 8, 2);
  const arma::cx_mat full =
      model_covariance(dft, arma::vec(8, arma::fill::ones), sigma2).mat();
  CHECK(arma::norm(full - (8.0 + sigma2) * arma::eye<arma::cx_mat>(8, 8),
                   "fro") < 1e-10);

  arma::vec negative = zero;
  negative(0) = -0.1;
  CHECK_THROWS_AS(model_covariance(cb, negative, sigma2),
                  std::invalid_argument);
}

TEST_CASE("screening statistic closed forms and loop oracle") {
  const Codebook cb = gen_sphere_uniform(6, 20, 3);

  const HermitianMatrix eye(arma::eye<arma::cx_mat>(6, 6));
  const ScreeningStatistic flat = screening_statistic(cb, eye);
  for (arma::uword k = 0; k < 20; ++k) {
    CHECK(flat.values(k) == doctest::Approx(6.0).epsilon(1e-10));
  }

  // rank-one covariance from column 1 of a full DFT: D^2 on that index,
  // 0 elsewhere
  const Codebook dft = gen_subsampled_fourier(8, 8, 4);
  const arma::cx_vec a1 = dft.entries.col(1);
  const ScreeningStatistic spiked =
      screening_statistic(dft, HermitianMatrix(a1 * a1.t()));
  for (arma::uword k = 0; k < 8; ++k) {
    CHECK(spiked.values(k) ==
          doctest::Approx(k == 1 ? 64.0 : 0.0).epsilon(1e-9));
  }

  const HermitianMatrix random(random_hermitian(6, 11));
  const ScreeningStatistic stat = screening_statistic(cb, random);
  for (arma::uword k = 0; k < 20; ++k) {
    CHECK(stat.values(k) ==
          doctest::Approx(statistic_loops(cb, random.mat(), k)).epsilon(1e-10));
  }
  CHECK(stat.mean == doctest::Approx(arma::mean(stat.values)).epsilon(1e-12));
}

TEST_CASE("raw-block and covariance screening paths agree to 1e-9") {
  const Codebook cb = gen_sphere_uniform(16, 64, 7);
  const ActivityVector act = build_activity({{3, 1.0}, {40, 2.0}}, 64);

  // M < D exercises the projection path inside the block overload
  const ReceivedBlock small = simulate_block(cb, act, 8, 0.5, 100);
  const ScreeningStatistic raw = screening_statistic(cb, small);
  const ScreeningStatistic cov =
      screening_statistic(cb, sample_covariance(small));
  for (arma::uword k = 0; k < 64; ++k) {
    CHECK(std::abs(raw.values(k) - cov.values(k)) <=
          1e-9 * std::max(1.0, std::abs(cov.values(k))));
  }

  // M >= D: the overload defers to the covariance path; compare against an
  // independent projection-formula evaluation
  const ReceivedBlock big = simulate_block(cb, act, 32, 0.5, 101);
  const ScreeningStatistic picked = screening_statistic(cb, big);
  const arma::cx_mat proj = big.samples.t() * cb.entries;
  for (arma::uword k = 0; k < 64; ++k) {
    const double direct =
        std::pow(arma::norm(proj.col(k)), 2) / double(big.antennas());
    CHECK(std::abs(picked.values(k) - direct) <=
          1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("lifted adjoint equals the materialized lift product") {
  for (auto gen : {gen_subsampled_fourier, gen_sphere_uniform, gen_bernoulli}) {
    const Codebook cb = gen(8, 32, 13);
    const HermitianMatrix sigma(random_hermitian(8, 17));
    const double sigma2 = 0.3;

    const arma::vec fast = lifted_adjoint(cb, sigma, sigma2);

    const arma::cx_mat lift = oracle::materialized_lift(cb);
    arma::cx_mat centered = sigma.mat();
    centered.diag() -= sigma2;
    const arma::cx_vec u = arma::vectorise(centered);
    const arma::cx_vec slow = lift.t() * u;
    for (arma::uword k = 0; k < 32; ++k) {
      CHECK(std::abs(fast(k) - slow(k).real()) <=
            1e-9 * std::max(1.0, std::abs(slow(k).real())));
      CHECK(std::abs(slow(k).imag()) <=
            1e-9 * std::max(1.0, std::abs(slow(k).real())));
    }
  }
}

TEST_CASE("lifted adjoint trivial cases") {
  const Codebook cb = gen_sphere_uniform(6, 10, 19);
  const HermitianMatrix noise(0.7 * arma::eye<arma::cx_mat>(6, 6));
  CHECK(arma::norm(lifted_adjoint(cb, noise, 0.7)) < 1e-12);

  // exact orthogonal covariance: adjoint = D^2 gamma
  const Codebook dft = gen_subsampled_fourier(8, 8, 20);
  arma::vec gamma(8, arma::fill::zeros);
  gamma(2) = 1.5;
  gamma(5) = 0.25;
  const HermitianMatrix sigma = model_covariance(dft, gamma, 0.9);
  const arma::vec adj = lifted_adjoint(dft, sigma, 0.9);
  CHECK(arma::norm(adj - 64.0 * gamma) < 1e-9);
}

TEST_CASE("expected statistic closed forms") {
  const auto [psi0, flat] = expected_statistic(8, arma::vec(4, arma::fill::zeros), 0.5);
  CHECK(psi0 == doctest::Approx(4.0).epsilon(1e-12));  // D sigma2
  for (arma::uword k = 0; k < 4; ++k) {
    CHECK(flat(k) == doctest::Approx(4.0).epsilon(1e-12));
  }

  arma::vec single(4, arma::fill::zeros);
  single(2) = 1.0;
  const auto [psi, expected] = expected_statistic(8, single, 0.0);
  CHECK(psi == doctest::Approx(64.0 / 9.0).epsilon(1e-12));
  CHECK(expected(2) == doctest::Approx(64.0 / 9.0 + 64.0).epsilon(1e-12));
  CHECK(expected(0) == doctest::Approx(64.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("screening statistic mean over the sphere ensemble") {
  // Independent derivation of E[Y_k] for i.i.d. sphere columns:
  //   off support: E[Y_k] = E[tr Sigma_hat] = D sum(gamma) + D sigma2
  //     (a_k independent of Sigma_hat; off-diagonal phase terms vanish),
  //   on support:  + (D^2 - D) gamma_k
  //     (|<a_k,a_k>|^2 = D^2 replaces one cross term E|<a_k,a_l>|^2 = D).
  // The published two-branch closed form in expected_statistic() replaces the
  // cross-vector moment E|a_{k,i}|^2 |a_{l,i}|^2 = 1 (independence) with the
  // same-vector value D/(D+1), so it sits ~1/D below these values; the
  // acceptance suite records that discrepancy against the stated criterion.
  const arma::uword D = 8, N = 32, M = 4000;
  const double sigma2 = 0.5;
  const int trials = 300;
  arma::vec gamma(N, arma::fill::zeros);
  gamma(0) = 1.0;
  gamma(1) = 1.0;

  arma::vec mean(N, arma::fill::zeros);
  for (int t = 0; t < trials; ++t) {
    const Codebook cb = gen_sphere_uniform(D, N, 9000 + t);  // fresh ensemble
    const ActivityVector act = build_activity({{0, 1.0}, {1, 1.0}}, N);
    const ReceivedBlock blk = simulate_block(cb, act, M, sigma2, 500 + t);
    mean += screening_statistic(cb, sample_covariance(blk)).values;
  }
  mean /= trials;

  const double Dd = double(D);
  const double psi_true = Dd * arma::accu(gamma) + Dd * sigma2;      // 20
  const double on_true = psi_true + (Dd * Dd - Dd) * 1.0;            // 76
  CHECK(mean(0) == doctest::Approx(on_true).epsilon(0.03));
  CHECK(mean(1) == doctest::Approx(on_true).epsilon(0.03));
  double off = 0.0;
  for (arma::uword k = 2; k < N; ++k) off += mean(k);
  off /= double(N - 2);
  CHECK(off == doctest::Approx(psi_true).epsilon(0.03));

  // The published formula undershoots off support by exactly D/(D+1) on the
  // signal part: check the characterized gap rather than agreement.
  const auto [psi_paper, expected_paper] = expected_statistic(D, gamma, sigma2);
  CHECK(psi_paper - Dd * sigma2 ==
        doctest::Approx((psi_true - Dd * sigma2) * Dd / (Dd + 1.0)).epsilon(1e-12));
  CHECK(psi_paper < off);
  CHECK(expected_paper(0) > on_true);  // overshoots on support (D^2 vs D^2 - D)
}

TEST_CASE("sampling error shrinks like 1/sqrt(M)") {
  const arma::uword D = 8, N = 16;
  const double sigma2 = 0.5;
  const Codebook cb = gen_sphere_uniform(D, N, 33);
  const ActivityVector act = build_activity({{2, 1.0}, {9, 1.0}}, N);
  const HermitianMatrix model = model_covariance(cb, act.gamma, sigma2);

  std::vector<double> medians;
  for (arma::uword M : {64, 256, 1024}) {
    std::vector<double> scaled;
    for (int t = 0; t < 100; ++t) {
      const ReceivedBlock blk =
          simulate_block(cb, act, M, sigma2, 7000 + t);
      const double err =
          arma::norm(sample_covariance(blk).mat() - model.mat(), "fro");
      scaled.push_back(std::sqrt(double(M)) * err);
    }
    std::nth_element(scaled.begin(), scaled.begin() + 50, scaled.end());
    medians.push_back(scaled[50]);
  }
  const double lo = *std::min_element(medians.begin(), medians.end());
  const double hi = *std::max_element(medians.begin(), medians.end());
  CHECK(hi / lo < 1.35);  // roughly M-invariant
  CHECK(hi < 100.0);
}
