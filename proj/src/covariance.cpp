#include "ura/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace ura {

HermitianMatrix::HermitianMatrix(arma::cx_mat m) {
  if (m.n_rows != m.n_cols) {
    throw std::invalid_argument("HermitianMatrix: matrix must be square");
  }
  mat_ = 0.5 * (m + m.t());
}

HermitianMatrix sample_covariance(const ReceivedBlock& blk) {
  const double M = static_cast<double>(blk.antennas());
  return HermitianMatrix(blk.samples * blk.samples.t() / M);
}

HermitianMatrix model_covariance(const Codebook& cb, const arma::vec& gamma,
                                 double sigma2) {
  const arma::uword D = cb.rows();
  const arma::uword N = cb.cols();
  if (gamma.n_elem != N) {
    throw std::invalid_argument("model_covariance: gamma length must equal N");
  }
  if (gamma.min() < 0.0) {
    throw std::invalid_argument("model_covariance: gamma must be nonnegative");
  }

  arma::uvec supp = arma::find(gamma > 0.0);
  arma::cx_mat sigma(D, D, arma::fill::zeros);
  sigma.diag() += sigma2;
  if (!supp.empty()) {
    arma::cx_mat cols = cb.entries.cols(supp);
    for (arma::uword s = 0; s < supp.n_elem; ++s) {
      cols.col(s) *= std::sqrt(gamma(supp(s)));
    }
    sigma += cols * cols.t();
  }
  return HermitianMatrix(std::move(sigma));
}

namespace {

ScreeningStatistic finalize_statistic(arma::vec values) {
  ScreeningStatistic stat;
  stat.mean = arma::mean(values);
  stat.values = std::move(values);
  return stat;
}

}  // namespace

ScreeningStatistic screening_statistic(const Codebook& cb,
                                       const HermitianMatrix& sigmahat) {
  if (sigmahat.dim() != cb.rows()) {
    throw std::invalid_argument("screening_statistic: dimension mismatch");
  }
  const arma::cx_mat prod = sigmahat.mat() * cb.entries;
  const arma::cx_rowvec forms = arma::sum(arma::conj(cb.entries) % prod, 0);
  arma::vec values(cb.cols());
  for (arma::uword k = 0; k < cb.cols(); ++k) {
    const double re = forms(k).real();
    const double im = forms(k).imag();
    // Hermitian input makes the quadratic form real; anything else is a bug.
    if (std::abs(im) > 1e-9 * std::max(1.0, std::abs(re))) {
      throw std::logic_error("screening_statistic: quadratic form not real");
    }
    values(k) = re;
  }
  return finalize_statistic(std::move(values));
}

ScreeningStatistic screening_statistic(const Codebook& cb,
                                       const ReceivedBlock& blk) {
  if (blk.rows() != cb.rows()) {
    throw std::invalid_argument("screening_statistic: dimension mismatch");
  }
  if (blk.antennas() >= blk.rows()) {
    return screening_statistic(cb, sample_covariance(blk));
  }
  // M < D: ||Y^* a_k||^2 / M is the cheaper route to the same numbers.
  const arma::cx_mat proj = blk.samples.t() * cb.entries;  // M x N
  arma::vec values =
      arma::sum(arma::square(arma::abs(proj)), 0).t() /
      static_cast<double>(blk.antennas());
  return finalize_statistic(std::move(values));
}

arma::vec lifted_adjoint(const Codebook& cb, const HermitianMatrix& sigmahat,
                         double sigma2) {
  // A_k^* u = Y_k - sigma2 * ||a_k||^2 with ||a_k||^2 = D for all generators.
  const ScreeningStatistic stat = screening_statistic(cb, sigmahat);
  return stat.values - sigma2 * static_cast<double>(cb.rows());
}

std::pair<double, arma::vec> expected_statistic(arma::uword D,
                                                const arma::vec& gamma,
                                                double sigma2) {
  if (gamma.n_elem == 0) {
    throw std::invalid_argument("expected_statistic: gamma must be nonempty");
  }
  if (gamma.min() < 0.0) {
    throw std::invalid_argument("expected_statistic: gamma must be nonnegative");
  }
  const double Dd = static_cast<double>(D);
  const double psi = Dd * Dd / (Dd + 1.0) * arma::accu(gamma) + Dd * sigma2;
  arma::vec expected(gamma.n_elem);
  for (arma::uword k = 0; k < gamma.n_elem; ++k) {
    expected(k) = gamma(k) > 0.0 ? psi + Dd * Dd * gamma(k) : psi;
  }
  return {psi, std::move(expected)};
}

}  // namespace ura
