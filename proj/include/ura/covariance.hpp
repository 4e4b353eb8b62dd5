// Sample/model covariance construction and the quadratic-form kernels
// a_k^* Sigma a_k shared by every decoder. The lifted D^2 x N dictionary is
// never materialized here; quadratic forms stand in for it.
#pragma once

#include <armadillo>
#include <utility>

#include "ura/channel.hpp"
#include "ura/codebook.hpp"

namespace ura {

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  // Symmetrizes to (M + M^*)/2; rejects non-square input.
  explicit HermitianMatrix(arma::cx_mat m);

  const arma::cx_mat& mat() const { return mat_; }
  arma::uword dim() const { return mat_.n_rows; }

 private:
  arma::cx_mat mat_;
};

struct ScreeningStatistic {
  arma::vec values;   // Y_k = a_k^* Sigma_hat a_k
  double mean = 0.0;  // (1/N) sum_k Y_k
};

// (1/M) Y Y^*.
HermitianMatrix sample_covariance(const ReceivedBlock& blk);

// A diag(gamma) A^* + sigma2 I; gamma must be elementwise nonnegative.
HermitianMatrix model_covariance(const Codebook& cb, const arma::vec& gamma,
                                 double sigma2);

// Covariance-domain path, O(N D^2).
ScreeningStatistic screening_statistic(const Codebook& cb,
                                       const HermitianMatrix& sigmahat);

// Raw-block path ||Y^* a_k||^2 / M, O(N D M); chosen automatically when it is
// cheaper (M < D), otherwise defers to the covariance path. Both paths agree
// to 1e-9 relative.
ScreeningStatistic screening_statistic(const Codebook& cb,
                                       const ReceivedBlock& blk);

// Adjoint of the lifted dictionary applied to u = vec(Sigma_hat - sigma2 I):
// component k equals Y_k - sigma2 * D for unit-energy-per-dimension columns.
arma::vec lifted_adjoint(const Codebook& cb, const HermitianMatrix& sigmahat,
                         double sigma2);

// Closed-form E[Y_k] for sphere-uniform codebooks: psi off support,
// psi + D^2 gamma_k on support, psi = sum_l D^2/(D+1) gamma_l + D sigma2.
std::pair<double, arma::vec> expected_statistic(arma::uword D,
                                                const arma::vec& gamma,
                                                double sigma2);

}  // namespace ura
