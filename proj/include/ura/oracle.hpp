// Brute-force and statistical oracles. Slow by design, hard-capped to small
// instances, and kept apart from the production kernels they cross-check.
#pragma once

#include <armadillo>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ura/codebook.hpp"
#include "ura/covariance.hpp"

namespace ura::oracle {

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleBudget {
  arma::uword max_cols = 64;          // N cap for materialization / search
  arma::uword max_subset = 4;         // min(K, N-K) cap for subset search
  std::size_t min_samples = 10000;    // Monte Carlo moment floor
  std::size_t max_subset_evals = 700000;  // ~C(64,4)
};

struct MomentEstimate {
  double m4 = 0.0;   // E |a_i|^4
  double m4_se = 0.0;
  double m22 = 0.0;  // E |a_i|^2 |a_j|^2, i != j (0 when D = 1: no pairs)
  double m22_se = 0.0;
  std::size_t samples = 0;
};

// Empirical fourth moments of sphere-uniform columns of radius sqrt(D),
// averaged over coordinates per draw; closed forms are 2D/(D+1) and D/(D+1).
MomentEstimate moment_oracle(arma::uword D, std::size_t samples,
                             std::uint64_t seed,
                             const OracleBudget& budget = {});

// The K-subset minimizing min_{gamma >= 0 on S} ||Sigma(gamma) - Sigma_hat||_F,
// enumerated in lexicographic order (ties keep the first). Inner problems are
// solved by the restricted NNLS coordinate solver run to 1e-10.
std::vector<arma::uword> brute_force_support(const Codebook& cb,
                                             const HermitianMatrix& sigmahat,
                                             double sigma2, arma::uword K,
                                             const OracleBudget& budget = {});

// Dense D^2 x N lifted dictionary, column k = vec(a_k a_k^*).
arma::cx_mat materialized_lift(const Codebook& cb,
                               const OracleBudget& budget = {});

}  // namespace ura::oracle
