// Common codebook matrices: every potential user signals by picking one
// column of a shared D x N matrix A with ||a_k||^2 = D.
#pragma once

#include <armadillo>
#include <cstdint>
#include <utility>

namespace ura {

enum class CodebookKind : std::uint64_t {
  SubsampledFourier = 0,
  SphereUniform = 1,
  Bernoulli = 2,
};

const char* to_string(CodebookKind kind);
CodebookKind codebook_kind_from_string(const std::string& name);

struct Codebook {
  arma::cx_mat entries;  // D x N, column k is codeword a_k
  CodebookKind kind = CodebookKind::SubsampledFourier;
  std::uint64_t seed = 0;

  arma::uword rows() const { return entries.n_rows; }  // D
  arma::uword cols() const { return entries.n_cols; }  // N
};

struct CoherenceReport {
  double mu = 0.0;  // max_{k != l} |<a_k, a_l>| / (||a_k|| ||a_l||)
  std::pair<arma::uword, arma::uword> argmax_pair{0, 0};
  double bound_sphere = 0.0;     // sqrt(32 log(DN) / D)
  double bound_bernoulli = 0.0;  // 2 sqrt(log(N / 0.05) / D)
};

// Failure probability used for the Bernoulli coherence bound shown in
// CoherenceReport.
inline constexpr double kBernoulliBoundEps = 0.05;

// D distinct rows of the N-point DFT, unit-modulus entries, rows chosen
// uniformly without replacement and stored in ascending order. Row sets that
// would produce duplicate columns (all selected rows sharing a factor with N)
// are redrawn.
Codebook gen_subsampled_fourier(arma::uword D, arma::uword N, std::uint64_t seed);

// Columns i.i.d. uniform on the complex sphere of radius sqrt(D).
Codebook gen_sphere_uniform(arma::uword D, arma::uword N, std::uint64_t seed);

// Real +-1 entries, equiprobable; duplicate columns are redrawn, so N must
// not exceed 2^D.
Codebook gen_bernoulli(arma::uword D, arma::uword N, std::uint64_t seed);

// Exhaustive pair scan; requires N >= 2.
CoherenceReport mutual_coherence(const Codebook& cb);

}  // namespace ura
