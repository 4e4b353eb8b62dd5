#include "ura/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "ura/rng.hpp"

namespace ura {

namespace {

bool is_power_of_two(arma::uword n) { return n != 0 && (n & (n - 1)) == 0; }

void check_dims(arma::uword D, arma::uword N) {
  if (D < 1 || N < 1) {
    throw std::invalid_argument("codebook: D and N must be positive");
  }
}

}  // namespace

const char* to_string(CodebookKind kind) {
  switch (kind) {
    case CodebookKind::SubsampledFourier: return "fourier";
    case CodebookKind::SphereUniform: return "sphere";
    case CodebookKind::Bernoulli: return "bernoulli";
  }
  throw std::invalid_argument("codebook: unknown kind");
}

CodebookKind codebook_kind_from_string(const std::string& name) {
  if (name == "fourier") return CodebookKind::SubsampledFourier;
  if (name == "sphere") return CodebookKind::SphereUniform;
  if (name == "bernoulli") return CodebookKind::Bernoulli;
  throw std::invalid_argument("codebook: unknown kind '" + name + "'");
}

Codebook gen_subsampled_fourier(arma::uword D, arma::uword N, std::uint64_t seed) {
  check_dims(D, N);
  if (!is_power_of_two(N)) {
    throw std::invalid_argument("fourier codebook: N must be a power of two");
  }
  if (D > N) {
    throw std::invalid_argument("fourier codebook: D must not exceed N");
  }

  rng::Engine eng = rng::make_engine(seed);
  std::vector<arma::uword> pool(N);
  std::vector<arma::uword> rows;
  for (;;) {
    std::iota(pool.begin(), pool.end(), arma::uword{0});
    rows.clear();
    for (arma::uword i = 0; i < D; ++i) {  // partial Fisher-Yates
      const std::uint64_t j = i + rng::below(eng, N - i);
      std::swap(pool[i], pool[j]);
      rows.push_back(pool[i]);
    }
    if (N == 1) break;
    // Columns c, c' coincide iff every selected row is a multiple of
    // N / gcd(rows, N); gcd 1 rules that out.
    arma::uword g = N;
    for (arma::uword r : rows) g = std::gcd(g, r);
    if (g == 1) break;
  }
  std::sort(rows.begin(), rows.end());

  Codebook cb;
  cb.kind = CodebookKind::SubsampledFourier;
  cb.seed = seed;
  cb.entries.set_size(D, N);
  for (arma::uword c = 0; c < N; ++c) {
    for (arma::uword i = 0; i < D; ++i) {
      // exp(-2*pi*j * r*c / N), with r*c reduced mod N before the trig call
      const arma::uword rc = (rows[i] * c) % N;
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(rc) /
                           static_cast<double>(N);
      cb.entries(i, c) = std::polar(1.0, angle);
    }
  }
  return cb;
}

Codebook gen_sphere_uniform(arma::uword D, arma::uword N, std::uint64_t seed) {
  check_dims(D, N);
  rng::Engine eng = rng::make_engine(seed);

  Codebook cb;
  cb.kind = CodebookKind::SphereUniform;
  cb.seed = seed;
  cb.entries.set_size(D, N);
  arma::cx_vec col(D);
  const double radius = std::sqrt(static_cast<double>(D));
  for (arma::uword c = 0; c < N; ++c) {
    double nrm = 0.0;
    do {
      for (arma::uword i = 0; i < D; ++i) col(i) = rng::complex_gaussian(eng);
      nrm = arma::norm(col);
    } while (nrm < 1e-12);
    cb.entries.col(c) = col * (radius / nrm);
  }
  return cb;
}

Codebook gen_bernoulli(arma::uword D, arma::uword N, std::uint64_t seed) {
  check_dims(D, N);
  if (D < 64 && N > (arma::uword{1} << D)) {
    throw std::invalid_argument(
        "bernoulli codebook: N distinct +-1 columns need N <= 2^D");
  }
  rng::Engine eng = rng::make_engine(seed);

  Codebook cb;
  cb.kind = CodebookKind::Bernoulli;
  cb.seed = seed;
  cb.entries.set_size(D, N);
  std::unordered_set<std::string> seen;
  std::string key(D, '\0');
  for (arma::uword c = 0; c < N; ++c) {
    for (;;) {
      for (arma::uword i = 0; i < D; ++i) key[i] = rng::coin(eng) ? '+' : '-';
      if (seen.insert(key).second) break;
    }
    for (arma::uword i = 0; i < D; ++i) {
      cb.entries(i, c) = key[i] == '+' ? 1.0 : -1.0;
    }
  }
  return cb;
}

CoherenceReport mutual_coherence(const Codebook& cb) {
  const arma::uword D = cb.rows();
  const arma::uword N = cb.cols();
  if (N < 2) {
    throw std::invalid_argument("mutual_coherence: needs at least two columns");
  }

  const arma::vec norms = arma::sqrt(
      arma::real(arma::sum(arma::conj(cb.entries) % cb.entries, 0)).t());

  CoherenceReport rep;
  rep.mu = -1.0;
  const arma::uword block = 256;
  for (arma::uword l0 = 0; l0 < N; l0 += block) {
    const arma::uword l1 = std::min(l0 + block, N) - 1;
    const arma::cx_mat gram = cb.entries.t() * cb.entries.cols(l0, l1);
    for (arma::uword l = l0; l <= l1; ++l) {
      for (arma::uword k = 0; k < l; ++k) {
        const double v = std::abs(gram(k, l - l0)) / (norms(k) * norms(l));
        if (v > rep.mu) {
          rep.mu = v;
          rep.argmax_pair = {k, l};
        }
      }
    }
  }

  const double DN = static_cast<double>(D) * static_cast<double>(N);
  rep.bound_sphere = std::sqrt(32.0 * std::log(DN) / static_cast<double>(D));
  rep.bound_bernoulli = 2.0 * std::sqrt(
      std::log(static_cast<double>(N) / kBernoulliBoundEps) /
      static_cast<double>(D));
  return rep;
}

}  // namespace ura
