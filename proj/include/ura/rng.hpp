// Deterministic random streams shared by the whole toolkit.
//
// Every stochastic component draws from an Engine seeded through derive_seed,
// so a master seed plus a stream path (trial index, section index, ...) pins
// the realization. Distribution sampling is implemented here instead of
// <random> distributions so results do not depend on the standard library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace ura::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for a sub-stream addressed by (master, path...). Successive path
// components are folded through mix64 so distinct paths give independent
// streams (collision scan is part of the test suite).
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master ^ 0x243f6a8885a308d3ULL);
  for (std::uint64_t p : path) {
    h = mix64(h ^ mix64(p + 0x452821e638d01377ULL));
  }
  return h;
}

inline Engine make_engine(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path = {}) {
  return Engine(derive_seed(master, path));
}

// Uniform in (0, 1]; never 0 so logs stay finite.
inline double uniform01(Engine& eng) {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

// Standard circularly-symmetric complex Gaussian, E|z|^2 = 1.
// |z|^2 ~ Exp(1) with uniform phase.
inline std::complex<double> complex_gaussian(Engine& eng) {
  const double r = std::sqrt(-std::log(uniform01(eng)));
  const double phi = 2.0 * std::numbers::pi * uniform01(eng);
  return {r * std::cos(phi), r * std::sin(phi)};
}

// Real N(0,1), Box-Muller (cosine branch only).
inline double gaussian(Engine& eng) {
  const double r = std::sqrt(-2.0 * std::log(uniform01(eng)));
  return r * std::cos(2.0 * std::numbers::pi * uniform01(eng));
}

inline bool coin(Engine& eng) { return (eng() >> 63) != 0; }

// Uniform in [0, n); unbiased via rejection.
inline std::uint64_t below(Engine& eng, std::uint64_t n) {
  const std::uint64_t lim = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= lim);
  return x % n;
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[below(eng, i)]);
  }
}

}  // namespace ura::rng
