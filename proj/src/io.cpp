#include "ura/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ura {

namespace {

constexpr std::array<char, 8> kCodebookMagic = {'U', 'R', 'A', 'C',
                                                'B', 'K', 0, 0};
constexpr std::uint32_t kCodebookVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "file writers assume a little-endian host");

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("file ended unexpectedly");
  return value;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

void write_matrix_row_major(std::ostream& out, const arma::cx_mat& m) {
  for (arma::uword i = 0; i < m.n_rows; ++i) {
    for (arma::uword j = 0; j < m.n_cols; ++j) {
      write_le(out, m(i, j).real());
      write_le(out, m(i, j).imag());
    }
  }
}

void read_matrix_row_major(std::istream& in, arma::cx_mat& m) {
  for (arma::uword i = 0; i < m.n_rows; ++i) {
    for (arma::uword j = 0; j < m.n_cols; ++j) {
      const double re = read_le<double>(in);
      const double im = read_le<double>(in);
      m(i, j) = {re, im};
    }
  }
}

}  // namespace

void save_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream out = open_out(path);
  out.write(kCodebookMagic.data(), kCodebookMagic.size());
  write_le(out, kCodebookVersion);
  write_le(out, std::uint32_t{0});  // reserved
  write_le(out, static_cast<std::uint64_t>(cb.rows()));
  write_le(out, static_cast<std::uint64_t>(cb.cols()));
  write_le(out, static_cast<std::uint64_t>(cb.kind));
  write_le(out, cb.seed);
  write_matrix_row_major(out, cb.entries);
  if (!out) throw std::runtime_error("short write: " + path);
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in = open_in(path);
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kCodebookMagic) {
    throw std::runtime_error("not a codebook file: " + path);
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kCodebookVersion) {
    throw std::runtime_error("unsupported codebook file version: " +
                             std::to_string(version));
  }
  read_le<std::uint32_t>(in);  // reserved
  const auto D = read_le<std::uint64_t>(in);
  const auto N = read_le<std::uint64_t>(in);
  const auto kind = read_le<std::uint64_t>(in);
  const auto seed = read_le<std::uint64_t>(in);
  if (kind > static_cast<std::uint64_t>(CodebookKind::Bernoulli)) {
    throw std::runtime_error("codebook file carries an unknown kind");
  }
  if (D == 0 || N == 0 || D > (1u << 20) || N > (1u << 26)) {
    throw std::runtime_error("codebook file dimensions are implausible");
  }

  Codebook cb;
  cb.kind = static_cast<CodebookKind>(kind);
  cb.seed = seed;
  cb.entries.set_size(D, N);
  read_matrix_row_major(in, cb.entries);
  return cb;
}

void save_block(const ReceivedBlock& blk, const std::string& path) {
  std::ofstream out = open_out(path);
  write_le(out, static_cast<std::uint64_t>(blk.rows()));
  write_le(out, static_cast<std::uint64_t>(blk.antennas()));
  write_le(out, blk.sigma2);
  write_matrix_row_major(out, blk.samples);
  if (!out) throw std::runtime_error("short write: " + path);
}

ReceivedBlock load_block(const std::string& path) {
  std::ifstream in = open_in(path);
  const auto D = read_le<std::uint64_t>(in);
  const auto M = read_le<std::uint64_t>(in);
  const double sigma2 = read_le<double>(in);
  if (D == 0 || M == 0 || D > (1u << 20) || M > (1u << 26)) {
    throw std::runtime_error("block file dimensions are implausible");
  }
  if (sigma2 <= 0.0) {
    throw std::runtime_error("block file carries a nonpositive sigma2");
  }
  ReceivedBlock blk;
  blk.sigma2 = sigma2;
  blk.samples.set_size(D, M);
  read_matrix_row_major(in, blk.samples);
  return blk;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    quoted += c;
    if (c == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace ura
