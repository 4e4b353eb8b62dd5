// Binary file formats for codebooks and received blocks, plus small CSV
// helpers. All integers and doubles are little-endian on disk.
//
// Codebook file layout:
//   bytes 0..7    magic "URACBK\0\0"
//   bytes 8..11   format version (u32), currently 1
//   bytes 12..15  reserved, zero
//   4 x u64       D, N, kind, seed
//   D*N pairs     row-major interleaved (re, im) float64
//
// Received-block file layout:
//   u64 D, u64 M, f64 sigma2, then D*M row-major interleaved (re, im) f64.
#pragma once

#include <iosfwd>
#include <string>

#include "ura/channel.hpp"
#include "ura/codebook.hpp"

namespace ura {

void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

void save_block(const ReceivedBlock& blk, const std::string& path);
ReceivedBlock load_block(const std::string& path);

// RFC-4180 field quoting: wraps in quotes when the field contains a comma,
// quote or newline, doubling embedded quotes.
std::string csv_quote(const std::string& field);

// Shortest round-trip decimal form of a double, locale-independent.
std::string format_double(double v);

}  // namespace ura
