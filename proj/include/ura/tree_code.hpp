// Outer tree code: B information bits split across L sections of J coded
// bits each, with per-section parity linking a section to everything before
// it. The list decoder stitches per-section candidate lists back into full
// messages.
#pragma once

#include <cstdint>
#include <vector>

namespace ura {

// One message bit per element, 0/1, index 0 is the first (most significant)
// information bit.
using Message = std::vector<std::uint8_t>;

struct TreeCodeConfig {
  int total_info_bits = 0;  // B
  int sections = 0;         // L
  int section_bits = 0;     // J
  std::vector<int> info_bits;    // b_l, b_l = J - p_l
  std::vector<int> parity_bits;  // p_l, p_1 = 0
  // G_l for section l (l >= 1, 0-based): one packed row per parity bit,
  // row bit i multiplies info bit i of the message prefix.
  std::vector<std::vector<std::vector<std::uint64_t>>> parity_rows;
  std::uint64_t seed = 0;

  std::uint32_t codebook_cols() const { return std::uint32_t{1} << section_bits; }
  int prefix_bits(int section) const;  // m_l, info bits before `section`
};

struct MessageTuple {
  Message info;
  std::vector<std::uint32_t> sections;  // pi_l, J-bit values, info bits first
};

// Per-section candidate lists; entries within a list are distinct.
using SectionLists = std::vector<std::vector<std::uint32_t>>;

// parity_alloc holds p_1..p_L. G_l entries are i.i.d. fair coins drawn from
// `seed`; the matrices are never stored on disk, only regenerated.
TreeCodeConfig make_tree_config(int B, int L, int J,
                                const std::vector<int>& parity_alloc,
                                std::uint64_t seed);

MessageTuple tree_encode(const Message& info, const TreeCodeConfig& cfg);

// Depth-first path search with parity pruning at each section. Surviving
// messages are emitted in lexicographic path order (list order per section)
// and truncated to max_out.
std::vector<Message> tree_decode(const SectionLists& lists,
                                 const TreeCodeConfig& cfg,
                                 std::size_t max_out);

}  // namespace ura
