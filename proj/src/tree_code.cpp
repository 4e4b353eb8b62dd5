#include "ura/tree_code.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ura/rng.hpp"

namespace ura {

namespace {

constexpr int kWordBits = 64;

std::size_t words_for(int bits) {
  return static_cast<std::size_t>((bits + kWordBits - 1) / kWordBits);
}

void set_bit(std::vector<std::uint64_t>& words, int pos) {
  words[static_cast<std::size_t>(pos) / kWordBits] |=
      std::uint64_t{1} << (pos % kWordBits);
}

// Parity of <row, prefix> over GF(2); both packed with the same bit layout.
int parity_dot(const std::vector<std::uint64_t>& row,
               const std::vector<std::uint64_t>& prefix) {
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < row.size(); ++w) acc ^= row[w] & prefix[w];
  return std::popcount(acc) & 1;
}

}  // namespace

int TreeCodeConfig::prefix_bits(int section) const {
  int m = 0;
  for (int l = 0; l < section; ++l) m += info_bits[static_cast<std::size_t>(l)];
  return m;
}

TreeCodeConfig make_tree_config(int B, int L, int J,
                                const std::vector<int>& parity_alloc,
                                std::uint64_t seed) {
  if (B < 1 || L < 1 || J < 1 || J > 26) {
    throw std::invalid_argument("tree config: need B >= 1, L >= 1, 1 <= J <= 26");
  }
  if (parity_alloc.size() != static_cast<std::size_t>(L)) {
    throw std::invalid_argument("tree config: parity allocation must list all L sections");
  }
  if (parity_alloc[0] != 0) {
    throw std::invalid_argument("tree config: first section carries no parity (p_1 = 0)");
  }
  int info_sum = 0;
  for (int p : parity_alloc) {
    if (p < 0 || p > J) {
      throw std::invalid_argument("tree config: parity bits must lie in [0, J]");
    }
    info_sum += J - p;
  }
  if (info_sum != B) {
    throw std::invalid_argument(
        "tree config: info bits implied by allocation sum to " +
        std::to_string(info_sum) + ", expected B = " + std::to_string(B));
  }

  TreeCodeConfig cfg;
  cfg.total_info_bits = B;
  cfg.sections = L;
  cfg.section_bits = J;
  cfg.parity_bits = parity_alloc;
  cfg.info_bits.resize(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    cfg.info_bits[static_cast<std::size_t>(l)] = J - parity_alloc[static_cast<std::size_t>(l)];
  }
  cfg.seed = seed;

  // One packed 64-bit word stream per config; rows are drawn section by
  // section so the layout is reproducible from the seed alone.
  rng::Engine eng = rng::make_engine(seed, {0x6c74});
  cfg.parity_rows.resize(static_cast<std::size_t>(L));
  const std::size_t nwords = words_for(B);
  for (int l = 1; l < L; ++l) {
    const int p = cfg.parity_bits[static_cast<std::size_t>(l)];
    const int m = cfg.prefix_bits(l);
    auto& rows = cfg.parity_rows[static_cast<std::size_t>(l)];
    rows.resize(static_cast<std::size_t>(p));
    for (auto& row : rows) {
      row.assign(nwords, 0);
      for (std::size_t w = 0; w < words_for(m); ++w) row[w] = eng();
      // mask bits at positions >= m so popcount parity ignores them
      if (m % kWordBits != 0 && m > 0) {
        row[static_cast<std::size_t>(m - 1) / kWordBits] &=
            (std::uint64_t{1} << (m % kWordBits)) - 1;
      } else if (m == 0) {
        row.assign(nwords, 0);
      }
    }
  }
  return cfg;
}

MessageTuple tree_encode(const Message& info, const TreeCodeConfig& cfg) {
  if (info.size() != static_cast<std::size_t>(cfg.total_info_bits)) {
    throw std::invalid_argument("tree_encode: message must carry exactly B bits");
  }

  MessageTuple out;
  out.info = info;
  out.sections.resize(static_cast<std::size_t>(cfg.sections));

  std::vector<std::uint64_t> prefix(words_for(cfg.total_info_bits), 0);
  int offset = 0;
  for (int l = 0; l < cfg.sections; ++l) {
    const int b = cfg.info_bits[static_cast<std::size_t>(l)];
    const int p = cfg.parity_bits[static_cast<std::size_t>(l)];

    std::uint32_t value = 0;
    for (int i = 0; i < b; ++i) {
      value = (value << 1) | info[static_cast<std::size_t>(offset + i)];
    }
    for (int r = 0; r < p; ++r) {
      value = (value << 1) |
              static_cast<std::uint32_t>(parity_dot(
                  cfg.parity_rows[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)], prefix));
    }
    out.sections[static_cast<std::size_t>(l)] = value;

    for (int i = 0; i < b; ++i) {
      if (info[static_cast<std::size_t>(offset + i)]) set_bit(prefix, offset + i);
    }
    offset += b;
  }
  return out;
}

namespace {

struct DecodeState {
  const SectionLists* lists;
  const TreeCodeConfig* cfg;
  std::size_t max_out;
  std::vector<std::uint64_t> prefix;
  std::vector<Message>* out;
};

void extend(DecodeState& st, int section, int offset) {
  const TreeCodeConfig& cfg = *st.cfg;
  if (section == cfg.sections) {
    Message msg(static_cast<std::size_t>(cfg.total_info_bits), 0);
    for (int i = 0; i < cfg.total_info_bits; ++i) {
      msg[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
          (st.prefix[static_cast<std::size_t>(i) / kWordBits] >> (i % kWordBits)) & 1);
    }
    st.out->push_back(std::move(msg));
    return;
  }

  const int b = cfg.info_bits[static_cast<std::size_t>(section)];
  const int p = cfg.parity_bits[static_cast<std::size_t>(section)];
  const auto& rows = cfg.parity_rows[static_cast<std::size_t>(section)];
  for (std::uint32_t cand : (*st.lists)[static_cast<std::size_t>(section)]) {
    if (st.out->size() >= st.max_out) return;
    const std::uint32_t parity = cand & ((std::uint32_t{1} << p) - 1);
    std::uint32_t expected = 0;
    for (int r = 0; r < p; ++r) {
      expected = (expected << 1) |
                 static_cast<std::uint32_t>(parity_dot(rows[static_cast<std::size_t>(r)], st.prefix));
    }
    if (parity != expected) continue;

    const std::uint32_t chunk = cand >> p;
    for (int i = 0; i < b; ++i) {
      if ((chunk >> (b - 1 - i)) & 1) set_bit(st.prefix, offset + i);
    }
    extend(st, section + 1, offset + b);
    for (int i = 0; i < b; ++i) {  // undo
      if ((chunk >> (b - 1 - i)) & 1) {
        st.prefix[static_cast<std::size_t>(offset + i) / kWordBits] &=
            ~(std::uint64_t{1} << ((offset + i) % kWordBits));
      }
    }
  }
}

}  // namespace

std::vector<Message> tree_decode(const SectionLists& lists,
                                 const TreeCodeConfig& cfg,
                                 std::size_t max_out) {
  if (lists.size() != static_cast<std::size_t>(cfg.sections)) {
    throw std::invalid_argument("tree_decode: one candidate list per section required");
  }
  const std::uint32_t limit = cfg.codebook_cols();
  for (const auto& list : lists) {
    for (std::uint32_t cand : list) {
      if (cand >= limit) {
        throw std::invalid_argument("tree_decode: candidate outside [0, 2^J)");
      }
    }
  }

  std::vector<Message> out;
  if (max_out == 0) return out;
  DecodeState st{&lists, &cfg, max_out,
                 std::vector<std::uint64_t>(words_for(cfg.total_info_bits), 0), &out};
  extend(st, 0, 0);
  // Distinct surviving paths always carry distinct info bits (parity is a
  // function of the prefix), so no dedup pass is needed.
  return out;
}

}  // namespace ura
