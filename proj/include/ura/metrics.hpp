// Per-user probability of error: miss detections plus false alarms over the
// unordered decoded message set.
#pragma once

#include <cstddef>
#include <vector>

#include "ura/tree_code.hpp"

namespace ura {

struct DecodingReport {
  std::vector<Message> decoded;  // deduplicated
  std::vector<Message> truth;    // deduplicated
  std::size_t hits = 0;          // |decoded intersect truth|
  double p_md = 0.0;
  double p_fa = 0.0;
  double p_e = 0.0;
};

// p_md = 1 - |T vs W| / K, p_fa = |T \ W| / K_r (0 when nothing was decoded),
// p_e = p_md + p_fa. Throws on an empty truth set.
DecodingReport pupe(const std::vector<Message>& decoded,
                    const std::vector<Message>& truth);

}  // namespace ura
