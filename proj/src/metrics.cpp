#include "ura/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace ura {

namespace {

std::vector<Message> sorted_unique(std::vector<Message> msgs) {
  std::sort(msgs.begin(), msgs.end());
  msgs.erase(std::unique(msgs.begin(), msgs.end()), msgs.end());
  return msgs;
}

}  // namespace

DecodingReport pupe(const std::vector<Message>& decoded,
                    const std::vector<Message>& truth) {
  if (truth.empty()) {
    throw std::invalid_argument("pupe: truth set must be nonempty");
  }

  DecodingReport rep;
  rep.decoded = sorted_unique(decoded);
  rep.truth = sorted_unique(truth);

  std::vector<Message> common;
  std::set_intersection(rep.decoded.begin(), rep.decoded.end(),
                        rep.truth.begin(), rep.truth.end(),
                        std::back_inserter(common));
  rep.hits = common.size();

  const double K = static_cast<double>(rep.truth.size());
  const double Kr = static_cast<double>(rep.decoded.size());
  rep.p_md = 1.0 - static_cast<double>(rep.hits) / K;
  rep.p_fa = rep.decoded.empty()
                 ? 0.0
                 : static_cast<double>(rep.decoded.size() - rep.hits) / Kr;
  rep.p_e = rep.p_md + rep.p_fa;
  return rep;
}

}  // namespace ura
