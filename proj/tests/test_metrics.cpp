#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ura/metrics.hpp"
#include "ura/rng.hpp"

using namespace ura;

namespace {

Message msg(std::initializer_list<int> bits) {
  Message m;
  for (int b : bits) m.push_back(static_cast<std::uint8_t>(b));
  return m;
}

}  // namespace

TEST_CASE("perfect decoding scores zero everywhere") {
  const std::vector<Message> truth{msg({0, 0}), msg({0, 1}), msg({1, 0})};
  const DecodingReport rep = pupe(truth, truth);
  CHECK(rep.p_md == 0.0);
  CHECK(rep.p_fa == 0.0);
  CHECK(rep.p_e == 0.0);
  CHECK(rep.hits == 3);
}

TEST_CASE("one miss and one false alarm") {
  const std::vector<Message> truth{msg({0, 0}), msg({0, 1}), msg({1, 0})};
  const std::vector<Message> decoded{msg({0, 0}), msg({0, 1}), msg({1, 1})};
  const DecodingReport rep = pupe(decoded, truth);
  CHECK(rep.p_md == doctest::Approx(1.0 / 3.0));
  CHECK(rep.p_fa == doctest::Approx(1.0 / 3.0));
  CHECK(rep.p_e == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("empty decoding uses the K_r = 0 convention") {
  const std::vector<Message> truth{msg({0}), msg({1})};
  const DecodingReport rep = pupe({}, truth);
  CHECK(rep.p_md == 1.0);
  CHECK(rep.p_fa == 0.0);
  CHECK(rep.p_e == 1.0);
}

TEST_CASE("empty truth is rejected") {
  CHECK_THROWS_AS(pupe({msg({1})}, {}), std::invalid_argument);
}

TEST_CASE("adding a correct message never hurts, adding junk never helps") {
  rng::Engine eng = rng::make_engine(1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Message> truth;
    for (int i = 0; i < 6; ++i) {
      Message m(8);
      for (auto& b : m) b = rng::coin(eng) ? 1 : 0;
      truth.push_back(m);
    }
    std::sort(truth.begin(), truth.end());
    truth.erase(std::unique(truth.begin(), truth.end()), truth.end());

    std::vector<Message> decoded(truth.begin(),
                                 truth.begin() + truth.size() / 2);
    const DecodingReport base = pupe(decoded, truth);

    // add one more correct message
    decoded.push_back(truth.back());
    const DecodingReport more_correct = pupe(decoded, truth);
    CHECK(more_correct.p_md <= base.p_md);

    // add a junk message (9 bits never collides with 8-bit truth)
    decoded.push_back(Message(9, 1));
    const DecodingReport more_junk = pupe(decoded, truth);
    CHECK(more_junk.p_fa >= more_correct.p_fa);
  }
}

TEST_CASE("PUPE is permutation invariant") {
  std::vector<Message> truth{msg({0, 0}), msg({0, 1}), msg({1, 0})};
  std::vector<Message> decoded{msg({1, 0}), msg({1, 1}), msg({0, 0})};
  const DecodingReport fwd = pupe(decoded, truth);
  std::reverse(truth.begin(), truth.end());
  std::reverse(decoded.begin(), decoded.end());
  const DecodingReport rev = pupe(decoded, truth);
  CHECK(fwd.p_md == rev.p_md);
  CHECK(fwd.p_fa == rev.p_fa);
  CHECK(fwd.p_e == rev.p_e);
}

TEST_CASE("duplicates in the input collapse") {
  const std::vector<Message> truth{msg({1, 1}), msg({1, 1}), msg({0, 0})};
  const std::vector<Message> decoded{msg({1, 1}), msg({1, 1})};
  const DecodingReport rep = pupe(decoded, truth);
  CHECK(rep.truth.size() == 2);
  CHECK(rep.decoded.size() == 1);
  CHECK(rep.p_md == doctest::Approx(0.5));
  CHECK(rep.p_fa == 0.0);
}
