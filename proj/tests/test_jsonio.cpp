#include <doctest.h>

#include <cmath>

#include "trinet/json_io.hpp"
#include "trinet/rng.hpp"

using namespace trinet;

TEST_CASE("distribution round trip") {
  const auto d = w_dist(Visibility(3, 7));
  const auto j = jsonio::to_json(d);
  const auto back = jsonio::distribution_from_json(j);
  for (int i = 0; i < 8; ++i) CHECK(back[i] == d[i]);

  auto bad = j;
  bad["p"] = {0.5, 0.5};
  CHECK_THROWS(jsonio::distribution_from_json(bad));
}

TEST_CASE("local model round trip") {
  const LocalModel m = appendix_b_model();
  const LocalModel back = jsonio::local_model_from_json(jsonio::to_json(m));
  CHECK(l2_distance(evaluate(back), evaluate(m)) == 0.0);
  CHECK(back.card_alpha() == 3);
  CHECK(back.pb.cols == 3);
}

TEST_CASE("model params round trip") {
  const ModelParams p{0.3, 0.7, 0.55, -1.2, 2.4};
  const ModelParams back = jsonio::params_from_json(jsonio::to_json(p));
  CHECK(back.p0 == p.p0);
  CHECK(back.theta1 == p.theta1);
}

TEST_CASE("tester round trip preserves elements exactly") {
  Rng rng(101);
  const Tester t = random_tester(3, 2, 2, rng);
  const Tester back = jsonio::tester_from_json(jsonio::to_json(t));
  CHECK(back.d_in == t.d_in);
  CHECK(back.d_out == t.d_out);
  for (std::size_t o = 0; o < t.elements.size(); ++o) {
    ComplexMatrix diff = back.elements[o];
    diff -= t.elements[o];
    CHECK(diff.max_abs() == 0.0);  // doubles survive JSON round trips
  }
  CHECK(is_valid(back, 1e-9));
}
