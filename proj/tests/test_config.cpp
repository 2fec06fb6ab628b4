#include <doctest.h>

#include "bimoplan/config.hpp"
#include "bimoplan/errors.hpp"

using namespace bimoplan;

TEST_CASE("defaults match the documented detector parameters") {
  RunConfig c;
  CHECK(c.rate_hz == 30.0);
  CHECK(c.window_s == 1.0);
  CHECK(c.bins == 4);
  CHECK(c.theta_mi == 0.25);
  CHECK(c.theta_ci == 0.5);
  CHECK(c.theta_h == 0.5);
  CHECK(c.d_ho == 0.10);
  CHECK(c.d_oo == 0.05);
  CHECK(c.debounce_frames == 5);
}

TEST_CASE("emitted config reparses to an identical config") {
  RunConfig c;
  c.theta_mi = 0.31;
  c.bins = 6;
  c.aggregate = AxisAggregate::Sum;
  c.oo_candidates = OoCandidateScope::Unmanipulated;
  const RunConfig back = parse_config(emit_config(c), "emit");
  CHECK(emit_config(back) == emit_config(c));
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_config("no_such_key = 1\n", "test"),
                       doctest::Contains("unknown key"), Error);
}

TEST_CASE("comments and blank lines are ignored") {
  const RunConfig c = parse_config("# comment\n\nbins = 4  # trailing\n", "test");
  CHECK(c.bins == 4);
}

TEST_CASE("malformed values are config errors") {
  CHECK_THROWS_AS(parse_config("bins = many\n", "test"), Error);
  CHECK_THROWS_AS(parse_config("theta_mi = -1\n", "test"), Error);
  CHECK_THROWS_AS(parse_config("axis_aggregate = median\n", "test"), Error);
  CHECK_THROWS_AS(parse_config("just a line\n", "test"), Error);
}

TEST_CASE("config hash separates different configurations") {
  RunConfig a, b;
  b.theta_mi = 0.26;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a) == config_hash(RunConfig{}));
}
