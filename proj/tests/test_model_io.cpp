#include <doctest.h>

#include "thorin/errors.hpp"
#include "thorin/model_io.hpp"
#include "thorin/subordinate.hpp"

#include <cmath>

using namespace thorin::model_io;
using thorin::measure::RadialMeasure;

namespace {

json round_trip(const json& j) { return to_json(from_json(j)); }

}  // namespace

TEST_CASE("family document round trip") {
  const json doc = json::parse(R"({"schema_version": 1, "note": "unit gamma",
                                   "family": "gamma", "params": {"lambda": 2.5, "theta": "1/3"}})");
  const auto d = from_json(doc);
  REQUIRE(d.model.has_value());
  CHECK(d.model->params.at("theta") == 1.0 / 3.0);
  const json back = to_json(d);
  CHECK(back["family"] == "gamma");
  CHECK(back["note"] == "unit gamma");
  CHECK(round_trip(back) == back);
  CHECK(from_json(back).model->params.at("theta") == 1.0 / 3.0);
}

TEST_CASE("explicit triplet with a shifted power piece") {
  const json doc = json::parse(R"({"schema_version": 1, "triplet": {
      "drift": 0.25, "gaussian_var": 0, "truncation": "centered",
      "tau_plus": {"pieces": [{"lo": "3/2", "hi": "inf", "coef": 0.5641895835477563,
                               "kernel": {"tag": "power_exp", "power": -0.5, "rate": 0}}]},
      "tau_minus": {"atoms": [{"location": 2, "weight": 0.7}]}}})");
  const auto d = from_json(doc);
  REQUIRE(d.model.has_value());
  CHECK(d.model->name == "triplet");
  CHECK(d.model->triplet.tau_plus.pieces().at(0).lo == 1.5);
  CHECK(std::isinf(d.model->triplet.tau_plus.pieces().at(0).hi));
  const json back = to_json(d);
  CHECK(round_trip(back) == back);
  CHECK(back.dump() == round_trip(back).dump());
}

TEST_CASE("origins survive serialization") {
  const thorin::subordinate::GgcSubordinator sub{0.0, RadialMeasure::atom(1.0 / 3.0, 2.0)};
  const auto fwd = thorin::subordinate::brownian_forward(sub, {1.0, 0.4});
  const auto d = from_json(to_json(triplet_document(fwd)));
  const auto inv = thorin::subordinate::brownian_inverse(d.model->triplet, 0.4);
  REQUIRE(inv.rho.atoms().size() == 1);
  CHECK(inv.rho.atoms()[0].location == 1.0 / 3.0);
  CHECK(inv.rho.atoms()[0].weight == 2.0);
}

TEST_CASE("every schema problem is reported") {
  const json doc = json::parse(R"({"schema_version": 2, "colour": "red", "triplet": {
      "drift": "abc",
      "tau_plus": {"pieces": [{"lo": 0, "kernel": {"tag": "spline"}}],
                   "atoms": [{"location": -1, "weight": 0}]}}})");
  try {
    from_json(doc);
    FAIL("expected a schema error");
  } catch (const thorin::SchemaError& e) {
    const auto& is = e.issues();
    CHECK(is.size() >= 5);
    const auto has = [&](const std::string& s) {
      for (const auto& i : is)
        if (i.find(s) != std::string::npos) return true;
      return false;
    };
    CHECK(has("schema_version"));
    CHECK(has("unexpected key 'colour'"));
    CHECK(has("drift"));
    CHECK(has("unknown kernel tag 'spline' (supported: power_exp, linnik_rational"));
    CHECK(has("atoms[0].location"));
    CHECK(has("atoms[0].weight"));
  }
  CHECK_THROWS_AS(from_json(json::parse(R"({"schema_version": 1})")), thorin::SchemaError);
  CHECK_THROWS_AS(from_json(json::parse(R"({"schema_version": 1, "family": "gamma", "triplet": {}})")),
                  thorin::SchemaError);
  CHECK_THROWS_AS(parse("{\"schema_version\": 1,"), json::parse_error);
}

TEST_CASE("mass at zero breaks the log-moment condition") {
  const json doc = json::parse(R"({"schema_version": 1, "triplet": {
      "tau_plus": {"atoms": [{"location": 0, "weight": 1}]}}})");
  try {
    from_json(doc);
    FAIL("expected a precondition error");
  } catch (const thorin::PreconditionError& e) {
    CHECK(e.condition() == "log_moment_at_zero");
  }
}

TEST_CASE("canonical function and lgnbc documents") {
  const auto d = parse(R"({"schema_version": 1, "canonical_function": {"kind": "indicator", "theta": 1}})");
  REQUIRE(d.canonical.has_value());
  CHECK(d.canonical->k(0.5) == 1.0);
  CHECK(d.canonical->k(1.5) == 0.0);
  CHECK(round_trip(to_json(d)) == to_json(d));

  const auto q = parse(R"({"schema_version": 1, "lgnbc": {"c": 1, "alpha_scale": 0.5,
                           "pi": {"atoms": [{"location": "1/4", "weight": 1}]}}})");
  REQUIRE(q.lgnbc.has_value());
  CHECK(q.lgnbc->pi.atoms()[0].location == 0.25);
  CHECK_THROWS_AS(parse(R"({"schema_version": 1, "lgnbc": {"c": 1, "alpha_scale": 1,
                            "pi": {"atoms": [{"location": 1, "weight": 1}]}}})"),
                  thorin::PreconditionError);
}

TEST_CASE("subordinator view") {
  const auto g = from_json(json::parse(R"({"schema_version": 1, "family": "gamma", "params": {"lambda": 1, "theta": 2}})"));
  const auto s = as_subordinator(*g.model);
  CHECK(s.a == 0.0);
  CHECK(s.rho.atoms().size() == 1);
  const auto b = from_json(json::parse(
      R"({"schema_version": 1, "family": "bilgamma", "params": {"lambda_plus": 1, "theta_plus": 2, "lambda_minus": 1, "theta_minus": 1}})"));
  CHECK_THROWS_AS(as_subordinator(*b.model), thorin::PreconditionError);
}
