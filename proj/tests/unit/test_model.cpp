#include <doctest.h>

#include "bblab/model.hpp"

using namespace bblab;

namespace {

const ClauseResult& clause(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.clauses)
    if (c.name == name) return c;
  FAIL("missing clause " << name);
  return r.clauses.front();
}

}  // namespace

TEST_CASE("logistic registry model passes every clause") {
  TorusGrid g(2, 16);
  ProblemSpec s;
  auto rep = validate_spec(s, linspace(-10, 3, 128), g);
  CHECK(rep.passed());
  CHECK(rep.u_min == -10);
  CHECK(rep.u_max == 3);
  CHECK(clause(rep, "dQ_du_negative").worst_value < 0);
}

TEST_CASE("weighted objective passes") {
  TorusGrid g(2, 16);
  ProblemSpec s;
  s.objective.kind = ObjectiveKind::weighted_population;
  CHECK(validate_spec(s, linspace(-10, 3, 64), g).passed());
}

TEST_CASE("shifted logistic fails the vanishing clause only") {
  TorusGrid g(2, 16);
  ProblemSpec s;
  s.nonlinearity.kind = NonlinearityKind::shifted_logistic;
  auto rep = validate_spec(s, linspace(-10, 3, 128), g);
  CHECK_FALSE(rep.passed());
  CHECK_FALSE(clause(rep, "Q_vanishes_at_minus_infinity").passed);
  CHECK(clause(rep, "Q_vanishes_at_minus_infinity").worst_value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(clause(rep, "dQ_du_negative").passed);
  CHECK(clause(rep, "Q_tends_to_minus_infinity").passed);
}

TEST_CASE("j = -theta fails the monotonicity clause") {
  TorusGrid g(2, 16);
  ProblemSpec s;
  s.objective.kind = ObjectiveKind::negative_theta;
  auto rep = validate_spec(s, linspace(-10, 3, 64), g);
  CHECK_FALSE(rep.passed());
  CHECK_FALSE(clause(rep, "dj_nonnegative").passed);
  CHECK(clause(rep, "dj_nonnegative").worst_value == -1.0);
}

TEST_CASE("additive coupling is reported, not thrown") {
  TorusGrid g(2, 16);
  ProblemSpec s;
  s.nonlinearity.kind = NonlinearityKind::linear_interaction;
  s.form = StateForm::big_theta;
  auto rep = validate_spec(s, linspace(-5, 1, 32), g);
  CHECK_FALSE(clause(rep, "bilinear_coupling").passed);
}

TEST_CASE("validation preconditions") {
  TorusGrid g(2, 16);
  ProblemSpec s;
  CHECK_THROWS_AS(validate_spec(s, linspace(-1, 1, 16), g), InvalidArgument);
}

TEST_CASE("spec range checks") {
  ProblemSpec s;
  CHECK_NOTHROW(s.check());
  s.mu = 0;
  CHECK_THROWS_AS(s.check(), InvalidArgument);
  s.mu = 1;
  s.mode = Mode::constrained(1.0);
  CHECK_THROWS_AS(s.check(), InvalidArgument);
  s.mode = Mode::penalized(-0.1);
  CHECK_THROWS_AS(s.check(), InvalidArgument);
  s.mode = Mode::penalized(0.2);
  CHECK_NOTHROW(s.check());
}

TEST_CASE("names round-trip") {
  for (auto k : {NonlinearityKind::logistic, NonlinearityKind::shifted_logistic, NonlinearityKind::linear_interaction})
    CHECK(parse_nonlinearity(to_string(k)) == k);
  for (auto k : {ObjectiveKind::population, ObjectiveKind::weighted_population, ObjectiveKind::negative_population,
                 ObjectiveKind::negative_theta, ObjectiveKind::constant})
    CHECK(parse_objective(to_string(k)) == k);
  CHECK(parse_state_form(to_string(StateForm::big_theta)) == StateForm::big_theta);
  CHECK(parse_mode_kind("penalized") == Mode::Kind::penalized);
  CHECK_THROWS_AS(parse_objective("bogus"), InvalidArgument);
}

TEST_CASE("log and primary reactions agree") {
  Nonlinearity nl;
  for (double U : {0.1, 0.7, 2.0}) CHECK(nl.b(U) == doctest::Approx(U * nl.q(std::log(U))));
  nl.kind = NonlinearityKind::shifted_logistic;
  for (double U : {0.1, 0.7, 2.0}) CHECK(nl.b(U) == doctest::Approx(U * nl.q(std::log(U))));
}
