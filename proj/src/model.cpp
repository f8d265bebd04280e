#include "bblab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bblab {

double Nonlinearity::q(double u) const {
  switch (kind) {
    case NonlinearityKind::logistic: return -rate * std::exp(u);
    case NonlinearityKind::shifted_logistic: return -rate * (std::exp(u) - 1.0);
    default: throw InvalidArgument("log-variable reaction undefined for additive coupling");
  }
}

double Nonlinearity::dq(double u) const {
  if (coupling() != Coupling::bilinear)
    throw InvalidArgument("log-variable reaction undefined for additive coupling");
  return -rate * std::exp(u);
}

double Nonlinearity::d2q(double u) const { return dq(u); }

double Nonlinearity::b(double U) const {
  switch (kind) {
    case NonlinearityKind::logistic: return -rate * U * U;
    case NonlinearityKind::shifted_logistic: return -rate * (U * U - U);
    case NonlinearityKind::linear_interaction: return U * (1.0 - U);
  }
  return 0;
}

double Nonlinearity::db(double U) const {
  switch (kind) {
    case NonlinearityKind::logistic: return -2.0 * rate * U;
    case NonlinearityKind::shifted_logistic: return -rate * (2.0 * U - 1.0);
    case NonlinearityKind::linear_interaction: return 1.0 - 2.0 * U;
  }
  return 0;
}

double Nonlinearity::d2b(double) const {
  return kind == NonlinearityKind::linear_interaction ? -2.0 : -2.0 * rate;
}

Eigen::VectorXd Objective::weights(const TorusGrid& grid) const {
  if (kind != ObjectiveKind::weighted_population) return Eigen::VectorXd::Ones(grid.size());
  return sample(grid, [&](const Eigen::VectorXd& x) { return 1.0 + amplitude * std::cos(2 * M_PI * x[0]); })
      .values();
}

double Objective::j(double w, double t) const {
  switch (kind) {
    case ObjectiveKind::population: return std::exp(t);
    case ObjectiveKind::weighted_population: return w * std::exp(t);
    case ObjectiveKind::negative_population: return -std::exp(t);
    case ObjectiveKind::negative_theta: return -t;
    case ObjectiveKind::constant: return 1.0;
  }
  return 0;
}

double Objective::dj(double w, double t) const {
  switch (kind) {
    case ObjectiveKind::population: return std::exp(t);
    case ObjectiveKind::weighted_population: return w * std::exp(t);
    case ObjectiveKind::negative_population: return -std::exp(t);
    case ObjectiveKind::negative_theta: return -1.0;
    case ObjectiveKind::constant: return 0.0;
  }
  return 0;
}

double Objective::d2j(double w, double t) const {
  return kind == ObjectiveKind::negative_theta ? 0.0 : dj(w, t);
}

double Objective::psi(double w, double U) const {
  switch (kind) {
    case ObjectiveKind::population: return U;
    case ObjectiveKind::weighted_population: return w * U;
    case ObjectiveKind::negative_population: return -U;
    case ObjectiveKind::negative_theta: return -std::log(U);
    case ObjectiveKind::constant: return 1.0;
  }
  return 0;
}

double Objective::dpsi(double w, double U) const {
  switch (kind) {
    case ObjectiveKind::population: return 1.0;
    case ObjectiveKind::weighted_population: return w;
    case ObjectiveKind::negative_population: return -1.0;
    case ObjectiveKind::negative_theta: return -1.0 / U;
    case ObjectiveKind::constant: return 0.0;
  }
  return 0;
}

double Objective::d2psi(double, double U) const {
  return kind == ObjectiveKind::negative_theta ? 1.0 / (U * U) : 0.0;
}

void ProblemSpec::check() const {
  if (!(mu > 0) || !std::isfinite(mu)) throw InvalidArgument("diffusivity must be positive");
  if (mode.is_constrained() && !(mode.value > 0 && mode.value < 1))
    throw InvalidArgument("volume fraction m0 must lie in (0,1)");
  if (!mode.is_constrained() && !(mode.value > 0)) throw InvalidArgument("penalty c must be positive");
  if (objective.kind == ObjectiveKind::weighted_population && std::abs(objective.amplitude) > 1)
    throw InvalidArgument("weight amplitude must keep w >= 0");
}

namespace {

template <typename E>
struct Name {
  E value;
  const char* text;
};

constexpr Name<StateForm> kForms[] = {{StateForm::theta, "theta"}, {StateForm::big_theta, "bigTheta"}};
constexpr Name<NonlinearityKind> kNonlinearities[] = {
    {NonlinearityKind::logistic, "logistic"},
    {NonlinearityKind::shifted_logistic, "shifted_logistic"},
    {NonlinearityKind::linear_interaction, "linear_interaction"}};
constexpr Name<ObjectiveKind> kObjectives[] = {
    {ObjectiveKind::population, "population"},
    {ObjectiveKind::weighted_population, "weighted_population"},
    {ObjectiveKind::negative_population, "negative_population"},
    {ObjectiveKind::negative_theta, "negative_theta"},
    {ObjectiveKind::constant, "constant"}};
constexpr Name<Mode::Kind> kModes[] = {{Mode::Kind::constrained, "constrained"},
                                       {Mode::Kind::penalized, "penalized"}};

template <typename E, std::size_t N>
std::string name_of(const Name<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.text;
  return "?";
}

template <typename E, std::size_t N>
E parse(const Name<E> (&table)[N], const std::string& s, const char* what) {
  for (const auto& e : table)
    if (s == e.text) return e.value;
  throw InvalidArgument(std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace

std::string to_string(StateForm f) { return name_of(kForms, f); }
std::string to_string(NonlinearityKind k) { return name_of(kNonlinearities, k); }
std::string to_string(ObjectiveKind k) { return name_of(kObjectives, k); }
std::string to_string(Mode::Kind k) { return name_of(kModes, k); }
StateForm parse_state_form(const std::string& s) { return parse(kForms, s, "state form"); }
NonlinearityKind parse_nonlinearity(const std::string& s) { return parse(kNonlinearities, s, "nonlinearity"); }
ObjectiveKind parse_objective(const std::string& s) { return parse(kObjectives, s, "objective"); }
Mode::Kind parse_mode_kind(const std::string& s) { return parse(kModes, s, "mode"); }

bool ValidationReport::passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.passed; });
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = count == 1 ? a : a + (b - a) * i / (count - 1);
  return out;
}

ValidationReport validate_spec(const ProblemSpec& spec, const std::vector<double>& u_grid,
                               const TorusGrid& x_grid) {
  if (u_grid.size() < 32) throw InvalidArgument("validation needs at least 32 u samples");
  std::vector<double> u = u_grid;
  std::sort(u.begin(), u.end());
  for (double v : u)
    if (!std::isfinite(v)) throw InvalidArgument("u samples must be finite");

  ValidationReport rep;
  rep.u_min = u.front();
  rep.u_max = u.back();
  const int nu = static_cast<int>(u.size());

  ClauseResult coupling{"bilinear_coupling", spec.bilinear(), spec.bilinear() ? 0.0 : 1.0, 0, 0,
                        spec.bilinear() ? "control enters as m*Theta"
                                        : "control enters additively; bang-bang theory does not apply"};
  rep.clauses.push_back(coupling);

  const Nonlinearity& nl = spec.nonlinearity;
  if (spec.bilinear()) {
    // The reaction is x-independent in the registry; sup over x reduces to the value itself.
    ClauseResult mono{spec.form == StateForm::theta ? "dQ_du_negative" : "B_over_U_decreasing", true,
                      -std::numeric_limits<double>::infinity(), 0, 0, ""};
    for (double v : u) {
      const double d = nl.dq(v);
      if (d > mono.worst_value) {
        mono.worst_value = d;
        mono.worst_u = v;
      }
    }
    mono.passed = mono.worst_value < 0;
    mono.detail = "max dQ/du over sampled range";
    rep.clauses.push_back(mono);

    // Q -> -infinity: strictly decreasing on the upper half, and dropping from the upper
    // quartile to the end of the range by at least max(1, |Q|) there.
    ClauseResult top{"Q_tends_to_minus_infinity", true, 0, rep.u_max, 0, ""};
    for (int i = nu / 2 + 1; i < nu; ++i)
      if (!(nl.q(u[i]) < nl.q(u[i - 1]))) {
        top.passed = false;
        top.worst_u = u[i];
      }
    const double q3 = nl.q(u[(3 * nu) / 4]);
    const double qe = nl.q(u.back());
    top.worst_value = qe;
    if (!(qe <= q3 - std::max(1.0, std::abs(q3)))) top.passed = false;
    top.detail = "Q at the largest sample";
    rep.clauses.push_back(top);

    // |Q| -> 0: nonincreasing toward the lower end, contracting by at least half from the
    // lower quartile to the smallest sample.
    ClauseResult bottom{"Q_vanishes_at_minus_infinity", true, 0, rep.u_min, 0, ""};
    for (int i = 1; i <= nu / 2; ++i)
      if (std::abs(nl.q(u[i - 1])) > std::abs(nl.q(u[i]))) {
        bottom.passed = false;
        bottom.worst_u = u[i - 1];
      }
    const double a1 = std::abs(nl.q(u[nu / 4]));
    const double a0 = std::abs(nl.q(u.front()));
    bottom.worst_value = a0;
    if (!(a0 <= 0.5 * a1)) bottom.passed = false;
    bottom.detail = "|Q| at the smallest sample";
    rep.clauses.push_back(bottom);
  }

  const Eigen::VectorXd w = spec.objective.weights(x_grid);
  ClauseResult jmono{"dj_nonnegative", true, std::numeric_limits<double>::infinity(), 0, 0,
                     "min dj/dtheta over samples"};
  double jmax = -std::numeric_limits<double>::infinity();
  for (Index c = 0; c < w.size(); ++c)
    for (double v : u) {
      const double d = spec.objective.dj(w[c], v);
      jmax = std::max(jmax, d);
      if (d < jmono.worst_value) {
        jmono.worst_value = d;
        jmono.worst_u = v;
        jmono.worst_cell = c;
      }
    }
  jmono.passed = jmono.worst_value >= 0;
  rep.clauses.push_back(jmono);
  rep.clauses.push_back({"dj_nontrivial", jmax > 0, jmax, 0, 0, "max dj/dtheta over samples"});
  return rep;
}

}  // namespace bblab
