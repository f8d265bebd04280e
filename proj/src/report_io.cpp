#include "bblab/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bblab {

Json to_json(const ProblemSpec& spec) {
  Json j;
  j["form"] = to_string(spec.form);
  j["nonlinearity"] = {{"kind", to_string(spec.nonlinearity.kind)}, {"rate", spec.nonlinearity.rate}};
  j["objective"] = {{"kind", to_string(spec.objective.kind)}, {"amplitude", spec.objective.amplitude}};
  j["mu"] = spec.mu;
  j["mode"] = {{"kind", to_string(spec.mode.kind)}, {"value", spec.mode.value}};
  return j;
}

ProblemSpec spec_from_json(const Json& j) {
  ProblemSpec s;
  try {
    if (j.contains("form")) s.form = parse_state_form(j.at("form").get<std::string>());
    if (j.contains("nonlinearity")) {
      const Json& n = j.at("nonlinearity");
      if (n.is_string()) {
        s.nonlinearity.kind = parse_nonlinearity(n.get<std::string>());
      } else {
        s.nonlinearity.kind = parse_nonlinearity(n.at("kind").get<std::string>());
        s.nonlinearity.rate = n.value("rate", 1.0);
      }
    }
    if (j.contains("objective")) {
      const Json& o = j.at("objective");
      if (o.is_string()) {
        s.objective.kind = parse_objective(o.get<std::string>());
      } else {
        s.objective.kind = parse_objective(o.at("kind").get<std::string>());
        s.objective.amplitude = o.value("amplitude", 0.5);
      }
    }
    s.mu = j.value("mu", 1.0);
    if (j.contains("mode")) {
      const Json& m = j.at("mode");
      s.mode.kind = parse_mode_kind(m.at("kind").get<std::string>());
      s.mode.value = m.at("value").get<double>();
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed problem spec: ") + e.what());
  }
  s.check();
  return s;
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["passed"] = r.passed();
  j["u_range"] = {r.u_min, r.u_max};
  Json cl = Json::array();
  for (const ClauseResult& c : r.clauses)
    cl.push_back({{"name", c.name},
                  {"passed", c.passed},
                  {"worst_value", c.worst_value},
                  {"worst_u", c.worst_u},
                  {"worst_cell", c.worst_cell},
                  {"detail", c.detail}});
  j["clauses"] = cl;
  return j;
}

Json to_json(const OptimizationReport& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["converged"] = r.converged;
  j["monotone"] = r.monotone;
  j["iterations"] = r.iterations;
  j["bang_bang_fraction"] = r.bang_bang_fraction;
  j["fixed_point_residual"] = r.fixed_point_residual;
  j["final_threshold"] = r.final_threshold;
  j["final_volume"] = r.final_control.mean();
  j["objective_trace"] = r.objective_trace;
  j["threshold_trace"] = r.threshold_trace;
  j["flip_trace"] = r.flip_trace;
  return j;
}

Json to_json(const CurveSet& c) {
  Json j;
  j["level"] = c.level;
  j["eps2"] = c.eps2;
  j["count"] = c.curves.size();
  Json arr = Json::array();
  for (const Curve& cv : c.curves) {
    Json v = Json::array();
    for (const auto& p : cv.vertices) v.push_back({p[0], p[1]});
    arr.push_back({{"length", cv.length},
                   {"min_gradient", cv.min_gradient},
                   {"orientation", cv.orientation},
                   {"near_critical", cv.near_critical},
                   {"winding", {cv.winding[0], cv.winding[1]}},
                   {"vertices", v}});
  }
  j["curves"] = arr;
  return j;
}

Json to_json(const AngularProfile& p) {
  Json j;
  j["f0"] = p.f0;
  j["g0"] = p.g0;
  j["N"] = p.N();
  j["degenerate_family"] = p.degenerate_family;
  Json comps = Json::array();
  for (const Component& c : p.components)
    comps.push_back({{"sign", c.sign == Sign::positive ? "+" : "-"},
                     {"length", c.length},
                     {"coefficient", c.coefficient},
                     {"start", c.start}});
  j["components"] = comps;
  return j;
}

Json to_json(const std::vector<AngularProfile>& catalogue) {
  Json arr = Json::array();
  for (const auto& p : catalogue) arr.push_back(to_json(p));
  return arr;
}

Json to_json(const SecondOrderReport& r) {
  return {{"samples", r.rho.size()}, {"min_rho", r.min_rho}, {"mean_rho", r.mean_rho}, {"rho", r.rho},
          {"radius", r.radius}};
}

Json to_json(const IntermediateDensityResult& r) {
  Json tr = Json::array();
  for (const DensityScale& s : r.trace) tr.push_back({{"side", s.side}, {"density", s.density}});
  return {{"point", std::vector<double>(r.point.data(), r.point.data() + r.point.size())}, {"trace", tr}};
}

Json to_json(const MatchResult& r) {
  return {{"index", r.index}, {"rotation", r.rotation}, {"error", r.error}};
}

std::string CsvTable::render() const {
  std::ostringstream os;
  for (size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", row[k]);
      os << (k ? "," : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

CsvTable derivative_csv(const DerivativeReport& r) {
  CsvTable t{{"order", "t", "fd_value", "analytic", "rel_err"}, {}};
  for (const auto& e : r.first_order) t.rows.push_back({1, e.t, e.fd_value, e.analytic, e.rel_err});
  for (const auto& e : r.second_order) t.rows.push_back({2, e.t, e.fd_value, e.analytic, e.rel_err});
  return t;
}

CsvTable trace_csv(const OptimizationReport& r) {
  CsvTable t{{"iteration", "objective", "threshold", "flips"}, {}};
  for (size_t k = 0; k < r.objective_trace.size(); ++k)
    t.rows.push_back({double(k), r.objective_trace[k], k < r.threshold_trace.size() ? r.threshold_trace[k] : NAN,
                      k < r.flip_trace.size() ? r.flip_trace[k] : NAN});
  return t;
}

CsvTable weiss_csv(const WeissProfile& p) {
  CsvTable t{{"r", "psi", "S", "W"}, {}};
  for (size_t k = 0; k < p.radii.size(); ++k) t.rows.push_back({p.radii[k], p.psi[k], p.boundary_mass[k], p.W(k)});
  return t;
}

CsvTable angular_csv(const std::vector<double>& values) {
  CsvTable t{{"theta", "value"}, {}};
  const double n = static_cast<double>(values.size());
  for (size_t k = 0; k < values.size(); ++k) t.rows.push_back({2 * M_PI * k / n, values[k]});
  return t;
}

CsvTable profile_csv(const AngularProfile& p, int samples) {
  std::vector<double> v(samples);
  for (int k = 0; k < samples; ++k) v[k] = evaluate_profile(p, 2 * M_PI * k / samples);
  return angular_csv(v);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path.string());
  return fnv1a64(bytes);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace bblab
