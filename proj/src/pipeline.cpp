#include "bblab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "bblab/bbf.hpp"
#include "bblab/planar.hpp"

namespace bblab {

namespace {

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::constant: return "constant";
    case InitKind::random: return "random";
    default: return "smooth";
  }
}

InitKind parse_init(const std::string& s) {
  if (s == "constant") return InitKind::constant;
  if (s == "random") return InitKind::random;
  if (s == "smooth") return InitKind::smooth;
  throw InvalidArgument("unknown initial control: " + s);
}

template <typename T>
void take(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::check() const {
  spec.check();
  if (d < 1 || d > 3 || n < 8) throw InvalidArgument("grid needs d in {1,2,3} and n >= 8");
  if (threads < 1) throw InvalidArgument("threads must be positive");
  const auto& mu = analyses.fragmentation_sweep;
  for (size_t k = 1; k < mu.size(); ++k)
    if (!(mu[k] < mu[k - 1])) throw InvalidArgument("fragmentation sweep must be strictly decreasing in mu");
  for (double m : mu)
    if (!(m > 0)) throw InvalidArgument("sweep diffusivities must be positive");
  if (settings.validation_range.size() != 2 || !(settings.validation_range[0] < settings.validation_range[1]))
    throw InvalidArgument("validation range must be an increasing pair");
  if (d != 2 && (analyses.weiss || analyses.blowup_match || analyses.boundary))
    throw InvalidArgument("curve and blow-up analyses need d = 2");
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("spec")) c.spec = spec_from_json(j.at("spec"));
    if (j.contains("grid")) {
      take(j.at("grid"), "d", c.d);
      take(j.at("grid"), "n", c.n);
    }
    if (j.contains("optimize")) {
      const Json& o = j.at("optimize");
      c.run_optimizer = o.value("enabled", true);
      if (o.contains("scheme")) c.optimize.scheme = parse_scheme(o.at("scheme").get<std::string>());
      take(o, "max_iter", c.optimize.max_iter);
      take(o, "fixed_point_tol", c.optimize.fixed_point_tol);
      take(o, "gradient_step", c.optimize.gradient_step);
      take(o, "gradient_tol", c.optimize.gradient_tol);
      take(o, "bang_bang_tol", c.optimize.bang_bang_tol);
      if (o.contains("init")) c.init = parse_init(o.at("init").get<std::string>());
      else if (c.optimize.scheme == Scheme::projected_gradient) c.init = InitKind::smooth;
    }
    if (j.contains("solver")) {
      const Json& s = j.at("solver");
      take(s, "tol_rms", c.optimize.solver.tol_rms);
      take(s, "max_newton", c.optimize.solver.max_newton);
      take(s, "max_sweeps", c.optimize.solver.max_sweeps);
    }
    if (j.contains("analyses")) {
      const Json& a = j.at("analyses");
      take(a, "weiss", c.analyses.weiss);
      take(a, "blowup_match", c.analyses.blowup_match);
      take(a, "boundary", c.analyses.boundary);
      take(a, "density", c.analyses.density);
      take(a, "second_order", c.analyses.second_order);
      take(a, "fragmentation_sweep", c.analyses.fragmentation_sweep);
    }
    if (j.contains("tolerances")) {
      const Json& t = j.at("tolerances");
      AnalysisSettings& s = c.settings;
      take(t, "validation_range", s.validation_range);
      take(t, "validation_samples", s.validation_samples);
      take(t, "second_order_samples", s.second_order_samples);
      take(t, "second_order_radius", s.second_order_radius);
      take(t, "weiss_radii", s.weiss_radii);
      take(t, "weiss_points", s.weiss_points);
      take(t, "max_critical", s.max_critical);
      take(t, "weiss_slack_h", s.weiss_slack_h);
      take(t, "blowup_radii", s.blowup_radii);
      take(t, "catalogue_max", s.catalogue_max);
      take(t, "density_eps", s.density_eps);
      take(t, "probe_radius_h", s.probe_radius_h);
    }
    take(j, "output_dir", c.output_dir);
    take(j, "seed", c.seed);
    take(j, "threads", c.threads);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  c.optimize.seed = c.seed;
  c.check();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["spec"] = to_json(c.spec);
  j["grid"] = {{"d", c.d}, {"n", c.n}};
  j["optimize"] = {{"enabled", c.run_optimizer},
                   {"scheme", to_string(c.optimize.scheme)},
                   {"max_iter", c.optimize.max_iter},
                   {"fixed_point_tol", c.optimize.fixed_point_tol},
                   {"gradient_step", c.optimize.gradient_step},
                   {"gradient_tol", c.optimize.gradient_tol},
                   {"bang_bang_tol", c.optimize.bang_bang_tol},
                   {"init", to_string(c.init)}};
  j["solver"] = {{"tol_rms", c.optimize.solver.tol_rms},
                 {"max_newton", c.optimize.solver.max_newton},
                 {"max_sweeps", c.optimize.solver.max_sweeps}};
  j["analyses"] = {{"weiss", c.analyses.weiss},
                   {"blowup_match", c.analyses.blowup_match},
                   {"boundary", c.analyses.boundary},
                   {"density", c.analyses.density},
                   {"second_order", c.analyses.second_order},
                   {"fragmentation_sweep", c.analyses.fragmentation_sweep}};
  const AnalysisSettings& s = c.settings;
  j["tolerances"] = {{"validation_range", s.validation_range},
                     {"validation_samples", s.validation_samples},
                     {"second_order_samples", s.second_order_samples},
                     {"second_order_radius", s.second_order_radius},
                     {"weiss_radii", s.weiss_radii},
                     {"weiss_points", s.weiss_points},
                     {"max_critical", s.max_critical},
                     {"weiss_slack_h", s.weiss_slack_h},
                     {"blowup_radii", s.blowup_radii},
                     {"catalogue_max", s.catalogue_max},
                     {"density_eps", s.density_eps},
                     {"probe_radius_h", s.probe_radius_h}};
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

Control initial_control(const ExperimentConfig& c, const TorusGrid& grid) {
  const double m0 = c.spec.mode.is_constrained() ? c.spec.mode.value : 0.5;
  switch (c.init) {
    case InitKind::constant: return Control(ScalarField(grid, m0), m0);
    case InitKind::random: {
      Control m = random_bang_bang(grid, m0, c.seed);
      return Control(m.field(), m0);
    }
    default: {
      const ScalarField v = sample(grid, [&](const Eigen::VectorXd& x) {
        double p = 1;
        for (Index a = 0; a < x.size(); ++a) p *= std::cos(2 * M_PI * x[a]);
        return m0 + 0.2 * p;
      });
      return project_admissible(v.values(), grid, c.spec.mode);
    }
  }
}

namespace {

class Run {
 public:
  explicit Run(const ExperimentConfig& c) : cfg_(c), dir_(c.output_dir) {
    manifest_["config"] = to_json(c);
    manifest_["artifacts"] = Json::array();
    manifest_["errors"] = Json::array();
  }

  void artifact(const std::string& name, const std::string& rel, std::string_view bytes) {
    const std::uint64_t h = write_file(dir_ / rel, bytes);
    manifest_["artifacts"].push_back({{"name", name}, {"path", rel}, {"bytes", bytes.size()}, {"fnv1a64", hex64(h)}});
  }
  void field(const std::string& name, const std::string& rel, const ScalarField& f) {
    const auto b = encode_bbf(f);
    artifact(name, rel, std::string_view(reinterpret_cast<const char*>(b.data()), b.size()));
  }
  void json(const std::string& name, const std::string& rel, const Json& j) { artifact(name, rel, j.dump(2) + "\n"); }
  void csv(const std::string& name, const std::string& rel, const CsvTable& t) { artifact(name, rel, t.render()); }

  // Runs a stage, recording module errors; returns false if it failed.
  bool stage(const std::string& name, const std::function<void()>& fn) {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      record(name, static_cast<int>(e.family()), e.kind(), e.what());
    } catch (const std::exception& e) {
      record(name, static_cast<int>(ErrorFamily::analysis), "Unexpected", e.what());
    }
    return false;
  }

  RunResult finish() {
    manifest_["exit_code"] = exit_;
    write_file(dir_ / "manifest.json", manifest_.dump(2) + "\n");
    return {manifest_, exit_};
  }

  Json& summary() { return manifest_["summary"]; }
  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  void record(const std::string& stage, int code, const std::string& kind, const std::string& msg) {
    manifest_["errors"].push_back({{"stage", stage}, {"kind", kind}, {"message", msg}, {"exit_code", code}});
    if (exit_ == 0) exit_ = code;
  }

  const ExperimentConfig& cfg_;
  std::filesystem::path dir_;
  Json manifest_;
  int exit_ = 0;
};

// Equally spaced vertices of the longest curve, as Weiss centers.
std::vector<Eigen::Vector2d> curve_samples(const CurveSet& cs, int count) {
  std::vector<Eigen::Vector2d> out;
  if (cs.curves.empty() || count <= 0) return out;
  const Curve& c = *std::max_element(cs.curves.begin(), cs.curves.end(),
                                     [](const Curve& a, const Curve& b) { return a.length < b.length; });
  const size_t p = c.vertices.size() - 1;
  for (int k = 0; k < count; ++k) {
    Eigen::Vector2d x = c.vertices[(k * p) / count];
    x[0] -= std::floor(x[0]);
    x[1] -= std::floor(x[1]);
    out.push_back(x);
  }
  return out;
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  Run R(config);
  const TorusGrid grid(config.d, config.n);
  const ProblemSpec& spec = config.spec;

  R.stage("validate", [&] {
    const auto& vr = config.settings.validation_range;
    const ValidationReport rep = validate_spec(spec, linspace(vr[0], vr[1], config.settings.validation_samples), grid);
    R.json("validation", "validation.json", to_json(rep));
    R.summary()["validation_passed"] = rep.passed();
  });

  std::optional<Control> m;
  std::optional<StateSolution> state;
  if (!R.stage("solve", [&] {
        m.emplace(initial_control(config, grid));
        state.emplace(solve_state(spec, *m, std::nullopt, config.optimize.solver));
        R.field("state", "state.bbf", state->field);
        R.summary()["state_residual"] = state->residual_norm;
      }))
    return R.finish();

  const bool analyses = config.analyses.weiss || config.analyses.blowup_match || config.analyses.boundary ||
                        config.analyses.density || config.analyses.second_order;
  if (!config.run_optimizer && !analyses && config.analyses.fragmentation_sweep.empty()) return R.finish();

  std::optional<SwitchField> eta;
  std::optional<CoefficientPair> fg;
  if (config.run_optimizer &&
      !R.stage("optimize", [&] {
        const OptimizationReport rep = run_optimizer(spec, config.optimize, *m);
        R.json("optimization", "optimization.json", to_json(rep));
        R.csv("objective_trace", "objective_trace.csv", trace_csv(rep));
        R.field("control", "control.bbf", rep.final_control.field());
        R.summary()["objective"] = rep.objective_trace.empty() ? 0.0 : rep.objective_trace.back();
        R.summary()["converged"] = rep.converged;
        m.emplace(rep.final_control);
        state.emplace(solve_state(spec, *m, state->field, config.optimize.solver));
      }))
    return R.finish();

  if (analyses && !R.stage("switch", [&] {
        eta.emplace(solve_switch(spec, *m, *state));
        R.field("switch", "switch.bbf", eta->eta);
        if (spec.bilinear()) {
          fg.emplace(compute_fg(spec, *m, *state, *eta));
          R.field("f", "f.bbf", fg->f);
          R.field("g", "g.bbf", fg->g);
        }
      }))
    return R.finish();

  std::optional<CurveSet> curves;
  const bool need_curves = config.d == 2 && (config.analyses.boundary || config.analyses.weiss ||
                                             config.analyses.blowup_match || config.analyses.density);
  if (need_curves)
    R.stage("boundary", [&] {
      const ScalarField shifted = eta->shifted();
      curves.emplace(trace_level_curves(shifted, 0.0));
      const DiscreteSet E = DiscreteSet::from_control(*m);
      Json j = to_json(*curves);
      j["perimeter"] = perimeter(E);
      Json sig = Json::array(), wint = Json::array();
      for (const Curve& c : curves->curves) {
        StabilityOptions so;
        so.penalized = !spec.mode.is_constrained();
        sig.push_back(stability_eigenvalue(shifted, c, so));
        wint.push_back(weighted_curve_integral(shifted, c));
      }
      j["sigma1"] = sig;
      j["weighted_integral"] = wint;
      R.json("curves", "curves.json", j);
      R.field("essential_boundary", "essential_boundary.bbf",
              essential_boundary(E, config.settings.probe_radius_h * grid.h()).as_field());
      R.summary()["curve_count"] = curves->curves.size();
    });

  std::vector<Eigen::Vector2d> centers;
  if (config.d == 2 && (config.analyses.weiss || config.analyses.blowup_match)) {
    std::vector<CriticalPoint> crit = find_critical_points(eta->shifted());
    std::stable_sort(crit.begin(), crit.end(),
                     [](const CriticalPoint& a, const CriticalPoint& b) { return a.gradient < b.gradient; });
    if (crit.size() > size_t(std::max(0, config.settings.max_critical))) crit.resize(std::max(0, config.settings.max_critical));
    for (const CriticalPoint& c : crit) centers.push_back(c.x);
    if (curves) {
      const auto extra = curve_samples(*curves, config.settings.weiss_points);
      centers.insert(centers.end(), extra.begin(), extra.end());
    }
  }

  if (config.analyses.weiss && fg)
    R.stage("weiss", [&] {
      const PlanarField pe = PlanarField::periodic(eta->shifted());
      const PlanarField pf = PlanarField::periodic(fg->f), pg = PlanarField::periodic(fg->g);
      std::vector<double> radii;
      for (double r : config.settings.weiss_radii)
        if (r >= 4 * grid.h()) radii.push_back(r);
      Json list = Json::array();
      for (size_t k = 0; k < centers.size(); ++k) {
        const WeissProfile w = weiss_profile(pe, pf, pg, centers[k], radii);
        const auto v = envelope_check(w, w.C, w.beta, config.settings.weiss_slack_h * grid.h());
        const std::string rel = "weiss_" + std::to_string(k) + ".csv";
        R.csv("weiss_profile", rel, weiss_csv(w));
        list.push_back({{"center", {centers[k][0], centers[k][1]}}, {"C", w.C}, {"violations", v.size()}, {"csv", rel}});
      }
      R.json("weiss_summary", "weiss.json", list);
    });

  if (config.analyses.blowup_match && fg)
    R.stage("blowup", [&] {
      const PlanarField pe = PlanarField::periodic(eta->shifted());
      const PlanarField pf = PlanarField::periodic(fg->f), pg = PlanarField::periodic(fg->g);
      std::vector<double> radii;
      for (double r : config.settings.blowup_radii)
        if (r >= 4 * grid.h()) radii.push_back(r);
      Json list = Json::array();
      for (size_t k = 0; k < centers.size(); ++k) {
        const BlowupSequence b = extract_blowup(pe, centers[k], radii);
        Json e{{"center", {centers[k][0], centers[k][1]}},
               {"regime", to_string(b.regime)},
               {"growth_factor", b.growth_factor},
               {"cauchy_defect", b.cauchy_defect}};
        const std::string rel = "blowup_" + std::to_string(k) + ".csv";
        R.csv("blowup_trace", rel, angular_csv(b.limit_candidate));
        const double f0 = pf.value(centers[k]), g0 = pg.value(centers[k]);
        if (f0 > 0 && g0 >= 0) {
          const auto cat = classify_profiles(f0, g0, config.settings.catalogue_max);
          if (!cat.empty()) e["match"] = to_json(match_blowup(b.limit_candidate, cat));
          e["catalogue"] = to_json(cat);
        }
        list.push_back(e);
      }
      R.json("blowup_summary", "blowup.json", list);
    });

  if (config.analyses.density)
    R.stage("density", [&] {
      const DiscreteSet E = DiscreteSet::from_control(*m);
      Eigen::VectorXd x0 = grid.center(0);
      if (curves && !curves->curves.empty()) {
        const Eigen::Vector2d c = curve_samples(*curves, 1).front();
        x0 = Eigen::VectorXd(c);
      }
      // The starting square has side eps/sqrt(d) and must resolve 8 cells.
      const double eps = std::max(config.settings.density_eps, (8 * std::sqrt(double(config.d)) + 1) * grid.h());
      R.json("density", "density.json", to_json(find_intermediate_density_point(E, x0, eps)));
    });

  if (config.analyses.second_order)
    R.stage("second_order", [&] {
      const SecondOrderReport rep = second_order_check(spec, *m, *eta, config.settings.second_order_samples,
                                                       config.settings.second_order_radius, config.seed);
      R.json("second_order", "second_order.json", to_json(rep));
      R.summary()["min_rho"] = rep.min_rho;
    });

  const auto& sweep = config.analyses.fragmentation_sweep;
  if (!sweep.empty())
    R.stage("fragmentation", [&] {
      std::vector<std::optional<double>> per(sweep.size());
      std::vector<std::optional<Control>> ctrl(sweep.size());
      std::vector<std::string> err(sweep.size());
      auto job = [&](size_t k) {
        try {
          ProblemSpec s = spec;
          s.mu = sweep[k];
          const OptimizationReport rep = run_optimizer(s, config.optimize, initial_control(config, grid));
          per[k] = perimeter(DiscreteSet::from_control(rep.final_control));
          ctrl[k].emplace(rep.final_control);
        } catch (const std::exception& e) {
          err[k] = e.what();
        }
      };
      const size_t workers = std::min<size_t>(config.threads, sweep.size());
      std::vector<std::thread> pool;
      for (size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (size_t k = w; k < sweep.size(); k += workers) job(k);
        });
      for (auto& t : pool) t.join();
      CsvTable t{{"mu", "perimeter"}, {}};
      for (size_t k = 0; k < sweep.size(); ++k) {
        if (!per[k]) throw NonConvergence("sweep point mu=" + std::to_string(sweep[k]) + ": " + err[k]);
        t.rows.push_back({sweep[k], *per[k]});
        R.field("sweep_control", "sweep_" + std::to_string(k) + "/control.bbf", ctrl[k]->field());
      }
      R.csv("fragmentation", "fragmentation.csv", t);
    });

  return R.finish();
}

}  // namespace bblab
