#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "bblab/pipeline.hpp"

namespace {

using namespace bblab;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
};

ExperimentConfig load(const Globals& g) {
  Json j = Json::object();
  if (!g.config.empty()) {
    std::string text;
    try {
      text = read_file(g.config);
    } catch (const IoError& e) {
      throw InvalidArgument(std::string("cannot read config: ") + e.what());
    }
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (g.seed) j["seed"] = *g.seed;
  if (!g.out.empty()) j["output_dir"] = g.out;
  int threads = g.threads;
  if (threads <= 0)
    if (const char* env = std::getenv("BBLAB_THREADS")) threads = std::atoi(env);
  if (threads > 0) j["threads"] = threads;
  return config_from_json(j);
}

int report(const RunResult& r) {
  std::cout << r.manifest.dump(2) << std::endl;
  return r.exit_code;
}

Analyses only(bool weiss, bool blowup, bool boundary, bool density) {
  Analyses a;
  a.weiss = weiss;
  a.blowup_match = blowup;
  a.boundary = boundary;
  a.density = density;
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bblab: bilinear optimal control and free-boundary laboratory"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker threads (falls back to BBLAB_THREADS)");
  app.fallthrough();

  auto* validate = app.add_subcommand("validate", "check the model assumptions over a sampled range");
  auto* solve = app.add_subcommand("solve", "solve the state equation for the initial control");
  auto* optimize = app.add_subcommand("optimize", "run the optimizer");
  auto* weiss = app.add_subcommand("weiss", "optimize, then Weiss profiles at critical and free-boundary points");
  auto* blowup = app.add_subcommand("blowup", "blow-up catalogue, or matching at an optimum when no --f0 is given");
  std::optional<double> f0, g0;
  int nmax = 8;
  blowup->add_option("--f0", f0, "positive-phase coefficient");
  blowup->add_option("--g0", g0, "negative-phase coefficient");
  blowup->add_option("--nmax", nmax, "largest number of sign components");
  auto* boundary = app.add_subcommand("boundary", "optimize, then trace the free boundary and run density diagnostics");
  auto* suite = app.add_subcommand("suite", "run the acceptance suite");
  std::vector<int> criteria;
  suite->add_option("--criteria", criteria, "criterion ids (default: all)");
  auto* runall = app.add_subcommand("run", "run the pipeline exactly as configured");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*suite) {
      const auto res = acceptance::run_suite(criteria, std::cout);
      int passed = 0;
      for (const auto& o : res) passed += o.passed;
      std::cout << passed << "/" << res.size() << " acceptance criteria passed" << std::endl;
      return passed == static_cast<int>(res.size()) ? 0 : static_cast<int>(ErrorFamily::analysis);
    }

    if (*blowup && f0) {
      const auto cat = classify_profiles(*f0, g0.value_or(0.0), nmax);
      const std::filesystem::path dir = g.out.empty() ? "bblab_out" : g.out;
      write_file(dir / "catalogue.json", to_json(cat).dump(2) + "\n");
      for (size_t k = 0; k < cat.size(); ++k)
        write_file(dir / ("profile_" + std::to_string(k) + ".csv"), profile_csv(cat[k]).render());
      std::cout << to_json(cat).dump(2) << std::endl;
      return 0;
    }

    ExperimentConfig cfg = load(g);
    if (*validate) {
      const TorusGrid grid(cfg.d, cfg.n);
      const auto& vr = cfg.settings.validation_range;
      const ValidationReport rep =
          validate_spec(cfg.spec, linspace(vr[0], vr[1], cfg.settings.validation_samples), grid);
      std::cout << to_json(rep).dump(2) << std::endl;
      return rep.passed() ? 0 : static_cast<int>(ErrorFamily::validation);
    }
    if (*solve) {
      cfg.run_optimizer = false;
      cfg.analyses = {};
    } else if (*optimize) {
      cfg.run_optimizer = true;
      cfg.analyses = {};
    } else if (*weiss) {
      cfg.run_optimizer = true;
      cfg.analyses = only(true, false, false, false);
    } else if (*blowup) {
      cfg.run_optimizer = true;
      cfg.analyses = only(false, true, false, false);
    } else if (*boundary) {
      cfg.run_optimizer = true;
      cfg.analyses = only(false, false, true, true);
    } else if (!*runall) {
      return 2;
    }
    cfg.check();
    return report(run(cfg));
  } catch (const Error& e) {
    std::cerr << "error (" << e.kind() << "): " << e.what() << std::endl;
    return static_cast<int>(e.family());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return static_cast<int>(ErrorFamily::analysis);
  }
}
