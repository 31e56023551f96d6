// pspline: command-line front end for periodic spline reconstruction and the
// Monte Carlo experiments.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pspline/pspline.hpp"

namespace {

using namespace pspline;

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  int n_coef = kDefaultCoefficients;
  int trials = 0;
  std::string format = "csv";
  std::string output;
  std::string config;
};

struct ExperimentFlags {
  std::string op;
  double gamma0_sq = 0.0;
  double sigma0_sq = 0.0;
  int m = 0;
  std::string kind;
  std::string sampling;
  std::vector<int> indices;
  std::vector<double> locations;
  std::vector<double> grid;
  bool verbose = false;
};

bool given(const CLI::App& app, const std::string& name) { return app.count(name) > 0; }

void emit(const Globals& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + g.output);
  out << text;
}

Json load_config(const Globals& g) {
  return g.config.empty() ? Json::object() : read_json_file(g.config);
}

void add_experiment_flags(CLI::App* sub, ExperimentFlags& f) {
  sub->add_option("--operator", f.op, "D, D+I, D2, D2+4pi2I or poly:c0,c1,...");
  sub->add_option("--gamma0-sq", f.gamma0_sq, "bridge null-space variance parameter gamma0^2");
  sub->add_option("--sigma0-sq", f.sigma0_sq, "measurement noise variance");
  sub->add_option("--m", f.m, "number of time samples per trial");
  sub->add_option("--kind", f.kind, "time or fourier")->check(CLI::IsMember({"time", "fourier"}));
  sub->add_option("--sampling", f.sampling, "jittered, uniform, grid or fixed")
      ->check(CLI::IsMember({"jittered", "uniform", "grid", "fixed"}));
  sub->add_option("--indices", f.indices, "Fourier indices (closed under negation)")->delimiter(',');
  sub->add_option("--locations", f.locations, "fixed time-sample locations")->delimiter(',');
  sub->add_option("--grid", f.grid, "sweep grid values")->delimiter(',');
  sub->add_flag("--verbose", f.verbose, "keep per-trial errors in JSON output");
}

ExperimentConfig experiment_config(const CLI::App& app, const CLI::App& sub, const Globals& g,
                                   const ExperimentFlags& f, ExperimentConfig cfg) {
  apply_config(load_config(g), cfg);
  if (given(app, "--seed")) cfg.seed = g.seed;
  if (given(app, "--n-coef")) cfg.n_coef = g.n_coef;
  if (given(app, "--trials")) cfg.trials = g.trials;
  if (given(sub, "--operator")) cfg.op = f.op;
  if (given(sub, "--gamma0-sq")) cfg.gamma0_sq = f.gamma0_sq;
  if (given(sub, "--sigma0-sq")) cfg.sigma0_sq = f.sigma0_sq;
  if (given(sub, "--m")) cfg.m = f.m;
  if (given(sub, "--kind")) {
    cfg.kind = f.kind == "fourier" ? MeasurementKind::FourierSamples : MeasurementKind::TimeSamples;
  }
  if (given(sub, "--locations")) {
    cfg.locations = f.locations;
    cfg.sampling = SamplingScheme::Fixed;
  }
  if (given(sub, "--sampling")) cfg.sampling = parse_sampling(f.sampling);
  if (given(sub, "--indices")) cfg.indices = f.indices;
  if (given(sub, "--grid")) cfg.grid = f.grid;
  if (f.verbose) cfg.verbose = true;
  return cfg;
}

std::string render(const Globals& g, const ExperimentRecord& rec) {
  std::ostringstream os;
  if (g.format == "json") {
    os << to_json(rec).dump(2) << '\n';
  } else {
    write_sweep_csv(os, rec);
  }
  return os.str();
}

void report_warnings(const ExperimentRecord& rec) {
  for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic spline reconstruction and Gaussian-bridge experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "root seed")->capture_default_str();
  app.add_option("--n-coef", g.n_coef, "Fourier band limit K")->capture_default_str();
  app.add_option("--trials", g.trials, "Monte Carlo trials");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", g.output, "output file (default stdout)");
  app.add_option("--config", g.config, "JSON configuration; command-line flags take precedence")
      ->check(CLI::ExistingFile);

  auto* reconstruct = app.add_subcommand("reconstruct", "solve for a spline from measurements");
  std::string r_op = "D";
  double r_gamma = 1.0;
  double r_lambda = 0.0;
  std::string r_meas;
  std::string r_y;
  std::string r_solver = "representer";
  int r_grid = 512;
  reconstruct->add_option("--operator", r_op, "operator");
  reconstruct->add_option("--gamma", r_gamma, "null-space weight gamma");
  reconstruct->add_option("--lambda", r_lambda, "regularization weight");
  reconstruct->add_option("--measurements", r_meas, "measurement JSON (file or inline)");
  reconstruct->add_option("--y", r_y, "measurement values (file, JSON array or comma list)");
  reconstruct->add_option("--solver", r_solver, "representer or regularized")
      ->check(CLI::IsMember({"representer", "regularized"}));
  reconstruct->add_option("--grid", r_grid, "points of the sampled reconstruction")->check(CLI::PositiveNumber);

  auto* bridge = app.add_subcommand("simulate-bridge", "draw one Gaussian bridge");
  std::string b_op = "D";
  double b_gamma0_sq = 1.0;
  int b_grid = 512;
  bridge->add_option("--operator", b_op, "operator");
  bridge->add_option("--gamma0-sq", b_gamma0_sq, "gamma0^2");
  bridge->add_option("--grid", b_grid, "evaluation points")->check(CLI::PositiveNumber);

  auto* lambda_sweep = app.add_subcommand("sweep-lambda", "NMSE as a function of lambda");
  ExperimentFlags lf;
  add_experiment_flags(lambda_sweep, lf);

  auto* gamma_sweep = app.add_subcommand("sweep-gamma", "NMSE as a function of gamma^2");
  ExperimentFlags gf;
  add_experiment_flags(gamma_sweep, gf);

  auto* table = app.add_subcommand("table2", "estimator comparison table");
  bool paper_fidelity = false;
  int t_m = 0;
  std::string t_sampling;
  table->add_flag("--paper-fidelity", paper_fidelity, "use 500 trials");
  table->add_option("--m", t_m, "time samples per trial");
  table->add_option("--sampling", t_sampling, "jittered, uniform or grid")
      ->check(CLI::IsMember({"jittered", "uniform", "grid"}));

  auto* kernel = app.add_subcommand("kernel-dump", "sample the reproducing kernel");
  std::string k_op = "D";
  double k_gamma = 1.0;
  int k_grid = 512;
  kernel->add_option("--operator", k_op, "operator");
  kernel->add_option("--gamma", k_gamma, "gamma");
  kernel->add_option("--grid", k_grid, "grid points")->check(CLI::PositiveNumber);

  for (auto* sub : {reconstruct, bridge, lambda_sweep, gamma_sweep, table, kernel}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (given(app, "--trials") && g.trials < 1) throw ConfigError("--trials must be >= 1");
    if (given(app, "--n-coef") && g.n_coef < 1) throw ConfigError("--n-coef must be >= 1");

    if (lambda_sweep->parsed()) {
      ExperimentConfig cfg;
      cfg.op = "D+I";
      cfg.grid = default_lambda_grid();
      cfg = experiment_config(app, *lambda_sweep, g, lf, cfg);
      const auto rec = run_lambda_sweep(cfg);
      report_warnings(rec);
      emit(g, render(g, rec));
    } else if (gamma_sweep->parsed()) {
      ExperimentConfig cfg;
      cfg.op = "D";
      cfg.grid = default_gamma_grid();
      cfg = experiment_config(app, *gamma_sweep, g, gf, cfg);
      const auto rec = run_gamma_sweep(cfg);
      report_warnings(rec);
      emit(g, render(g, rec));
    } else if (table->parsed()) {
      TableConfig tc;
      const Json j = load_config(g);
      if (j.contains("trials")) tc.trials = j.at("trials").get<int>();
      if (j.contains("n_coef")) tc.n_coef = j.at("n_coef").get<int>();
      if (j.contains("seed")) tc.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("m")) tc.m = j.at("m").get<int>();
      if (j.contains("sampling")) tc.sampling = parse_sampling(j.at("sampling").get<std::string>());
      if (j.value("paper_fidelity", false)) tc.trials = 500;
      if (paper_fidelity) tc.trials = 500;
      if (given(app, "--trials")) tc.trials = g.trials;
      if (given(app, "--n-coef")) tc.n_coef = g.n_coef;
      if (given(app, "--seed")) tc.seed = g.seed;
      if (given(*table, "--m")) tc.m = t_m;
      if (given(*table, "--sampling")) tc.sampling = parse_sampling(t_sampling);
      const auto rows = run_table2(tc);
      std::ostringstream os;
      if (g.format == "json") {
        Json out = Json::array();
        for (const auto& r : rows) out.push_back(to_json(r));
        os << out.dump(2) << '\n';
      } else {
        write_table_csv(os, rows);
      }
      emit(g, os.str());
    } else if (kernel->parsed()) {
      const Json j = load_config(g);
      int n = j.value("n_coef", kDefaultCoefficients);
      if (given(app, "--n-coef")) n = g.n_coef;
      if (!given(*kernel, "--operator")) k_op = j.value("operator", k_op);
      if (!given(*kernel, "--gamma")) k_gamma = j.value("gamma", k_gamma);
      if (!given(*kernel, "--grid")) k_grid = j.value("grid", k_grid);
      const auto rows = dump_kernel(parse_operator(k_op, n), k_gamma, n, k_grid);
      std::ostringstream os;
      if (g.format == "json") {
        Json t = Json::array(), h = Json::array();
        for (const auto& [ti, hi] : rows) {
          t.push_back(ti);
          h.push_back(hi);
        }
        os << Json{{"operator", k_op}, {"gamma", k_gamma}, {"n_coef", n}, {"t", t}, {"h", h}}.dump(2)
           << '\n';
      } else {
        write_kernel_csv(os, rows);
      }
      emit(g, os.str());
    } else if (bridge->parsed()) {
      const Json j = load_config(g);
      int n = j.value("n_coef", kDefaultCoefficients);
      std::uint64_t seed = j.value("seed", kDefaultSeed);
      if (given(app, "--n-coef")) n = g.n_coef;
      if (given(app, "--seed")) seed = g.seed;
      if (!given(*bridge, "--operator")) b_op = j.value("operator", b_op);
      if (!given(*bridge, "--gamma0-sq")) b_gamma0_sq = j.value("gamma0_sq", b_gamma0_sq);
      if (!given(*bridge, "--grid")) b_grid = j.value("grid", b_grid);
      if (!(b_gamma0_sq > 0.0)) throw ConfigError("--gamma0-sq must be positive");
      const OperatorSpec op = parse_operator(b_op, n);
      RandomStream rng = RandomStream(seed).substream(0);
      const BridgeDraw s = draw_bridge(op, std::sqrt(b_gamma0_sq), n, rng);
      std::ostringstream os;
      if (g.format == "json") {
        Json t = Json::array(), v = Json::array();
        for (int i = 0; i < b_grid; ++i) {
          const double ti = static_cast<double>(i) / b_grid;
          t.push_back(ti);
          v.push_back(evaluate(s.signal, ti).real());
        }
        os << Json{{"operator", b_op},        {"gamma0_sq", b_gamma0_sq}, {"seed", seed},
                   {"n_coef", n},             {"energy", l2_norm_sq(s.signal)},
                   {"tail_energy", tail_energy(op, n)}, {"t", t}, {"s", v}}
                  .dump(2)
           << '\n';
      } else {
        os << "t,s\n";
        for (int i = 0; i < b_grid; ++i) {
          const double ti = static_cast<double>(i) / b_grid;
          os << format_number(ti) << ',' << format_number(evaluate(s.signal, ti).real()) << '\n';
        }
      }
      emit(g, os.str());
    } else if (reconstruct->parsed()) {
      const Json j = load_config(g);
      int n = j.value("n_coef", kDefaultCoefficients);
      if (given(app, "--n-coef")) n = g.n_coef;
      if (!given(*reconstruct, "--operator")) r_op = j.value("operator", r_op);
      if (!given(*reconstruct, "--gamma")) r_gamma = j.value("gamma", r_gamma);
      if (!given(*reconstruct, "--lambda")) r_lambda = j.value("lambda", r_lambda);
      if (!given(*reconstruct, "--solver")) r_solver = j.value("solver", r_solver);
      if (!given(*reconstruct, "--grid")) r_grid = j.value("grid", r_grid);

      Json meas_doc;
      if (given(*reconstruct, "--measurements")) {
        std::ifstream in(r_meas);
        meas_doc = in ? read_json_file(r_meas) : Json::parse(r_meas, nullptr, false);
        if (meas_doc.is_discarded()) throw ConfigError("cannot parse --measurements");
      } else if (j.contains("measurements")) {
        meas_doc = j["measurements"];
      } else {
        throw ConfigError("reconstruct needs --measurements");
      }
      Eigen::VectorXcd y;
      if (given(*reconstruct, "--y")) {
        y = parse_values(r_y);
      } else if (j.contains("y")) {
        y = parse_values(j["y"].dump());
      } else {
        throw ConfigError("reconstruct needs --y");
      }

      const MeasurementSet meas = parse_measurements(meas_doc);
      const KernelSpec h = build_kernel(parse_operator(r_op, n), r_gamma, n);
      const SystemMatrices sys = assemble_system(h, meas);
      const ReconstructionModel model = r_solver == "representer"
                                            ? solve_representer(sys, y, r_lambda)
                                            : solve_gamma_regularized(sys, y, r_lambda);
      if (model.ill_conditioned()) {
        std::cerr << "warning: condition estimate " << model.condition << '\n';
      }
      const PeriodicSignal f = reconstruct_signal(model);
      std::ostringstream os;
      if (g.format == "csv" && given(app, "--format")) {
        os << "t,f\n";
        for (int i = 0; i < r_grid; ++i) {
          const double ti = static_cast<double>(i) / r_grid;
          os << format_number(ti) << ',' << format_number(evaluate(f, ti).real()) << '\n';
        }
      } else {
        os << to_json(model, f, r_grid).dump(2) << '\n';
      }
      emit(g, os.str());
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
