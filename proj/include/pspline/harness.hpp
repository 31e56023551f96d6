#pragma once

// Monte Carlo drivers: lambda sweep, gamma sweep and the estimator
// comparison table. Every trial owns a substream of the root seed, and all
// estimators within a trial see the same bridge and the same noise.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pspline/error.hpp"
#include "pspline/random.hpp"
#include "pspline/rkhs.hpp"
#include "pspline/solvers.hpp"
#include "pspline/spectral.hpp"
#include "pspline/stochastic.hpp"

namespace pspline {

/// gamma^2 used for the "gamma -> 0" and "gamma -> infinity" estimators.
inline constexpr double kGammaSqToZero = 1e-12;
inline constexpr double kGammaSqToInfinity = 1e12;
inline constexpr std::uint64_t kDefaultSeed = 1;

/// How time-sample locations are drawn for each trial.
enum class SamplingScheme {
  Jittered,  ///< t_m = (m + u_m) / M, u_m ~ U[0, 1)
  Uniform,   ///< i.i.d. U[0, 1)
  Grid,      ///< t_m = m / M
  Fixed,     ///< user-supplied locations, identical for all trials
};

inline const char* to_string(SamplingScheme s) {
  switch (s) {
    case SamplingScheme::Jittered:
      return "jittered";
    case SamplingScheme::Uniform:
      return "uniform";
    case SamplingScheme::Grid:
      return "grid";
    case SamplingScheme::Fixed:
      return "fixed";
  }
  return "?";
}

inline SamplingScheme parse_sampling(const std::string& s) {
  if (s == "jittered") return SamplingScheme::Jittered;
  if (s == "uniform") return SamplingScheme::Uniform;
  if (s == "grid") return SamplingScheme::Grid;
  if (s == "fixed") return SamplingScheme::Fixed;
  throw ConfigError("unknown sampling scheme '" + s + "'");
}

inline std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    g[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return g;
}

/// 10^lo, 10^(lo+1), ..., 10^hi.
inline std::vector<double> decade_grid(int lo, int hi) {
  std::vector<double> g;
  for (int e = lo; e <= hi; ++e) g.push_back(std::pow(10.0, e));
  return g;
}

inline std::vector<double> default_lambda_grid() { return linear_grid(0.001, 0.03, 30); }
inline std::vector<double> default_gamma_grid() { return decade_grid(-4, 12); }

struct ExperimentConfig {
  std::string op = "D+I";
  double gamma0_sq = 1.0;
  double sigma0_sq = 1e-2;
  int m = 30;
  int trials = 500;
  int n_coef = kDefaultCoefficients;
  MeasurementKind kind = MeasurementKind::TimeSamples;
  SamplingScheme sampling = SamplingScheme::Jittered;
  std::vector<double> locations;
  std::vector<int> indices;
  std::vector<double> grid;
  std::uint64_t seed = kDefaultSeed;
  bool verbose = false;

  void validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (n_coef < 1) throw ConfigError("n_coef must be >= 1");
    if (!(gamma0_sq > 0.0) || !std::isfinite(gamma0_sq)) throw ConfigError("gamma0_sq must be positive");
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) throw ConfigError("sigma0_sq must be positive");
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw ConfigError("grid values must be positive");
      if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("grid must be strictly increasing");
    }
    switch (kind) {
      case MeasurementKind::TimeSamples:
        if (sampling == SamplingScheme::Fixed) {
          if (locations.empty()) throw ConfigError("fixed sampling needs locations");
        } else if (m < 1) {
          throw ConfigError("m must be >= 1");
        }
        break;
      case MeasurementKind::FourierSamples:
        if (indices.empty()) throw ConfigError("Fourier sampling needs indices");
        for (int k : indices) {
          if (std::abs(k) > n_coef) throw ConfigError("Fourier index outside band");
        }
        break;
      case MeasurementKind::Generic:
        throw ConfigError("experiments support time or Fourier sampling only");
    }
  }
};

struct EstimatorStats {
  std::string name;
  double parameter = 0.0;
  double nmse = 0.0;
  double std_error = 0.0;
  /// Mean squared error over trials.
  double mse = 0.0;
  /// mse divided by the analytic E||s||^2 of the truncated bridge.
  double normalized_mse = 0.0;
  std::vector<double> errors;
};

struct ExperimentRecord {
  std::string sweep;
  ExperimentConfig config;
  std::vector<EstimatorStats> points;
  std::vector<EstimatorStats> references;
  std::vector<double> energies;
  /// Closed-form MSE / E||s||^2 per grid point (Fourier lambda sweeps only).
  std::vector<double> closed_form;
  double expected_energy = 0.0;
  double tail_energy = 0.0;
  std::size_t argmin = 0;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;

  double argmin_parameter() const { return points.at(argmin).parameter; }
};

/// Same value to three significant figures (relative gap at most 5e-3).
inline bool same_to_3_significant(double a, double b) {
  return std::abs(a - b) <= 5e-3 * std::max(std::abs(a), std::abs(b));
}

namespace detail {

inline MeasurementSet draw_measurements(const ExperimentConfig& cfg, RandomStream& rng) {
  if (cfg.kind == MeasurementKind::FourierSamples) return MeasurementSet::fourier_samples(cfg.indices);
  std::vector<double> t;
  switch (cfg.sampling) {
    case SamplingScheme::Fixed:
      t = cfg.locations;
      break;
    case SamplingScheme::Grid:
      for (int i = 0; i < cfg.m; ++i) t.push_back(static_cast<double>(i) / cfg.m);
      break;
    case SamplingScheme::Jittered:
      for (int i = 0; i < cfg.m; ++i) t.push_back((i + rng.uniform()) / cfg.m);
      break;
    case SamplingScheme::Uniform:
      for (int i = 0; i < cfg.m; ++i) t.push_back(rng.uniform());
      std::sort(t.begin(), t.end());
      break;
  }
  return MeasurementSet::time_samples(std::move(t));
}

/// Per-trial random sources: sample locations, innovation, measurement noise.
struct TrialStreams {
  RandomStream locations;
  RandomStream innovation;
  RandomStream noise;

  TrialStreams(std::uint64_t seed, std::uint64_t trial)
      : TrialStreams(RandomStream(seed).substream(trial)) {}

 private:
  explicit TrialStreams(const RandomStream& t)
      : locations(t.substream(0)), innovation(t.substream(1)), noise(t.substream(2)) {}
};

inline EstimatorStats summarize(std::string name, double parameter, std::vector<double> errors,
                                const std::vector<double>& energies, double expected_energy) {
  EstimatorStats s;
  s.name = std::move(name);
  s.parameter = parameter;
  s.nmse = nmse(errors, energies);
  s.std_error = nmse_standard_error(errors, energies);
  double total = 0.0;
  for (double e : errors) total += e;
  s.mse = total / static_cast<double>(errors.size());
  s.normalized_mse = s.mse / expected_energy;
  s.errors = std::move(errors);
  return s;
}

inline std::size_t argmin_nmse(const std::vector<EstimatorStats>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i].nmse < v[best].nmse) best = i;
  }
  return best;
}

inline void strip_errors(ExperimentRecord& r) {
  if (r.config.verbose) return;
  for (auto& p : r.points) p.errors.clear();
  for (auto& p : r.references) p.errors.clear();
}

}  // namespace detail

/// NMSE of s~_{gamma0, lambda} for every lambda in the grid.
inline ExperimentRecord run_lambda_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const OperatorSpec op = parse_operator(cfg.op, cfg.n_coef);
  const KernelSpec h = build_kernel(op, std::sqrt(cfg.gamma0_sq), cfg.n_coef);

  ExperimentRecord rec;
  rec.sweep = "lambda";
  rec.config = cfg;
  rec.expected_energy = bridge_energy(h);
  rec.tail_energy = tail_energy(op, cfg.n_coef);

  std::vector<std::vector<double>> errors(cfg.grid.size());
  for (int i = 0; i < cfg.trials; ++i) {
    detail::TrialStreams rs(cfg.seed, static_cast<std::uint64_t>(i));
    const MeasurementSet meas = detail::draw_measurements(cfg, rs.locations);
    const BridgeDraw bridge = draw_bridge(op, std::sqrt(cfg.gamma0_sq), cfg.n_coef, rs.innovation);
    const MeasurementDraw data = measure(bridge, meas, cfg.sigma0_sq, rs.noise);
    const SystemMatrices sys = assemble_system(h, meas);
    rec.energies.push_back(l2_norm_sq(bridge.signal));
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
      const auto model = solve_gamma_regularized(sys, data.y, cfg.grid[g]);
      errors[g].push_back(l2_distance_sq(bridge.signal, model.fitted));
    }
  }
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    rec.points.push_back(detail::summarize("lambda", cfg.grid[g], std::move(errors[g]),
                                           rec.energies, rec.expected_energy));
  }
  rec.argmin = detail::argmin_nmse(rec.points);

  if (cfg.kind == MeasurementKind::FourierSamples && op.null_dim() == 0) {
    const auto meas = MeasurementSet::fourier_samples(cfg.indices);
    for (double lambda : cfg.grid) {
      rec.closed_form.push_back(
          closed_form_fourier_mse(op, meas, lambda, cfg.sigma0_sq, cfg.n_coef) /
          rec.expected_energy);
    }
  }
  detail::strip_errors(rec);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

/// NMSE of s~_{gamma, sigma0^2} over a grid of gamma^2, plus the four
/// reference estimators gamma -> 0, representer, MMSE and gamma -> infinity.
inline ExperimentRecord run_gamma_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const OperatorSpec op = parse_operator(cfg.op, cfg.n_coef);
  const double gamma0 = std::sqrt(cfg.gamma0_sq);
  const double lambda = cfg.sigma0_sq;
  const KernelSpec h_unit = build_kernel(op, 1.0, cfg.n_coef);

  ExperimentRecord rec;
  rec.sweep = "gamma";
  rec.config = cfg;
  rec.expected_energy = bridge_energy(build_kernel(op, gamma0, cfg.n_coef));
  rec.tail_energy = tail_energy(op, cfg.n_coef);
  if (op.null_dim() == 0) {
    rec.warnings.push_back("operator " + op.name() +
                           " has a trivial null space; gamma has no effect on the estimator");
  }

  const std::vector<std::pair<std::string, double>> refs = {
      {"gamma_to_0", kGammaSqToZero},
      {"representer", 1.0},
      {"mmse", cfg.gamma0_sq},
      {"gamma_to_inf", kGammaSqToInfinity}};

  std::vector<std::vector<double>> errors(cfg.grid.size());
  std::vector<std::vector<double>> ref_errors(refs.size());
  for (int i = 0; i < cfg.trials; ++i) {
    detail::TrialStreams rs(cfg.seed, static_cast<std::uint64_t>(i));
    const MeasurementSet meas = detail::draw_measurements(cfg, rs.locations);
    const BridgeDraw bridge = draw_bridge(op, gamma0, cfg.n_coef, rs.innovation);
    const MeasurementDraw data = measure(bridge, meas, cfg.sigma0_sq, rs.noise);
    const SystemMatrices sys = assemble_system(h_unit, meas);
    rec.energies.push_back(l2_norm_sq(bridge.signal));
    auto regularized_error = [&](double gamma_sq) {
      const auto model = solve_gamma_regularized(sys.with_gamma(std::sqrt(gamma_sq)), data.y, lambda);
      return l2_distance_sq(bridge.signal, model.fitted);
    };
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) errors[g].push_back(regularized_error(cfg.grid[g]));
    for (std::size_t r = 0; r < refs.size(); ++r) {
      if (refs[r].first == "representer") {
        const auto model = solve_representer(sys, data.y, lambda);
        ref_errors[r].push_back(l2_distance_sq(bridge.signal, model.fitted));
      } else {
        ref_errors[r].push_back(regularized_error(refs[r].second));
      }
    }
  }
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    rec.points.push_back(detail::summarize("gamma_sq", cfg.grid[g], std::move(errors[g]),
                                           rec.energies, rec.expected_energy));
  }
  for (std::size_t r = 0; r < refs.size(); ++r) {
    rec.references.push_back(detail::summarize(refs[r].first, refs[r].second,
                                               std::move(ref_errors[r]), rec.energies,
                                               rec.expected_energy));
  }
  rec.argmin = detail::argmin_nmse(rec.points);
  detail::strip_errors(rec);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

struct TableConfig {
  std::vector<std::string> operators = {"D", "D2", "D2+4pi2I"};
  std::vector<double> gamma0_sq = {1e-3, 1e0, 1e3, 1e6, 1e9};
  std::vector<double> sigma0 = {1e-1, 1e-2};
  int m = 30;
  int trials = 100;
  int n_coef = kDefaultCoefficients;
  SamplingScheme sampling = SamplingScheme::Jittered;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (operators.empty() || gamma0_sq.empty() || sigma0.empty()) {
      throw ConfigError("table needs operators, gamma0^2 values and sigma0 values");
    }
    for (double g : gamma0_sq) {
      if (!(g > 0.0)) throw ConfigError("gamma0^2 values must be positive");
    }
    for (double s : sigma0) {
      if (!(s > 0.0)) throw ConfigError("sigma0 values must be positive");
    }
    if (trials < 1 || m < 1 || n_coef < 1) throw ConfigError("trials, m and n_coef must be >= 1");
    if (sampling == SamplingScheme::Fixed) throw ConfigError("table uses random sampling");
  }
};

/// Index of the MMSE column within a table row's references.
inline constexpr std::size_t kTableMmseColumn = 2;

/// One record per (operator, gamma0^2, sigma0) cell row; the references hold
/// gamma -> 0, representer, MMSE and gamma -> infinity in that order, and
/// `argmin` indexes the best of them. All rows of one operator share the
/// sample locations, innovations and standardized noise of each trial.
inline std::vector<ExperimentRecord> run_table2(const TableConfig& tc) {
  tc.validate();
  std::vector<ExperimentRecord> out;
  const std::vector<std::pair<std::string, double>> refs = {
      {"gamma_to_0", kGammaSqToZero},
      {"representer", 1.0},
      {"mmse", 0.0},
      {"gamma_to_inf", kGammaSqToInfinity}};

  for (const auto& op_name : tc.operators) {
    const auto start = std::chrono::steady_clock::now();
    const OperatorSpec op = parse_operator(op_name, tc.n_coef);
    const KernelSpec h_unit = build_kernel(op, 1.0, tc.n_coef);
    const std::size_t rows = tc.gamma0_sq.size() * tc.sigma0.size();

    std::vector<ExperimentRecord> recs(rows);
    std::vector<std::vector<std::vector<double>>> errors(
        rows, std::vector<std::vector<double>>(refs.size()));
    for (std::size_t g = 0; g < tc.gamma0_sq.size(); ++g) {
      for (std::size_t s = 0; s < tc.sigma0.size(); ++s) {
        auto& r = recs[g * tc.sigma0.size() + s];
        r.sweep = "table2";
        r.config.op = op_name;
        r.config.gamma0_sq = tc.gamma0_sq[g];
        r.config.sigma0_sq = tc.sigma0[s] * tc.sigma0[s];
        r.config.m = tc.m;
        r.config.trials = tc.trials;
        r.config.n_coef = tc.n_coef;
        r.config.sampling = tc.sampling;
        r.config.seed = tc.seed;
        r.expected_energy = bridge_energy(build_kernel(op, std::sqrt(tc.gamma0_sq[g]), tc.n_coef));
        r.tail_energy = tail_energy(op, tc.n_coef);
      }
    }

    ExperimentConfig sampler;
    sampler.m = tc.m;
    sampler.sampling = tc.sampling;
    for (int i = 0; i < tc.trials; ++i) {
      detail::TrialStreams rs(tc.seed, static_cast<std::uint64_t>(i));
      const MeasurementSet meas = detail::draw_measurements(sampler, rs.locations);
      const NoiseDraw w = draw_white_noise(tc.n_coef, rs.innovation);
      const SystemMatrices sys = assemble_system(h_unit, meas);
      for (std::size_t g = 0; g < tc.gamma0_sq.size(); ++g) {
        const double gamma0 = std::sqrt(tc.gamma0_sq[g]);
        const BridgeDraw bridge = synthesize_bridge(op, gamma0, w);
        const double energy = l2_norm_sq(bridge.signal);
        for (std::size_t s = 0; s < tc.sigma0.size(); ++s) {
          const std::size_t row = g * tc.sigma0.size() + s;
          const double lambda = tc.sigma0[s] * tc.sigma0[s];
          RandomStream noise = rs.noise;
          const MeasurementDraw data = measure(bridge, meas, lambda, noise);
          recs[row].energies.push_back(energy);
          for (std::size_t r = 0; r < refs.size(); ++r) {
            ReconstructionModel model =
                refs[r].first == "representer"
                    ? solve_representer(sys, data.y, lambda)
                    : solve_gamma_regularized(
                          sys.with_gamma(refs[r].first == "mmse" ? gamma0 : std::sqrt(refs[r].second)),
                          data.y, lambda);
            errors[row][r].push_back(l2_distance_sq(bridge.signal, model.fitted));
          }
        }
      }
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (std::size_t row = 0; row < rows; ++row) {
      auto& r = recs[row];
      for (std::size_t k = 0; k < refs.size(); ++k) {
        const double param = refs[k].first == "mmse" ? r.config.gamma0_sq : refs[k].second;
        r.references.push_back(detail::summarize(refs[k].first, param, std::move(errors[row][k]),
                                                 r.energies, r.expected_energy));
      }
      r.argmin = detail::argmin_nmse(r.references);
      r.wall_seconds = seconds / static_cast<double>(rows);
      for (auto& p : r.references) p.errors.clear();
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// Whether the MMSE column attains the row minimum, allowing ties at three
/// significant figures.
inline bool mmse_is_row_minimum(const ExperimentRecord& row) {
  const double mmse = row.references.at(kTableMmseColumn).nmse;
  const double best = row.references.at(row.argmin).nmse;
  return row.argmin == kTableMmseColumn || same_to_3_significant(mmse, best);
}

/// (t, h_gamma(t)) on t = i / grid, i = 0..grid-1.
inline std::vector<std::pair<double, double>> dump_kernel(const OperatorSpec& op, double gamma,
                                                          int n_coef, int grid) {
  if (grid < 1) throw ConfigError("kernel grid must have at least one point");
  if (!rkhs_admissible(op, n_coef).admissible) {
    throw NotAdmissible("kernel of " + op.name() + " has no pointwise values");
  }
  const KernelSpec h = build_kernel(op, gamma, n_coef);
  std::vector<std::pair<double, double>> rows;
  rows.reserve(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / grid;
    rows.emplace_back(t, kernel_value(h, t));
  }
  return rows;
}

}  // namespace pspline
