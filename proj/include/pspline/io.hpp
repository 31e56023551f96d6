#pragma once

// CSV / JSON serialization of experiment records, and parsing of
// measurement and experiment configuration documents.

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pspline/error.hpp"
#include "pspline/harness.hpp"
#include "pspline/rkhs.hpp"
#include "pspline/solvers.hpp"
#include "pspline/spectral.hpp"

namespace pspline {

using Json = nlohmann::json;

/// Shortest round-trip text is not required; 17 significant digits always.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline void write_sweep_csv(std::ostream& os, const ExperimentRecord& rec) {
  os << "estimator,parameter,nmse,std_error,mse,normalized_mse,closed_form\n";
  for (std::size_t i = 0; i < rec.points.size(); ++i) {
    const auto& p = rec.points[i];
    os << p.name << ',' << format_number(p.parameter) << ',' << format_number(p.nmse) << ','
       << format_number(p.std_error) << ',' << format_number(p.mse) << ','
       << format_number(p.normalized_mse) << ',';
    if (i < rec.closed_form.size()) os << format_number(rec.closed_form[i]);
    os << '\n';
  }
  for (const auto& p : rec.references) {
    os << p.name << ',' << format_number(p.parameter) << ',' << format_number(p.nmse) << ','
       << format_number(p.std_error) << ',' << format_number(p.mse) << ','
       << format_number(p.normalized_mse) << ",\n";
  }
}

/// One row per (operator, gamma0^2, sigma0); estimator columns in the order
/// gamma -> 0, representer, MMSE, gamma -> infinity, then the row argmin.
inline void write_table_csv(std::ostream& os, const std::vector<ExperimentRecord>& rows) {
  os << "operator,gamma0_sq,sigma0,nmse_gamma_to_0,nmse_representer,nmse_mmse,nmse_gamma_to_inf,"
        "se_gamma_to_0,se_representer,se_mmse,se_gamma_to_inf,argmin\n";
  for (const auto& r : rows) {
    os << r.config.op << ',' << format_number(r.config.gamma0_sq) << ','
       << format_number(std::sqrt(r.config.sigma0_sq));
    for (const auto& e : r.references) os << ',' << format_number(e.nmse);
    for (const auto& e : r.references) os << ',' << format_number(e.std_error);
    os << ',' << r.references.at(r.argmin).name << '\n';
  }
}

inline void write_kernel_csv(std::ostream& os, const std::vector<std::pair<double, double>>& rows) {
  os << "t,h\n";
  for (const auto& [t, h] : rows) os << format_number(t) << ',' << format_number(h) << '\n';
}

inline Json to_json(const ExperimentConfig& c) {
  Json j{{"operator", c.op},
         {"gamma0_sq", c.gamma0_sq},
         {"sigma0_sq", c.sigma0_sq},
         {"m", c.m},
         {"trials", c.trials},
         {"n_coef", c.n_coef},
         {"seed", c.seed},
         {"grid", c.grid}};
  Json meas{{"kind", to_string(c.kind)}};
  if (c.kind == MeasurementKind::FourierSamples) {
    meas["indices"] = c.indices;
  } else {
    meas["sampling"] = to_string(c.sampling);
    if (c.sampling == SamplingScheme::Fixed) meas["locations"] = c.locations;
  }
  j["measurements"] = meas;
  return j;
}

inline Json to_json(const EstimatorStats& s) {
  Json j{{"name", s.name},
         {"parameter", s.parameter},
         {"nmse", s.nmse},
         {"std_error", s.std_error},
         {"mse", s.mse},
         {"normalized_mse", s.normalized_mse}};
  if (!s.errors.empty()) j["errors"] = s.errors;
  return j;
}

inline Json to_json(const ExperimentRecord& r) {
  Json j{{"sweep", r.sweep},
         {"config", to_json(r.config)},
         {"expected_energy", r.expected_energy},
         {"tail_energy", r.tail_energy},
         {"wall_seconds", r.wall_seconds}};
  Json points = Json::array();
  for (const auto& p : r.points) points.push_back(to_json(p));
  j["points"] = points;
  if (!r.points.empty()) j["argmin_parameter"] = r.argmin_parameter();
  if (!r.references.empty()) {
    Json refs = Json::array();
    for (const auto& p : r.references) refs.push_back(to_json(p));
    j["references"] = refs;
    if (r.sweep == "table2") j["argmin"] = r.references.at(r.argmin).name;
  }
  if (!r.closed_form.empty()) j["closed_form"] = r.closed_form;
  if (r.config.verbose) j["energies"] = r.energies;
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

namespace detail {

template <class T>
T json_get(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

// A coefficient is a number or a [re, im] pair.
inline Complex json_complex(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError("coefficient must be a number or a [re, im] pair");
}

}  // namespace detail

/// {"kind":"time","locations":[...]} | {"kind":"fourier","indices":[...]} |
/// {"kind":"generic","signals":[[c_{-K}, ..., c_K], ...]}
inline MeasurementSet parse_measurements(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("measurement document needs a kind");
  const auto kind = detail::json_get<std::string>(j, "kind");
  try {
    if (kind == "time") {
      return MeasurementSet::time_samples(detail::json_get<std::vector<double>>(j, "locations"));
    }
    if (kind == "fourier") {
      return MeasurementSet::fourier_samples(detail::json_get<std::vector<int>>(j, "indices"));
    }
    if (kind == "generic") {
      if (!j.contains("signals") || !j["signals"].is_array()) throw ConfigError("generic measurements need signals");
      std::vector<PeriodicSignal> signals;
      for (const auto& s : j["signals"]) {
        if (!s.is_array() || s.size() % 2 == 0) {
          throw ConfigError("each generic signal lists 2K+1 coefficients");
        }
        std::vector<Complex> c;
        bool real = true;
        for (const auto& v : s) {
          c.push_back(detail::json_complex(v));
          if (!v.is_number()) real = false;
        }
        const int n = static_cast<int>(c.size() / 2);
        bool hermitian = true;
        for (int k = 0; k <= n; ++k) {
          if (std::abs(c[n + k] - std::conj(c[n - k])) > kRealTolerance) hermitian = false;
        }
        signals.emplace_back(n, std::move(c), real || hermitian);
      }
      return MeasurementSet::generic(std::move(signals));
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown measurement kind '" + kind + "'");
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Measurement values: a JSON array of numbers / [re, im] pairs, either
/// inline or in a file, or comma-separated numbers inline.
inline Eigen::VectorXcd parse_values(const std::string& text) {
  std::string s = text;
  Json j;
  std::ifstream in(text);
  if (in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    s = buf.str();
  }
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ConfigError("no measurement values");
  if (s[first] != '[') s = "[" + s + "]";
  try {
    j = Json::parse(s);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("cannot parse measurement values: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw ConfigError("measurement values must be a nonempty array");
  Eigen::VectorXcd y(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) y[static_cast<Eigen::Index>(i)] = detail::json_complex(j[i]);
  return y;
}

/// Overlays the keys present in `j` onto `cfg`.
inline void apply_config(const Json& j, ExperimentConfig& cfg) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  if (j.contains("operator")) cfg.op = detail::json_get<std::string>(j, "operator");
  if (j.contains("gamma0_sq")) cfg.gamma0_sq = detail::json_get<double>(j, "gamma0_sq");
  if (j.contains("sigma0_sq")) cfg.sigma0_sq = detail::json_get<double>(j, "sigma0_sq");
  if (j.contains("m")) cfg.m = detail::json_get<int>(j, "m");
  if (j.contains("trials")) cfg.trials = detail::json_get<int>(j, "trials");
  if (j.contains("n_coef")) cfg.n_coef = detail::json_get<int>(j, "n_coef");
  if (j.contains("seed")) cfg.seed = detail::json_get<std::uint64_t>(j, "seed");
  if (j.contains("grid")) cfg.grid = detail::json_get<std::vector<double>>(j, "grid");
  if (j.contains("verbose")) cfg.verbose = detail::json_get<bool>(j, "verbose");
  if (j.contains("measurements")) {
    const Json& m = j["measurements"];
    if (!m.is_object()) throw ConfigError("measurements must be an object");
    if (m.contains("kind")) {
      const auto kind = detail::json_get<std::string>(m, "kind");
      if (kind == "time") {
        cfg.kind = MeasurementKind::TimeSamples;
      } else if (kind == "fourier") {
        cfg.kind = MeasurementKind::FourierSamples;
      } else {
        throw ConfigError("experiments support time or fourier measurements, got '" + kind + "'");
      }
    }
    if (m.contains("sampling")) cfg.sampling = parse_sampling(detail::json_get<std::string>(m, "sampling"));
    if (m.contains("locations")) {
      cfg.locations = detail::json_get<std::vector<double>>(m, "locations");
      if (!m.contains("sampling")) cfg.sampling = SamplingScheme::Fixed;
    }
    if (m.contains("indices")) cfg.indices = detail::json_get<std::vector<int>>(m, "indices");
  }
}

inline Json to_json(const ReconstructionModel& model, const PeriodicSignal& f, int grid) {
  auto vec = [](const Eigen::VectorXcd& v, bool real) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (real) {
        out.push_back(v[i].real());
      } else {
        out.push_back(Json::array({v[i].real(), v[i].imag()}));
      }
    }
    return out;
  };
  Json j{{"kind", model.kind == ModelKind::RepresenterRT ? "representer" : "gamma_regularized"},
         {"operator", model.op.name()},
         {"gamma", model.gamma},
         {"lambda", model.lambda},
         {"condition", model.condition},
         {"a", vec(model.a_coeffs, model.real_valued)},
         {"b", vec(model.b_coeffs, false)},
         {"null_space", model.op.null_space()}};
  Json t = Json::array();
  Json v = Json::array();
  for (int i = 0; i < grid; ++i) {
    const double ti = static_cast<double>(i) / grid;
    const Complex fi = evaluate(f, ti);
    t.push_back(ti);
    if (model.real_valued) {
      v.push_back(fi.real());
    } else {
      v.push_back(Json::array({fi.real(), fi.imag()}));
    }
  }
  j["reconstruction"] = Json{{"t", t}, {"f", v}};
  if (model.ill_conditioned()) j["warning"] = "ill-conditioned system";
  return j;
}

}  // namespace pspline
