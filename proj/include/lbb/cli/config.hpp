#pragma once

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "lbb/cli/toml.hpp"
#include "lbb/localization.hpp"
#include "lbb/model.hpp"
#include "lbb/version.hpp"

namespace lbb::cli {

enum class ExperimentKind { sweep_tau, optimize, sweep_snr, uncertainty, validate, fisher };

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::sweep_tau: return "sweep-tau";
    case ExperimentKind::optimize: return "optimize";
    case ExperimentKind::sweep_snr: return "sweep-snr";
    case ExperimentKind::uncertainty: return "uncertainty";
    case ExperimentKind::validate: return "validate";
    case ExperimentKind::fisher: return "fisher";
  }
  return "?";
}

inline ExperimentKind kind_from_name(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::sweep_tau, ExperimentKind::optimize,
                           ExperimentKind::sweep_snr, ExperimentKind::uncertainty,
                           ExperimentKind::validate, ExperimentKind::fisher})
    if (name == kind_name(k)) return k;
  // accept underscores as in the config file
  std::string dashed = name;
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  if (dashed != name) return kind_from_name(dashed);
  throw ConfigError("unknown experiment kind '" + name + "'");
}

/// Fully resolved experiment description. Angle and ratio fields are radians
/// and linear ratios; the config boundary accepted degrees and decibels.
struct ExperimentConfig {
  Scenario scenario;
  ExperimentKind kind = ExperimentKind::sweep_tau;
  int grid_size = 1001;
  long n_realizations = 10000;
  long n_trials = 1000000;
  std::uint64_t seed = 1;
  std::string output;
  std::vector<int> n_alice_list;
  std::vector<double> snr_bob_db_list = {0.0, 5.0, 10.0, 15.0, 20.0};
  bool validate = false;
  std::vector<double> validate_taus = {0.0, 0.25, 0.5, 0.75, 1.0};
  bool quick = false;
  bool single_h = false;
  std::uint64_t single_h_seed = 0;
  bool mrt_fallback = false;
  bool oracle = false;
  long oracle_samples = 100000;
  int workers = 1;
  // uncertainty experiment
  std::vector<double> c_sigma_t_m = {0.0, 50.0, 200.0, 800.0};
  long n_location_samples = 1000;
  long n_channel_realizations = 1000;
  std::vector<CartesianPosition> anchors;
  bool anchors_are_default = true;
  bool redraw_main_channel = true;
  bool evaluate_at_true_location = false;
  CartesianPosition true_eve;  // resolved from [geometry], relative to Alice
};

namespace detail {

/// Wraps a parsed table with consumed-key tracking so typos surface as errors.
class Reader {
 public:
  explicit Reader(const toml::Table& table) : table_(table) {}

  bool has(const std::string& key) const { return table_.count(key) != 0; }

  const toml::Value& require(const std::string& key) {
    const auto it = table_.find(key);
    if (it == table_.end()) throw ConfigError("missing required key '" + key + "'");
    consumed_.insert(key);
    return it->second;
  }

  const toml::Value* optional(const std::string& key) {
    const auto it = table_.find(key);
    if (it == table_.end()) return nullptr;
    consumed_.insert(key);
    return &it->second;
  }

  double number(const std::string& key) { return require(key).as_number(key); }

  double number_or(const std::string& key, double fallback) {
    const toml::Value* v = optional(key);
    return v ? v->as_number(key) : fallback;
  }

  long integer(const std::string& key) {
    const toml::Value& v = require(key);
    if (v.kind != toml::Value::Kind::integer)
      throw ConfigError("line " + std::to_string(v.line) + ": '" + key + "' must be an integer");
    return static_cast<long>(v.i);
  }

  long integer_or(const std::string& key, long fallback) {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean_or(const std::string& key, bool fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (v->kind != toml::Value::Kind::boolean)
      throw ConfigError("line " + std::to_string(v->line) + ": '" + key + "' must be a boolean");
    return v->b;
  }

  std::string text(const std::string& key) {
    const toml::Value& v = require(key);
    if (v.kind != toml::Value::Kind::string)
      throw ConfigError("line " + std::to_string(v.line) + ": '" + key + "' must be a string");
    return v.s;
  }

  std::string text_or(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : fallback;
  }

  std::vector<double> number_list(const std::string& key) {
    const toml::Value& v = require(key);
    if (v.kind != toml::Value::Kind::array)
      throw ConfigError("line " + std::to_string(v.line) + ": '" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.items.size());
    for (const auto& item : v.items) out.push_back(item.as_number(key));
    return out;
  }

  std::vector<CartesianPosition> point_list(const std::string& key) {
    const toml::Value& v = require(key);
    if (v.kind != toml::Value::Kind::array)
      throw ConfigError("line " + std::to_string(v.line) + ": '" + key + "' must be an array");
    std::vector<CartesianPosition> out;
    for (const auto& item : v.items) {
      if (item.kind != toml::Value::Kind::array || item.items.size() != 2)
        throw ConfigError("line " + std::to_string(item.line) + ": '" + key +
                          "' entries must be [x, y] pairs");
      out.push_back({item.items[0].as_number(key), item.items[1].as_number(key)});
    }
    return out;
  }

  CartesianPosition point(const std::string& key) {
    const toml::Value& v = require(key);
    if (v.kind != toml::Value::Kind::array || v.items.size() != 2)
      throw ConfigError("missing or malformed '" + key + "' ([x, y] in meters)");
    return {v.items[0].as_number(key), v.items[1].as_number(key)};
  }

  /// Angle given as exactly one of <base>_rad or <base>_deg.
  double angle(const std::string& base) {
    const bool has_rad = has(base + "_rad"), has_deg = has(base + "_deg");
    if (has_rad == has_deg)
      throw ConfigError("exactly one of '" + base + "_rad' or '" + base + "_deg' is required");
    return has_rad ? number(base + "_rad") : number(base + "_deg") * pi / 180.0;
  }

  double angle_or(const std::string& base, double fallback) {
    if (!has(base + "_rad") && !has(base + "_deg")) return fallback;
    return angle(base);
  }

  /// Ratio given as exactly one of <base>_db or <base>_linear.
  double ratio(const std::string& base) {
    const bool has_db = has(base + "_db"), has_lin = has(base + "_linear");
    if (has_db == has_lin)
      throw ConfigError("exactly one of '" + base + "_db' or '" + base + "_linear' is required");
    return has_db ? db_to_linear(number(base + "_db")) : number(base + "_linear");
  }

  void reject_unknown(const std::string& context) const {
    for (const auto& [key, value] : table_) {
      if (!consumed_.count(key))
        throw ConfigError("line " + std::to_string(value.line) + ": unknown key '" + key + "'" +
                          (context.empty() ? "" : " (" + context + ")"));
    }
  }

 private:
  const toml::Table& table_;
  std::set<std::string> consumed_;
};

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

namespace detail {
inline ExperimentConfig load_experiment_config_impl(const std::string& text);
}

/// Parses and resolves an experiment configuration from TOML text. Value
/// errors surface as ConfigError so the CLI can report them as such.
inline ExperimentConfig load_experiment_config(const std::string& text) {
  try {
    return detail::load_experiment_config_impl(text);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

inline ExperimentConfig detail::load_experiment_config_impl(const std::string& text) {
  const toml::Table table = toml::parse(text);
  detail::Reader r(table);
  ExperimentConfig cfg;

  // --- scenario ---
  Scenario& sc = cfg.scenario;
  sc.n_alice = static_cast<int>(r.integer("scenario.n_alice"));
  sc.n_eve = static_cast<int>(r.integer("scenario.n_eve"));
  sc.spacing_alice = r.number_or("scenario.spacing_alice_wl", 0.5);
  sc.spacing_eve = r.number_or("scenario.spacing_eve_wl", 0.5);
  sc.k_bob = r.ratio("scenario.k_bob");
  sc.k_eve = r.ratio("scenario.k_eve");
  sc.secrecy_rate = r.number("scenario.secrecy_rate_bps");
  sc.eve_aoa = r.angle_or("scenario.phi_e", 0.0);

  const std::string mode = r.text("scenario.mode");
  if (mode == "snr") {
    sc.mean_snr_bob = r.ratio("scenario.mean_snr_bob");
    sc.mean_snr_eve = r.ratio("scenario.mean_snr_eve");
    sc.bob_angle = r.angle("scenario.theta_b");
    sc.eve_angle = r.angle("scenario.theta_e");
  } else if (mode == "geometry") {
    if (r.has("scenario.mean_snr_bob_db") || r.has("scenario.mean_snr_bob_linear") ||
        r.has("scenario.theta_b_rad") || r.has("scenario.theta_b_deg") ||
        r.has("scenario.theta_e_rad") || r.has("scenario.theta_e_deg") ||
        r.has("scenario.mean_snr_eve_db") || r.has("scenario.mean_snr_eve_linear"))
      throw ConfigError(
          "geometry mode derives SNRs and angles from positions; remove the direct "
          "scenario values or switch mode to \"snr\"");
    const CartesianPosition alice = r.has("geometry.alice_xy_m")
                                        ? r.point("geometry.alice_xy_m")
                                        : CartesianPosition{0.0, 0.0};
    CartesianPosition bob = r.point("geometry.bob_xy_m");
    CartesianPosition eve = r.point("geometry.eve_xy_m");
    bob = {bob.x - alice.x, bob.y - alice.y};
    eve = {eve.x - alice.x, eve.y - alice.y};
    LinkBudget budget;
    budget.path_loss_exponent = r.number("geometry.path_loss_exponent");
    const PolarPosition bob_polar = cartesian_to_polar(bob);
    const PolarPosition eve_polar = cartesian_to_polar(eve);
    const bool explicit_budget = r.has("geometry.transmit_power_w");
    const bool calibrated = r.has("geometry.target_snr_bob_db");
    if (explicit_budget == calibrated)
      throw ConfigError(
          "geometry mode needs exactly one of an explicit budget (transmit_power_w, "
          "noise_bob_w, noise_eve_w) or calibration targets (target_snr_bob_db, "
          "target_snr_eve_db)");
    if (explicit_budget) {
      budget.transmit_power = r.number("geometry.transmit_power_w");
      budget.noise_variance_bob = r.number("geometry.noise_bob_w");
      budget.noise_variance_eve = r.number("geometry.noise_eve_w");
    } else {
      // Calibrate the noise floors so the SNRs at the true positions hit the
      // targets; the path-loss law then drives SNR away from those positions.
      budget.transmit_power = 1.0;
      const double snr_bob = db_to_linear(r.number("geometry.target_snr_bob_db"));
      const double snr_eve = db_to_linear(r.number("geometry.target_snr_eve_db"));
      budget.noise_variance_bob =
          std::pow(bob_polar.distance, -budget.path_loss_exponent) / snr_bob;
      budget.noise_variance_eve =
          std::pow(eve_polar.distance, -budget.path_loss_exponent) / snr_eve;
    }
    validate_link_budget(budget);
    sc.bob_angle = bob_polar.angle;
    sc.eve_angle = eve_polar.angle;
    sc.mean_snr_bob = mean_snr_from_geometry(budget, bob_polar.distance, Receiver::bob);
    sc.mean_snr_eve = mean_snr_from_geometry(budget, eve_polar.distance, Receiver::eve);
    sc.geometry = Geometry{bob, eve, budget};
    cfg.true_eve = eve;
  } else {
    throw ConfigError("scenario.mode must be \"snr\" or \"geometry\"");
  }
  validate_scenario(sc);

  // --- experiment ---
  cfg.kind = kind_from_name(r.text_or("experiment.kind", "sweep-tau"));
  cfg.grid_size = static_cast<int>(r.integer_or("experiment.grid_size", cfg.grid_size));
  cfg.n_realizations = r.integer_or("experiment.n_realizations", cfg.n_realizations);
  cfg.n_trials = r.integer_or("experiment.n_trials", cfg.n_trials);
  cfg.seed = static_cast<std::uint64_t>(r.integer_or("experiment.seed", 1));
  cfg.output = r.text_or("experiment.output", "");
  if (r.has("experiment.n_alice_list")) {
    for (double v : r.number_list("experiment.n_alice_list"))
      cfg.n_alice_list.push_back(static_cast<int>(v));
  } else {
    cfg.n_alice_list = {sc.n_alice};
  }
  if (r.has("experiment.snr_bob_db_list"))
    cfg.snr_bob_db_list = r.number_list("experiment.snr_bob_db_list");
  cfg.validate = r.boolean_or("experiment.validate", false);
  if (r.has("experiment.validate_taus")) cfg.validate_taus = r.number_list("experiment.validate_taus");
  cfg.quick = r.boolean_or("experiment.quick", false);
  cfg.single_h = r.boolean_or("experiment.single_h", false);
  cfg.single_h_seed = static_cast<std::uint64_t>(r.integer_or("experiment.single_h_seed", 0));
  cfg.mrt_fallback = r.boolean_or("experiment.mrt_fallback", false);
  cfg.oracle = r.boolean_or("experiment.oracle", false);
  cfg.oracle_samples = r.integer_or("experiment.oracle_samples", cfg.oracle_samples);
  cfg.workers = static_cast<int>(r.integer_or("experiment.workers", 1));

  // --- uncertainty ---
  if (r.has("uncertainty.c_sigma_t_m")) cfg.c_sigma_t_m = r.number_list("uncertainty.c_sigma_t_m");
  cfg.n_location_samples = r.integer_or("uncertainty.n_location_samples", cfg.n_location_samples);
  cfg.n_channel_realizations =
      r.integer_or("uncertainty.n_channel_realizations", cfg.n_channel_realizations);
  cfg.redraw_main_channel = r.boolean_or("uncertainty.redraw_main_channel", true);
  cfg.evaluate_at_true_location = r.boolean_or("uncertainty.evaluate_at_true_location", false);
  if (r.has("uncertainty.anchors_xy_m")) {
    cfg.anchors = r.point_list("uncertainty.anchors_xy_m");
    cfg.anchors_are_default = false;
  } else if (cfg.kind == ExperimentKind::uncertainty || cfg.kind == ExperimentKind::fisher) {
    // Default constellation: four anchors on a 3000 m circle around the true
    // eavesdropper position, at bearings 45/135/225/315 degrees.
    constexpr double radius = 3000.0;
    for (double deg : {45.0, 135.0, 225.0, 315.0}) {
      const double rad = deg * pi / 180.0;
      cfg.anchors.push_back({cfg.true_eve.x + radius * std::cos(rad),
                             cfg.true_eve.y + radius * std::sin(rad)});
    }
    cfg.anchors_are_default = true;
  }

  r.reject_unknown("check the schema in the shipped example configs");

  if ((cfg.kind == ExperimentKind::uncertainty || cfg.kind == ExperimentKind::fisher) &&
      !sc.geometry)
    throw ConfigError("the '" + std::string(kind_name(cfg.kind)) +
                      "' experiment requires scenario.mode = \"geometry\"");
  if (cfg.grid_size < 2) throw ConfigError("experiment.grid_size must be at least 2");
  if (cfg.n_realizations < 1 || cfg.n_trials < 1)
    throw ConfigError("experiment counts must be at least 1");
  if (cfg.workers < 1) throw ConfigError("experiment.workers must be at least 1");
  for (double t : cfg.validate_taus)
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("validate_taus entries must lie in [0, 1]");
  for (int na : cfg.n_alice_list)
    if (na < 2) throw ConfigError("n_alice_list entries must be at least 2");
  for (double cs : cfg.c_sigma_t_m)
    if (!(cs >= 0.0)) throw ConfigError("c_sigma_t_m entries must be non-negative");
  return cfg;
}

/// Canonical TOML serialization of a resolved config. Loading the result and
/// serializing again reproduces the same bytes, which is what makes CSV
/// footers self-regenerating.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  using detail::fmt_double;
  std::ostringstream out;
  const Scenario& sc = cfg.scenario;
  out << "[scenario]\n";
  out << "mode = \"" << (sc.geometry ? "geometry" : "snr") << "\"\n";
  out << "n_alice = " << sc.n_alice << "\n";
  out << "n_eve = " << sc.n_eve << "\n";
  out << "spacing_alice_wl = " << fmt_double(sc.spacing_alice) << "\n";
  out << "spacing_eve_wl = " << fmt_double(sc.spacing_eve) << "\n";
  out << "k_bob_linear = " << fmt_double(sc.k_bob) << "\n";
  out << "k_eve_linear = " << fmt_double(sc.k_eve) << "\n";
  out << "secrecy_rate_bps = " << fmt_double(sc.secrecy_rate) << "\n";
  out << "phi_e_rad = " << fmt_double(sc.eve_aoa) << "\n";
  if (!sc.geometry) {
    out << "mean_snr_bob_linear = " << fmt_double(sc.mean_snr_bob) << "\n";
    out << "mean_snr_eve_linear = " << fmt_double(sc.mean_snr_eve) << "\n";
    out << "theta_b_rad = " << fmt_double(sc.bob_angle) << "\n";
    out << "theta_e_rad = " << fmt_double(sc.eve_angle) << "\n";
  } else {
    const Geometry& g = *sc.geometry;
    out << "\n[geometry]\n";
    out << "bob_xy_m = [" << fmt_double(g.bob.x) << ", " << fmt_double(g.bob.y) << "]\n";
    out << "eve_xy_m = [" << fmt_double(g.eve.x) << ", " << fmt_double(g.eve.y) << "]\n";
    out << "path_loss_exponent = " << fmt_double(g.budget.path_loss_exponent) << "\n";
    out << "transmit_power_w = " << fmt_double(g.budget.transmit_power) << "\n";
    out << "noise_bob_w = " << fmt_double(g.budget.noise_variance_bob) << "\n";
    out << "noise_eve_w = " << fmt_double(g.budget.noise_variance_eve) << "\n";
  }
  out << "\n[experiment]\n";
  out << "kind = \"" << kind_name(cfg.kind) << "\"\n";
  out << "grid_size = " << cfg.grid_size << "\n";
  out << "n_realizations = " << cfg.n_realizations << "\n";
  out << "n_trials = " << cfg.n_trials << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "n_alice_list = [";
  for (std::size_t i = 0; i < cfg.n_alice_list.size(); ++i)
    out << (i ? ", " : "") << cfg.n_alice_list[i];
  out << "]\n";
  out << "snr_bob_db_list = [";
  for (std::size_t i = 0; i < cfg.snr_bob_db_list.size(); ++i)
    out << (i ? ", " : "") << fmt_double(cfg.snr_bob_db_list[i]);
  out << "]\n";
  out << "validate = " << (cfg.validate ? "true" : "false") << "\n";
  out << "validate_taus = [";
  for (std::size_t i = 0; i < cfg.validate_taus.size(); ++i)
    out << (i ? ", " : "") << fmt_double(cfg.validate_taus[i]);
  out << "]\n";
  out << "quick = " << (cfg.quick ? "true" : "false") << "\n";
  out << "single_h = " << (cfg.single_h ? "true" : "false") << "\n";
  out << "single_h_seed = " << cfg.single_h_seed << "\n";
  out << "mrt_fallback = " << (cfg.mrt_fallback ? "true" : "false") << "\n";
  out << "oracle = " << (cfg.oracle ? "true" : "false") << "\n";
  out << "oracle_samples = " << cfg.oracle_samples << "\n";
  if (cfg.kind == ExperimentKind::uncertainty || cfg.kind == ExperimentKind::fisher) {
    out << "\n[uncertainty]\n";
    out << "c_sigma_t_m = [";
    for (std::size_t i = 0; i < cfg.c_sigma_t_m.size(); ++i)
      out << (i ? ", " : "") << fmt_double(cfg.c_sigma_t_m[i]);
    out << "]\n";
    out << "n_location_samples = " << cfg.n_location_samples << "\n";
    out << "n_channel_realizations = " << cfg.n_channel_realizations << "\n";
    out << "redraw_main_channel = " << (cfg.redraw_main_channel ? "true" : "false") << "\n";
    out << "evaluate_at_true_location = " << (cfg.evaluate_at_true_location ? "true" : "false")
        << "\n";
    out << "anchors_xy_m = [";
    for (std::size_t i = 0; i < cfg.anchors.size(); ++i)
      out << (i ? ", " : "") << "[" << fmt_double(cfg.anchors[i].x) << ", "
          << fmt_double(cfg.anchors[i].y) << "]";
    out << "]\n";
  }
  return out.str();
}

}  // namespace lbb::cli
