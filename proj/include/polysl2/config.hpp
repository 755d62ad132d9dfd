#pragma once

// Plain-text run configuration:
//
//   # comment
//   [model]            keys before the first section also land here
//   model = three_boson
//   omegas = 1, 1, 2
//   g_re = 0.5
//   k = 0
//   s = 4
//   [run]
//   methods = exact, variational
//
// Unknown and duplicate keys are errors; every error names its line.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "polysl2/error.hpp"
#include "polysl2/exact.hpp"
#include "polysl2/models.hpp"
#include "polysl2/variational.hpp"

namespace polysl2 {

enum class ModelKind { ThreeBoson, Linear, Custom };

struct ModelConfig {
  ModelKind model = ModelKind::ThreeBoson;
  std::array<double, 3> omegas{1.0, 1.0, 2.0};
  double g_re = 1.0;
  double g_im = 0.0;
  int k = 0;
  int s = 0;
  int twice_j = 1;
  AlgebraKind kind = AlgebraKind::SU2;
  std::vector<double> psi_roots;
  double psi_A = -1.0;
  double l0 = 0.0;
  double a = 0.0;
  double C = 0.0;
  int truncation = 64;
};

struct SweepConfig {
  std::string param;
  double from = 0.0;
  double to = 0.0;
  int steps = 1;  // number of points; 0 gives an empty sweep

  double value(int i) const { return steps == 1 ? from : from + (to - from) * i / (steps - 1); }
};

enum class DynamicsSource { Exact, Variational, MeanField, Quasi, Bloch, BlochVsExact };

struct DynamicsConfig {
  DynamicsSource source = DynamicsSource::Exact;
  double t_end = 10.0;
  int n_samples = 101;
  double initial_r = 0.0;
  double initial_theta = 0.0;
  int initial_level = 0;
  double dt_max = 0.1;
  std::string spacing_out;
};

struct RunConfig {
  ModelConfig model;
  std::vector<Method> methods{Method::Exact};
  std::size_t root_index = 0;
  PhiAverage phi_average = PhiAverage::Midpoint;
  int levels = 8;  // su(1,1) levels to report
  std::optional<SweepConfig> sweep;
  DynamicsConfig dynamics;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class ConfigReader {
 public:
  ConfigReader(std::map<std::string, std::map<std::string, Entry>> sections) : sections_(std::move(sections)) {}

  const Entry* find(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto it = s->second.find(key);
    if (it == s->second.end()) return nullptr;
    used_[section].insert(key);
    return &it->second;
  }

  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  [[noreturn]] static void fail(const Entry& e, const std::string& key, const std::string& why) {
    throw Error(ErrorCode::config_value, "line " + std::to_string(e.line) + ": " + key + ": " + why);
  }

  std::optional<double> real(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return parse_real(*e, key, e->value);
  }

  std::optional<int> integer(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    int out = 0;
    const auto& v = e->value;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) fail(*e, key, "expected an integer, got '" + v + "'");
    return out;
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<std::vector<double>> reals(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split_list(e->value)) out.push_back(parse_real(*e, key, item));
    return out;
  }

  /// Fails on the first key no reader asked for.
  void reject_unused() const {
    const Entry* first = nullptr;
    std::string where;
    for (const auto& [section, keys] : sections_) {
      const auto used = used_.find(section);
      for (const auto& [key, e] : keys) {
        if (used != used_.end() && used->second.count(key)) continue;
        if (!first || e.line < first->line) {
          first = &e;
          where = "[" + section + "] " + key;
        }
      }
    }
    if (first)
      throw Error(ErrorCode::config_parse, "line " + std::to_string(first->line) + ": unknown or unused key " + where);
  }

 private:
  static double parse_real(const Entry& e, const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
      fail(e, key, "expected a finite number, got '" + v + "'");
    return out;
  }

  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, std::set<std::string>> used_;
};

inline std::map<std::string, std::map<std::string, Entry>> parse_sections(std::istream& in) {
  static const std::set<std::string> known{"model", "run", "sweep", "dynamics"};
  std::map<std::string, std::map<std::string, Entry>> out;
  std::string section = "model";
  std::string raw;
  int line = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::config_parse, "line " + std::to_string(line) + ": " + why);
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail("unterminated section header '" + body + "'");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (!known.count(section)) fail("unknown section [" + section + "]");
      out[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + body + "'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (value.empty()) fail("empty value for '" + key + "'");
    auto& keys = out[section];
    if (keys.count(key))
      fail("duplicate key '" + key + "' in [" + section + "] (first on line " + std::to_string(keys[key].line) + ")");
    keys[key] = {value, line};
  }
  return out;
}

inline Method parse_method(const std::string& s) {
  if (s == "exact") return Method::Exact;
  if (s == "variational") return Method::Variational;
  if (s == "meanfield") return Method::MeanField;
  if (s == "quasi") return Method::QuasiEquidistant;
  throw Error(ErrorCode::config_value, "unknown method '" + s + "' (exact, variational, meanfield, quasi, all)");
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  detail::ConfigReader rd(detail::parse_sections(in));
  RunConfig cfg;
  auto& m = cfg.model;

  const auto model_name = rd.text("model", "model").value_or("three_boson");
  if (model_name == "three_boson") m.model = ModelKind::ThreeBoson;
  else if (model_name == "linear") m.model = ModelKind::Linear;
  else if (model_name == "custom") m.model = ModelKind::Custom;
  else throw Error(ErrorCode::config_value, "model: unknown model '" + model_name + "' (three_boson, linear, custom)");

  if (auto v = rd.real("model", "g_re")) m.g_re = *v;
  if (auto v = rd.real("model", "g_im")) m.g_im = *v;
  if (m.model == ModelKind::ThreeBoson) {
    if (const auto* e = rd.find("model", "omegas")) {
      const auto w = *rd.reals("model", "omegas");
      if (w.size() != 3) detail::ConfigReader::fail(*e, "omegas", "expected three frequencies");
      std::copy(w.begin(), w.end(), m.omegas.begin());
    }
    if (auto v = rd.integer("model", "k")) m.k = *v;
    if (auto v = rd.integer("model", "s")) m.s = *v;
    if (m.s < 0) throw Error(ErrorCode::config_value, "s: must be nonnegative");
  } else {
    if (auto v = rd.real("model", "a")) m.a = *v;
    if (auto v = rd.real("model", "C")) m.C = *v;
    if (const auto* e = rd.find("model", "j")) {
      const double j = *rd.real("model", "j");
      const double tj = std::round(2.0 * j);
      if (std::abs(2.0 * j - tj) > 1e-12 || tj < 0) detail::ConfigReader::fail(*e, "j", "must be a nonnegative half-integer");
      m.twice_j = static_cast<int>(tj);
    }
    if (auto v = rd.text("model", "kind")) {
      if (*v == "su2") m.kind = AlgebraKind::SU2;
      else if (*v == "su11") m.kind = AlgebraKind::SU11;
      else throw Error(ErrorCode::config_value, "kind: expected su2 or su11, got '" + *v + "'");
    }
    if (auto v = rd.integer("model", "truncation")) m.truncation = *v;
    if (m.truncation < 1) throw Error(ErrorCode::config_value, "truncation: must be positive");
    if (m.model == ModelKind::Custom) {
      auto roots = rd.reals("model", "psi_roots");
      if (!roots || roots->empty()) throw Error(ErrorCode::config_value, "psi_roots: required for the custom model");
      m.psi_roots = *roots;
      if (auto v = rd.real("model", "psi_A")) m.psi_A = *v;
      auto l0 = rd.real("model", "l0");
      if (!l0) throw Error(ErrorCode::config_value, "l0: required for the custom model");
      m.l0 = *l0;
    }
  }

  if (auto v = rd.text("run", "methods")) {
    cfg.methods.clear();
    for (const auto& name : detail::split_list(*v)) {
      if (name == "all") {
        for (auto x : {Method::Exact, Method::Variational, Method::MeanField, Method::QuasiEquidistant})
          cfg.methods.push_back(x);
      } else {
        cfg.methods.push_back(detail::parse_method(name));
      }
    }
    std::sort(cfg.methods.begin(), cfg.methods.end());
    cfg.methods.erase(std::unique(cfg.methods.begin(), cfg.methods.end()), cfg.methods.end());
    if (cfg.methods.empty()) throw Error(ErrorCode::config_value, "methods: empty list");
  }
  if (auto v = rd.integer("run", "root_index")) {
    if (*v < 0) throw Error(ErrorCode::config_value, "root_index: must be nonnegative");
    cfg.root_index = static_cast<std::size_t>(*v);
  }
  if (auto v = rd.text("run", "phi_average")) {
    if (*v == "midpoint") cfg.phi_average = PhiAverage::Midpoint;
    else if (*v == "mean") cfg.phi_average = PhiAverage::Mean;
    else throw Error(ErrorCode::config_value, "phi_average: expected midpoint or mean");
  }
  if (auto v = rd.integer("run", "levels")) {
    if (*v < 1) throw Error(ErrorCode::config_value, "levels: must be positive");
    cfg.levels = *v;
  }

  if (rd.has_section("sweep")) {
    SweepConfig sw;
    auto param = rd.text("sweep", "param");
    auto from = rd.real("sweep", "from");
    auto to = rd.real("sweep", "to");
    auto steps = rd.integer("sweep", "steps");
    if (!param || !from || !to || !steps) throw Error(ErrorCode::config_value, "[sweep] needs param, from, to, steps");
    static const std::set<std::string> three_boson{"g_re", "g_im", "omega1", "omega2", "omega3"};
    static const std::set<std::string> other{"g_re", "g_im", "C", "a"};
    const auto& allowed = m.model == ModelKind::ThreeBoson ? three_boson : other;
    if (!allowed.count(*param)) throw Error(ErrorCode::config_value, "sweep param '" + *param + "' not available for this model");
    if (*steps < 0) throw Error(ErrorCode::config_value, "steps: must be nonnegative");
    sw.param = *param;
    sw.from = *from;
    sw.to = *to;
    sw.steps = *steps;
    cfg.sweep = sw;
  }

  auto& d = cfg.dynamics;
  if (auto v = rd.text("dynamics", "source")) {
    static const std::map<std::string, DynamicsSource> names{
        {"exact", DynamicsSource::Exact},       {"variational", DynamicsSource::Variational},
        {"meanfield", DynamicsSource::MeanField}, {"quasi", DynamicsSource::Quasi},
        {"bloch", DynamicsSource::Bloch},        {"bloch_vs_exact", DynamicsSource::BlochVsExact}};
    auto it = names.find(*v);
    if (it == names.end()) throw Error(ErrorCode::config_value, "source: unknown dynamics source '" + *v + "'");
    d.source = it->second;
  }
  if (auto v = rd.real("dynamics", "t_end")) d.t_end = *v;
  if (auto v = rd.integer("dynamics", "n_samples")) d.n_samples = *v;
  if (auto v = rd.real("dynamics", "initial_r")) d.initial_r = *v;
  if (auto v = rd.real("dynamics", "initial_theta")) d.initial_theta = *v;
  if (auto v = rd.integer("dynamics", "initial_level")) d.initial_level = *v;
  if (auto v = rd.real("dynamics", "dt_max")) d.dt_max = *v;
  if (auto v = rd.text("dynamics", "spacing_out")) d.spacing_out = *v;
  if (d.t_end < 0.0) throw Error(ErrorCode::config_value, "t_end: must be nonnegative");
  if (d.n_samples < 2) throw Error(ErrorCode::config_value, "n_samples: need at least 2");
  if (d.dt_max <= 0.0) throw Error(ErrorCode::config_value, "dt_max: must be positive");
  if (d.initial_r < 0.0) throw Error(ErrorCode::config_value, "initial_r: must be nonnegative");

  rd.reject_unused();
  return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config '" + path + "'");
  return parse_config(in);
}

/// Copy of `m` with one sweepable parameter replaced.
inline ModelConfig with_param(ModelConfig m, const std::string& param, double value) {
  if (param == "g_re") m.g_re = value;
  else if (param == "g_im") m.g_im = value;
  else if (param == "C") m.C = value;
  else if (param == "a") m.a = value;
  else if (param == "omega1") m.omegas[0] = value;
  else if (param == "omega2") m.omegas[1] = value;
  else if (param == "omega3") m.omegas[2] = value;
  else throw Error(ErrorCode::config_value, "unknown sweep parameter '" + param + "'");
  return m;
}

inline ModelOnSubspace build_model(const ModelConfig& m) {
  const cplx g(m.g_re, m.g_im);
  switch (m.model) {
    case ModelKind::ThreeBoson:
      return tb_subspace({m.omegas[0], m.omegas[1], m.omegas[2], g}, m.k, m.s);
    case ModelKind::Linear:
      return linear_model(m.a, g, m.twice_j, m.kind, m.C, m.truncation);
    case ModelKind::Custom:
      return custom_model(m.psi_roots, m.psi_A, m.l0, m.twice_j, m.kind, m.a, g, m.C, m.truncation);
  }
  throw Error(ErrorCode::config_value, "unknown model");
}

}  // namespace polysl2
