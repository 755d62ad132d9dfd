#pragma once

// The three CLI commands as pure functions from a RunConfig to tables.
// Sweep points run on a small thread pool; rows are merged in sweep order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "polysl2/config.hpp"
#include "polysl2/dynamics.hpp"
#include "polysl2/exact.hpp"
#include "polysl2/meanfield.hpp"
#include "polysl2/table.hpp"
#include "polysl2/variational.hpp"

namespace polysl2 {

namespace detail {

struct SweepPoint {
  std::optional<double> value;  // sweep parameter, absent without a sweep
  ModelConfig model;
};

inline std::vector<SweepPoint> sweep_points(const RunConfig& cfg) {
  if (!cfg.sweep) return {{std::nullopt, cfg.model}};
  std::vector<SweepPoint> out;
  for (int i = 0; i < cfg.sweep->steps; ++i) {
    const double v = cfg.sweep->value(i);
    out.push_back({v, with_param(cfg.model, cfg.sweep->param, v)});
  }
  return out;
}

inline std::vector<std::string> with_sweep_column(const RunConfig& cfg, std::vector<std::string> columns) {
  if (cfg.sweep) columns.insert(columns.begin(), "sweep_" + cfg.sweep->param);
  return columns;
}

/// fn(point) -> rows; rows come back concatenated in sweep order.
template <class Fn>
std::vector<std::vector<Cell>> run_points(const std::vector<SweepPoint>& points, int workers, Fn fn) {
  std::vector<std::vector<std::vector<Cell>>> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        auto rows = fn(points[i]);
        if (points[i].value)
          for (auto& r : rows) r.insert(r.begin(), Cell{*points[i].value});
        results[i] = std::move(rows);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::clamp<long>(workers, 1, static_cast<long>(std::max<std::size_t>(points.size(), 1))));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<std::vector<Cell>> out;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(out));
  return out;
}

struct MethodResult {
  Method method;
  std::vector<double> energies;
  std::optional<double> r;
  std::optional<double> residual;
};

inline MethodResult run_method(const RunConfig& cfg, const ModelOnSubspace& m, Method method) {
  const bool su11 = m.spec.kind == AlgebraKind::SU11;
  switch (method) {
    case Method::Exact:
      return {method, exact_spectrum(m, su11 ? cfg.levels : 0).values, {}, {}};
    case Method::Variational: {
      const auto v = variational_spectrum(m, {cfg.root_index});
      return {method, v.energies, v.r, v.residual};
    }
    case Method::MeanField: {
      const auto mf = mfa_spectrum_tb(m);
      return {method, mf.energies, mf.r, mf.residual};
    }
    case Method::QuasiEquidistant: {
      const auto q = quasi_equidistant_spectrum(m, cfg.phi_average, su11 ? cfg.levels : 0);
      return {method, q.spectrum.values, q.r, {}};
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown method");
}

inline Cell opt_cell(const std::optional<double>& x) { return x ? Cell{*x} : Cell{}; }

}  // namespace detail

/// method, v, energy, exact, abs_error, r, residual; sorted by (sweep, method, v).
inline Table cmd_spectrum(const RunConfig& cfg, int workers = 1) {
  Table t;
  t.columns = detail::with_sweep_column(cfg, {"method", "v", "energy", "exact", "abs_error", "r", "residual"});
  t.rows = detail::run_points(detail::sweep_points(cfg), workers, [&](const detail::SweepPoint& p) {
    const auto m = build_model(p.model);
    const auto exact = detail::run_method(cfg, m, Method::Exact).energies;
    std::vector<std::vector<Cell>> rows;
    for (Method method : cfg.methods) {
      const auto res = method == Method::Exact ? detail::MethodResult{method, exact, {}, {}} : detail::run_method(cfg, m, method);
      for (std::size_t v = 0; v < res.energies.size(); ++v) {
        const double e = res.energies[v];
        const bool ref = v < exact.size();
        rows.push_back({to_string(method), static_cast<std::int64_t>(v), e, ref ? Cell{exact[v]} : Cell{},
                        ref ? Cell{std::abs(e - exact[v])} : Cell{}, detail::opt_cell(res.r), detail::opt_cell(res.residual)});
      }
    }
    return rows;
  });
  return t;
}

/// Per-level errors of each approximate method against the exact levels,
/// followed by max and mean summary rows per method.
inline Table cmd_compare(const RunConfig& cfg, int workers = 1) {
  std::vector<Method> approx;
  for (Method m : cfg.methods)
    if (m != Method::Exact) approx.push_back(m);
  if (approx.empty()) throw Error(ErrorCode::config_value, "compare: methods must include at least one approximation");
  Table t;
  t.columns = detail::with_sweep_column(cfg, {"method", "row", "v", "exact", "value", "abs_error", "rel_error"});
  t.rows = detail::run_points(detail::sweep_points(cfg), workers, [&](const detail::SweepPoint& p) {
    const auto m = build_model(p.model);
    const auto exact = detail::run_method(cfg, m, Method::Exact).energies;
    std::vector<std::vector<Cell>> rows;
    for (Method method : approx) {
      const auto res = detail::run_method(cfg, m, method);
      const std::size_t n = std::min(res.energies.size(), exact.size());
      double max_abs = 0.0, sum_abs = 0.0, max_rel = 0.0, sum_rel = 0.0;
      std::size_t n_rel = 0;
      for (std::size_t v = 0; v < n; ++v) {
        const double err = std::abs(res.energies[v] - exact[v]);
        max_abs = std::max(max_abs, err);
        sum_abs += err;
        Cell rel;
        if (exact[v] != 0.0) {
          const double r = err / std::abs(exact[v]);
          rel = r;
          max_rel = std::max(max_rel, r);
          sum_rel += r;
          ++n_rel;
        }
        rows.push_back({to_string(method), std::string("level"), static_cast<std::int64_t>(v), exact[v], res.energies[v], err, rel});
      }
      const auto rel_or_empty = [&](double x) { return n_rel ? Cell{x} : Cell{}; };
      rows.push_back({to_string(method), std::string("max"), Cell{}, Cell{}, Cell{}, max_abs, rel_or_empty(max_rel)});
      rows.push_back({to_string(method), std::string("mean"), Cell{}, Cell{}, Cell{}, n ? sum_abs / double(n) : 0.0,
                      rel_or_empty(n_rel ? sum_rel / double(n_rel) : 0.0)});
    }
    return rows;
  });
  return t;
}

struct DynamicsOutput {
  Table series;
  std::optional<Table> spacing;  // exact levels and their spacings
};

namespace detail {

inline Method quantum_method(DynamicsSource s) {
  switch (s) {
    case DynamicsSource::Variational: return Method::Variational;
    case DynamicsSource::MeanField: return Method::MeanField;
    case DynamicsSource::Quasi: return Method::QuasiEquidistant;
    default: return Method::Exact;
  }
}

inline std::vector<std::string> dynamics_columns(const DynamicsConfig& d, int dim) {
  switch (d.source) {
    case DynamicsSource::Bloch:
      return {"t", "y0", "y1", "y2", "v0", "casimir_drift", "energy_drift"};
    case DynamicsSource::BlochVsExact:
      return {"t", "quantum_y0", "quantum_y1", "quantum_y2", "bloch_y0", "bloch_y1", "bloch_y2", "deviation", "max_deviation"};
    default: {
      std::vector<std::string> c{"t", "y0", "y1", "y2", "v0", "norm", "autocorrelation"};
      for (int v = 0; v < dim; ++v) c.push_back("p_" + std::to_string(v));
      return c;
    }
  }
}

inline std::vector<std::vector<Cell>> dynamics_rows(const DynamicsConfig& d, const RunConfig& cfg, const ModelOnSubspace& m) {
  const int n = d.n_samples;
  const double dt = d.t_end / (n - 1);
  const auto psi0 = gcs_state(m.spec, {d.initial_r, d.initial_theta, m.spec.kind}, d.initial_level);
  std::vector<std::vector<Cell>> rows;
  if (d.source == DynamicsSource::Bloch || d.source == DynamicsSource::BlochVsExact) {
    if (!(d.t_end > 0.0)) throw Error(ErrorCode::config_value, "t_end: classical flows need t_end > 0");
    const auto s0 = bloch_from_state(m.spec, psi0);
    const auto traj = integrate_bloch(s0, m, d.t_end, dt, d.dt_max);
    if (d.source == DynamicsSource::Bloch) {
      const double c0 = casimir(s0), e0 = bloch_energy(s0, m);
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        rows.push_back({traj.times[i], s.y0, s.y1, s.y2, s.y0 + m.spec.v0_shift(),
                        std::abs(casimir(s) - c0) / std::max(std::abs(c0), 1.0),
                        std::abs(bloch_energy(s, m) - e0) / std::max(std::abs(e0), 1.0)});
      }
      return rows;
    }
    const auto q = evolve_observables({Method::Exact, psi0}, m, traj.times);
    double running = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const auto& s = traj.states[i];
      const double dev = std::max({std::abs(s.y0 - q[i].y0), std::abs(s.y1 - q[i].y1), std::abs(s.y2 - q[i].y2)});
      running = std::max(running, dev);
      rows.push_back({traj.times[i], q[i].y0, q[i].y1, q[i].y2, s.y0, s.y1, s.y2, dev, running});
    }
    return rows;
  }
  std::vector<double> times(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) times[static_cast<std::size_t>(i)] = i * dt;
  EvolutionSpec spec{quantum_method(d.source), psi0, {cfg.root_index}, cfg.phi_average};
  for (const auto& s : evolve_observables(spec, m, times)) {
    std::vector<Cell> row{s.t, s.y0, s.y1, s.y2, s.v0, s.norm, s.autocorrelation};
    for (double p : s.populations) row.emplace_back(p);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline DynamicsOutput cmd_dynamics(const RunConfig& cfg, int workers = 1) {
  const auto& d = cfg.dynamics;
  const auto points = detail::sweep_points(cfg);
  // Dimension is fixed by the block labels, which no sweep parameter touches.
  const int dim = build_model(cfg.model).spec.dim;
  if (d.initial_level < 0 || d.initial_level >= dim) throw Error(ErrorCode::config_value, "initial_level: outside the block");
  DynamicsOutput out;
  out.series.columns = detail::with_sweep_column(cfg, detail::dynamics_columns(d, dim));
  out.series.rows = detail::run_points(points, workers, [&](const detail::SweepPoint& p) {
    return detail::dynamics_rows(d, cfg, build_model(p.model));
  });
  if (!d.spacing_out.empty()) {
    Table sp;
    sp.columns = detail::with_sweep_column(cfg, {"v", "energy", "spacing", "min_resonance_defect"});
    sp.rows = detail::run_points(points, workers, [&](const detail::SweepPoint& p) {
      const auto m = build_model(p.model);
      const auto levels = detail::run_method(cfg, m, Method::Exact).energies;
      const auto rep = incommensurability(levels);
      std::vector<std::vector<Cell>> rows;
      for (std::size_t v = 0; v < levels.size(); ++v)
        rows.push_back({static_cast<std::int64_t>(v), levels[v], v + 1 < levels.size() ? Cell{levels[v + 1] - levels[v]} : Cell{},
                        rep.min_defect});
      return rows;
    });
    out.spacing = std::move(sp);
  }
  return out;
}

}  // namespace polysl2
