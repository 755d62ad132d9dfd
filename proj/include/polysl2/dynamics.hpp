#pragma once

// Time evolution on one block: the classical (Bloch) flow of the mean-field
// Hamiltonian and quantum evolution of observables through exact or
// approximate spectral decompositions U = S^+ exp(-i E t) S.

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "polysl2/error.hpp"
#include "polysl2/exact.hpp"
#include "polysl2/meanfield.hpp"
#include "polysl2/models.hpp"
#include "polysl2/variational.hpp"

namespace polysl2 {

/// (<Y1>, <Y2>, <Y0>) with <Y+> = y1 + i y2.
struct BlochState {
  double y1 = 0.0;
  double y2 = 0.0;
  double y0 = 0.0;
  AlgebraKind kind = AlgebraKind::SU2;

  cplx yplus() const noexcept { return {y1, y2}; }
};

/// y1^2 + y2^2 + y0^2 for su(2), y1^2 + y2^2 - y0^2 for su(1,1).
inline double casimir(const BlochState& s) noexcept {
  return s.y1 * s.y1 + s.y2 * s.y2 + (s.kind == AlgebraKind::SU2 ? 1.0 : -1.0) * s.y0 * s.y0;
}

/// Mean-field Hamiltonian a y0 + 2 Re[g y+] sqrt(phi(y0)) + C~.
inline double bloch_energy(const BlochState& s, const ModelOnSubspace& m) {
  const double phi = m.phi()(s.y0);
  if (phi < 0.0) throw Error(ErrorCode::domain_exit, "bloch_energy: phi(y0) < 0 at y0 = " + std::to_string(s.y0));
  return m.a * s.y0 + 2.0 * (m.g * s.yplus()).real() * std::sqrt(phi) + m.tilde_C();
}

/// Gradient of bloch_energy in (y1, y2, y0).
inline std::array<double, 3> bloch_energy_gradient(const BlochState& s, const ModelOnSubspace& m, const PhiFunction& phi) {
  const double p = phi(s.y0);
  if (p < 0.0) throw Error(ErrorCode::domain_exit, "bloch flow left the physical domain: phi(" + std::to_string(s.y0) + ") < 0");
  const double sp = std::sqrt(p);
  const double coupling = 2.0 * (m.g.real() * s.y1 - m.g.imag() * s.y2);
  double d0 = m.a;
  if (coupling != 0.0) {
    if (sp == 0.0) throw Error(ErrorCode::domain_exit, "bloch flow reached phi(y0) = 0 with nonzero coupling");
    d0 += coupling * phi.derivative(s.y0) / (2.0 * sp);
  }
  return {2.0 * m.g.real() * sp, -2.0 * m.g.imag() * sp, d0};
}

/// dy/dt = 1/2 grad H x grad C, grad C = 2 (y1, y2, ±y0).
inline BlochState bloch_rhs(const BlochState& s, const ModelOnSubspace& m) {
  const auto h = bloch_energy_gradient(s, m, m.phi());
  const double c0 = s.kind == AlgebraKind::SU2 ? s.y0 : -s.y0;
  return {h[1] * c0 - h[2] * s.y2, h[2] * s.y1 - h[0] * c0, h[0] * s.y2 - h[1] * s.y1, s.kind};
}

struct Trajectory {
  std::vector<double> times;
  std::vector<BlochState> states;
  double casimir_drift = 0.0;  // max |C(t) - C(0)| / max(|C(0)|, 1)
  double energy_drift = 0.0;   // same for the mean-field Hamiltonian
};

/// Integration failure; carries the trajectory recorded up to the failure.
class IntegrationError : public Error {
 public:
  IntegrationError(ErrorCode code, const std::string& what, Trajectory partial)
      : Error(code, what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

struct BlochOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
};

/// Dormand-Prince 5(4) with dense output; states recorded every `sample_dt`,
/// steps capped at `dt_max`.
inline Trajectory integrate_bloch(const BlochState& s0, const ModelOnSubspace& m, double t_end, double sample_dt,
                                  double dt_max, BlochOptions opt = {}) {
  namespace ode = boost::numeric::odeint;
  using state_t = std::array<double, 3>;
  if (!(t_end >= 0.0) || !(sample_dt > 0.0) || !(dt_max > 0.0))
    throw Error(ErrorCode::invalid_argument, "integrate_bloch: need t_end >= 0, sample_dt > 0, dt_max > 0");
  if (s0.kind != m.spec.kind) throw Error(ErrorCode::invalid_argument, "integrate_bloch: state and model algebra differ");

  const PhiFunction phi = m.phi();
  const AlgebraKind kind = s0.kind;
  auto to_state = [kind](const state_t& x) { return BlochState{x[0], x[1], x[2], kind}; };
  auto rhs = [&](const state_t& x, state_t& dx, double) {
    const BlochState s = to_state(x);
    const auto h = bloch_energy_gradient(s, m, phi);
    const double c0 = kind == AlgebraKind::SU2 ? s.y0 : -s.y0;
    dx = {h[1] * c0 - h[2] * s.y2, h[2] * s.y1 - h[0] * c0, h[0] * s.y2 - h[1] * s.y1};
  };

  Trajectory traj;
  const double c_init = casimir(s0);
  const double e_init = bloch_energy(s0, m);
  auto observe = [&](const state_t& x, double t) {
    const BlochState s = to_state(x);
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.casimir_drift = std::max(traj.casimir_drift, std::abs(casimir(s) - c_init) / std::max(std::abs(c_init), 1.0));
    traj.energy_drift = std::max(traj.energy_drift, std::abs(bloch_energy(s, m) - e_init) / std::max(std::abs(e_init), 1.0));
  };

  state_t x{s0.y1, s0.y2, s0.y0};
  const auto n_samples = static_cast<long>(std::floor(t_end / sample_dt + 1e-9));
  try {
    auto stepper = ode::make_dense_output(opt.abs_tol, opt.rel_tol, dt_max, ode::runge_kutta_dopri5<state_t>());
    ode::integrate_n_steps(stepper, rhs, x, 0.0, sample_dt, n_samples, observe);
  } catch (const Error& e) {
    throw IntegrationError(e.code(), e.what(), std::move(traj));
  } catch (const ode::odeint_error& e) {
    throw IntegrationError(ErrorCode::step_underflow, std::string("integrate_bloch: ") + e.what(), std::move(traj));
  }
  return traj;
}

/// Canonical pair p = y0, q = arg(y1 + i y2) on the Casimir shell of the block.
struct CanonicalPoint {
  double p = 0.0;
  double q = 0.0;
};

inline CanonicalPoint to_canonical(const BlochState& s) { return {s.y0, std::atan2(s.y2, s.y1)}; }

namespace detail {
/// Shell radius sqrt(y1^2 + y2^2) as a function of p and its derivative.
inline std::pair<double, double> shell_radius(const SubspaceSpec& spec, double p) {
  const double j = spec.j();
  const double r2 = spec.kind == AlgebraKind::SU2 ? j * j - p * p : p * p - j * j;
  if (r2 <= 0.0) return {0.0, 0.0};
  const double rho = std::sqrt(r2);
  return {rho, (spec.kind == AlgebraKind::SU2 ? -p : p) / rho};
}
}  // namespace detail

/// H(p, q) = a p + sqrt(phi(p)) rho(p) (2 Re g cos q - 2 Im g sin q) + C~.
inline double canonical_hamiltonian(const ModelOnSubspace& m, const CanonicalPoint& x) {
  const auto [rho, drho] = detail::shell_radius(m.spec, x.p);
  (void)drho;
  const double k = 2.0 * (m.g.real() * std::cos(x.q) - m.g.imag() * std::sin(x.q));
  return m.a * x.p + std::sqrt(m.phi()(x.p)) * rho * k + m.tilde_C();
}

/// (dp/dt, dq/dt) = (-dH/dq, dH/dp).
inline CanonicalPoint canonical_rhs(const ModelOnSubspace& m, const CanonicalPoint& x) {
  const auto phi = m.phi();
  const double ph = phi(x.p);
  if (ph <= 0.0) throw Error(ErrorCode::domain_exit, "canonical_rhs: phi(p) <= 0");
  const double sp = std::sqrt(ph);
  const auto [rho, drho] = detail::shell_radius(m.spec, x.p);
  const double k = 2.0 * (m.g.real() * std::cos(x.q) - m.g.imag() * std::sin(x.q));
  const double dk = -2.0 * (m.g.real() * std::sin(x.q) + m.g.imag() * std::cos(x.q));
  const double dh_dp = m.a + (phi.derivative(x.p) / (2.0 * sp) * rho + sp * drho) * k;
  const double dh_dq = sp * rho * dk;
  return {-dh_dq, dh_dp};
}

/// Expectations (<Y1>, <Y2>, <Y0>) of a normalized amplitude vector.
inline BlochState bloch_from_state(const SubspaceSpec& spec, const Eigen::VectorXcd& psi) {
  if (psi.size() != spec.dim) throw Error(ErrorCode::invalid_argument, "bloch_from_state: amplitude size mismatch");
  const auto g = generator_matrices(spec);
  const cplx yp = psi.dot(g.yplus.cast<cplx>() * psi);  // dot conjugates the left side
  const double y0 = psi.dot(g.y0.cast<cplx>() * psi).real();
  return {yp.real(), yp.imag(), y0, spec.kind};
}

/// |[l_i]; v; xi> = S(xi)^+ |v>.
inline Eigen::VectorXcd gcs_state(const SubspaceSpec& spec, const GcsParameters& xi, int v = 0) {
  if (v < 0 || v >= spec.dim) throw Error(ErrorCode::invalid_argument, "gcs_state: level out of range");
  return displacement_matrix(spec, xi).adjoint().col(v);
}

struct EvolutionSpec {
  Method source = Method::Exact;
  Eigen::VectorXcd initial;
  RootPolicy root{};
  PhiAverage phi_average = PhiAverage::Midpoint;
};

struct ObservableSample {
  double t = 0.0;
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  double v0 = 0.0;  // <V0> = <Y0> + l0 ± j
  double norm = 0.0;
  double autocorrelation = 0.0;  // |<psi(0)|psi(t)>|^2
  std::vector<double> populations;
};

/// Spectral decomposition H ~ B diag(E) B^+ used to propagate amplitudes.
struct Propagator {
  Eigen::MatrixXcd basis;  // columns: approximate eigenvectors
  std::vector<double> energies;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi0, double t) const {
    Eigen::VectorXcd c = basis.adjoint() * psi0;
    for (Eigen::Index v = 0; v < c.size(); ++v) c(v) *= std::polar(1.0, -energies[static_cast<std::size_t>(v)] * t);
    return basis * c;
  }
};

inline Propagator make_propagator(const ModelOnSubspace& m, const EvolutionSpec& e) {
  const double theta = std::arg(m.g);
  auto displaced = [&](double r, std::vector<double> energies, AlgebraKind kind) {
    // H ~ S^+ diag(E) S: the approximate eigenvectors are the columns of S^+.
    return Propagator{displacement_matrix(m.spec, {r, theta, kind}).adjoint(), std::move(energies)};
  };
  switch (e.source) {
    case Method::Exact: {
      const auto t = build_tridiagonal(m);
      const auto sol = eig_tridiagonal(t);
      return {sol.in_gauge(t.phase), sol.values};
    }
    case Method::Variational: {
      const auto var = variational_spectrum(m, e.root);
      return displaced(var.r, var.energies, AlgebraKind::SU2);
    }
    case Method::MeanField: {
      const auto mf = mfa_spectrum_tb(m);
      return displaced(mf.r, mf.energies, AlgebraKind::SU2);
    }
    case Method::QuasiEquidistant: {
      const auto q = quasi_equidistant_spectrum(m, e.phi_average);
      return displaced(q.r, q.spectrum.values, m.spec.kind);
    }
  }
  throw Error(ErrorCode::invalid_argument, "make_propagator: unknown source");
}

inline std::vector<ObservableSample> evolve_observables(const EvolutionSpec& e, const ModelOnSubspace& m,
                                                        const std::vector<double>& times) {
  if (e.initial.size() != m.spec.dim) throw Error(ErrorCode::invalid_argument, "evolve_observables: amplitude size mismatch");
  if (std::abs(e.initial.squaredNorm() - 1.0) > 1e-12)
    throw Error(ErrorCode::invalid_argument, "evolve_observables: initial amplitudes not normalized");
  const auto prop = make_propagator(m, e);
  std::vector<ObservableSample> out;
  out.reserve(times.size());
  for (double t : times) {
    const Eigen::VectorXcd psi = prop.apply(e.initial, t);
    const auto b = bloch_from_state(m.spec, psi);
    ObservableSample s;
    s.t = t;
    s.y0 = b.y0;
    s.y1 = b.y1;
    s.y2 = b.y2;
    s.v0 = b.y0 + m.spec.v0_shift();
    s.norm = psi.squaredNorm();
    s.autocorrelation = std::norm(e.initial.dot(psi));
    s.populations.resize(static_cast<std::size_t>(psi.size()));
    for (Eigen::Index v = 0; v < psi.size(); ++v) s.populations[static_cast<std::size_t>(v)] = std::norm(psi(v));
    out.push_back(std::move(s));
  }
  return out;
}

/// Smallest resonance defect |m w1 - n w2| over distinct level spacings and
/// 1 <= m, n <= max_order; zero when every spacing is the same.
struct IncommensurabilityReport {
  std::vector<double> spacings;
  double min_defect = 0.0;
  int v1 = -1, v2 = -1, m = 0, n = 0;
  bool distinct = false;
};

inline IncommensurabilityReport incommensurability(const std::vector<double>& levels, int max_order = 10,
                                                   double same_tol = 1e-9) {
  IncommensurabilityReport rep;
  for (std::size_t v = 0; v + 1 < levels.size(); ++v) rep.spacings.push_back(levels[v + 1] - levels[v]);
  rep.min_defect = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < rep.spacings.size(); ++a)
    for (std::size_t b = a + 1; b < rep.spacings.size(); ++b) {
      const double w1 = rep.spacings[a], w2 = rep.spacings[b];
      if (std::abs(w1 - w2) <= same_tol * std::max({std::abs(w1), std::abs(w2), 1.0})) continue;
      rep.distinct = true;
      for (int i = 1; i <= max_order; ++i)
        for (int k = 1; k <= max_order; ++k) {
          const double d = std::abs(i * w1 - k * w2);
          if (d < rep.min_defect) {
            rep.min_defect = d;
            rep.v1 = static_cast<int>(a);
            rep.v2 = static_cast<int>(b);
            rep.m = i;
            rep.n = k;
          }
        }
    }
  if (!rep.distinct) rep.min_defect = 0.0;
  return rep;
}

}  // namespace polysl2
