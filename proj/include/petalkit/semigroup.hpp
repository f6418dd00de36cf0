#pragma once

// Semigroups given by a holomorphic model (Omega, h, psi_t): phi_t = h^{-1} o psi_t o h with
// psi_t(w) = w + it (non-elliptic) or e^{-mu t} w (elliptic).

#include <petalkit/confmap.hpp>
#include <petalkit/domains.hpp>

#include <boost/numeric/odeint.hpp>

#include <array>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace petalkit {

enum class ModelKind { elliptic, hyperbolic, parabolic_pos, parabolic_zero };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::elliptic: return "elliptic";
    case ModelKind::hyperbolic: return "hyperbolic";
    case ModelKind::parabolic_pos: return "parabolic_pos";
    case ModelKind::parabolic_zero: return "parabolic_zero";
  }
  return "?";
}

struct SemigroupModel {
  ModelKind kind = ModelKind::elliptic;
  cplx mu{1, 0};      // elliptic
  double lambda = 0;  // hyperbolic: Omega is a strip of width pi / lambda
  int side = 1;       // parabolic_pos: +1 for {Re > a}, -1 for {Re < a}
  PlanarDomain domain;                   // h(D)
  std::optional<ConformalMap> koenigs;   // h
  std::optional<PetalGeometry> canonical;  // set when h(D) is exactly a canonical domain
  std::optional<cplx> tau_hint;            // known Denjoy-Wolff point
  // Distance in h(D) for model points, when something better than omega is available.
  std::function<double(cplx, cplx)> model_metric;

  bool elliptic() const { return kind == ModelKind::elliptic; }
  bool is_group() const { return canonical.has_value(); }

  const ConformalMap& h() const {
    if (!koenigs) throw input_error("semigroup model has no evaluatable Koenigs map");
    return *koenigs;
  }

  cplx psi(cplx w, double t) const { return elliptic() ? std::exp(-mu * t) * w : w + I * t; }

  bool model_contains(cplx w) const {
    try {
      return contains(domain, w).inside;
    } catch (const domain_error&) {
      return false;
    }
  }

  const StarlikeAtInfinityDomain* starlike() const { return std::get_if<StarlikeAtInfinityDomain>(&domain); }
  const SpirallikeSlitDomain* spirallike() const { return std::get_if<SpirallikeSlitDomain>(&domain); }

  /// Throws input_error when kind, parameters and domain disagree.
  void validate() const {
    if (elliptic()) {
      const auto* sd = spirallike();
      if (!sd) throw input_error("elliptic model needs a spirallike domain");
      if (!(mu.real() > 0)) throw input_error("elliptic model: Re mu must be positive");
      if (std::abs(sd->mu - mu) > 1e-14) throw input_error("elliptic model: domain mu differs from model mu");
      return;
    }
    const auto* sd = starlike();
    if (!sd) throw input_error("non-elliptic model needs a starlike-at-infinity domain");
    const double lo = sd->profile.lo(), hi = sd->profile.hi();
    switch (kind) {
      case ModelKind::hyperbolic:
        if (!(lambda > 0)) throw input_error("hyperbolic model: lambda must be positive");
        if (!std::isfinite(lo) || !std::isfinite(hi) || std::abs((hi - lo) - pi / lambda) > 1e-9 * (1 + hi - lo))
          throw input_error("hyperbolic model: domain must span a strip of width pi/lambda");
        break;
      case ModelKind::parabolic_pos:
        if (side > 0 ? !(std::isfinite(lo) && hi == inf) : !(lo == -inf && std::isfinite(hi)))
          throw input_error("parabolic_pos model: domain must span a half-plane on the given side");
        break;
      case ModelKind::parabolic_zero:
        if (std::isfinite(lo) || std::isfinite(hi)) throw input_error("parabolic_zero model: domain must not be bounded sideways");
        break;
      default: break;
    }
  }
};

// ---------------------------------------------------------------------------------------
// Evolution

/// phi_t(z) for any real t for which psi_t(h(z)) stays in h(D) (t < 0 inside the backward set).
inline cplx flow(const SemigroupModel& m, cplx z, double t) {
  require_disc(z, "flow");
  if (t == 0.0) return z;
  const cplx w = m.psi(m.h()(z), t);
  if (t < 0 && !m.model_contains(w)) throw domain_error("flow: backward orbit leaves the domain");
  return m.h().inverse(w);
}

inline cplx evolve(const SemigroupModel& m, cplx z, double t) {
  if (!(t >= 0)) throw input_error("evolve: t must be nonnegative");
  return flow(m, z, t);
}

/// G(z) from h'(z) G(z) = i (non-elliptic) or -mu h(z) (elliptic).
inline cplx generator_eval(const SemigroupModel& m, cplx z) {
  const cplx d = m.h().derivative(z);
  if (!(std::abs(d) > 1e-300) || !finite(d)) throw numeric_error("generator_eval: derivative underflow");
  if (m.elliptic()) return -m.mu * m.h()(z) / d;
  return I / d;
}

/// Denjoy-Wolff point: h^{-1}(0) (elliptic) or the limit of h^{-1}(w + it), t -> +inf.
inline cplx denjoy_wolff_point(const SemigroupModel& m) {
  if (m.tau_hint) return *m.tau_hint;
  if (m.elliptic()) return m.h().inverse(0.0);
  const cplx w0 = m.h()(0.0);
  cplx best = 0;
  for (double t = 1; t < 1e12; t *= 2) {
    try {
      const cplx z = m.h().inverse(w0 + I * t);
      best = z;
      if (1 - std::abs(z) < 1e-9) break;
    } catch (const std::exception&) {
      break;
    }
  }
  if (best == 0.0) throw numeric_error("denjoy_wolff_point: forward orbit could not be tracked");
  return best / std::abs(best);
}

// ---------------------------------------------------------------------------------------
// Maximal invariant curves and the backward invariant set

struct MaximalInvariantCurve {
  double a = -inf;         // curve defined on (a, +inf)
  bool a_infinite = true;  // a = -inf certified by the domain
  cplx w0;                 // h(z0), the curve is psi_t(w0)
  cplx p{0, 0};            // start point: lim_{t -> a+} gamma(t)
  double p_gap = 1;        // 1 - |gamma| at the point used to estimate p
  SemigroupModel model;

  cplx model_at(double t) const { return model.psi(w0, t); }
  cplx operator()(double t) const {
    if (!(t > a)) throw domain_error("maximal invariant curve: t outside (a, +inf)");
    return model.h().inverse(model_at(t));
  }
};

namespace detail {

/// Certificate that the backward ray/spiral through w never leaves the domain.
inline bool backward_ray_certified(const SemigroupModel& m, cplx w) {
  if (m.elliptic()) {
    if (w == 0.0) return true;
    const auto* sd = m.spirallike();
    return spiral_status(*sd, sd->angle_of(w)).kind == LineStatus::Kind::full_line;
  }
  return m.starlike()->vertical_line_status(w.real()).kind == LineStatus::Kind::full_line;
}

inline cplx landing_estimate(const std::function<cplx(double)>& gamma, double s0, double s_max, double* gap) {
  cplx last = 0;
  bool any = false;
  for (double s = s0; s <= s_max; s *= 2) {
    try {
      const cplx z = gamma(s);
      if (!finite(z) || std::abs(z) >= 1) break;
      last = z;
      any = true;
      if (1 - std::abs(z) < 1e-8) break;
    } catch (const std::exception&) {
      break;
    }
  }
  if (!any) throw numeric_error("landing estimate: curve could not be evaluated");
  if (gap) *gap = 1 - std::abs(last);
  return last / std::abs(last);
}

}  // namespace detail

/// a = inf{t < 0 : psi_{-t}... } by bracketed scan plus bisection on model membership.
inline MaximalInvariantCurve maximal_invariant_curve(const SemigroupModel& m, cplx z0, double t_max = 1e3) {
  require_disc(z0, "maximal_invariant_curve");
  MaximalInvariantCurve c;
  c.model = m;
  c.w0 = m.h()(z0);
  if (m.elliptic() && std::abs(c.w0) < 1e-14) throw input_error("maximal_invariant_curve: z0 is the Denjoy-Wolff point");
  auto inside = [&](double s) { return m.model_contains(m.psi(c.w0, -s)); };
  // the scan stops early when the backward point overflows
  for (double s = t_max; s > 1e-3; s *= 0.5) {
    if (finite(m.psi(c.w0, -s)) && std::abs(m.psi(c.w0, -s)) < 1e300) break;
    t_max = 0.5 * s;
  }
  double lo = 0, hi = -1;
  for (double s = 1e-3; s <= t_max; s *= 2) {
    if (!inside(s)) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (hi < 0 && !inside(t_max)) hi = t_max;
  if (hi < 0) {
    if (!detail::backward_ray_certified(m, c.w0))
      throw indeterminate_error("maximal_invariant_curve: horizon reached without a domain certificate");
    c.a = -inf;
    c.a_infinite = true;
    c.p = detail::landing_estimate([&](double s) { return m.h().inverse(m.psi(c.w0, -s)); }, 1.0, 1e6, &c.p_gap);
    return c;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  c.a = -lo;
  c.a_infinite = false;
  const double eps = 1e-7 * (1 + lo);
  c.p = detail::landing_estimate([&](double) { return m.h().inverse(m.psi(c.w0, -(lo - eps))); }, 1.0, 1.0, &c.p_gap);
  return c;
}

/// Upstairs geometries of the maximal strips, half-planes or sectors of h(D).
inline std::vector<PetalGeometry> maximal_geometries(const SemigroupModel& m) {
  std::vector<PetalGeometry> out;
  if (const auto* sd = m.spirallike()) {
    for (const auto& s : maximal_spirallike_sectors(*sd)) out.push_back(PetalGeometry::make_sector(s));
  } else {
    const auto* st = m.starlike();
    for (const auto& [a1, a2] : maximal_strips(*st)) out.push_back(PetalGeometry::make_strip(a1, a2));
    for (const auto& hp : maximal_half_planes(*st)) out.push_back(PetalGeometry::make_half(hp));
  }
  return out;
}

enum class WMembership { interior_of_W, boundary_of_W, outside };

inline const char* to_string(WMembership v) {
  switch (v) {
    case WMembership::interior_of_W: return "interior_of_W";
    case WMembership::boundary_of_W: return "boundary_of_W";
    case WMembership::outside: return "outside";
  }
  return "?";
}

/// Membership in the backward invariant set W = cap_t phi_t(D), read off from h(z).
inline WMembership backward_invariant_membership(const SemigroupModel& m, cplx z, double tol = 1e-9) {
  require_disc(z, "backward_invariant_membership");
  const cplx w = m.h()(z);
  if (m.elliptic() && std::abs(w) < 1e-14) throw input_error("backward_invariant_membership: z is the Denjoy-Wolff point");
  const auto geoms = maximal_geometries(m);
  const double scale = m.elliptic() ? 1.0 : 1.0 + std::abs(w.real());
  for (const auto& g : geoms)
    if (geometry_contains(g, w) && geometry_boundary_gap(g, w) > tol * scale) return WMembership::interior_of_W;
  for (const auto& g : geoms)
    if (geometry_boundary_gap(g, w) <= tol * scale) return WMembership::boundary_of_W;
  const auto c = maximal_invariant_curve(m, z);
  return c.a_infinite ? WMembership::boundary_of_W : WMembership::outside;
}

// ---------------------------------------------------------------------------------------
// Petals

struct Petal {
  enum class Kind { hyperbolic, parabolic };
  Kind kind = Kind::hyperbolic;
  PetalGeometry geometry;
  std::optional<cplx> sigma;  // repelling point estimate (hyperbolic)
  double sigma_gap = 1;       // 1 - |z| at the sample used for sigma
  double lambda_rep = 0;      // repelling spectral value (hyperbolic)
  int shape_type = 0;
};

/// lambda = -pi / rho (strip of width rho) or -|mu|^2 pi / (beta Re mu) (sector of amplitude beta).
inline double petal_spectral_value(const PetalGeometry& g) {
  switch (g.kind) {
    case PetalGeometry::Kind::strip: return -pi / (g.a2 - g.a1);
    case PetalGeometry::Kind::sector:
      return -std::norm(g.sector.mu) * pi / (g.sector.two_alpha * g.sector.mu.real());
    case PetalGeometry::Kind::half_plane: break;
  }
  throw input_error("petal_spectral_value: parabolic geometry has no spectral value");
}

/// Point of the central backward curve of the geometry at parameter s >= 0.
inline cplx central_backward_point(const PetalGeometry& g, double s) {
  switch (g.kind) {
    case PetalGeometry::Kind::strip: return {0.5 * (g.a1 + g.a2), -s};
    case PetalGeometry::Kind::sector: return std::exp(s * g.sector.mu + I * g.sector.theta0);
    case PetalGeometry::Kind::half_plane: break;
  }
  throw input_error("central_backward_point: parabolic geometry");
}

inline bool petal_contains(const SemigroupModel& m, const Petal& P, cplx z) {
  return geometry_contains(P.geometry, m.h()(z));
}

/// Petals of the semigroup from the maximal geometries of h(D). Groups have no petals.
inline std::vector<Petal> find_petals(const SemigroupModel& m) {
  std::vector<Petal> out;
  if (m.is_group()) return out;
  for (const auto& g : maximal_geometries(m)) {
    Petal P;
    P.geometry = g;
    P.kind = g.kind == PetalGeometry::Kind::half_plane ? Petal::Kind::parabolic : Petal::Kind::hyperbolic;
    P.shape_type = std::visit([&](const auto& d) { return petal_shape_type(d, g); }, m.domain);
    if (P.kind == Petal::Kind::hyperbolic) {
      P.lambda_rep = petal_spectral_value(g);
      if (m.koenigs) {
        try {
          P.sigma = detail::landing_estimate(
              [&](double s) { return m.h().inverse(central_backward_point(g, s)); }, 0.25, 1e6, &P.sigma_gap);
        } catch (const numeric_error&) {
          P.sigma.reset();
        }
      }
    }
    out.push_back(P);
  }
  // strips containing 0 first (the central channel of symmetric combs)
  std::stable_sort(out.begin(), out.end(), [](const Petal& a, const Petal& b) {
    auto central = [](const Petal& p) {
      return p.geometry.kind == PetalGeometry::Kind::strip && p.geometry.a1 < 0 && p.geometry.a2 > 0;
    };
    return central(a) && !central(b);
  });
  return out;
}

// ---------------------------------------------------------------------------------------
// Orbits

struct OrbitTrace {
  enum class Direction { forward, backward };
  Direction direction = Direction::forward;
  std::vector<double> t;  // elapsed time, monotone (negative for backward orbits)
  std::vector<cplx> z;    // disc points; NaN where the Koenigs map cannot resolve the point
  std::vector<cplx> w;    // model points h(z); NaN when not tracked
  bool landed = false;     // halted because 1 - |z| fell below the boundary tolerance
  bool truncated = false;  // backward range cut at the start of the maximal invariant curve
  double model_deviation = std::numeric_limits<double>::quiet_NaN();  // max |ODE - model|
  std::function<double(cplx, cplx)> model_metric;

  std::size_t size() const { return t.size(); }
  static bool resolved(cplx z) { return finite(z); }
};

/// Orbit through the model relation on t = 0, +-dt, ..., +-T.
inline OrbitTrace sample_orbit(const SemigroupModel& m, cplx z0, double T, double dt = 1.0,
                               OrbitTrace::Direction dir = OrbitTrace::Direction::backward) {
  require_disc(z0, "sample_orbit");
  if (!(dt > 0) || !(T >= 0)) throw input_error("sample_orbit: need dt > 0, T >= 0");
  OrbitTrace tr;
  tr.direction = dir;
  tr.model_metric = m.model_metric;
  const double sg = dir == OrbitTrace::Direction::backward ? -1.0 : 1.0;
  const cplx w0 = m.h()(z0);
  double limit = inf;
  if (sg < 0 && !m.is_group()) {
    const auto c = maximal_invariant_curve(m, z0);
    if (!c.a_infinite) limit = -c.a;
  }
  const auto n = static_cast<long>(std::llround(T / dt));
  const cplx nan{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  for (long k = 0; k <= n; ++k) {
    const double s = k * dt;
    if (s >= limit) {
      tr.truncated = true;
      break;
    }
    const cplx w = m.psi(w0, sg * s);
    cplx z = nan;
    if (k == 0) {
      z = z0;
    } else {
      try {
        z = m.h().inverse(w);
        if (!(std::abs(z) < 1)) z = nan;
      } catch (const std::exception&) {
        z = nan;
      }
    }
    tr.t.push_back(sg * s);
    tr.z.push_back(z);
    tr.w.push_back(w);
  }
  return tr;
}

struct IntegrateOptions {
  double tol = 1e-11;
  double boundary_tol = 1e-8;
  int samples = 101;
};

/// Partial trace carried by integration failures.
struct integration_error : numeric_error {
  OrbitTrace partial;
  integration_error(const std::string& what, OrbitTrace p) : numeric_error(what), partial(std::move(p)) {}
};

/// Adaptive dopri5 solution of dz/dt = G(z) from t = 0 to t = t_end (t_end < 0 integrates
/// backward with -G, only on the certified backward range).
inline OrbitTrace integrate_orbit(const SemigroupModel& m, cplx z0, double t_end, const IntegrateOptions& opt = {}) {
  namespace ode = boost::numeric::odeint;
  using state = std::array<double, 2>;
  require_disc(z0, "integrate_orbit");
  if (!(opt.tol > 0) || !(opt.boundary_tol > 0) || opt.samples < 2) throw input_error("integrate_orbit: bad options");
  OrbitTrace tr;
  tr.direction = t_end < 0 ? OrbitTrace::Direction::backward : OrbitTrace::Direction::forward;
  tr.model_metric = m.model_metric;
  const double sg = t_end < 0 ? -1.0 : 1.0;
  double span = std::abs(t_end);
  if (sg < 0 && !m.is_group()) {
    const auto c = maximal_invariant_curve(m, z0);
    if (!c.a_infinite && -c.a < span) {
      span = -c.a * (1 - 1e-9);
      tr.truncated = true;
    }
  }
  if (span == 0.0) {
    tr.t = {0.0};
    tr.z = {z0};
    tr.w = {m.koenigs ? m.h()(z0) : cplx{}};
    return tr;
  }
  struct halt {};
  auto sys = [&](const state& x, state& dx, double) {
    const cplx z{x[0], x[1]};
    if (!(std::abs(z) < 1 - 0.1 * opt.boundary_tol)) throw halt{};
    const cplx g = sg * generator_eval(m, z);
    dx = {g.real(), g.imag()};
  };
  std::vector<double> times;
  for (int k = 0; k < opt.samples; ++k) times.push_back(span * k / (opt.samples - 1));
  state x{z0.real(), z0.imag()};
  auto observer = [&](const state& s, double t) {
    const cplx z{s[0], s[1]};
    tr.t.push_back(sg * t);
    tr.z.push_back(z);
    tr.w.push_back({std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
    if (1 - std::abs(z) < opt.boundary_tol) {
      tr.landed = true;
      throw halt{};
    }
  };
  try {
    auto stepper = ode::make_dense_output(opt.tol, opt.tol, ode::runge_kutta_dopri5<state>());
    ode::integrate_times(stepper, sys, x, times.begin(), times.end(), span / (opt.samples - 1) * 0.1, observer,
                         ode::max_step_checker(100000));
  } catch (const halt&) {
    if (!tr.landed) tr.landed = true;
  } catch (const ode::step_adjustment_error& e) {
    throw integration_error(std::string("integrate_orbit: step size collapse: ") + e.what(), tr);
  } catch (const ode::no_progress_error& e) {
    throw integration_error(std::string("integrate_orbit: no progress: ") + e.what(), tr);
  } catch (const domain_error& e) {
    tr.landed = true;
  }
  // cross-validation against the model relation
  if (m.koenigs && !m.h().is_numeric()) {
    double dev = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      try {
        const cplx zm = flow(m, z0, tr.t[k]);
        dev = std::max(dev, std::abs(zm - tr.z[k]));
        tr.w[k] = m.h()(tr.z[k]);
      } catch (const std::exception&) {
      }
    }
    tr.model_deviation = dev;
  }
  return tr;
}

// ---------------------------------------------------------------------------------------
// Backward orbit diagnostics

struct StepEstimate {
  double value = 0;
  bool diverging = false;
  std::vector<double> window;  // omega(gamma(t), gamma(t+1)) over the tail
};

/// V(gamma) = limsup omega(gamma(t), gamma(t+1)) estimated as the maximum over the tail
/// [T/2, T-1] of a backward trace sampled at integer (or integer-fraction) times.
inline StepEstimate hyperbolic_step(const OrbitTrace& tr) {
  if (tr.truncated) throw input_error("hyperbolic_step: orbit is not defined for all negative times");
  if (tr.size() < 2) throw input_error("hyperbolic_step: trace too short");
  const double T = std::abs(tr.t.back());
  if (T < 20) throw input_error("hyperbolic_step: trace must cover at least 20 time units");
  const double dt = std::abs(tr.t[1] - tr.t[0]);
  const long per = std::lround(1.0 / dt);
  if (per < 1 || std::abs(per * dt - 1.0) > 1e-9) throw input_error("hyperbolic_step: sampling step must divide 1");
  StepEstimate out;
  for (std::size_t k = 0; k + per < tr.size(); ++k) {
    if (std::abs(tr.t[k]) < 0.5 * T) continue;
    double d;
    if (tr.model_metric && finite(tr.w[k]) && finite(tr.w[k + per])) {
      d = tr.model_metric(tr.w[k], tr.w[k + per]);
    } else {
      if (!OrbitTrace::resolved(tr.z[k]) || !OrbitTrace::resolved(tr.z[k + per]))
        throw numeric_error("hyperbolic_step: unresolved samples and no model metric");
      d = omega(tr.z[k], tr.z[k + per]);
    }
    out.window.push_back(d);
  }
  if (out.window.empty()) throw input_error("hyperbolic_step: empty tail window");
  out.value = *std::max_element(out.window.begin(), out.window.end());
  const bool monotone = std::is_sorted(out.window.begin(), out.window.end());
  out.diverging = monotone && out.window.front() > 0 && out.window.back() > 1.5 * out.window.front();
  if (out.diverging) out.value = inf;
  return out;
}

struct LandingReport {
  enum class Verdict { repelling_target, dw_tangential, interior_constant };
  Verdict verdict = Verdict::repelling_target;
  cplx sigma_hat;
  double slope_hat = 0;
  bool tangential = false;
  double R_hat = std::numeric_limits<double>::quiet_NaN();      // dw_tangential: |tau-g|^2/(1-|g|^2)
  double R_spread = std::numeric_limits<double>::quiet_NaN();   // relative spread of R over the tail
};

inline const char* to_string(LandingReport::Verdict v) {
  switch (v) {
    case LandingReport::Verdict::repelling_target: return "repelling_target";
    case LandingReport::Verdict::dw_tangential: return "dw_tangential";
    case LandingReport::Verdict::interior_constant: return "interior_constant";
  }
  return "?";
}

inline LandingReport landing_analysis(const OrbitTrace& tr, const SemigroupModel& m) {
  LandingReport r;
  std::vector<cplx> zs;
  for (auto z : tr.z)
    if (OrbitTrace::resolved(z)) zs.push_back(z);
  if (zs.empty()) throw indeterminate_error("landing_analysis: no resolved samples");
  bool constant = true;
  for (auto z : zs) constant = constant && std::abs(z - zs.front()) < 1e-14;
  if (constant && zs.size() > 1 && std::abs(zs.front()) < 1) {
    r.verdict = LandingReport::Verdict::interior_constant;
    r.sigma_hat = zs.front();
    return r;
  }
  std::vector<cplx> tail;
  for (auto z : zs)
    if (std::abs(z) > 0.99) tail.push_back(z);
  if (tail.size() < 4) throw indeterminate_error("landing_analysis: trace does not approach the boundary");
  tail.erase(tail.begin(), tail.begin() + static_cast<long>(tail.size() / 2));
  const auto slopes_at = [&](cplx s) {
    std::vector<double> out;
    for (auto z : tail) out.push_back(std::arg(1.0 - std::conj(s) * z));
    return out;
  };
  // tangential approach to the Denjoy-Wolff point is tested first
  std::optional<cplx> tau;
  try {
    tau = denjoy_wolff_point(m);
  } catch (const std::exception&) {
  }
  if (tau && std::abs(std::abs(*tau) - 1) < 1e-9) {
    const auto sl = slopes_at(*tau);
    const double gap_last = pi / 2 - std::abs(sl.back());
    const double gap_first = pi / 2 - std::abs(sl.front());
    if (std::abs(tail.back() - *tau) < 5e-2 && gap_last < 0.05 && gap_last <= gap_first + 1e-12) {
      r.sigma_hat = *tau;
      r.slope_hat = sl.back();
      r.tangential = true;
    }
  }
  if (!r.tangential) {
    // Aitken extrapolation of the geometric approach
    const std::size_t n = tail.size();
    const cplx d = tail[n - 1] - 2.0 * tail[n - 2] + tail[n - 3];
    cplx s = tail[n - 1];
    if (std::abs(d) > 1e-300) {
      const cplx e = tail[n - 1] - std::pow(tail[n - 1] - tail[n - 2], 2) / d;
      if (finite(e) && std::abs(e - tail[n - 1]) < 2 * (1 - std::abs(tail[n - 1])) + 1e-12) s = e;
    }
    r.sigma_hat = s / std::abs(s);
    for (auto z : tail)
      if (std::abs(z / std::abs(z) - r.sigma_hat) > 5e-2) throw indeterminate_error("landing_analysis: tail does not converge");
    const auto sl = slopes_at(r.sigma_hat);
    const std::size_t q = std::max<std::size_t>(1, sl.size() / 4);
    double acc = 0;
    for (std::size_t k = sl.size() - q; k < sl.size(); ++k) acc += sl[k];
    r.slope_hat = acc / static_cast<double>(q);
    r.verdict = LandingReport::Verdict::repelling_target;
    return r;
  }
  r.verdict = LandingReport::Verdict::dw_tangential;
  const cplx tau_v = *tau;
  double lo = inf, hi = -inf;
  for (auto z : tail) {
    const double R = std::norm(tau_v - z) / (1 - std::norm(z));
    lo = std::min(lo, R);
    hi = std::max(hi, R);
  }
  r.R_hat = 0.5 * (lo + hi);
  r.R_spread = (hi - lo) / r.R_hat;
  return r;
}

// ---------------------------------------------------------------------------------------
// Pre-models

namespace detail {

/// z -> L = log((1 + conj(sigma) z)/(1 - conj(sigma) z)), onto {|Im L| < pi/2}.
inline cplx premodel_log(cplx sigma, cplx z) {
  const cplx u = std::conj(sigma) * z;
  return std::log((1.0 + u) / (1.0 - u));
}

/// Canonical strip {|Im L| < pi/2} -> upstairs petal geometry, conjugating L + lambda t to psi_t.
inline cplx petal_from_log(const PetalGeometry& g, cplx L) {
  switch (g.kind) {
    case PetalGeometry::Kind::strip: {
      const double rho = g.a2 - g.a1;
      return 0.5 * (g.a1 + g.a2) - I * (rho / pi) * L;
    }
    case PetalGeometry::Kind::sector: {
      const auto& s = g.sector;
      const double b = s.mu.imag() / s.mu.real();
      const cplx W = I * s.theta0 + (s.two_alpha / pi) * L;
      return std::exp(W / (1.0 - I * b));
    }
    case PetalGeometry::Kind::half_plane: break;
  }
  throw input_error("pre-model: parabolic petal");
}

inline cplx log_from_petal(const PetalGeometry& g, cplx w) {
  switch (g.kind) {
    case PetalGeometry::Kind::strip: {
      const double rho = g.a2 - g.a1;
      return I * (pi / rho) * (w - 0.5 * (g.a1 + g.a2));
    }
    case PetalGeometry::Kind::sector: {
      const auto& s = g.sector;
      const double b = s.mu.imag() / s.mu.real();
      const auto c = spiral_coords(s.mu, w, s.theta0 - pi);
      const cplx logw{std::log(std::abs(w)), c.theta + c.t * s.mu.imag()};
      return ((1.0 - I * b) * logw - I * s.theta0) * (pi / s.two_alpha);
    }
    case PetalGeometry::Kind::half_plane: break;
  }
  throw input_error("pre-model: parabolic petal");
}

struct PremodelMap : MapImpl {
  SemigroupModel model;
  PetalGeometry geom;
  cplx sigma;
  cplx eval(cplx z) const override {
    detail::require_open_disc(z, "pre-model");
    return model.h().inverse(petal_from_log(geom, premodel_log(sigma, z)));
  }
  cplx inverse(cplx p) const override {
    const cplx w = model.h()(p);
    if (!geometry_contains(geom, w)) throw domain_error("pre-model inverse: point outside the petal");
    const cplx L = log_from_petal(geom, w);
    return sigma * std::tanh(0.5 * L);
  }
  cplx derivative(cplx z) const override {
    return detail::cauchy_derivative([this](cplx u) { return eval(u); }, z);
  }
  std::string name() const override { return "premodel"; }
};

}  // namespace detail

struct PreModel {
  ConformalMap g;       // disc -> petal
  cplx sigma;           // fixed points +-sigma of eta, repelling at sigma
  double lambda_rep = 0;
  PetalGeometry geometry;
  double residual = 0;             // max |g o eta_t - phi_t o g| on the test grid
  double semiconformal_defect = 0; // |Arg(1 - conj(sigma) g) - Arg(1 - conj(sigma) z)| at the deepest Stolz sample

  /// Hyperbolic group with Denjoy-Wolff point -sigma and eta_t'(sigma) = e^{-lambda_rep t}.
  cplx eta(cplx z, double t) const {
    if (t == 0.0) return z;
    const cplx L = detail::premodel_log(sigma, z) + lambda_rep * t;
    return sigma * std::tanh(0.5 * L);
  }
  /// g in model coordinates (h o g), exact for any depth.
  cplx model_g(cplx z) const { return detail::petal_from_log(geometry, detail::premodel_log(sigma, z)); }
};

inline PreModel build_premodel(const SemigroupModel& m, const Petal& P, double tol = 1e-6) {
  if (P.kind != Petal::Kind::hyperbolic) throw input_error("build_premodel: petal must be hyperbolic");
  if (!P.sigma) throw input_error("build_premodel: petal has no sigma estimate");
  auto impl = std::make_shared<detail::PremodelMap>();
  impl->model = m;
  impl->geom = P.geometry;
  impl->sigma = *P.sigma;
  PreModel pm{ConformalMap(impl), *P.sigma, P.lambda_rep, P.geometry};
  const double tol_eff = m.h().is_numeric() ? std::max(tol, 1e-3) : tol;
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 12; ++j) {
      const cplx z = std::polar(0.12 * (i + 1), 2 * pi * j / 12 + 0.1);
      for (double t : {0.0, 0.5, 1.0, 2.0}) {
        const cplx lhs = pm.g(pm.eta(z, t));
        const cplx rhs = t == 0.0 ? pm.g(z) : evolve(m, pm.g(z), t);
        pm.residual = std::max(pm.residual, std::abs(lhs - rhs));
      }
    }
  }
  if (pm.residual > tol_eff)
    throw numeric_error("build_premodel: intertwining residual " + std::to_string(pm.residual));
  for (double r = 1e-2; r >= 1e-6; r /= 10) {
    for (double beta : {-1.0, 0.0, 1.0}) {
      const cplx z = pm.sigma * (1.0 - r * std::polar(1.0, beta));
      try {
        const cplx gz = pm.g(z);
        pm.semiconformal_defect = std::abs(wrap_angle(std::arg(1.0 - std::conj(pm.sigma) * gz) - beta));
      } catch (const std::exception&) {
      }
    }
  }
  return pm;
}

// ---------------------------------------------------------------------------------------
// Stolz regions at sigma

struct StolzProbe {
  double epsilon = 0;
  long samples = 0;          // Stolz samples tested at the returned epsilon
  long counterexamples = 0;  // failures seen on the schedule
  std::optional<cplx> counterexample;
};

/// Largest epsilon on the schedule 2^{1-k} such that every sampled point of
/// S(sigma, M) within epsilon of sigma lies in the petal.
inline StolzProbe stolz_inclusion_probe(const SemigroupModel& m, const Petal& P, double M, long n_samples = 10000,
                                        int k_max = 20, std::uint64_t seed = 0) {
  if (P.kind != Petal::Kind::hyperbolic || !P.sigma) throw input_error("stolz_inclusion_probe: needs a hyperbolic petal with sigma");
  const StolzRegion S(*P.sigma / std::abs(*P.sigma), M);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  StolzProbe out;
  for (int k = 1; k <= k_max; ++k) {
    const double eps = std::ldexp(1.0, 1 - k);
    long accepted = 0, bad = 0;
    for (long tries = 0; accepted < n_samples && tries < 50 * n_samples; ++tries) {
      // z = sigma (1 - r e^{i phi}), r log-uniform in (eps 1e-6, eps)
      const double r = eps * std::pow(1e-6, U(rng));
      const double phi = (U(rng) - 0.5) * pi;
      const cplx z = S.sigma * (1.0 - r * std::polar(1.0, phi));
      if (std::abs(z - S.sigma) >= eps || !in_stolz(S, z)) continue;
      ++accepted;
      bool in = false;
      try {
        in = petal_contains(m, P, z);
      } catch (const std::exception&) {
      }
      if (!in) {
        ++bad;
        if (!out.counterexample) out.counterexample = z;
      }
    }
    out.counterexamples += bad;
    if (bad == 0) {
      out.epsilon = eps;
      out.samples = accepted;
      return out;
    }
  }
  return out;
}

}  // namespace petalkit
