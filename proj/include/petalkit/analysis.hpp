#pragma once

// Estimators and classifiers on top of a semigroup model: divergence and repelling rates,
// spirallike arguments, prime-end classification, slope laws.

#include <petalkit/semigroup.hpp>

#include <algorithm>
#include <functional>
#include <vector>

namespace petalkit {

struct RateEstimate {
  enum class Trend { converged, drifting };
  double value = 0;
  double horizon = 0;
  Trend trend = Trend::drifting;
  std::vector<double> times;   // sample times
  std::vector<double> values;  // estimates at those times
  bool upstairs = false;       // computed in model coordinates
};

inline const char* to_string(RateEstimate::Trend t) { return t == RateEstimate::Trend::converged ? "converged" : "drifting"; }

/// lambda-spirallike argument: w = e^{-lambda t + i theta}, theta in [-pi, pi).
inline double arg_lambda(cplx lambda, cplx w) {
  if (!(lambda.real() > 0)) throw input_error("arg_lambda: Re lambda must be positive");
  if (w == 0.0 || !finite(w)) throw domain_error("arg_lambda: w must be finite and nonzero");
  const double t = -std::log(std::abs(w)) / lambda.real();
  return wrap_angle(std::arg(w) + t * lambda.imag());
}

/// |mu|^2 pi / (4 alpha Re mu).
inline double sector_rate_closed_form(cplx mu, double alpha) {
  if (!(mu.real() > 0)) throw input_error("sector_rate_closed_form: Re mu must be positive");
  if (!(alpha > 0 && alpha <= pi)) throw input_error("sector_rate_closed_form: alpha must be in (0, pi]");
  return std::norm(mu) * pi / (4 * alpha * mu.real());
}

/// -pi / rho.
inline double spectral_value_from_geometry(double rho) {
  if (!(rho > 0)) throw input_error("spectral_value_from_geometry: width must be positive");
  return -pi / rho;
}

/// -|mu|^2 pi / (beta Re mu) for a sector of amplitude beta.
inline double spectral_value_from_geometry(cplx mu, double beta) {
  if (!(mu.real() > 0)) throw input_error("spectral_value_from_geometry: Re mu must be positive");
  if (!(beta > 0 && beta <= 2 * pi)) throw input_error("spectral_value_from_geometry: amplitude must be in (0, 2pi]");
  return -std::norm(mu) * pi / (beta * mu.real());
}

inline double spectral_value_from_geometry(const PetalGeometry& g) { return petal_spectral_value(g); }

namespace detail {

inline bool last_quarter_converged(const std::vector<double>& v, double rel = 0.01) {
  if (v.size() < 4) return false;
  const std::size_t q = std::max<std::size_t>(2, v.size() / 4);
  const auto b = v.end() - static_cast<long>(q);
  const auto [lo, hi] = std::minmax_element(b, v.end());
  const double ref = std::max(std::abs(v.back()), 1e-300);
  return (*hi - *lo) <= rel * ref;
}

/// Distance in the geometry between w and psi_s(w); sectors go through spiral coordinates
/// so large s does not overflow.
inline double geometry_flow_distance(const PetalGeometry& g, const SemigroupModel& m, cplx w, double s) {
  if (g.kind == PetalGeometry::Kind::sector) {
    const auto& sec = g.sector;
    const auto c1 = spiral_coords(sec.mu, w, sec.theta0 - pi);
    SpiralCoords c2 = c1;
    c2.t -= s;
    return dist_spirallike_sector_coords(sec.mu, sec.alpha(), sec.theta0, c1, c2);
  }
  return geometry_distance(g, w, m.psi(w, s));
}

}  // namespace detail

/// Divergence rate lim k(phi_s(z), z) / s sampled at s = T k / 16. Upstairs when h(D) is
/// canonical, otherwise omega in the disc.
inline RateEstimate divergence_rate(const SemigroupModel& m, cplx z, double T) {
  require_disc(z, "divergence_rate");
  if (!(T >= 100)) throw input_error("divergence_rate: horizon must be at least 100");
  RateEstimate r;
  r.horizon = T;
  const int n = 16;
  if (m.canonical) {
    r.upstairs = true;
    const cplx w = m.h()(z);
    for (int k = 1; k <= n; ++k) {
      const double s = T * k / n;
      r.times.push_back(s);
      r.values.push_back(detail::geometry_flow_distance(*m.canonical, m, w, s) / s);
    }
  } else {
    for (int k = 1; k <= n; ++k) {
      const double s = T * k / n;
      try {
        const cplx zs = evolve(m, z, s);
        if (!(std::abs(zs) < 1)) break;
        r.times.push_back(s);
        r.values.push_back(omega(z, zs) / s);
      } catch (const std::exception&) {
        break;
      }
    }
    if (r.values.empty()) throw numeric_error("divergence_rate: forward orbit could not be evaluated");
  }
  r.value = r.values.back();
  r.trend = detail::last_quarter_converged(r.values) && r.times.back() == T ? RateEstimate::Trend::converged
                                                                          : RateEstimate::Trend::drifting;
  return r;
}

struct PetalRateCheck {
  double rate = 0;
  double expected = 0;  // -lambda_rep / 2
  bool pass = false;
};

/// Rate of the group psi_t restricted to the petal geometry, from its central point.
inline PetalRateCheck petal_rate_check(const SemigroupModel& m, const Petal& P, double T = 1e3) {
  if (P.kind != Petal::Kind::hyperbolic) throw input_error("petal_rate_check: petal must be hyperbolic");
  const cplx w = central_backward_point(P.geometry, 0);
  PetalRateCheck c;
  c.expected = -P.lambda_rep / 2;
  c.rate = detail::geometry_flow_distance(P.geometry, m, w, -T) / T;
  c.pass = std::abs(c.rate - c.expected) <= 0.02 * std::abs(c.expected);
  return c;
}

/// (1/t) log|1 - conj(sigma) phi_t(z)| at t = -horizon {1/4, 1/2, 3/4, 1}, extrapolated in 1/t.
inline RateEstimate repelling_rate(const SemigroupModel& m, const Petal& P, cplx z, double horizon,
                                   std::optional<cplx> sigma = std::nullopt) {
  if (P.kind != Petal::Kind::hyperbolic) throw input_error("repelling_rate: petal must be hyperbolic");
  if (!(horizon >= 4)) throw indeterminate_error("repelling_rate: horizon too small");
  const cplx sg = sigma ? *sigma : (P.sigma ? *P.sigma : throw input_error("repelling_rate: petal has no sigma"));
  if (!petal_contains(m, P, z)) throw input_error("repelling_rate: z is not in the petal");
  RateEstimate r;
  r.horizon = horizon;
  for (double f : {0.25, 0.5, 0.75, 1.0}) {
    const double t = -horizon * f;
    try {
      const cplx zt = flow(m, z, t);
      const double gap = std::abs(1.0 - std::conj(sg) * zt);
      if (!(gap > 1e-14) || !(std::abs(zt) < 1)) break;
      r.times.push_back(t);
      r.values.push_back(std::log(gap) / t);
    } catch (const std::exception&) {
      break;
    }
  }
  if (r.values.size() < 2) throw indeterminate_error("repelling_rate: backward orbit degenerates near sigma");
  // least squares v = L + c / t
  auto fit = [&](std::size_t b, std::size_t e) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(e - b);
    for (std::size_t k = b; k < e; ++k) {
      const double x = 1 / r.times[k];
      sx += x;
      sy += r.values[k];
      sxx += x * x;
      sxy += x * r.values[k];
    }
    const double c = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return (sy - c * sx) / n;
  };
  const std::size_t n = r.values.size();
  r.value = fit(0, n);
  bool ok = n == 4;
  if (ok) {
    const double a = fit(0, 3), b = fit(1, 4);
    ok = std::abs(a - b) <= 0.01 * std::abs(r.value);
  }
  r.trend = ok ? RateEstimate::Trend::converged : RateEstimate::Trend::drifting;
  return r;
}

// ---------------------------------------------------------------------------------------
// Prime-end classification

/// Model-coordinate points at refinement level L = 0, 1, ...; deeper levels approach the end.
using AccessSampler = std::function<std::vector<cplx>(int level)>;

/// Channel {a1 < Re w < a2} entered downward (dir = -1) or upward (+1): depth 2^L, Re swept
/// across the channel with an edge clearance shrinking like 2^{-L}.
inline AccessSampler channel_access(double a1, double a2, int dir = -1, double im0 = 0, int across = 9) {
  if (!(a2 > a1) || across < 2) throw input_error("channel_access: bad channel");
  return [=](int L) {
    const double rho = a2 - a1, eps = std::ldexp(1.0, -L - 4);
    const double depth = im0 + dir * std::ldexp(1.0, L);
    std::vector<cplx> out;
    for (int j = 0; j < across; ++j) {
      const double f = eps + (1 - 2 * eps) * j / (across - 1);
      out.push_back({a1 + rho * f, depth});
    }
    return out;
  };
}

/// Backward spiral channel of Spir[mu, theta2 - theta1, .]: w = e^{mu s + i theta} with
/// s = 8 (L + 1), theta swept with clearance 2^{-L-4} of the amplitude.
inline AccessSampler spiral_access(cplx mu, double theta1, double theta2, int across = 9) {
  if (!(mu.real() > 0) || !(theta2 > theta1) || across < 2) throw input_error("spiral_access: bad channel");
  return [=](int L) {
    const double eps = std::ldexp(1.0, -L - 4), s = 8.0 * (L + 1);
    std::vector<cplx> out;
    for (int j = 0; j < across; ++j) {
      const double th = theta1 + (theta2 - theta1) * (eps + (1 - 2 * eps) * j / (across - 1));
      out.push_back(std::exp(mu * s + I * th));
    }
    return out;
  };
}

/// Single point w_n with n = 2^L.
inline AccessSampler point_access(std::function<cplx(double)> seq) {
  return [seq = std::move(seq)](int L) { return std::vector<cplx>{seq(std::ldexp(1.0, L))}; };
}

/// w0 + 2^L d.
inline AccessSampler ray_access(cplx w0, cplx d) {
  return [=](int L) { return std::vector<cplx>{w0 + std::ldexp(1.0, L) * d}; };
}

struct FixedPointReport {
  enum class Verdict { denjoy_wolff, repelling, super_repelling, not_fixed };
  Verdict verdict = Verdict::not_fixed;
  double nu = 0;          // repelling spectral value
  double lo = 0, hi = 0;  // liminf / limsup of the transverse coordinate
  std::optional<cplx> limit;  // h-limit (not_fixed)
  std::vector<int> levels;
  std::vector<double> lo_trace, hi_trace, long_trace;  // per-level transverse range and longitudinal coordinate
  std::vector<std::vector<cplx>> paths;                 // samples used
};

inline const char* to_string(FixedPointReport::Verdict v) {
  switch (v) {
    case FixedPointReport::Verdict::denjoy_wolff: return "denjoy_wolff";
    case FixedPointReport::Verdict::repelling: return "repelling";
    case FixedPointReport::Verdict::super_repelling: return "super_repelling";
    case FixedPointReport::Verdict::not_fixed: return "not_fixed";
  }
  return "?";
}

/// Reads the boundary behaviour of h along the access. Non-elliptic: transverse = Re w,
/// longitudinal = Im w. Elliptic: transverse = Arg_mu w, longitudinal = log|w|.
inline FixedPointReport classify_prime_end(const SemigroupModel& m, const AccessSampler& access, int max_level = 16,
                                           bool keep_paths = false) {
  if (max_level < 4) throw input_error("classify_prime_end: need at least 4 levels");
  FixedPointReport rep;
  std::vector<cplx> centers;
  std::vector<double> diams;
  for (int L = 0; L <= max_level; ++L) {
    const auto pts = access(L);
    if (pts.empty()) throw input_error("classify_prime_end: empty access sample");
    double lo = inf, hi = -inf, lg = 0, diam = 0;
    cplx c = 0;
    for (auto w : pts) {
      if (!finite(w) || !m.model_contains(w)) throw input_error("classify_prime_end: access leaves the domain");
      c += w;
    }
    c /= static_cast<double>(pts.size());
    const double th_ref = m.elliptic() ? spiral_coords(m.mu, pts[pts.size() / 2]).theta : 0.0;
    for (auto w : pts) {
      double tr = 0;
      if (m.elliptic()) {
        tr = spiral_coords(m.mu, w, th_ref - pi).theta;
        lg += std::log(std::abs(w));
      } else {
        tr = w.real();
        lg += w.imag();
      }
      lo = std::min(lo, tr);
      hi = std::max(hi, tr);
      diam = std::max(diam, std::abs(w - c));
    }
    lg /= static_cast<double>(pts.size());
    rep.levels.push_back(L);
    rep.lo_trace.push_back(lo);
    rep.hi_trace.push_back(hi);
    rep.long_trace.push_back(lg);
    centers.push_back(c);
    diams.push_back(diam);
    if (keep_paths) rep.paths.push_back(pts);
  }
  const std::size_t n = centers.size();
  const cplx cl = centers[n - 1];
  // bounded h-limit
  const double scale = 1 + std::abs(cl);
  if (diams[n - 1] <= 1e-3 * scale && std::abs(centers[n - 1] - centers[n - 2]) <= 1e-3 * scale &&
      std::abs(centers[n - 2] - centers[n - 3]) >= std::abs(centers[n - 1] - centers[n - 2])) {
    rep.verdict = FixedPointReport::Verdict::not_fixed;
    rep.limit = cl;
    return rep;
  }
  // the longitudinal coordinate must diverge monotonically over the last levels
  const double l1 = rep.long_trace[n - 3], l2 = rep.long_trace[n - 2], l3 = rep.long_trace[n - 1];
  const bool up = l3 > l2 && l2 > l1, down = l3 < l2 && l2 < l1;
  if (!(up || down) || std::abs(l3) < 1e2) throw indeterminate_error("classify_prime_end: access neither converges nor diverges");
  // w -> +i inf (non-elliptic) and w -> 0 (elliptic) are the absorbing ends of psi_t
  if (!m.elliptic() && up) {
    rep.verdict = FixedPointReport::Verdict::denjoy_wolff;
    return rep;
  }
  if (m.elliptic() && down) {
    rep.verdict = FixedPointReport::Verdict::denjoy_wolff;
    return rep;
  }
  rep.lo = rep.lo_trace[n - 1];
  rep.hi = rep.hi_trace[n - 1];
  const double w_now = rep.hi - rep.lo, w_prev = rep.hi_trace[n - 2] - rep.lo_trace[n - 2];
  const double tscale = std::max({std::abs(rep.lo), std::abs(rep.hi), 1.0});
  if (w_now <= 1e-3 * tscale) {
    const double d = rep.lo - rep.lo_trace[n - 2];
    const double move = std::abs(m.elliptic() ? wrap_angle(d) : d);
    if (move > 1e-2 * tscale && move > 1e-2) throw indeterminate_error("classify_prime_end: transverse limit not stabilized");
    rep.verdict = FixedPointReport::Verdict::super_repelling;
    return rep;
  }
  if (std::abs(w_now - w_prev) > 0.01 * w_now) throw indeterminate_error("classify_prime_end: liminf/limsup not stabilized");
  rep.verdict = FixedPointReport::Verdict::repelling;
  rep.nu = m.elliptic() ? -std::norm(m.mu) * pi / (w_now * m.mu.real()) : -pi / w_now;
  return rep;
}

// ---------------------------------------------------------------------------------------
// Slope laws

struct SlopeLawResult {
  double beta = 0;
  double predicted = 0;  // a + beta / nu, or theta0 + beta |mu|^2 / (nu Re mu)
  double measured = 0;
  std::vector<double> gaps;      // r_n
  std::vector<double> readings;  // transverse coordinate of h(z_n)
  bool pass = false;
};

/// z_n = sigma (1 - r_n e^{i beta}), r_n = 10^{-2}..10^{-7}; compares the transverse limit of
/// h(z_n) with the petal's prediction. Tolerance 0.02 max(|predicted|, 1).
inline SlopeLawResult slope_law_check(const SemigroupModel& m, const Petal& P, double beta,
                                      std::optional<cplx> sigma = std::nullopt) {
  if (P.kind != Petal::Kind::hyperbolic) throw input_error("slope_law_check: petal must be hyperbolic");
  if (!(std::abs(beta) < pi / 2)) throw input_error("slope_law_check: beta must lie in (-pi/2, pi/2)");
  const cplx sg = sigma ? *sigma : (P.sigma ? *P.sigma : throw input_error("slope_law_check: petal has no sigma"));
  const double nu = P.lambda_rep;
  SlopeLawResult res;
  res.beta = beta;
  const auto& g = P.geometry;
  double ref = 0;
  if (g.kind == PetalGeometry::Kind::strip) {
    ref = 0.5 * (g.a1 + g.a2);
    res.predicted = ref + beta / nu;
  } else {
    ref = g.sector.theta0;
    res.predicted = ref + beta * std::norm(g.sector.mu) / (nu * g.sector.mu.real());
  }
  for (double r = 1e-2; r >= 1e-7 * 0.999; r /= std::sqrt(10.0)) {
    const cplx z = sg * (1.0 - r * std::polar(1.0, beta));
    if (!(std::abs(z) < 1)) throw input_error("slope_law_check: sample outside the disc");
    const cplx w = m.h()(z);
    if (!geometry_contains(g, w)) throw input_error("slope_law_check: sequence leaves the petal");
    double x;
    if (g.kind == PetalGeometry::Kind::strip) {
      x = w.real();
    } else {
      x = spiral_coords(g.sector.mu, w, g.sector.theta0 - pi).theta;
      x = res.predicted + wrap_angle(x - res.predicted);
    }
    res.gaps.push_back(r);
    res.readings.push_back(x);
  }
  res.measured = res.readings.back();
  res.pass = std::abs(res.measured - res.predicted) <= 0.02 * std::max(std::abs(res.predicted), 1.0);
  return res;
}

}  // namespace petalkit
