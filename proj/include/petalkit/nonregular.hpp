#pragma once

// Comb domains D_k = C minus {Re w = +-(1 + 1/k), Im w <= y_k}, their intersection D, the
// inductive choice of (y_k, alpha_k), distance bounds in comb domains, and the growth
// certificate for k_S(0, -it) - k_D(0, -it).

#include <petalkit/analysis.hpp>
#include <petalkit/semigroup.hpp>

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace petalkit {

// ---------------------------------------------------------------------------------------
// Localization in hyperbolic discs

struct LocalizationResult {
  double R = 0;
  double ratio = 0;  // max sampled k_{D^hyp(0,R)}(z,w) / omega(z,w)
  long pairs = 0;
};

namespace detail {

struct PairSample {
  std::vector<std::pair<cplx, cplx>> pairs;
};

inline PairSample localization_pairs(double M, long n, unsigned long long seed) {
  PairSample s;
  const double r = std::tanh(M) * (1 - 1e-12);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  for (long i = 0; i < n; ++i) {
    const cplx z = std::polar(r * std::sqrt(U(rng)), 2 * pi * U(rng));
    const cplx w = std::polar(r * std::sqrt(U(rng)), 2 * pi * U(rng));
    if (z != w) s.pairs.push_back({z, w});
  }
  // short pairs at the edge of D^hyp(0, M) see the density ratio
  const double re = std::tanh(M) * (1 - 1e-10);
  for (int j = 0; j < 32; ++j) {
    const double th = 2 * pi * j / 32;
    s.pairs.push_back({std::polar(re, th), std::polar(re, th + 1e-6)});
    s.pairs.push_back({std::polar(re, th), std::polar(re * (1 - 1e-6), th)});
  }
  return s;
}

inline double localization_ratio(const PairSample& s, double R) {
  const double rho = std::tanh(R);
  double worst = 0;
  for (const auto& [z, w] : s.pairs) {
    const double d = omega(z, w);
    if (!(d > 0)) continue;
    worst = std::max(worst, omega(z / rho, w / rho) / d);
  }
  return worst;
}

}  // namespace detail

/// Smallest tested R (dyadic search) with k_{D^hyp(0,R)} <= (c - 1e-3) omega on sampled pairs
/// in D^hyp(0, M). By automorphism invariance the centre 0 covers every p.
inline LocalizationResult localization_search(double c, double M, long n = 4000, unsigned long long seed = 0) {
  if (!(c > 1)) throw input_error("localization_radius: c must exceed 1");
  if (!(M > 0)) throw input_error("localization_radius: M must be positive");
  const auto S = detail::localization_pairs(M, n, seed);
  const double target = c - 1e-3;
  auto ok = [&](double R) { return detail::localization_ratio(S, R) <= target; };
  double fail = M, pass = -1;
  for (int j = 0; j <= 12; ++j) {
    const double R = M + std::ldexp(1.0, j) / 64;
    if (ok(R)) {
      pass = R;
      break;
    }
    fail = R;
  }
  if (pass < 0) throw numeric_error("localization_radius: no R up to " + std::to_string(fail) + " passes");
  for (int it = 0; it < 12; ++it) {
    const double mid = 0.5 * (fail + pass);
    (ok(mid) ? pass : fail) = mid;
  }
  return {pass, detail::localization_ratio(S, pass), static_cast<long>(S.pairs.size())};
}

inline double localization_radius(double c, double M) { return localization_search(c, M).R; }

// ---------------------------------------------------------------------------------------
// Distance bounds in comb domains

struct DeltaBounds {
  double lo = 0;  // distance to a superset of the complement
  double hi = 0;  // distance to a subset of the complement
};

namespace detail {

inline double dist_to_ray(cplx w, double x, double top) {
  const double dx = std::abs(w.real() - x);
  return w.imag() <= top ? dx : std::hypot(dx, w.imag() - top);
}

inline double dist_to_box(cplx w, double x0, double x1, double top) {
  const double dx = w.real() < x0 ? x0 - w.real() : (w.real() > x1 ? w.real() - x1 : 0.0);
  const double dy = w.imag() > top ? w.imag() - top : 0.0;
  return std::hypot(dx, dy);
}

inline double dist_to_segment(cplx w, cplx a, cplx b) {
  const cplx d = b - a;
  const double t = std::clamp(std::real((w - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
  return std::abs(w - (a + t * d));
}

}  // namespace detail

/// Two-sided bounds on the Euclidean distance from w to the complement of {Im w > f(Re w)}.
inline DeltaBounds boundary_distance_bounds(const CombProfile& prof, cplx w) {
  if (!finite(w)) throw domain_error("boundary_distance_bounds: non-finite point");
  double lo = inf, hi = inf;
  auto exact = [&](double d) {
    lo = std::min(lo, d);
    hi = std::min(hi, d);
  };
  if (std::isfinite(prof.lo())) exact(std::max(0.0, w.real() - prof.lo()));
  if (std::isfinite(prof.hi())) exact(std::max(0.0, prof.hi() - w.real()));
  for (const auto& P : prof.pieces()) {
    switch (P.kind) {
      case Piece::Kind::free: break;
      case Piece::Kind::slit: exact(detail::dist_to_ray(w, P.x0, P.top)); break;
      case Piece::Kind::slit_family: {
        for (const auto& s : P.slits) exact(detail::dist_to_ray(w, s.first, s.second));
        const auto [t0, t1] = CombProfile::tail_interval(P);
        if (t1 > t0 && P.tail_bound > -inf) lo = std::min(lo, detail::dist_to_box(w, t0, t1, P.tail_bound));
        break;
      }
      case Piece::Kind::curve: {
        const auto& S = P.samples;
        for (std::size_t i = 0; i < S.size(); ++i) {
          if (S[i].second == -inf) continue;
          exact(detail::dist_to_ray(w, S[i].first, S[i].second));
          if (i + 1 < S.size() && S[i + 1].second != -inf) {
            const cplx a{S[i].first, S[i].second}, b{S[i + 1].first, S[i + 1].second};
            const double ya = a.imag() + (b.imag() - a.imag()) * (w.real() - a.real()) / (b.real() - a.real());
            const bool below = w.real() >= a.real() && w.real() <= b.real() && w.imag() <= ya;
            exact(below ? 0.0 : detail::dist_to_segment(w, a, b));
          }
        }
        break;
      }
      case Piece::Kind::rational: {
        // graph samples for hi, a box over the whole piece for lo
        double top = -inf;
        for (int j = 0; j <= 64; ++j) {
          const double x = P.x0 + (P.x1 - P.x0) * (j + 0.5) / 65;
          const double y = CombProfile::rational_value(P, x);
          if (std::isfinite(y)) hi = std::min(hi, detail::dist_to_ray(w, x, y));
          top = std::max(top, y);
        }
        top = std::max({top, CombProfile::rational_limit(P, P.x0, +1), CombProfile::rational_limit(P, P.x1, -1)});
        lo = std::min(lo, detail::dist_to_box(w, P.x0, P.x1, top));
        break;
      }
    }
  }
  return {lo, hi};
}

struct DistanceBounds {
  double lower = 0;
  double upper = inf;  // +inf: no enclosed canonical domain or path bound
  std::string lower_source = "trivial";
  std::string upper_source = "none";
};

namespace detail {

/// Rigorous upper bound for the integral of 1/delta along [w1, w2] (delta 1-Lipschitz).
inline double segment_density_bound(const CombProfile& prof, cplx w1, cplx w2) {
  const double L = std::abs(w2 - w1);
  if (L == 0.0) return 0.0;
  double prev = inf;
  for (int n = 64; n <= (1 << 16); n *= 2) {
    const double l = L / n;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      const cplx m = w1 + (w2 - w1) * ((i + 0.5) / n);
      const double d = boundary_distance_bounds(prof, m).lo - 0.5 * l;
      if (!(d > 0)) {
        acc = inf;
        break;
      }
      acc += l / d;
    }
    if (std::isfinite(acc) && std::isfinite(prev) && prev - acc <= 1e-3 * acc) return acc;
    prev = acc;
  }
  return prev;
}

}  // namespace detail

/// Sandwich for the hyperbolic distance (omega normalization) of a comb domain: enclosing
/// canonical domains and single-slit planes, plus the quasi-hyperbolic bound, from below;
/// enclosed strips and half-planes, plus the 1/delta path integral, from above.
inline DistanceBounds dist_comb_bounds(const StarlikeAtInfinityDomain& D, cplx w1, cplx w2) {
  const auto& prof = D.profile;
  if (!D.contains(w1).inside || !D.contains(w2).inside) throw domain_error("dist_comb_bounds: point outside the domain");
  DistanceBounds b;
  if (w1 == w2) {
    b.upper = 0;
    b.upper_source = "equal points";
    return b;
  }
  auto lower = [&](double v, const char* src) {
    if (v > b.lower) {
      b.lower = v;
      b.lower_source = src;
    }
  };
  auto upper = [&](double v, const char* src) {
    if (v < b.upper) {
      b.upper = v;
      b.upper_source = src;
    }
  };
  const double lo = prof.lo(), hi = prof.hi();
  if (std::isfinite(lo) && std::isfinite(hi)) {
    lower(geometry_distance(PetalGeometry::make_strip(lo, hi), w1, w2), "bounding strip");
  } else if (std::isfinite(lo)) {
    lower(geometry_distance(PetalGeometry::make_half({HalfPlaneDescriptor::Side::right, lo}), w1, w2), "bounding half-plane");
  } else if (std::isfinite(hi)) {
    lower(geometry_distance(PetalGeometry::make_half({HalfPlaneDescriptor::Side::left, hi}), w1, w2), "bounding half-plane");
  }
  auto slit_plane = [&](double x, double top) {
    const auto h = slit_plane_map(x, top);
    lower(omega(h.inverse(w1), h.inverse(w2)), "single-slit plane");
  };
  for (const auto& P : prof.pieces()) {
    if (P.kind == Piece::Kind::slit) slit_plane(P.x0, P.top);
    if (P.kind == Piece::Kind::slit_family)
      for (const auto& s : P.slits) slit_plane(s.first, s.second);
  }
  const double d1 = boundary_distance_bounds(prof, w1).hi, d2 = boundary_distance_bounds(prof, w2).hi;
  lower(0.25 * std::log1p(std::abs(w1 - w2) / std::min(d1, d2)), "quasi-hyperbolic");

  for (const auto& [a1, a2] : maximal_strips(D)) {
    const auto g = PetalGeometry::make_strip(a1, a2);
    if (geometry_contains(g, w1) && geometry_contains(g, w2)) upper(geometry_distance(g, w1, w2), "enclosed strip");
  }
  for (const auto& hp : maximal_half_planes(D)) {
    const auto g = PetalGeometry::make_half(hp);
    if (geometry_contains(g, w1) && geometry_contains(g, w2)) upper(geometry_distance(g, w1, w2), "enclosed half-plane");
  }
  if (lo == -inf && hi == inf) {
    const double m = prof.max_finite();
    if (std::isfinite(m) && w1.imag() > m && w2.imag() > m)
      upper(dist_halfplane(-I * w1 - m, -I * w2 - m), "upper half-plane");
  }
  upper(detail::segment_density_bound(prof, w1, w2), "segment 1/delta integral");
  return b;
}

// ---------------------------------------------------------------------------------------
// The comb sequence

/// C minus {Re w = +-a, Im w <= y} with a = 1 + 1/k.
inline StarlikeAtInfinityDomain comb_domain_k(int k, double y) {
  if (k < 1) throw input_error("comb_domain_k: k must be positive");
  const double a = 1.0 + 1.0 / k;
  return StarlikeAtInfinityDomain(CombProfile(-inf, inf,
                                              {Piece::make_free(-inf, -a), Piece::make_slit(-a, y), Piece::make_free(-a, a),
                                               Piece::make_slit(a, y), Piece::make_free(a, inf)}));
}

struct CombSequenceState {
  int k = 0;
  double c = 0;      // localization constant c_k
  double y = 0;      // slit top y_k
  double alpha = 0;  // probe ordinate alpha_k
  double R = 0;      // localization radius for (c_k, pi)
  double ratio = 0;  // sampled localization ratio at R (<= c_k)
  double reach = 0;  // 4 R (1 + 1/k): Euclidean reach of the ball inside the channel
  double beta = 0;   // lower bound for Im over B_k(alpha_k i, R_k)
  double next_y = 0; // y_{k+1}
  double half_step = 0;   // k_{S_k}(alpha_k i, (alpha_k +- 1/2) i) = pi / (8 (1 + 1/k))
  double kDk_lower = 0;   // bounds for k_{D_k}((alpha_k + 1/2) i, (alpha_k - 1/2) i)
  double kDk_upper = 0;
  double margin = 0;      // (c_k - ratio) kDk_lower
  bool ball_certified = false;
};

inline double default_c_schedule(int k) { return 1.0 + 1.0 / (2.0 * k); }

/// y_1 = 0, alpha_1 = -1/2; alpha_k = y_k - d with d the smallest power of two exceeding the
/// ball reach; beta_k = alpha_k - reach; y_{k+1} = beta_k - 1.
inline std::vector<CombSequenceState> build_comb_sequence(int k_max,
                                                          const std::function<double(int)>& c_schedule = default_c_schedule) {
  if (k_max < 1) throw input_error("build_comb_sequence: k_max must be at least 1");
  std::vector<CombSequenceState> out;
  double y = 0;
  for (int k = 1; k <= k_max; ++k) {
    CombSequenceState s;
    s.k = k;
    s.c = c_schedule(k);
    if (!(s.c > 1) || !std::isfinite(s.c)) throw input_error("build_comb_sequence: c_k must exceed 1");
    s.y = y;
    const auto loc = localization_search(s.c, pi);
    s.R = loc.R;
    s.ratio = loc.ratio;
    const double a = 1.0 + 1.0 / k;
    s.reach = 4 * s.R * a;
    if (k == 1) {
      s.alpha = -0.5;
    } else {
      double d = 1;
      while (!(d > s.reach)) d *= 2;
      s.alpha = y - d;
    }
    s.beta = s.alpha - s.reach;
    s.next_y = s.beta - 1;
    // the ball stays in the channel below y_k (density >= 1/(4 a) there) and above y_{k+1}
    s.ball_certified = (k == 1 || y - s.alpha > s.reach) && s.alpha - s.next_y > s.reach;
    if (!s.ball_certified) throw numeric_error("build_comb_sequence: ball containment failed at k = " + std::to_string(k));
    const cplx p1{0, s.alpha + 0.5}, p2{0, s.alpha - 0.5};
    s.half_step = dist_strip(a, {0, s.alpha}, p1);
    if (!(s.half_step < pi)) throw numeric_error("build_comb_sequence: probe points outside B_k(alpha_k i, pi)");
    const auto bnd = dist_comb_bounds(comb_domain_k(k, y), p1, p2);
    s.kDk_lower = bnd.lower;
    s.kDk_upper = bnd.upper;
    s.margin = (s.c - s.ratio) * s.kDk_lower;
    out.push_back(s);
    y = s.next_y;
  }
  return out;
}

/// D = intersection of the D_k for the given states; slits beyond k_max are below y_{k_max+1}.
inline StarlikeAtInfinityDomain comb_domain(const std::vector<CombSequenceState>& st) {
  if (st.empty()) throw input_error("comb_domain: empty state list");
  std::vector<std::pair<double, double>> left, right;
  for (std::size_t i = 1; i < st.size(); ++i) {
    const double a = 1.0 + 1.0 / st[i].k;
    left.push_back({-a, st[i].y});
    right.push_back({a, st[i].y});
  }
  const double tail = st.back().next_y;
  return StarlikeAtInfinityDomain(CombProfile(
      -inf, inf,
      {Piece::make_free(-inf, -2), Piece::make_slit(-2, st[0].y), Piece::make_slit_family(-2, -1, left, tail),
       Piece::make_free(-1, 1), Piece::make_slit_family(1, 2, right, tail), Piece::make_slit(2, st[0].y),
       Piece::make_free(2, inf)}));
}

/// Model (C, h, z + it) with h(D) = D; h itself is not evaluated.
inline SemigroupModel comb_semigroup_model(const std::vector<CombSequenceState>& st) {
  SemigroupModel m;
  m.kind = ModelKind::parabolic_zero;
  m.domain = comb_domain(st);
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------------------
// Certificate and regularity probes

struct NonregularityCertificate {
  int k = 0;
  double lhs_lower = 0;  // sum_{j<k} [k_S - c_j k_{S_j}] over [alpha_j - 1/2, alpha_j + 1/2]
  double series = 0;     // (pi/8) sum_{j=1}^{k-1} 1/(1+j)
  std::vector<double> terms;
};

inline NonregularityCertificate nonregularity_certificate(const std::vector<CombSequenceState>& st, int k,
                                                          double tol = 1e-12) {
  if (k < 1 || static_cast<std::size_t>(k) > st.size()) throw input_error("nonregularity_certificate: k outside the state list");
  NonregularityCertificate cert;
  cert.k = k;
  for (int j = 1; j < k; ++j) {
    const auto& s = st[j - 1];
    if (!(s.margin >= 0)) throw numeric_error("nonregularity_certificate: localization margin negative at j = " + std::to_string(j));
    const cplx p1{0, s.alpha - 0.5}, p2{0, s.alpha + 0.5};
    const double term = dist_strip(1.0, p1, p2) - s.c * dist_strip(1.0 + 1.0 / j, p1, p2);
    cert.terms.push_back(term);
    cert.lhs_lower += term;
    cert.series += (pi / 8) / (1.0 + j);
  }
  if (cert.lhs_lower < cert.series - tol)
    throw numeric_error("nonregularity_certificate: chain below the series at k = " + std::to_string(k));
  return cert;
}

struct RegularityProbe {
  enum class Verdict { bounded, unbounded_evidence };
  Verdict verdict = Verdict::bounded;
  std::vector<double> t;
  std::vector<double> value;  // bracket (or its certified lower bound)
  std::vector<double> upper;  // certified upper bound where available
};

inline const char* to_string(RegularityProbe::Verdict v) {
  return v == RegularityProbe::Verdict::bounded ? "bounded" : "unbounded_evidence";
}

namespace detail {

/// Last half of the dyadic checkpoints decides: bounded when within 5% of the median
/// (relative to max(|median|, 1)), unbounded when increasing with log-type increments.
inline RegularityProbe::Verdict probe_verdict(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> last(v.begin() + static_cast<long>(n / 2), v.end());
  std::vector<double> s = last;
  std::sort(s.begin(), s.end());
  const double med = s[s.size() / 2];
  double spread = 0;
  for (double x : last) spread = std::max(spread, std::abs(x - med));
  if (spread <= 0.05 * std::max(std::abs(med), 1.0)) return RegularityProbe::Verdict::bounded;
  bool grow = true;
  for (std::size_t i = 1; i < last.size(); ++i) {
    const double inc = last[i] - last[i - 1];
    if (!(inc > 0)) grow = false;
    if (i >= 2) {
      const double q = inc / (last[i - 1] - last[i - 2]);
      if (!(q >= 0.25 && q <= 4)) grow = false;
    }
  }
  if (grow) return RegularityProbe::Verdict::unbounded_evidence;
  throw indeterminate_error("regularity_probe: bracket neither settles nor grows");
}

}  // namespace detail

/// omega(0, eta_{-t}(z)) - omega(0, g(eta_{-t}(z))) at t = horizon 2^{-m}, m = 7..0.
/// `gap(w)` returns 1 - conj(sigma) h^{-1}(w) accurately for large model points; default
/// uses the Koenigs inverse directly.
inline RegularityProbe regularity_probe(const PreModel& pm, const SemigroupModel& m, double horizon, cplx z = 0,
                                        std::function<cplx(cplx)> gap = {}) {
  if (!(horizon > 0)) throw indeterminate_error("regularity_probe: empty time window");
  detail::require_open_disc(z, "regularity_probe");
  if (!gap) gap = [&](cplx w) { return 1.0 - std::conj(pm.sigma) * m.h().inverse(w); };
  const cplx L0 = detail::premodel_log(pm.sigma, z);
  RegularityProbe r;
  for (int k = 7; k >= 0; --k) {
    const double t = std::ldexp(horizon, -k);
    const cplx Lt = L0 - pm.lambda_rep * t;
    const cplx u_eta = 2.0 / (1.0 + std::exp(Lt));  // 1 - tanh(L/2)
    const cplx w = detail::petal_from_log(pm.geometry, Lt);
    if (!finite(w)) throw numeric_error("regularity_probe: model point overflow; lower the horizon");
    r.t.push_back(t);
    r.value.push_back(omega_origin_from_gap(u_eta) - omega_origin_from_gap(gap(w)));
    r.upper.push_back(r.value.back());
  }
  r.verdict = detail::probe_verdict(r.value);
  return r;
}

/// Certified lower bound of k_S(0, -it) - k_D(0, -it): the axis is a geodesic of D, and each
/// window [alpha_j - 1/2, alpha_j + 1/2] inside [-t, 0] contributes at least its certificate
/// term. The upper bound is k_S(0, -it) - lower(k_D(0, -it)).
inline RegularityProbe regularity_probe(const std::vector<CombSequenceState>& st, double horizon) {
  if (!(horizon > 0)) throw indeterminate_error("regularity_probe: empty time window");
  const auto D = comb_domain(st);
  RegularityProbe r;
  for (int k = 7; k >= 0; --k) {
    const double t = std::ldexp(horizon, -k);
    double acc = 0;
    for (std::size_t j = 0; j < st.size(); ++j) {
      const auto& s = st[j];
      if (s.alpha - 0.5 < -t) break;
      if (!(s.margin >= 0)) throw numeric_error("regularity_probe: localization margin negative");
      const cplx p1{0, s.alpha - 0.5}, p2{0, s.alpha + 0.5};
      acc += dist_strip(1.0, p1, p2) - s.c * dist_strip(1.0 + 1.0 / s.k, p1, p2);
    }
    r.t.push_back(t);
    r.value.push_back(acc);
    r.upper.push_back(pi * t / 4 - dist_comb_bounds(D, 0.0, cplx(0, -t)).lower);
  }
  r.verdict = detail::probe_verdict(r.value);
  return r;
}

}  // namespace petalkit
