#pragma once

// Model-plane domains. Starlike-at-infinity domains are graphs {y > f(x)} of an upper
// semicontinuous profile f: R -> [-inf, +inf]; spirallike domains are the plane minus
// finitely many truncated spirals.

#include <petalkit/hypgeo.hpp>

#include <algorithm>
#include <optional>
#include <variant>
#include <vector>

namespace petalkit {

struct Piece {
  enum class Kind { free, slit, curve, rational, slit_family };
  Kind kind = Kind::free;
  double x0 = 0, x1 = 0;                       // abscissa interval (x0 == x1 for a slit)
  double top = 0;                              // slit top
  std::vector<std::pair<double, double>> samples;  // curve: (x, y), y may be -inf
  double p = 0, q = 0, r = 0, s = 1;           // rational: (p x + q)/(r x + s)
  // slit_family: explicit slits (x, top) accumulating at `x0` (or `x1`); between the last
  // explicit slit and the accumulation point lie further slits whose tops are below
  // `tail_bound`.
  std::vector<std::pair<double, double>> slits;
  double tail_bound = -inf;

  static Piece make_free(double a, double b) {
    Piece P;
    P.kind = Kind::free;
    P.x0 = a;
    P.x1 = b;
    return P;
  }
  static Piece make_slit(double x, double y) {
    Piece P;
    P.kind = Kind::slit;
    P.x0 = P.x1 = x;
    P.top = y;
    return P;
  }
  /// Slits (x, top) on [a, b] ordered toward the accumulation end; unresolved slits beyond the
  /// last one have tops <= tail_bound.
  static Piece make_slit_family(double a, double b, std::vector<std::pair<double, double>> slits, double tail_bound) {
    Piece P;
    P.kind = Kind::slit_family;
    P.x0 = a;
    P.x1 = b;
    P.slits = std::move(slits);
    P.tail_bound = tail_bound;
    return P;
  }
  static Piece make_curve(std::vector<std::pair<double, double>> smp) {
    if (smp.size() < 2) throw input_error("curve piece needs at least two samples");
    Piece P;
    P.kind = Kind::curve;
    P.samples = std::move(smp);
    P.x0 = P.samples.front().first;
    P.x1 = P.samples.back().first;
    return P;
  }
  static Piece make_rational(double a, double b, double p, double q, double r, double s) {
    Piece P;
    P.kind = Kind::rational;
    P.x0 = a;
    P.x1 = b;
    P.p = p;
    P.q = q;
    P.r = r;
    P.s = s;
    return P;
  }
};

/// Status of a vertical line {Re w = x} (or of a spiral) relative to a domain.
struct LineStatus {
  enum class Kind { disjoint, half_line, full_line };
  Kind kind = Kind::disjoint;
  double r = 0;  // half_line: {Im > r}; spiral analogue: |w| < r
  bool operator==(const LineStatus&) const = default;
};

inline const char* to_string(LineStatus::Kind k) {
  switch (k) {
    case LineStatus::Kind::disjoint: return "disjoint";
    case LineStatus::Kind::half_line: return "half_line";
    case LineStatus::Kind::full_line: return "full_line";
  }
  return "?";
}

struct Membership {
  bool inside = false;
  bool low_confidence = false;
};

class CombProfile {
 public:
  CombProfile() = default;

  /// `lo`/`hi` bound the abscissae (f = +inf outside); pieces must tile (lo, hi).
  CombProfile(double lo, double hi, std::vector<Piece> pieces)
      : lo_(lo), hi_(hi), pieces_(std::move(pieces)) {
    validate();
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  /// Upper semicontinuous profile value.
  double f(double x) const {
    if (!(x > lo_ && x < hi_)) return inf;
    double v = -inf;
    bool hit = false;
    for (const auto& P : pieces_) {
      if (x < P.x0 || x > P.x1) continue;
      hit = true;
      v = std::max(v, value_on(P, x));
    }
    if (!hit) throw input_error("comb profile: abscissa not covered by any piece");
    return v;
  }

  LineStatus vertical_line_status(double x) const {
    const double v = f(x);
    if (v == inf) return {LineStatus::Kind::disjoint, 0};
    if (v == -inf) return {LineStatus::Kind::full_line, 0};
    return {LineStatus::Kind::half_line, v};
  }

  Membership contains(cplx w) const {
    if (!finite(w)) throw domain_error("contains: non-finite point");
    const double x = w.real(), y = w.imag();
    for (const auto& P : pieces_) {
      if (P.kind == Piece::Kind::slit && std::abs(x - P.x0) < boundary_eps && y <= P.top + boundary_eps) {
        // exactly on the slit below its tip: certainly outside
        if (x == P.x0 && y < P.top - boundary_eps) return {false, false};
        throw domain_error("contains: point within 1e-12 of a slit");
      }
    }
    const double v = f(x);
    if (v == inf) return {false, false};
    if (v == -inf) return {true, false};
    if (std::abs(y - v) < boundary_eps) throw domain_error("contains: point on the boundary");
    Membership m{y > v, false};
    for (const auto& P : pieces_) {
      if (P.kind != Piece::Kind::curve || x < P.x0 || x > P.x1) continue;
      double spacing = 0;
      for (std::size_t i = 1; i < P.samples.size(); ++i)
        spacing = std::max(spacing, P.samples[i].first - P.samples[i - 1].first);
      if (std::abs(y - v) < spacing) m.low_confidence = true;
    }
    for (const auto& P : pieces_) {
      if (P.kind == Piece::Kind::slit_family && x > P.x0 && x < P.x1 && in_tail(P, x) && y <= P.tail_bound)
        throw indeterminate_error("contains: point below the resolved part of a slit family");
    }
    return m;
  }

  /// Connected components of {f = -inf} as closed intervals [a, b] (a, b may be infinite).
  std::vector<std::pair<double, double>> free_components() const {
    // Candidate breakpoints: piece ends, slits, family slits.
    std::vector<double> cuts;
    for (const auto& P : pieces_) {
      cuts.push_back(P.x0);
      cuts.push_back(P.x1);
      for (const auto& s : P.slits) cuts.push_back(s.first);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    // An open gap between consecutive cuts is free iff f = -inf at its midpoint
    // (pieces are monotone or constant between cuts except slit families).
    std::vector<std::pair<double, double>> comps;
    auto push = [&](double a, double b) {
      if (!comps.empty() && comps.back().second == a && f_or(a) == -inf) {
        comps.back().second = b;
      } else {
        comps.push_back({a, b});
      }
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      if (!(b > a)) continue;
      if (!gap_is_free(a, b)) continue;
      push(a, b);
    }
    return comps;
  }

  /// Rightmost x <= xq with f(x) >= y (-inf if none).
  double left_wall(double xq, double y) const {
    double best = -inf;
    if (lo_ > -inf && xq > lo_) best = lo_;
    for (const auto& P : pieces_) {
      if (P.x0 > xq) continue;
      const double cand = rightmost_at_least(P, std::min(P.x1, xq), y);
      best = std::max(best, cand);
    }
    return best;
  }

  /// Leftmost x >= xq with f(x) >= y (+inf if none).
  double right_wall(double xq, double y) const {
    double best = inf;
    if (hi_ < inf && xq < hi_) best = hi_;
    for (const auto& P : pieces_) {
      if (P.x1 < xq) continue;
      const double cand = leftmost_at_least(P, std::max(P.x0, xq), y);
      best = std::min(best, cand);
    }
    return best;
  }

  bool has_slits() const {
    return std::any_of(pieces_.begin(), pieces_.end(), [](const Piece& P) {
      return P.kind == Piece::Kind::slit || P.kind == Piece::Kind::slit_family;
    });
  }

  /// Finite supremum of f over the covered abscissae (ignoring +inf outside).
  double max_finite() const {
    double m = -inf;
    for (const auto& P : pieces_) {
      switch (P.kind) {
        case Piece::Kind::slit: m = std::max(m, P.top); break;
        case Piece::Kind::curve:
          for (auto& s : P.samples) m = std::max(m, s.second);
          break;
        case Piece::Kind::rational:
          for (double x : {P.x0, P.x1}) {
            const double v = rational_limit(P, x, x == P.x0 ? +1 : -1);
            if (std::isfinite(v)) m = std::max(m, v);
          }
          break;
        case Piece::Kind::slit_family:
          for (auto& s : P.slits) m = std::max(m, s.second);
          break;
        case Piece::Kind::free: break;
      }
    }
    return m;
  }

  static double rational_value(const Piece& P, double x) {
    const double den = P.r * x + P.s;
    if (den == 0) return -inf;
    return (P.p * x + P.q) / den;
  }

  /// One-sided limit at x from direction dir (+1: from the right).
  static double rational_limit(const Piece& P, double x, int dir) {
    const double den = P.r * x + P.s;
    const double num = P.p * x + P.q;
    if (den != 0) return num / den;
    if (num == 0) return rational_value(P, x + dir * 1e-12);
    // sign of den just beside x
    const double dden = P.r * dir;
    const double sgn = (num > 0 ? 1.0 : -1.0) * (dden > 0 ? 1.0 : -1.0);
    return sgn * inf;
  }

  /// Abscissae of the unresolved part of a slit family.
  static std::pair<double, double> tail_interval(const Piece& P) {
    if (P.slits.empty()) return {P.x0, P.x1};
    const bool toward_lo = P.slits.back().first < P.slits.front().first;
    return toward_lo ? std::pair{P.x0, P.slits.back().first} : std::pair{P.slits.back().first, P.x1};
  }

 private:
  double lo_ = -inf, hi_ = inf;
  std::vector<Piece> pieces_;

  double f_or(double x) const {
    try {
      return f(x);
    } catch (const input_error&) {
      return inf;
    }
  }

  static bool in_tail(const Piece& P, double x) {
    if (P.slits.empty()) return true;
    // accumulation at x0 when slits decrease toward x0
    const bool toward_lo = P.slits.back().first < P.slits.front().first;
    return toward_lo ? x < P.slits.back().first : x > P.slits.back().first;
  }

  static double value_on(const Piece& P, double x) {
    switch (P.kind) {
      case Piece::Kind::free:
        return (x > P.x0 && x < P.x1) ? -inf : -inf;
      case Piece::Kind::slit:
        return P.top;
      case Piece::Kind::curve: {
        const auto& S = P.samples;
        for (std::size_t i = 0; i + 1 < S.size(); ++i) {
          const double a = S[i].first, b = S[i + 1].first;
          if (x < a || x > b) continue;
          if (x == a) return S[i].second;
          if (x == b) return S[i + 1].second;
          const double ya = S[i].second, yb = S[i + 1].second;
          if (ya == -inf || yb == -inf) return -inf;
          return ya + (yb - ya) * (x - a) / (b - a);
        }
        return -inf;
      }
      case Piece::Kind::rational: {
        if (x == P.x0) return rational_limit(P, x, +1);
        if (x == P.x1) return rational_limit(P, x, -1);
        return rational_value(P, x);
      }
      case Piece::Kind::slit_family: {
        for (const auto& s : P.slits)
          if (x == s.first) return s.second;
        return -inf;
      }
    }
    return -inf;
  }

  bool gap_is_free(double a, double b) const {
    const double m = 0.5 * (a + b);
    const double mid = std::isfinite(m) ? m : (std::isfinite(a) ? a + 1.0 : (std::isfinite(b) ? b - 1.0 : 0.0));
    if (f_or(mid) != -inf) return false;
    // curves and rationals vary; require -inf over the whole gap
    for (const auto& P : pieces_) {
      if (P.x1 <= a || P.x0 >= b) continue;
      if (P.kind == Piece::Kind::curve || P.kind == Piece::Kind::rational) return false;
      if (P.kind == Piece::Kind::slit_family) {
        for (const auto& s : P.slits)
          if (s.first > a && s.first < b) return false;
        const auto [t0, t1] = tail_interval(P);
        if (t1 > a && t0 < b) return false;
      }
    }
    return true;
  }

  static double rightmost_at_least(const Piece& P, double xmax, double y) {
    switch (P.kind) {
      case Piece::Kind::free: return -inf;
      case Piece::Kind::slit: return (P.top >= y && P.x0 <= xmax) ? P.x0 : -inf;
      case Piece::Kind::slit_family: {
        double best = -inf;
        for (const auto& s : P.slits)
          if (s.first <= xmax && s.second >= y) best = std::max(best, s.first);
        if (y <= P.tail_bound) throw indeterminate_error("wall query below a slit-family tail");
        return best;
      }
      case Piece::Kind::curve: {
        const auto& S = P.samples;
        for (std::size_t i = S.size() - 1; i-- > 0;) {
          double a = S[i].first, b = std::min(S[i + 1].first, xmax);
          if (a > xmax) continue;
          const double ya = S[i].second;
          const double yb = value_on(P, b);
          if (yb >= y) return b;
          if (ya >= y && ya != -inf && yb != -inf) {
            // linear crossing
            return a + (ya - y) / (ya - yb) * (b - a);
          }
          if (ya >= y) return a;
        }
        return -inf;
      }
      case Piece::Kind::rational: {
        const double a = P.x0, b = std::min(P.x1, xmax);
        if (b < a) return -inf;
        const double fb = (b == P.x1) ? rational_limit(P, b, -1) : rational_value(P, b);
        if (fb >= y) return b;
        const double fa = rational_limit(P, a, +1);
        if (!(fa >= y)) return -inf;
        // monotone between: solve f(x) = y
        const double den = P.r * y - P.p;
        if (den == 0) return a;
        return std::clamp((P.q - P.s * y) / den, a, b);
      }
    }
    return -inf;
  }

  static double leftmost_at_least(const Piece& P, double xmin, double y) {
    switch (P.kind) {
      case Piece::Kind::free: return inf;
      case Piece::Kind::slit: return (P.top >= y && P.x0 >= xmin) ? P.x0 : inf;
      case Piece::Kind::slit_family: {
        double best = inf;
        for (const auto& s : P.slits)
          if (s.first >= xmin && s.second >= y) best = std::min(best, s.first);
        if (y <= P.tail_bound) throw indeterminate_error("wall query below a slit-family tail");
        return best;
      }
      case Piece::Kind::curve: {
        const auto& S = P.samples;
        for (std::size_t i = 0; i + 1 < S.size(); ++i) {
          double a = std::max(S[i].first, xmin), b = S[i + 1].first;
          if (b < xmin) continue;
          const double ya = value_on(P, a);
          const double yb = S[i + 1].second;
          if (ya >= y) return a;
          if (yb >= y && ya != -inf && yb != -inf) return a + (y - ya) / (yb - ya) * (b - a);
          if (yb >= y) return b;
        }
        return inf;
      }
      case Piece::Kind::rational: {
        const double a = std::max(P.x0, xmin), b = P.x1;
        if (b < a) return inf;
        const double fa = (a == P.x0) ? rational_limit(P, a, +1) : rational_value(P, a);
        if (fa >= y) return a;
        const double fb = rational_limit(P, b, -1);
        if (!(fb >= y)) return inf;
        const double den = P.r * y - P.p;
        if (den == 0) return b;
        return std::clamp((P.q - P.s * y) / den, a, b);
      }
    }
    return inf;
  }

  void validate() const {
    if (!(hi_ > lo_)) throw input_error("comb profile: empty abscissa range");
    std::vector<Piece> iv = pieces_;
    for (const auto& P : iv) {
      if (P.x1 < P.x0) throw input_error("comb profile: piece with reversed interval");
      if (P.x0 < lo_ || P.x1 > hi_) throw input_error("comb profile: piece outside bounding strip");
      if (P.kind == Piece::Kind::curve) {
        for (std::size_t i = 1; i < P.samples.size(); ++i)
          if (!(P.samples[i].first > P.samples[i - 1].first))
            throw input_error("comb profile: curve samples must increase in x");
      }
      if (P.kind == Piece::Kind::rational) {
        for (double x : {0.25, 0.5, 0.75}) {
          const double xm = P.x0 + x * (P.x1 - P.x0);
          if (P.r * xm + P.s == 0) throw input_error("comb profile: rational piece has an interior pole");
        }
        const double xa = P.x0, xb = P.x1;
        const double pa = P.r * xa + P.s, pb = P.r * xb + P.s;
        if (pa * pb < 0) throw input_error("comb profile: rational piece has an interior pole");
      }
    }
    // coverage: sort non-slit intervals and check there are no holes
    std::vector<std::pair<double, double>> ints;
    for (const auto& P : iv)
      if (P.kind != Piece::Kind::slit) ints.push_back({P.x0, P.x1});
    std::sort(ints.begin(), ints.end());
    double cur = lo_;
    for (const auto& [a, b] : ints) {
      if (a > cur) {
        // a lone slit may close a zero-length hole
        const bool slit_here = std::any_of(iv.begin(), iv.end(), [&](const Piece& P) {
          return P.kind == Piece::Kind::slit && P.x0 == cur && a == cur;
        });
        if (!slit_here) throw input_error("comb profile: pieces leave a gap at x=" + std::to_string(cur));
      }
      if (a < cur) throw input_error("comb profile: overlapping pieces at x=" + std::to_string(a));
      cur = b;
    }
    if (cur < hi_) throw input_error("comb profile: pieces do not reach the upper abscissa");
  }
};

/// Domain {x + iy : y > f(x)}, invariant under w -> w + it, t >= 0.
struct StarlikeAtInfinityDomain {
  CombProfile profile;
  std::optional<std::pair<double, double>> bounding_strip;

  StarlikeAtInfinityDomain() = default;
  explicit StarlikeAtInfinityDomain(CombProfile p) : profile(std::move(p)) {
    if (std::isfinite(profile.lo()) || std::isfinite(profile.hi()))
      bounding_strip = std::pair{profile.lo(), profile.hi()};
  }

  Membership contains(cplx w) const { return profile.contains(w); }
  LineStatus vertical_line_status(double x) const { return profile.vertical_line_status(x); }
};

struct HalfPlaneDescriptor {
  enum class Side { left, right };
  Side side;
  double a;  // right: {Re > a}; left: {Re < a}
  bool operator==(const HalfPlaneDescriptor&) const = default;
};

/// Open strips (a1, a2) on which f = -inf, maximal among such strips.
inline std::vector<std::pair<double, double>> maximal_strips(const StarlikeAtInfinityDomain& D) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : D.profile.free_components())
    if (std::isfinite(a) && std::isfinite(b) && b > a) out.push_back({a, b});
  return out;
}

inline std::vector<HalfPlaneDescriptor> maximal_half_planes(const StarlikeAtInfinityDomain& D) {
  std::vector<HalfPlaneDescriptor> out;
  for (const auto& [a, b] : D.profile.free_components()) {
    if (a == -inf && b == inf) continue;  // whole plane: no half-plane is maximal
    if (a == -inf) out.push_back({HalfPlaneDescriptor::Side::left, b});
    if (b == inf) out.push_back({HalfPlaneDescriptor::Side::right, a});
  }
  std::sort(out.begin(), out.end(), [](auto& u, auto& v) { return u.side < v.side; });
  return out;
}

/// Spir[mu, two_alpha, theta0] = {e^{t mu + i theta} : |theta - theta0| < two_alpha / 2}.
struct SpirallikeSector {
  cplx mu{1, 0};
  double two_alpha = 2 * pi;
  double theta0 = 0;

  SpirallikeSector() = default;
  SpirallikeSector(cplx m, double ta, double th) : mu(m), two_alpha(ta), theta0(wrap_angle(th)) {
    if (!(m.real() > 0)) throw input_error("SpirallikeSector: Re mu must be positive");
    if (!(ta > 0 && ta <= 2 * pi + 1e-15)) throw input_error("SpirallikeSector: amplitude must be in (0, 2pi]");
  }
  double alpha() const { return 0.5 * two_alpha; }

  bool contains(cplx w) const {
    if (w == 0.0) return false;
    const auto c = spiral_coords(mu, w, theta0 - pi);
    return std::abs(c.theta - theta0) < alpha();
  }
  bool operator==(const SpirallikeSector&) const = default;
};

/// Plane minus truncated spirals {e^{-mu s} c : s <= s_max}, optionally inside a sector.
struct SpirallikeSlitDomain {
  struct Obstruction {
    cplx c;
    double s_max;  // +inf: the whole spiral through c
  };
  cplx mu{1, 0};
  std::vector<Obstruction> obstructions;
  std::optional<SpirallikeSector> sector;

  SpirallikeSlitDomain() = default;
  SpirallikeSlitDomain(cplx m, std::vector<Obstruction> obs, std::optional<SpirallikeSector> sec = {})
      : mu(m), obstructions(std::move(obs)), sector(std::move(sec)) {
    if (!(m.real() > 0)) throw input_error("SpirallikeSlitDomain: Re mu must be positive");
    for (auto& o : obstructions)
      if (o.c == 0.0) throw input_error("SpirallikeSlitDomain: obstruction anchor must be nonzero");
    if (sector && std::abs(sector->mu - mu) > 1e-14)
      throw input_error("SpirallikeSlitDomain: sector must use the domain's mu");
  }

  double angle_of(cplx w) const { return spiral_coords(mu, w).theta; }

  /// Radius where the obstruction on this spiral starts (0 for a full spiral).
  double obstruction_radius(const Obstruction& o) const {
    if (o.s_max == inf) return 0.0;
    return std::exp(-mu.real() * o.s_max) * std::abs(o.c);
  }

  Membership contains(cplx w) const {
    if (!finite(w)) throw domain_error("contains: non-finite point");
    if (w == 0.0) return {!sector.has_value(), false};
    if (sector && !sector->contains(w)) return {false, false};
    const double th = angle_of(w);
    for (const auto& o : obstructions) {
      const double d = std::abs(wrap_angle(th - angle_of(o.c)));
      if (d < boundary_eps) {
        if (std::abs(w) >= obstruction_radius(o) - boundary_eps) {
          if (std::abs(std::abs(w) - obstruction_radius(o)) < boundary_eps)
            throw domain_error("contains: point within 1e-12 of an obstruction tip");
          return {false, false};
        }
      }
    }
    return {true, false};
  }
};

inline std::vector<SpirallikeSector> maximal_spirallike_sectors(const SpirallikeSlitDomain& D) {
  std::vector<double> angles;
  for (const auto& o : D.obstructions) angles.push_back(D.angle_of(o.c));
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               angles.end());
  std::vector<SpirallikeSector> out;
  if (D.sector) {
    const double a0 = D.sector->theta0 - D.sector->alpha();
    const double a1 = D.sector->theta0 + D.sector->alpha();
    std::vector<double> cuts{a0};
    for (double th : angles) {
      // representatives of th inside (a0, a1)
      for (int k = -2; k <= 2; ++k) {
        const double v = th + 2 * pi * k;
        if (v > a0 + 1e-12 && v < a1 - 1e-12) cuts.push_back(v);
      }
    }
    cuts.push_back(a1);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      out.emplace_back(D.mu, cuts[i + 1] - cuts[i], 0.5 * (cuts[i] + cuts[i + 1]));
    return out;
  }
  if (angles.empty()) return out;
  if (angles.size() == 1) {
    out.emplace_back(D.mu, 2 * pi, angles[0] + pi);
    return out;
  }
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double a = angles[i];
    const double b = (i + 1 < angles.size()) ? angles[i + 1] : angles[0] + 2 * pi;
    out.emplace_back(D.mu, b - a, 0.5 * (a + b));
  }
  return out;
}

/// Elliptic analogue of vertical_line_status along the spiral through e^{i theta}.
inline LineStatus spiral_status(const SpirallikeSlitDomain& D, double theta) {
  if (D.sector) {
    const double d = std::abs(wrap_angle(theta - D.sector->theta0));
    if (d >= D.sector->alpha() - 1e-12) return {LineStatus::Kind::disjoint, 0};
  }
  double best = inf;
  bool blocked = false;
  for (const auto& o : D.obstructions) {
    if (std::abs(wrap_angle(theta - D.angle_of(o.c))) < 1e-12) {
      blocked = true;
      best = std::min(best, D.obstruction_radius(o));
    }
  }
  if (!blocked) return {LineStatus::Kind::full_line, 0};
  if (best == 0.0) return {LineStatus::Kind::disjoint, 0};
  return {LineStatus::Kind::half_line, best};
}

/// Upstairs geometry of a petal.
struct PetalGeometry {
  enum class Kind { strip, half_plane, sector };
  Kind kind = Kind::strip;
  double a1 = 0, a2 = 0;            // strip
  HalfPlaneDescriptor half{HalfPlaneDescriptor::Side::right, 0};
  SpirallikeSector sector;

  static PetalGeometry make_strip(double a1, double a2) {
    PetalGeometry g;
    g.kind = Kind::strip;
    g.a1 = a1;
    g.a2 = a2;
    return g;
  }
  static PetalGeometry make_half(HalfPlaneDescriptor h) {
    PetalGeometry g;
    g.kind = Kind::half_plane;
    g.half = h;
    return g;
  }
  static PetalGeometry make_sector(SpirallikeSector s) {
    PetalGeometry g;
    g.kind = Kind::sector;
    g.sector = s;
    return g;
  }
};

inline bool geometry_contains(const PetalGeometry& g, cplx w) {
  if (!finite(w)) return false;
  switch (g.kind) {
    case PetalGeometry::Kind::strip: return w.real() > g.a1 && w.real() < g.a2;
    case PetalGeometry::Kind::half_plane:
      return g.half.side == HalfPlaneDescriptor::Side::right ? w.real() > g.half.a : w.real() < g.half.a;
    case PetalGeometry::Kind::sector: return g.sector.contains(w);
  }
  return false;
}

/// Distance from w to the boundary curves of the geometry, measured in the transverse
/// coordinate (Re w for strips and half-planes, the spiral angle for sectors).
inline double geometry_boundary_gap(const PetalGeometry& g, cplx w) {
  switch (g.kind) {
    case PetalGeometry::Kind::strip: return std::min(std::abs(w.real() - g.a1), std::abs(w.real() - g.a2));
    case PetalGeometry::Kind::half_plane: return std::abs(w.real() - g.half.a);
    case PetalGeometry::Kind::sector: {
      if (w == 0.0) return 0.0;
      const auto c = spiral_coords(g.sector.mu, w, g.sector.theta0 - pi);
      return std::abs(g.sector.alpha() - std::abs(c.theta - g.sector.theta0));
    }
  }
  return 0.0;
}

/// Hyperbolic distance inside the geometry itself.
inline double geometry_distance(const PetalGeometry& g, cplx w1, cplx w2) {
  switch (g.kind) {
    case PetalGeometry::Kind::strip: {
      const double mid = 0.5 * (g.a1 + g.a2);
      return dist_strip(0.5 * (g.a2 - g.a1), w1 - mid, w2 - mid);
    }
    case PetalGeometry::Kind::half_plane: {
      const double sg = g.half.side == HalfPlaneDescriptor::Side::right ? 1.0 : -1.0;
      return dist_halfplane(sg * (w1 - g.half.a), sg * (w2 - g.half.a));
    }
    case PetalGeometry::Kind::sector:
      return dist_spirallike_sector(g.sector.mu, g.sector.alpha(), g.sector.theta0, w1, w2);
  }
  return 0.0;
}

/// Shape type 1..5 of the petal with the given upstairs geometry.
inline int petal_shape_type(const StarlikeAtInfinityDomain& D, const PetalGeometry& g) {
  using K = LineStatus::Kind;
  if (g.kind == PetalGeometry::Kind::half_plane) {
    const auto st = D.vertical_line_status(g.half.a);
    if (st.kind == K::full_line) return 5;
    if (st.kind == K::half_line) return 2;
    throw classification_error("half-plane petal whose boundary line misses the domain (group)");
  }
  if (g.kind != PetalGeometry::Kind::strip)
    throw classification_error("sector geometry given for a starlike-at-infinity domain");
  const auto s1 = D.vertical_line_status(g.a1);
  const auto s2 = D.vertical_line_status(g.a2);
  const int inside = (s1.kind != K::disjoint) + (s2.kind != K::disjoint);
  if (inside == 0) throw classification_error("strip petal with both boundary lines outside (group)");
  if (inside == 1) return 2;
  if (s1.kind == K::full_line && s2.kind == K::full_line) return 3;
  return 4;
}

inline int petal_shape_type(const SpirallikeSlitDomain& D, const PetalGeometry& g) {
  using K = LineStatus::Kind;
  if (g.kind != PetalGeometry::Kind::sector)
    throw classification_error("spirallike domains only carry sector petals");
  const auto& s = g.sector;
  if (s.two_alpha >= 2 * pi - 1e-12) return 1;
  const auto e1 = spiral_status(D, s.theta0 - s.alpha());
  const auto e2 = spiral_status(D, s.theta0 + s.alpha());
  if (e1.kind == K::disjoint || e2.kind == K::disjoint)
    throw classification_error("sector petal with a boundary spiral outside the domain");
  if (e1.kind == K::full_line && e2.kind == K::full_line) return 3;
  return 4;
}

using PlanarDomain = std::variant<StarlikeAtInfinityDomain, SpirallikeSlitDomain>;

inline Membership contains(const PlanarDomain& D, cplx w) {
  return std::visit([&](const auto& d) { return d.contains(w); }, D);
}

}  // namespace petalkit
