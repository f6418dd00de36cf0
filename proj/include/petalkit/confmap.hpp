#pragma once

// Univalent maps from the unit disc: a closed-form catalog and a numeric fitter for
// comb-type domains (closed-form pre-map onto a near-disc, then a geodesic zipper).

#include <petalkit/domains.hpp>
#include <petalkit/zipper.hpp>

#include <json.hpp>

#include <functional>
#include <memory>
#include <string>

namespace petalkit {

struct MapImpl {
  virtual ~MapImpl() = default;
  virtual cplx eval(cplx z) const = 0;
  virtual cplx inverse(cplx w) const = 0;
  virtual cplx derivative(cplx z) const = 0;
  virtual std::string name() const = 0;
  virtual bool is_numeric() const { return false; }
  virtual nlohmann::json describe() const { return {{"name", name()}}; }
};

class ConformalMap {
 public:
  ConformalMap() = default;
  explicit ConformalMap(std::shared_ptr<const MapImpl> p) : p_(std::move(p)) {}

  cplx operator()(cplx z) const { return eval(z); }
  cplx eval(cplx z) const { return impl().eval(z); }
  cplx inverse(cplx w) const { return impl().inverse(w); }
  cplx derivative(cplx z) const { return impl().derivative(z); }
  std::string name() const { return impl().name(); }
  bool is_numeric() const { return impl().is_numeric(); }
  nlohmann::json describe() const { return impl().describe(); }
  const MapImpl& impl() const {
    if (!p_) throw input_error("ConformalMap: empty map");
    return *p_;
  }
  explicit operator bool() const { return static_cast<bool>(p_); }

 private:
  std::shared_ptr<const MapImpl> p_;
};

namespace detail {

inline void require_open_disc(cplx z, const char* who) {
  if (!finite(z) || std::abs(z) >= 1.0) throw domain_error(std::string(who) + ": point outside the unit disc");
}

/// Central difference, step scaled to the distance from the unit circle.
inline cplx fd_derivative(const std::function<cplx(cplx)>& f, cplx z) {
  const double h = 1e-5 * std::max(1e-6, 1.0 - std::abs(z));
  return (f(z + h) - f(z - h)) / (2 * h);
}

/// Derivative by the trapezoidal Cauchy integral on a circle inside the disc.
inline cplx cauchy_derivative(const std::function<cplx(cplx)>& f, cplx z, int m = 48) {
  const double r = 0.5 * (1.0 - std::abs(z));
  cplx acc = 0;
  for (int k = 0; k < m; ++k) {
    const cplx e = std::polar(1.0, 2 * pi * (k + 0.5) / m);
    acc += f(z + r * e) / e;
  }
  return acc / (r * m);
}

struct Koebe : MapImpl {
  cplx eval(cplx z) const override {
    require_open_disc(z, "koebe");
    const cplx u = 1.0 - z;
    return z / (u * u);
  }
  // 1 - z for the preimage of w; accurate when w is huge.
  static cplx one_minus_inverse(cplx w) {
    const cplx q = std::sqrt(1.0 + 4.0 * w);
    return 2.0 / (1.0 + q);
  }
  cplx inverse(cplx w) const override {
    if (!finite(w)) throw domain_error("koebe inverse: non-finite point");
    if (w.imag() == 0.0 && w.real() <= -0.25) throw domain_error("koebe inverse: point on the slit (-inf,-1/4]");
    const cplx q = std::sqrt(1.0 + 4.0 * w);
    return (q - 1.0) / (q + 1.0);
  }
  cplx derivative(cplx z) const override {
    require_open_disc(z, "koebe");
    const cplx u = 1.0 - z;
    return (1.0 + z) / (u * u * u);
  }
  std::string name() const override { return "koebe"; }
};

/// Disc -> right half-plane {Re > 0}.
struct Cayley : MapImpl {
  cplx eval(cplx z) const override {
    require_open_disc(z, "cayley");
    return (1.0 + z) / (1.0 - z);
  }
  cplx inverse(cplx w) const override {
    if (!finite(w) || !(w.real() > 0)) throw domain_error("cayley inverse: point not in the right half-plane");
    return (w - 1.0) / (w + 1.0);
  }
  cplx derivative(cplx z) const override {
    require_open_disc(z, "cayley");
    const cplx u = 1.0 - z;
    return 2.0 / (u * u);
  }
  std::string name() const override { return "cayley"; }
};

/// Disc -> S_rho = {0 < Re < rho}, 0 -> rho/2, -i -> lower end.
struct StripMap : MapImpl {
  double rho;
  explicit StripMap(double r) : rho(r) {
    if (!(r > 0)) throw input_error("strip_map: rho must be positive");
  }
  cplx eval(cplx z) const override {
    require_open_disc(z, "strip_map");
    return rho / 2 + (2 * rho / pi) * std::atan(z);
  }
  cplx inverse(cplx w) const override {
    if (!finite(w) || !(w.real() > 0 && w.real() < rho)) throw domain_error("strip_map inverse: point outside strip");
    return std::tan(pi / (2 * rho) * (w - rho / 2));
  }
  cplx derivative(cplx z) const override {
    require_open_disc(z, "strip_map");
    return (2 * rho / pi) / (1.0 + z * z);
  }
  std::string name() const override { return "strip_map"; }
  nlohmann::json describe() const override { return {{"name", name()}, {"rho", rho}}; }
};

/// Disc -> Spir[mu, 2 alpha, theta0]; mu = 1 gives the straight sector.
struct SpiralPower : MapImpl {
  cplx mu;
  double alpha, theta0;
  SpiralPower(cplx m, double a, double t) : mu(m), alpha(a), theta0(t) {
    if (!(m.real() > 0)) throw input_error("spiral_power: Re mu must be positive");
    if (!(a > 0 && a <= pi)) throw input_error("spiral_power: alpha must be in (0, pi]");
  }
  double b() const { return mu.imag() / mu.real(); }
  // log w for the sector point with straightened log L = log Cayley(z) * 2alpha/pi + i theta0
  cplx log_eval(cplx z) const {
    require_open_disc(z, "spiral_power");
    const cplx Lh = std::log((1.0 + z) / (1.0 - z));
    const cplx W = (2 * alpha / pi) * Lh + I * theta0;
    return W / (1.0 - I * b());
  }
  cplx eval(cplx z) const override { return std::exp(log_eval(z)); }
  cplx inverse(cplx w) const override {
    const auto c = detail::sector_coords(mu, alpha, theta0, w);
    const cplx logw{std::log(std::abs(w)), c.theta + c.t * mu.imag()};
    const cplx W = (1.0 - I * b()) * logw;
    const cplx Lh = (W - I * theta0) * (pi / (2 * alpha));
    const cplx q = std::exp(Lh);
    return (q - 1.0) / (q + 1.0);
  }
  cplx derivative(cplx z) const override {
    // d/dz exp(k log C(z)) with k = 2alpha/(pi(1-ib)), C'/C = 2/(1-z^2)
    const cplx k = (2 * alpha / pi) / (1.0 - I * b());
    return eval(z) * k * 2.0 / (1.0 - z * z);
  }
  std::string name() const override { return mu == cplx(1, 0) ? "sector_power" : "spiral_power"; }
  nlohmann::json describe() const override {
    return {{"name", name()}, {"mu", {mu.real(), mu.imag()}}, {"alpha", alpha}, {"theta0", theta0}};
  }
};

/// w -> a w + b (plane map; meaningful as an outer factor of a composition).
struct Affine : MapImpl {
  cplx a, b;
  Affine(cplx a_, cplx b_) : a(a_), b(b_) {
    if (a_ == 0.0) throw input_error("affine: zero coefficient");
  }
  cplx eval(cplx z) const override { return a * z + b; }
  cplx inverse(cplx w) const override { return (w - b) / a; }
  cplx derivative(cplx) const override { return a; }
  std::string name() const override { return "affine"; }
  nlohmann::json describe() const override {
    return {{"name", name()}, {"a", {a.real(), a.imag()}}, {"b", {b.real(), b.imag()}}};
  }
};

/// Disc automorphism or any Mobius map used as an inner factor.
struct Mobius : MapImpl {
  MobiusMap m;
  explicit Mobius(MobiusMap mm) : m(mm) {}
  cplx eval(cplx z) const override { return m(z); }
  cplx inverse(cplx w) const override { return m.inverse()(w); }
  cplx derivative(cplx z) const override { return m.derivative(z); }
  std::string name() const override { return "mobius"; }
};

struct Composition : MapImpl {
  ConformalMap outer, inner;
  Composition(ConformalMap o, ConformalMap i) : outer(std::move(o)), inner(std::move(i)) {}
  cplx eval(cplx z) const override { return outer.eval(inner.eval(z)); }
  cplx inverse(cplx w) const override { return inner.inverse(outer.inverse(w)); }
  cplx derivative(cplx z) const override { return outer.derivative(inner.eval(z)) * inner.derivative(z); }
  std::string name() const override { return "composition"; }
  nlohmann::json describe() const override {
    return {{"name", name()}, {"outer", outer.describe()}, {"inner", inner.describe()}};
  }
};

/// Disc -> C minus the downward slit {x0 + i y : y <= y0}; 0 -> x0 + i(y0 + 1), -1 -> tip.
struct SlitPlane : MapImpl {
  double x0, y0;
  SlitPlane(double x, double y) : x0(x), y0(y) {}
  cplx base() const { return {x0, y0 + 1}; }
  cplx eval(cplx z) const override {
    require_open_disc(z, "slit_plane");
    const cplx u = 1.0 - z;
    return base() + 4.0 * I * z / (u * u);
  }
  cplx inverse(cplx w) const override {
    if (!finite(w)) throw domain_error("slit_plane inverse: non-finite point");
    if (std::abs(w.real() - x0) < boundary_eps && w.imag() <= y0 + boundary_eps)
      throw domain_error("slit_plane inverse: point on the slit");
    return Koebe{}.inverse((w - base()) / (4.0 * I));
  }
  cplx derivative(cplx z) const override {
    require_open_disc(z, "slit_plane");
    const cplx u = 1.0 - z;
    return 4.0 * I * (1.0 + z) / (u * u * u);
  }
  std::string name() const override { return "slit_plane"; }
  nlohmann::json describe() const override { return {{"name", name()}, {"x0", x0}, {"y0", y0}}; }
};

/// Disc -> S_rho minus the central slit {rho/2 + i y : y <= y0}.
/// Top end <- 1, channels <- (a -+ i)/(a +- i) with a = exp(pi y0 / rho).
struct SlitStrip : MapImpl {
  double rho, y0;
  SlitStrip(double r, double y) : rho(r), y0(y) {
    if (!(r > 0)) throw input_error("slit_strip: rho must be positive");
  }
  double a() const { return std::exp(pi * y0 / rho); }
  cplx sigma_right() const { return (a() - I) / (a() + I); }
  cplx sigma_left() const { return (a() + I) / (a() - I); }

  cplx eval(cplx z) const override {
    require_open_disc(z, "slit_strip");
    const cplx zeta = I * (1.0 + z) / (1.0 - z);
    const double A = a();
    const cplx q = sqrt_upper(zeta * zeta - A * A, zeta.real());
    return (rho / pi) * (pi - std::arg(q)) + I * (rho / pi) * std::log(std::abs(q));
  }
  cplx inverse(cplx w) const override {
    if (!finite(w) || !(w.real() > boundary_eps && w.real() < rho - boundary_eps))
      throw domain_error("slit_strip inverse: point outside strip");
    if (std::abs(w.real() - rho / 2) < boundary_eps && w.imag() <= y0 + boundary_eps)
      throw domain_error("slit_strip inverse: point on the slit");
    const cplx q = -std::exp(-I * pi * w / rho);
    const double A = a();
    const cplx zeta = sqrt_upper(q * q + A * A, q.real());
    return (zeta - I) / (zeta + I);
  }
  cplx derivative(cplx z) const override {
    // w = (rho/(i pi)) log(-1/q), q^2 = zeta^2 - a^2, zeta = i(1+z)/(1-z)
    require_open_disc(z, "slit_strip");
    const cplx zeta = I * (1.0 + z) / (1.0 - z);
    const double A = a();
    const cplx q2 = zeta * zeta - A * A;
    const cplx dzeta = 2.0 * I / ((1.0 - z) * (1.0 - z));
    // dw/dq = -(rho/(i pi)) / q ; dq/dzeta = zeta / q
    return -(rho / (I * pi)) * zeta / q2 * dzeta;
  }
  std::string name() const override { return "slit_strip"; }
  nlohmann::json describe() const override { return {{"name", name()}, {"rho", rho}, {"y0", y0}}; }
};

}  // namespace detail

inline ConformalMap koebe_map() { return ConformalMap(std::make_shared<detail::Koebe>()); }
inline ConformalMap cayley_map() { return ConformalMap(std::make_shared<detail::Cayley>()); }
inline ConformalMap strip_map(double rho) { return ConformalMap(std::make_shared<detail::StripMap>(rho)); }
inline ConformalMap sector_power_map(double alpha, double theta0) {
  return ConformalMap(std::make_shared<detail::SpiralPower>(cplx(1, 0), alpha, theta0));
}
inline ConformalMap spiral_power_map(cplx mu, double alpha, double theta0) {
  return ConformalMap(std::make_shared<detail::SpiralPower>(mu, alpha, theta0));
}
inline ConformalMap affine_map(cplx a, cplx b) { return ConformalMap(std::make_shared<detail::Affine>(a, b)); }
inline ConformalMap mobius_map(MobiusMap m) { return ConformalMap(std::make_shared<detail::Mobius>(m)); }
inline ConformalMap compose(ConformalMap outer, ConformalMap inner) {
  return ConformalMap(std::make_shared<detail::Composition>(std::move(outer), std::move(inner)));
}
inline ConformalMap slit_plane_map(double x0, double y0) {
  return ConformalMap(std::make_shared<detail::SlitPlane>(x0, y0));
}
inline ConformalMap slit_strip_map(double rho, double y0) {
  return ConformalMap(std::make_shared<detail::SlitStrip>(rho, y0));
}

/// Catalog lookup by name; parameters as a JSON object.
inline ConformalMap catalog_map(const std::string& name, const nlohmann::json& p = nlohmann::json::object()) {
  auto num = [&](const char* k, double dflt) { return p.contains(k) ? p.at(k).get<double>() : dflt; };
  auto cnum = [&](const char* k, cplx dflt) {
    if (!p.contains(k)) return dflt;
    const auto& v = p.at(k);
    if (v.is_number()) return cplx(v.get<double>(), 0);
    return cplx(v.at(0).get<double>(), v.at(1).get<double>());
  };
  try {
    if (name == "koebe") return koebe_map();
    if (name == "cayley") return cayley_map();
    if (name == "strip_map") return strip_map(num("rho", 1));
    if (name == "sector_power") return sector_power_map(num("alpha", pi / 2), num("theta0", 0));
    if (name == "spiral_power") return spiral_power_map(cnum("mu", 1), num("alpha", pi / 2), num("theta0", 0));
    if (name == "affine") return affine_map(cnum("a", 1), cnum("b", 0));
    if (name == "slit_plane") return slit_plane_map(num("x0", 0), num("y0", 0));
    if (name == "slit_strip") return slit_strip_map(num("rho", 1), num("y0", 0));
    if (name == "composition")
      return compose(catalog_map(p.at("outer").at("name"), p.at("outer")),
                     catalog_map(p.at("inner").at("name"), p.at("inner")));
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("catalog_map: bad parameters: ") + e.what());
  }
  throw input_error("catalog_map: unknown map '" + name + "'");
}

// ---------------------------------------------------------------------------------------
// Numeric fitter

/// Closed-form map of the domain onto a region close to the unit disc.
struct PreMap {
  enum class Kind { strip, half_plane, slit_plane, polygon };
  Kind kind = Kind::strip;
  double lo = 0, rho = 1;   // strip: [lo, lo + rho]
  double side = 1;          // half_plane: u = side * (w - lo)
  cplx tip{0, 0};           // slit_plane

  cplx fwd(cplx w) const {
    switch (kind) {
      case Kind::strip: {
        const cplx zeta = -std::exp(-I * pi * (w - lo) / rho);
        return (zeta - I) / (zeta + I);
      }
      case Kind::half_plane: {
        const cplx u = side * (w - lo);
        return (u - 1.0) / (u + 1.0);
      }
      case Kind::slit_plane: {
        const cplx u = std::sqrt(-I * (w - tip));
        return (u - 1.0) / (u + 1.0);
      }
      case Kind::polygon: return w;
    }
    return w;
  }
  cplx inv(cplx p) const {
    switch (kind) {
      case Kind::strip: {
        const cplx zeta = I * (1.0 + p) / (1.0 - p);
        return lo + (I * rho / pi) * std::log(-zeta);
      }
      case Kind::half_plane: {
        const cplx u = (1.0 + p) / (1.0 - p);
        return lo + u / side;
      }
      case Kind::slit_plane: {
        const cplx u = (1.0 + p) / (1.0 - p);
        return tip + I * u * u;
      }
      case Kind::polygon: return p;
    }
    return p;
  }
  /// Images of the ends at infinity that collect channels (graded sampling targets).
  std::vector<cplx> channel_ends() const {
    switch (kind) {
      case Kind::strip: return {cplx(-1, 0)};
      case Kind::half_plane: return {cplx(1, 0)};
      default: return {};
    }
  }
  nlohmann::json to_json() const {
    return {{"kind", static_cast<int>(kind)}, {"lo", lo}, {"rho", rho}, {"side", side},
            {"tip", {tip.real(), tip.imag()}}};
  }
  static PreMap from_json(const nlohmann::json& j) {
    PreMap P;
    P.kind = static_cast<Kind>(j.at("kind").get<int>());
    P.lo = j.at("lo");
    P.rho = j.at("rho");
    P.side = j.at("side");
    P.tip = {j.at("tip").at(0).get<double>(), j.at("tip").at(1).get<double>()};
    return P;
  }
};

/// Piece of boundary in the w-plane, traversed with the domain on the left.
struct Stroke {
  enum class Kind { vertical, graph };
  Kind kind = Kind::vertical;
  double x = 0, y0 = 0, y1 = 0;  // vertical: from x+iy0 to x+iy1 (values may be infinite)
  double xa = 0, xb = 0;         // graph abscissae
  std::function<double(double)> f;
  double scale = 1;

  bool start_at_infinity() const { return kind == Kind::vertical ? std::isinf(y0) : std::isinf(f_end(0)); }
  bool end_at_infinity() const { return kind == Kind::vertical ? std::isinf(y1) : std::isinf(f_end(1)); }
  double f_end(int e) const { return f(e == 0 ? xa : xb); }

  cplx at(double s) const {
    if (kind == Kind::graph) {
      const double x = xa + s * (xb - xa);
      return {x, f(x)};
    }
    if (std::isinf(y0) && std::isinf(y1)) throw numeric_error("stroke: doubly infinite vertical stroke");
    if (std::isinf(y0)) return {x, y1 + (y0 > 0 ? 1.0 : -1.0) * scale * (1.0 - s) / s};
    if (std::isinf(y1)) return {x, y0 + (y1 > 0 ? 1.0 : -1.0) * scale * s / (1.0 - s)};
    return {x, y0 + s * (y1 - y0)};
  }
};

namespace detail {

/// Elementary profile elements between consecutive breakpoints.
struct Element {
  double xa, xb;
  std::function<double(double)> f;  // nullptr: free
  double ya, yb;                   // one-sided limits at xa+ and xb-
};

inline std::vector<Element> elements_of(const CombProfile& prof) {
  std::vector<Element> out;
  for (const auto& P : prof.pieces()) {
    switch (P.kind) {
      case Piece::Kind::free: out.push_back({P.x0, P.x1, nullptr, -inf, -inf}); break;
      case Piece::Kind::slit: break;
      case Piece::Kind::rational: {
        auto f = [P](double x) {
          if (x <= P.x0) return CombProfile::rational_limit(P, P.x0, +1);
          if (x >= P.x1) return CombProfile::rational_limit(P, P.x1, -1);
          return CombProfile::rational_value(P, x);
        };
        out.push_back({P.x0, P.x1, f, f(P.x0), f(P.x1)});
        break;
      }
      case Piece::Kind::curve: {
        const auto& S = P.samples;
        for (std::size_t i = 0; i + 1 < S.size(); ++i) {
          const double xa = S[i].first, xb = S[i + 1].first, ya = S[i].second, yb = S[i + 1].second;
          if (ya == -inf || yb == -inf) {
            out.push_back({xa, xb, nullptr, -inf, -inf});
          } else {
            auto f = [xa, xb, ya, yb](double x) { return ya + (yb - ya) * (x - xa) / (xb - xa); };
            out.push_back({xa, xb, f, ya, yb});
          }
        }
        break;
      }
      case Piece::Kind::slit_family:
        throw numeric_error("fit_numeric_map: slit families are not supported by the fitter");
    }
  }
  std::sort(out.begin(), out.end(), [](const Element& a, const Element& b) { return a.xa < b.xa; });
  return out;
}

inline void push_vertical(std::vector<Stroke>& out, double x, double ya, double yb) {
  if (ya == yb) return;
  if (std::isinf(ya) && std::isinf(yb)) {
    Stroke s1;
    s1.kind = Stroke::Kind::vertical;
    s1.x = x;
    s1.y0 = ya;
    s1.y1 = 0;
    out.push_back(s1);
    Stroke s2 = s1;
    s2.y0 = 0;
    s2.y1 = yb;
    out.push_back(s2);
    return;
  }
  Stroke s;
  s.kind = Stroke::Kind::vertical;
  s.x = x;
  s.y0 = ya;
  s.y1 = yb;
  out.push_back(s);
}

}  // namespace detail

/// Boundary of {y > f(x)} as strokes, left wall first. Requires a finite left or right
/// wall when the abscissa range is unbounded on that side.
inline std::vector<Stroke> boundary_strokes(const CombProfile& prof) {
  auto els = detail::elements_of(prof);
  std::vector<Stroke> out;
  double cur = std::isfinite(prof.lo()) ? inf : -inf;  // arriving value at the next breakpoint
  double x_prev = prof.lo();
  for (std::size_t i = 0; i <= els.size(); ++i) {
    const double xj = (i < els.size()) ? els[i].xa : prof.hi();
    const double ynext = (i < els.size()) ? els[i].ya : (std::isfinite(prof.hi()) ? inf : -inf);
    if (std::isfinite(xj)) {
      double top = -inf;
      for (const auto& P : prof.pieces())
        if (P.kind == Piece::Kind::slit && P.x0 == xj) top = std::max(top, P.top);
      if (top > std::max(cur, ynext)) {
        detail::push_vertical(out, xj, cur, top);
        detail::push_vertical(out, xj, top, ynext);
      } else {
        detail::push_vertical(out, xj, cur, ynext);
      }
    }
    if (i == els.size()) break;
    const auto& e = els[i];
    if (e.f) {
      Stroke s;
      s.kind = Stroke::Kind::graph;
      s.xa = e.xa;
      s.xb = e.xb;
      s.f = e.f;
      out.push_back(s);
    }
    cur = e.yb;
    x_prev = e.xb;
  }
  (void)x_prev;
  return out;
}

namespace detail {

inline bool point_in_polygon(const std::vector<cplx>& poly, cplx p) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const cplx a = poly[i], b = poly[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (p.real() < x) in = !in;
    }
  }
  return in;
}

struct Sampler {
  const PreMap& P;
  double h;
  double grade_len = 0.3;
  double r_min = 1e-8;
  double r_top = 0;
  std::vector<cplx> ends;

  double dist_end(cplx p) const {
    double d = inf;
    for (auto e : ends) d = std::min(d, std::abs(p - e));
    return d;
  }
  double local_h(cplx p) const {
    if (ends.empty()) return h;
    const double g = std::clamp(dist_end(p) / grade_len, 1e-4, 1.0);
    return h * g;
  }
  cplx img(const Stroke& s, double t) const { return P.fwd(s.at(t)); }

  // Image of the infinite end: last finite value along a dyadic approach.
  cplx limit_image(const Stroke& s, bool at_start) const {
    cplx last = img(s, 0.5);
    double e = 0.25;
    for (int k = 0; k < 1000 && e > 0; ++k, e *= 0.5) {
      const cplx p = img(s, at_start ? e : 1.0 - e);
      if (!finite(p)) break;
      if (std::abs(p - last) < 1e-16) return p;
      last = p;
    }
    return last;
  }

  // Parameter at which the image is at distance `r` from its limit point at the infinite end.
  double truncate(const Stroke& s, bool at_start, double r) const {
    double good = 0.5, bad = at_start ? 0.0 : 1.0;
    const cplx lim = limit_image(s, at_start);
    auto far = [&](double t) {
      const cplx p = img(s, t);
      return finite(p) && std::abs(p - lim) > r;
    };
    if (!far(good)) return good;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (good + bad);
      if (far(mid)) good = mid;
      else bad = mid;
      if (std::abs(good - bad) < 1e-16) break;
    }
    return good;
  }

  void refine(const Stroke& s, double ta, double tb, cplx pa, cplx pb, std::vector<cplx>& out, int depth) const {
    const cplx mid_p = img(s, 0.5 * (ta + tb));
    const double len = std::abs(pa - mid_p) + std::abs(mid_p - pb);
    if (depth < 60 && len > local_h(mid_p)) {
      const double tm = 0.5 * (ta + tb);
      refine(s, ta, tm, pa, mid_p, out, depth + 1);
      refine(s, tm, tb, mid_p, pb, out, depth + 1);
      return;
    }
    out.push_back(pb);
  }

  void sample(const Stroke& s, std::vector<cplx>& out) const {
    double ta = 0, tb = 1;
    auto is_channel_end = [&](bool start) { return dist_end(limit_image(s, start)) < 1e-6; };
    if (s.start_at_infinity()) ta = truncate(s, true, is_channel_end(true) ? r_min : r_top);
    if (s.end_at_infinity()) tb = truncate(s, false, is_channel_end(false) ? r_min : r_top);
    const int seeds = 16;
    cplx prev = img(s, ta);
    out.push_back(prev);
    for (int k = 1; k <= seeds; ++k) {
      const double t1 = ta + (tb - ta) * k / seeds;
      const double t0 = ta + (tb - ta) * (k - 1) / seeds;
      const cplx p1 = img(s, t1);
      refine(s, t0, t1, prev, p1, out, 0);
      prev = p1;
    }
  }
};

}  // namespace detail

/// Fitted Riemann map disc -> domain with map(0) = anchor and map'(0) > 0.
struct NumericMap : MapImpl {
  PreMap pre;
  GeodesicZipper zipper;
  cplx v_anchor;          // zipper image of the anchor (upper half-plane)
  double theta = 0;       // final rotation
  cplx anchor;
  std::optional<StarlikeAtInfinityDomain> domain;
  int resolution = 0;

  // upper half-plane <-> disc, v_anchor <-> 0
  cplx to_disc(cplx v) const { return std::polar(1.0, -theta) * (v - v_anchor) / (v - std::conj(v_anchor)); }
  cplx from_disc(cplx z) const {
    const cplx y = std::polar(1.0, theta) * z;
    return (v_anchor - std::conj(v_anchor) * y) / (1.0 - y);
  }

  cplx eval(cplx z) const override {
    detail::require_open_disc(z, "numeric map");
    return pre.inv(zipper.from_halfplane(from_disc(z)));
  }
  cplx inverse(cplx w) const override {
    if (!finite(w)) throw domain_error("numeric map inverse: non-finite point");
    if (domain && !domain->contains(w).inside) throw domain_error("numeric map inverse: point outside the domain");
    const cplx p = pre.fwd(w);
    if (!detail::point_in_polygon(zipper.nodes(), p))
      throw domain_error("numeric map inverse: point beyond the truncated boundary");
    return to_disc(zipper.to_halfplane(p));
  }
  cplx derivative(cplx z) const override {
    detail::require_open_disc(z, "numeric map");
    return detail::cauchy_derivative([this](cplx u) { return eval(u); }, z);
  }
  std::string name() const override { return "numeric"; }
  bool is_numeric() const override { return true; }
  nlohmann::json describe() const override {
    return {{"name", name()}, {"resolution", resolution}, {"nodes", zipper.nodes().size()}};
  }
};

struct FitOptions {
  int resolution = 2000;
  double channel_radius = 1e-8;  // truncation distance at channel ends (pre-map plane)
};

namespace detail {

inline PreMap choose_premap(const StarlikeAtInfinityDomain& D) {
  const auto& prof = D.profile;
  PreMap P;
  if (std::isfinite(prof.lo()) && std::isfinite(prof.hi())) {
    if (prof.has_slits()) throw numeric_error("fit_numeric_map: slits inside a bounding strip are not supported");
    P.kind = PreMap::Kind::strip;
    P.lo = prof.lo();
    P.rho = prof.hi() - prof.lo();
    return P;
  }
  if (std::isfinite(prof.lo()) || std::isfinite(prof.hi())) {
    P.kind = PreMap::Kind::half_plane;
    P.side = std::isfinite(prof.lo()) ? 1.0 : -1.0;
    P.lo = std::isfinite(prof.lo()) ? prof.lo() : prof.hi();
    if (prof.has_slits()) throw numeric_error("fit_numeric_map: slits in half-plane domains are not supported");
    return P;
  }
  // no bounding strip: only the single-slit plane is supported
  int slits = 0;
  cplx tip;
  for (const auto& pc : prof.pieces()) {
    if (pc.kind == Piece::Kind::slit) {
      ++slits;
      tip = {pc.x0, pc.top};
    } else if (pc.kind != Piece::Kind::free) {
      slits += 100;
    }
  }
  if (slits != 1)
    throw numeric_error("fit_numeric_map: unbounded domains other than a single-slit plane are not supported");
  P.kind = PreMap::Kind::slit_plane;
  P.tip = tip;
  return P;
}

inline std::vector<cplx> boundary_nodes(const StarlikeAtInfinityDomain& D, const PreMap& P, const FitOptions& opt) {
  std::vector<cplx> nodes;
  if (P.kind == PreMap::Kind::slit_plane) {
    const int n = 2 * opt.resolution;
    for (int k = 0; k < n; ++k) nodes.push_back(std::polar(1.0, 2 * pi * k / n));
    return nodes;
  }
  const double h = 2 * pi / opt.resolution;
  detail::Sampler S{P, h};
  S.ends = P.channel_ends();
  S.r_min = opt.channel_radius;
  S.r_top = 0.5 * h;
  auto strokes = boundary_strokes(D.profile);
  for (auto& s : strokes) {
    std::vector<cplx> part;
    S.sample(s, part);
    for (auto p : part)
      if (nodes.empty() || std::abs(nodes.back() - p) > 1e-15) nodes.push_back(p);
  }
  if (nodes.size() > 2 && std::abs(nodes.front() - nodes.back()) < 1e-15) nodes.pop_back();
  return nodes;
}

}  // namespace detail

inline ConformalMap fit_numeric_map(const StarlikeAtInfinityDomain& D, cplx anchor, const FitOptions& opt = {}) {
  if (opt.resolution < 16) throw input_error("fit_numeric_map: resolution too small");
  const auto mem = D.contains(anchor);
  if (!mem.inside) throw input_error("fit_numeric_map: anchor is not inside the domain");
  auto M = std::make_shared<NumericMap>();
  M->pre = detail::choose_premap(D);
  M->domain = D;
  M->anchor = anchor;
  M->resolution = opt.resolution;
  auto nodes = detail::boundary_nodes(D, M->pre, opt);
  const cplx pa = M->pre.fwd(anchor);
  try {
    M->zipper = GeodesicZipper(nodes, pa);
  } catch (const numeric_error& e) {
    throw numeric_error(std::string("fit_numeric_map: fit failed (") + e.what() + ")");
  }
  M->v_anchor = M->zipper.to_halfplane(pa);
  if (!(M->v_anchor.imag() > 0)) throw numeric_error("fit_numeric_map: anchor image left the half-plane");
  M->theta = 0;
  const cplx d0 = M->derivative(0.0);
  M->theta = -std::arg(d0);
  // residual: round trip at the anchor and boundary nodes mapped near the circle
  const cplx back = M->eval(0.0);
  if (std::abs(back - anchor) > 1e-6 * (1 + std::abs(anchor)))
    throw numeric_error("fit_numeric_map: anchor residual " + std::to_string(std::abs(back - anchor)));
  return ConformalMap(M);
}

/// Distance in the upper half-plane.
inline double dist_upper_halfplane(cplx v1, cplx v2) {
  if (!(v1.imag() > 0) || !(v2.imag() > 0)) throw domain_error("dist_upper_halfplane: point not in the upper half-plane");
  const cplx den = v1 - std::conj(v2);
  const double p = std::abs(v1 - v2) / std::abs(den);
  const double q = 4 * v1.imag() * (v2.imag() / std::norm(den));
  return omega_from_pseudo(std::min(p, 1.0), q);
}

/// Distance between two points of a comb domain computed in the window
/// {x_L(y) < x < x_R(y), |y - y_c| < half_height} around their midpoint, where x_L, x_R are
/// the nearest walls of the profile. The window lies inside the domain, so the value is an
/// upper bound for the domain distance; it converges as half_height grows.
inline double window_distance(const CombProfile& prof, cplx w1, cplx w2, double half_height = 4.0, int n = 1600) {
  const cplx mid = 0.5 * (w1 + w2);
  const double yc = mid.imag(), y0 = yc - half_height, y1 = yc + half_height;
  auto xl = [&](double y) { return prof.left_wall(mid.real(), y); };
  auto xr = [&](double y) { return prof.right_wall(mid.real(), y); };
  if (!std::isfinite(xl(y0)) || !std::isfinite(xr(y0)) || !std::isfinite(xl(y1)) || !std::isfinite(xr(y1)))
    throw domain_error("window_distance: window is not bounded by walls on both sides");
  for (cplx w : {w1, w2})
    if (std::abs(w.imag() - yc) >= half_height || !(w.real() > xl(w.imag()) && w.real() < xr(w.imag())))
      throw domain_error("window_distance: point outside the window");
  const double per = 2 * (xr(y0) - xl(y0)) + 4 * half_height;
  const double h = per / n;
  std::vector<cplx> poly;
  auto edge = [&](auto&& at, double len) {
    const int m = std::max(2, static_cast<int>(std::ceil(len / h)));
    for (int k = 0; k < m; ++k) poly.push_back(at(static_cast<double>(k) / m));
  };
  edge([&](double s) { return cplx(xl(y0) + s * (xr(y0) - xl(y0)), y0); }, xr(y0) - xl(y0));
  edge([&](double s) { const double y = y0 + s * (y1 - y0); return cplx(xr(y), y); }, y1 - y0);
  edge([&](double s) { return cplx(xr(y1) - s * (xr(y1) - xl(y1)), y1); }, xr(y1) - xl(y1));
  edge([&](double s) { const double y = y1 - s * (y1 - y0); return cplx(xl(y), y); }, y1 - y0);
  GeodesicZipper Z(poly, mid);
  return dist_upper_halfplane(Z.to_halfplane(w1), Z.to_halfplane(w2));
}

/// Serialized form of a fitted map (versioned).
inline nlohmann::json numeric_map_to_json(const ConformalMap& m) {
  const auto* N = dynamic_cast<const NumericMap*>(&m.impl());
  if (!N) throw input_error("numeric_map_to_json: not a numeric map");
  auto pts = [](const std::vector<cplx>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (auto z : v) a.push_back({z.real(), z.imag()});
    return a;
  };
  return {{"format", "petalkit-numeric-map"},
          {"version", 1},
          {"premap", N->pre.to_json()},
          {"nodes", pts(N->zipper.nodes())},
          {"params", pts(N->zipper.params())},
          {"zeta0", N->zipper.zeta0()},
          {"zeta0_inf", N->zipper.zeta0_infinite()},
          {"sign", N->zipper.sign()},
          {"v_anchor", {N->v_anchor.real(), N->v_anchor.imag()}},
          {"theta", N->theta},
          {"anchor", {N->anchor.real(), N->anchor.imag()}},
          {"resolution", N->resolution}};
}

inline ConformalMap numeric_map_from_json(const nlohmann::json& j, std::optional<StarlikeAtInfinityDomain> D = {}) {
  try {
    if (j.at("format") != "petalkit-numeric-map" || j.at("version") != 1)
      throw input_error("numeric map: unsupported format or version");
    auto pts = [](const nlohmann::json& a) {
      std::vector<cplx> v;
      for (auto& e : a) v.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
      return v;
    };
    auto M = std::make_shared<NumericMap>();
    M->pre = PreMap::from_json(j.at("premap"));
    M->zipper.restore(pts(j.at("nodes")), pts(j.at("params")), j.at("zeta0"), j.at("zeta0_inf"), j.at("sign"));
    M->v_anchor = {j.at("v_anchor").at(0).get<double>(), j.at("v_anchor").at(1).get<double>()};
    M->theta = j.at("theta");
    M->anchor = {j.at("anchor").at(0).get<double>(), j.at("anchor").at(1).get<double>()};
    M->resolution = j.at("resolution");
    M->domain = std::move(D);
    return ConformalMap(M);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("numeric map: malformed JSON: ") + e.what());
  }
}

}  // namespace petalkit
