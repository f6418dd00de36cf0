#pragma once

// Hyperbolic distances in the disc and in canonical model domains.
// Normalization: omega(z,w) = artanh |(z-w)/(1-conj(z)w)|, density 1/(1-|z|^2).

#include <petalkit/core.hpp>

namespace petalkit {

/// omega from a pseudo-distance p in [0,1) given 1-p^2 separately (avoids cancellation).
inline double omega_from_pseudo(double p, double one_minus_p2) {
  if (p <= 0) return 0.0;
  return std::log1p(p) - 0.5 * std::log(one_minus_p2);
}

inline void require_disc(cplx z, const char* what) {
  if (!finite(z) || std::abs(z) >= 1.0 - boundary_eps)
    throw domain_error(std::string(what) + ": point not strictly inside the unit disc");
}

/// Hyperbolic distance in the unit disc.
inline double omega(cplx z, cplx w) {
  require_disc(z, "omega");
  require_disc(w, "omega");
  const cplx den = 1.0 - std::conj(z) * w;
  const double p = std::abs(z - w) / std::abs(den);
  const double az = std::abs(z), aw = std::abs(w);
  const double q = (1 - az) * (1 + az) * (1 - aw) * (1 + aw) / std::norm(den);
  return omega_from_pseudo(std::min(p, 1.0), q);
}

/// (az+b)/(cz+d).
struct MobiusMap {
  cplx a{1}, b{0}, c{0}, d{1};

  MobiusMap() = default;
  MobiusMap(cplx a_, cplx b_, cplx c_, cplx d_) : a(a_), b(b_), c(c_), d(d_) {
    if (std::abs(a * d - b * c) == 0.0) throw input_error("MobiusMap: degenerate coefficients");
  }

  cplx operator()(cplx z) const {
    if (std::isinf(z.real()) || std::isinf(z.imag())) return c == 0.0 ? cplx(inf, 0) : a / c;
    const cplx den = c * z + d;
    if (den == 0.0) return {inf, 0};
    return (a * z + b) / den;
  }
  MobiusMap inverse() const { return {d, -b, -c, a}; }
  /// this ∘ other
  MobiusMap compose(const MobiusMap& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  cplx derivative(cplx z) const {
    const cplx den = c * z + d;
    return (a * d - b * c) / (den * den);
  }
};

/// z -> e^{i theta}(z-a)/(1-conj(a)z)
inline MobiusMap disc_automorphism(double theta, cplx a) {
  if (std::abs(a) >= 1) throw domain_error("disc_automorphism: |a| must be < 1");
  const cplx e = std::polar(1.0, theta);
  return {e, -e * a, -std::conj(a), 1.0};
}

/// Right half-plane {Re>0} -> disc, 1 -> 0.
inline MobiusMap cayley_halfplane_to_disc() { return {1, -1, 1, 1}; }

/// Distance in the right half-plane {Re w > 0}.
inline double dist_halfplane(cplx w1, cplx w2) {
  if (!finite(w1) || !finite(w2) || w1.real() <= boundary_eps || w2.real() <= boundary_eps)
    throw domain_error("dist_halfplane: point not in the right half-plane");
  const cplx den = w1 + std::conj(w2);
  const double p = std::abs(w1 - w2) / std::abs(den);
  const double q = 4 * w1.real() * (w2.real() / std::norm(den));
  return omega_from_pseudo(std::min(p, 1.0), q);
}

/// Half-plane distance for points given in log-polar form: w = exp(l + i phi), |phi| < pi/2.
/// Stays finite when the moduli differ by hundreds of orders of magnitude.
inline double dist_halfplane_logpolar(double l1, double phi1, double l2, double phi2) {
  const double c1 = std::cos(phi1), c2 = std::cos(phi2);
  if (!(c1 > boundary_eps) || !(c2 > boundary_eps))
    throw domain_error("dist_halfplane_logpolar: argument outside (-pi/2, pi/2)");
  const double dl = std::abs(l1 - l2);
  const double P = c1 * c2;
  if (dl > 40) {
    // acosh(A) = log(2A) + O(e^-dl) with A ~ e^dl / (2P)
    return 0.5 * (dl - std::log(P));
  }
  // cosh(dl) - cos(dphi) = 2 sinh^2(dl/2) + 2 sin^2(dphi/2)
  const double sh = std::sinh(0.5 * dl), sn = std::sin(0.5 * (phi1 - phi2));
  const double x = 2 * (sh * sh + sn * sn) / P;
  return 0.5 * std::log1p(x + std::sqrt(x * (2 + x)));
}

/// Strip S_{2r} = {|Re w| < r} -> disc.
inline cplx strip_to_disc(double r, cplx w) { return std::tan(pi * w / (4 * r)); }

/// Distance in the strip {|Re w| < r}. Evaluated through exp onto the half-plane in
/// log-polar form; agrees with omega(tan(pi p/4r), tan(pi q/4r)).
inline double dist_strip(double r, cplx p, cplx q) {
  if (!(r > 0)) throw input_error("dist_strip: half-width must be positive");
  if (!finite(p) || !finite(q) || std::abs(p.real()) >= r - boundary_eps ||
      std::abs(q.real()) >= r - boundary_eps)
    throw domain_error("dist_strip: point outside strip");
  const double k = pi / (2 * r);
  return dist_halfplane_logpolar(-k * p.imag(), k * p.real(), -k * q.imag(), k * q.real());
}

/// Spirallike coordinates of w for the family e^{t mu + i theta}; theta is placed in
/// [lo, lo + 2pi).
struct SpiralCoords {
  double t;
  double theta;
};

inline SpiralCoords spiral_coords(cplx mu, cplx w, double lo = -pi) {
  if (w == 0.0) throw domain_error("spiral_coords: w = 0");
  const double t = std::log(std::abs(w)) / mu.real();
  double th = std::arg(w) - t * mu.imag();
  th = lo + std::fmod(th - lo, 2 * pi);
  if (th < lo) th += 2 * pi;
  return {t, th};
}

namespace detail {
inline SpiralCoords sector_coords(cplx mu, double alpha, double theta0, cplx w) {
  if (!(mu.real() > 0)) throw input_error("spirallike sector: Re mu must be positive");
  if (!(alpha > 0 && alpha <= pi)) throw input_error("spirallike sector: alpha must be in (0, pi]");
  if (!finite(w) || std::abs(w) == 0.0) throw domain_error("spirallike sector: point outside sector");
  SpiralCoords c = spiral_coords(mu, w, theta0 - pi);
  if (std::abs(c.theta - theta0) >= alpha - boundary_eps)
    throw domain_error("spirallike sector: point outside sector");
  return c;
}
}  // namespace detail

/// Distance in Spir[mu, 2 alpha, theta0] between points given in spiral coordinates
/// (w = e^{t mu + i theta}). The logarithm maps the sector onto a slanted strip, straightened
/// by (1 - i Im mu / Re mu).
inline double dist_spirallike_sector_coords(cplx mu, double alpha, double theta0, SpiralCoords c1, SpiralCoords c2) {
  if (!(mu.real() > 0)) throw input_error("spirallike sector: Re mu must be positive");
  if (std::abs(c1.theta - theta0) >= alpha - boundary_eps || std::abs(c2.theta - theta0) >= alpha - boundary_eps)
    throw domain_error("spirallike sector: point outside sector");
  const double b = mu.imag() / mu.real();
  const double s = std::norm(mu) / mu.real();
  // (1 - ib)(t mu + i theta) = s t + b theta + i theta; rotate to a vertical strip.
  const cplx v1{-(c1.theta - theta0), s * c1.t + b * c1.theta};
  const cplx v2{-(c2.theta - theta0), s * c2.t + b * c2.theta};
  return dist_strip(alpha, v1, v2);
}

/// Distance in Spir[mu, 2 alpha, theta0] through the log chain.
inline double dist_spirallike_sector(cplx mu, double alpha, double theta0, cplx w1, cplx w2) {
  return dist_spirallike_sector_coords(mu, alpha, theta0, detail::sector_coords(mu, alpha, theta0, w1),
                                       detail::sector_coords(mu, alpha, theta0, w2));
}

/// Same distance through the power chain: w^{1 - ib}, rotation, z^{pi/(2 alpha)}, Cayley, omega.
/// Loses accuracy once the points approach the ends of the sector; used as a cross-check.
inline double dist_spirallike_sector_power_chain(cplx mu, double alpha, double theta0, cplx w1,
                                                 cplx w2) {
  auto to_disc = [&](cplx w) {
    const auto c = detail::sector_coords(mu, alpha, theta0, w);
    const double b = mu.imag() / mu.real();
    const cplx L{std::log(std::abs(w)), c.theta + c.t * mu.imag()};  // branch fixed by the sector
    const cplx f = std::exp((1.0 - I * b) * L);     // straight sector around theta0
    const cplx r = f * std::polar(1.0, -theta0);
    const cplx hp = std::exp(pi / (2 * alpha) * std::log(r));
    return cayley_halfplane_to_disc()(hp);
  };
  return omega(to_disc(w1), to_disc(w2));
}

/// omega(0, z) for z = sigma (1 - u), |sigma| = 1, from the gap u; keeps precision when
/// 1 - |z| is far below machine epsilon relative to 1.
inline double omega_origin_from_gap(cplx u) {
  const double one_minus_r2 = 2 * u.real() - std::norm(u);
  if (!(one_minus_r2 > 0)) throw domain_error("omega_origin_from_gap: point not inside the disc");
  const double r = std::sqrt(std::max(0.0, 1 - one_minus_r2));
  return std::log1p(r) - 0.5 * std::log(one_minus_r2);
}

/// S(sigma, M) = {z in D : |sigma - z| < M (1 - |z|)}.
struct StolzRegion {
  cplx sigma;
  double M;
  StolzRegion(cplx s, double m) : sigma(s), M(m) {
    if (std::abs(std::abs(s) - 1.0) > 1e-12) throw input_error("StolzRegion: sigma must be unimodular");
    if (!(m > 1)) throw input_error("StolzRegion: M must exceed 1");
  }
};

inline bool in_stolz(const StolzRegion& s, cplx z) {
  const double az = std::abs(z);
  if (az >= 1) return false;
  return std::abs(s.sigma - z) < s.M * (1 - az);
}

/// D^hyp(p, R) = {z : omega(z, p) < R}.
struct HyperbolicDisc {
  cplx p;
  double R;
  HyperbolicDisc(cplx p_, double r) : p(p_), R(r) {
    require_disc(p_, "HyperbolicDisc");
    if (!(r > 0)) throw input_error("HyperbolicDisc: radius must be positive");
  }
  bool contains(cplx z) const { return std::abs(z) < 1 && omega(z, p) < R; }
};

/// Distance inside D^hyp(0, R), which is the Euclidean disc of radius tanh R.
inline double dist_in_hyperbolic_disc_at_origin(double R, cplx z, cplx w) {
  const double rho = std::tanh(R);
  if (std::abs(z) >= rho || std::abs(w) >= rho)
    throw domain_error("dist_in_hyperbolic_disc: point outside the hyperbolic disc");
  return omega(z / rho, w / rho);
}

/// Distance inside D^hyp(p, R) via the automorphism moving p to 0.
inline double dist_in_hyperbolic_disc(const HyperbolicDisc& B, cplx z, cplx w) {
  const auto T = disc_automorphism(0.0, B.p);
  return dist_in_hyperbolic_disc_at_origin(B.R, T(z), T(w));
}

}  // namespace petalkit
