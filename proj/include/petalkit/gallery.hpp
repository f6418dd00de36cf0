#pragma once

// Fixture semigroups: closed-form groups and semigroups, and the comb-domain petal examples.

#include <petalkit/semigroup.hpp>

#include <map>

namespace petalkit::gallery {

/// phi_t = h^{-1}(e^{-t} h) with h the Koebe function; h(D) = C minus (-inf, -1/4].
inline SemigroupModel koebe_model() {
  SemigroupModel m;
  m.kind = ModelKind::elliptic;
  m.mu = 1;
  m.domain = SpirallikeSlitDomain(1.0, {{cplx(-0.25, 0), 0.0}});
  m.koenigs = koebe_map();
  m.tau_hint = cplx(0, 0);
  return m;
}

/// Hyperbolic group: h(D) = {0 < Re w < pi / lambda}.
inline SemigroupModel hyperbolic_group(double lambda) {
  if (!(lambda > 0)) throw input_error("hyperbolic_group: lambda must be positive");
  const double rho = pi / lambda;
  SemigroupModel m;
  m.kind = ModelKind::hyperbolic;
  m.lambda = lambda;
  m.domain = StarlikeAtInfinityDomain(CombProfile(0, rho, {Piece::make_free(0, rho)}));
  m.koenigs = strip_map(rho);
  m.canonical = PetalGeometry::make_strip(0, rho);
  m.model_metric = [g = *m.canonical](cplx a, cplx b) { return geometry_distance(g, a, b); };
  m.tau_hint = cplx(0, 1);
  return m;
}

/// Parabolic group of positive step: h = Cayley, h(D) = {Re w > 0}.
inline SemigroupModel parabolic_group() {
  SemigroupModel m;
  m.kind = ModelKind::parabolic_pos;
  m.side = 1;
  m.domain = StarlikeAtInfinityDomain(CombProfile(0, inf, {Piece::make_free(0, inf)}));
  m.koenigs = cayley_map();
  m.canonical = PetalGeometry::make_half({HalfPlaneDescriptor::Side::right, 0});
  m.model_metric = [g = *m.canonical](cplx a, cplx b) { return geometry_distance(g, a, b); };
  m.tau_hint = cplx(1, 0);
  return m;
}

/// e^{-mu t} acting on the sector Spir[mu, 2 alpha, theta0] (conjugated to the disc).
inline SemigroupModel sector_group(cplx mu, double alpha, double theta0 = 0) {
  SemigroupModel m;
  m.kind = ModelKind::elliptic;
  m.mu = mu;
  const SpirallikeSector sec(mu, 2 * alpha, theta0);
  m.domain = SpirallikeSlitDomain(mu, {}, sec);
  m.koenigs = spiral_power_map(mu, alpha, theta0);
  m.canonical = PetalGeometry::make_sector(sec);
  m.model_metric = [g = *m.canonical](cplx a, cplx b) { return geometry_distance(g, a, b); };
  m.tau_hint = cplx(-1, 0);
  return m;
}

/// C minus {Re w = x0, Im w <= y0}: two parabolic petals.
inline SemigroupModel slit_plane_model(double x0 = 1, double y0 = 0) {
  SemigroupModel m;
  m.kind = ModelKind::parabolic_zero;
  m.domain = StarlikeAtInfinityDomain(
      CombProfile(-inf, inf, {Piece::make_free(-inf, x0), Piece::make_slit(x0, y0), Piece::make_free(x0, inf)}));
  m.koenigs = slit_plane_map(x0, y0);
  m.tau_hint = cplx(1, 0);
  return m;
}

/// {0 < Re w < rho} minus {Re w = rho/2, Im w <= y0}: two hyperbolic petals of width rho/2.
inline SemigroupModel slit_strip_model(double rho = 2, double y0 = 0) {
  SemigroupModel m;
  m.kind = ModelKind::hyperbolic;
  m.lambda = pi / rho;
  m.domain = StarlikeAtInfinityDomain(CombProfile(
      0, rho, {Piece::make_free(0, rho / 2), Piece::make_slit(rho / 2, y0), Piece::make_free(rho / 2, rho)}));
  m.koenigs = slit_strip_map(rho, y0);
  m.tau_hint = cplx(1, 0);
  return m;
}

struct CombExample {
  std::string name;
  ModelKind kind;
  CombProfile profile;
  cplx anchor;
  int expected_shape;
};

/// Comb-domain petal examples (one petal each), keyed by name.
inline std::vector<CombExample> comb_examples() {
  using P = Piece;
  const auto zero = [](double a, double b) { return P::make_curve({{a, 0.0}, {b, 0.0}}); };
  return {
      // S cup (1 + iR) cup {w in S + 1 : Im w (1 - Re w) < 1}
      {"type2", ModelKind::hyperbolic,
       CombProfile(0, 2, {P::make_free(0, 1), P::make_rational(1, 2, 0, 1, -1, 1)}), {0.5, 0}, 2},
      // {w in S : Im w > 0} cup (1 + i(0, inf)) cup (H + 1)
      {"type2-2", ModelKind::parabolic_pos, CombProfile(0, inf, {zero(0, 1), P::make_free(1, inf)}), {2, 0}, 2},
      // width-one channel (1, 2) between two rational walls
      {"type3", ModelKind::hyperbolic,
       CombProfile(0, 3, {P::make_rational(0, 1, 1, 0, 1, -1), P::make_free(1, 2), P::make_rational(2, 3, 1, -3, 1, -2)}),
       {1.5, 0}, 3},
      {"type4", ModelKind::hyperbolic, CombProfile(0, 3, {zero(0, 1), P::make_free(1, 2), zero(2, 3)}), {1.5, 0}, 4},
      {"type5", ModelKind::parabolic_pos, CombProfile(0, inf, {P::make_rational(0, 1, 1, 0, 1, -1), P::make_free(1, inf)}),
       {2, 0}, 5},
  };
}

inline CombExample comb_example(const std::string& name) {
  for (auto& e : comb_examples())
    if (e.name == name) return e;
  throw input_error("unknown gallery example '" + name + "'");
}

/// Model of a comb example; the Koenigs map is fitted numerically when `fit` is set.
inline SemigroupModel comb_model(const CombExample& e, bool fit = true, const FitOptions& opt = {}) {
  SemigroupModel m;
  m.kind = e.kind;
  const StarlikeAtInfinityDomain D(e.profile);
  m.domain = D;
  if (e.kind == ModelKind::hyperbolic) m.lambda = pi / (e.profile.hi() - e.profile.lo());
  if (e.kind == ModelKind::parabolic_pos) m.side = 1;
  if (fit) m.koenigs = fit_numeric_map(D, e.anchor, opt);
  m.model_metric = [prof = e.profile](cplx a, cplx b) { return window_distance(prof, a, b, 4.0, 800); };
  m.validate();
  return m;
}

inline SemigroupModel comb_model(const std::string& name, bool fit = true, const FitOptions& opt = {}) {
  return comb_model(comb_example(name), fit, opt);
}

}  // namespace petalkit::gallery
