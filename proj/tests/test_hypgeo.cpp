#include <catch_amalgamated.hpp>

#include <petalkit/hypgeo.hpp>

#include <random>

using namespace petalkit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Half-plane distance from the cosh formula, normalized so that omega(1, e^2) = 1.
double halfplane_oracle(cplx a, cplx b) {
  return 0.5 * std::acosh(1 + std::norm(a - b) / (2 * a.real() * b.real()));
}

cplx random_disc(std::mt19937_64& g, double rmax = 0.95) {
  std::uniform_real_distribution<double> U(0, 1);
  return std::polar(rmax * std::sqrt(U(g)), 2 * pi * U(g));
}

}  // namespace

TEST_CASE("omega basic values", "[hypgeo]") {
  CHECK(omega(0, 0) == 0.0);
  CHECK_THAT(omega(0, std::tanh(1.0)), WithinAbs(1.0, 1e-14));
  CHECK_THAT(omega(strip_to_disc(1, 0), strip_to_disc(1, I)), WithinAbs(pi / 4, 1e-12));
  CHECK_THROWS_AS(omega(0, 1.0), domain_error);
  CHECK_THROWS_AS(omega(cplx(NAN, 0), 0), domain_error);
}

TEST_CASE("omega is invariant under disc automorphisms", "[hypgeo][property]") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> U(-pi, pi);
  for (int i = 0; i < 1000; ++i) {
    const auto T = disc_automorphism(U(g), random_disc(g, 0.9));
    const cplx z = random_disc(g, 0.9), w = random_disc(g, 0.9);
    CHECK_THAT(omega(T(z), T(w)), WithinAbs(omega(z, w), 1e-12 * (1 + omega(z, w))));
  }
}

TEST_CASE("omega is a metric on random triples", "[hypgeo][property]") {
  std::mt19937_64 g(2);
  for (int i = 0; i < 1000; ++i) {
    const cplx a = random_disc(g), b = random_disc(g), c = random_disc(g);
    CHECK_THAT(omega(a, b), WithinAbs(omega(b, a), 1e-12));
    CHECK(omega(a, c) <= omega(a, b) + omega(b, c) + 1e-12);
  }
}

TEST_CASE("omega keeps precision near the circle", "[hypgeo]") {
  // radial points 1 - 1e-10 and 1 - 2e-10: distance log(2)/2
  CHECK_THAT(omega(1 - 1e-10, 1 - 2e-10), WithinAbs(0.5 * std::log(2.0), 1e-5));
  CHECK_THAT(omega_origin_from_gap(cplx(1e-200, 0)), WithinRel(0.5 * std::log(2 / 1e-200), 1e-12));
}

TEST_CASE("half-plane distance", "[hypgeo]") {
  CHECK(dist_halfplane(1, 1) == 0.0);
  CHECK(dist_halfplane(cplx(1, 5), cplx(1, 5)) == 0.0);
  CHECK_THAT(dist_halfplane(1, std::exp(2.0)), WithinAbs(1.0, 1e-14));
  CHECK_THROWS_AS(dist_halfplane(-1, 1), domain_error);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> X(0.01, 10), Y(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const cplx a{X(g), Y(g)}, b{X(g), Y(g)};
    const double d = dist_halfplane(a, b);
    CHECK_THAT(d, WithinAbs(halfplane_oracle(a, b), 1e-10 * (1 + d)));
    // Cayley route
    const auto C = cayley_halfplane_to_disc();
    CHECK_THAT(d, WithinAbs(omega(C(a), C(b)), 1e-8 * (1 + d)));
  }
}

TEST_CASE("log-polar half-plane distance survives huge moduli", "[hypgeo]") {
  // exp(l) vs exp(l + 600): geodesic ray, distance 300
  CHECK_THAT(dist_halfplane_logpolar(0, 0, 600, 0), WithinAbs(300.0, 1e-9));
  CHECK_THAT(dist_halfplane_logpolar(0.3, 0.2, 1.1, -0.4),
             WithinAbs(halfplane_oracle(std::exp(cplx(0.3, 0.2)), std::exp(cplx(1.1, -0.4))), 1e-12));
}

TEST_CASE("strip distance", "[hypgeo]") {
  CHECK_THAT(dist_strip(1, 0, -I), WithinAbs(pi / 4, 1e-14));
  CHECK(dist_strip(1, cplx(0.3, 2), cplx(0.3, 2)) == 0.0);
  CHECK_THAT(dist_strip(2, I, -3.0 * I), WithinAbs(pi / 2, 1e-14));
  CHECK_THROWS_AS(dist_strip(1, 1.5, 0), domain_error);
  CHECK_THROWS_AS(dist_strip(-1, 0, 0), input_error);
}

TEST_CASE("strip distance on the axis is linear", "[hypgeo][property]") {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> R(0.1, 10), S(-50, 50);
  for (int i = 0; i < 10000; ++i) {
    const double r = R(g), s = S(g), t = S(g);
    REQUIRE_THAT(dist_strip(r, I * s, I * t), WithinAbs(pi * std::abs(t - s) / (4 * r), 1e-9));
  }
}

TEST_CASE("strip distance matches the exponential chart", "[hypgeo][property]") {
  // w -> exp(pi (-i w) / (2r)) maps {|Re w| < r} onto the right half-plane
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> U(-0.95, 0.95), V(-4, 4);
  for (int i = 0; i < 1000; ++i) {
    const double r = 0.5 + std::abs(V(g));
    const cplx p{r * U(g), V(g)}, q{r * U(g), V(g)};
    const auto chart = [&](cplx w) { return std::exp(pi * (-I * w) / (2 * r)); };
    CHECK_THAT(dist_strip(r, p, q), WithinAbs(halfplane_oracle(chart(p), chart(q)), 1e-9));
    CHECK_THAT(dist_strip(r, p, q), WithinAbs(omega(strip_to_disc(r, p), strip_to_disc(r, q)), 1e-8));
  }
}

TEST_CASE("spirallike sector distance", "[hypgeo]") {
  CHECK_THAT(dist_spirallike_sector(1, pi / 2, 0, 1, std::exp(2.0)), WithinAbs(1.0, 1e-12));
  CHECK(dist_spirallike_sector(cplx(1, 1), pi / 4, 0, 1, 1) == 0.0);
  CHECK_THROWS_AS(dist_spirallike_sector(1, pi / 2, 0, 1, -1), domain_error);

  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> U(-0.9, 0.9), T(-2, 2);
  // mu = 1, alpha = pi/2: the right half-plane
  for (int i = 0; i < 200; ++i) {
    const cplx a = std::polar(std::exp(T(g)), U(g) * pi / 2), b = std::polar(std::exp(T(g)), U(g) * pi / 2);
    CHECK_THAT(dist_spirallike_sector(1, pi / 2, 0, a, b), WithinAbs(halfplane_oracle(a, b), 1e-10));
  }
  // ordinary sector: z -> (z e^{-i theta0})^{pi / (2 alpha)} onto the half-plane
  for (double alpha : {0.3, 1.0, 2.5, pi}) {
    const double th0 = 0.7;
    for (int i = 0; i < 100; ++i) {
      const double p1 = th0 + U(g) * alpha, p2 = th0 + U(g) * alpha;
      const double l1 = T(g), l2 = T(g);
      const cplx a = std::polar(std::exp(l1), p1), b = std::polar(std::exp(l2), p2);
      const double k = pi / (2 * alpha);
      const cplx A = std::polar(std::exp(k * l1), k * (p1 - th0)), B = std::polar(std::exp(k * l2), k * (p2 - th0));
      CHECK_THAT(dist_spirallike_sector(1, alpha, th0, a, b), WithinAbs(halfplane_oracle(A, B), 1e-9));
    }
  }
}

TEST_CASE("log and power chains agree on spirallike sectors", "[hypgeo][property]") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> U(-0.85, 0.85), T(-1, 1);
  for (cplx mu : {cplx(1, 0), cplx(1, 1), cplx(2, -0.5), cplx(0.5, 2)}) {
    for (double alpha : {0.4, 1.2, 2.0}) {
      for (int i = 0; i < 100; ++i) {
        // the power chain overflows far along the sector; keep |log f| moderate
        const double th0 = 0.3, sc = std::max(1.0, std::norm(mu) / mu.real()) * (1 + std::abs(mu.imag() / mu.real()));
        const cplx a = std::exp(mu * (T(g) / sc) + I * (th0 + alpha * U(g)));
        const cplx b = std::exp(mu * (T(g) / sc) + I * (th0 + alpha * U(g)));
        CHECK_THAT(dist_spirallike_sector(mu, alpha, th0, a, b),
                   WithinAbs(dist_spirallike_sector_power_chain(mu, alpha, th0, a, b), 1e-9));
      }
    }
  }
}

TEST_CASE("distance decreases when the domain grows", "[hypgeo][property]") {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> U(-0.9, 0.9), V(-5, 5);
  for (int i = 0; i < 500; ++i) {
    const cplx p{U(g), V(g)}, q{U(g), V(g)};
    // {|Re| < 1} inside {|Re| < 2} inside {Re > -2}
    const double d1 = dist_strip(1, p, q), d2 = dist_strip(2, p, q);
    const double d3 = dist_halfplane(p + 2.0, q + 2.0);
    CHECK(d1 >= d2 - 1e-12);
    CHECK(d2 >= d3 - 1e-12);
  }
  // hyperbolic discs inside the disc
  for (int i = 0; i < 500; ++i) {
    const cplx z = 0.5 * std::tanh(1.0) * cplx(U(g), U(g)) / std::sqrt(2.0);
    const cplx w = 0.5 * std::tanh(1.0) * cplx(U(g), U(g)) / std::sqrt(2.0);
    CHECK(dist_in_hyperbolic_disc_at_origin(1.0, z, w) >= dist_in_hyperbolic_disc_at_origin(3.0, z, w) - 1e-12);
    CHECK(dist_in_hyperbolic_disc_at_origin(3.0, z, w) >= omega(z, w) - 1e-12);
  }
}

TEST_CASE("hyperbolic disc around a point", "[hypgeo]") {
  const HyperbolicDisc B(cplx(0.3, 0.2), 1.0);
  const auto T = disc_automorphism(0.0, B.p);
  const cplx z = T.inverse()(0.2), w = T.inverse()(cplx(0, -0.4));
  CHECK_THAT(dist_in_hyperbolic_disc(B, z, w), WithinAbs(omega(0.2 / std::tanh(1.0), cplx(0, -0.4) / std::tanh(1.0)), 1e-12));
  CHECK(B.contains(B.p));
  CHECK_FALSE(B.contains(T.inverse()(0.9)));
}

TEST_CASE("Stolz regions", "[hypgeo]") {
  const StolzRegion S(1, 2);
  CHECK(in_stolz(S, 0));
  CHECK_FALSE(in_stolz(S, cplx(0, 0.99)));
  CHECK(in_stolz(S, 0.9));
  CHECK_THROWS_AS(StolzRegion(1, 1), input_error);
  CHECK_THROWS_AS(StolzRegion(0.5, 2), input_error);
}

TEST_CASE("Mobius maps compose and invert", "[hypgeo]") {
  const MobiusMap A(1, 2, 3, 5), B(cplx(0, 1), 1, 1, 2);
  const cplx z{0.3, -0.7};
  CHECK_THAT(std::abs(A.compose(B)(z) - A(B(z))), WithinAbs(0, 1e-14));
  CHECK_THAT(std::abs(A.inverse()(A(z)) - z), WithinAbs(0, 1e-14));
  const double h = 1e-6;
  CHECK_THAT(std::abs(A.derivative(z) - (A(z + h) - A(z - h)) / (2 * h)), WithinAbs(0, 1e-8));
  CHECK_THROWS_AS(MobiusMap(1, 2, 2, 4), input_error);
}
