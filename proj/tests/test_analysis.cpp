#include <catch_amalgamated.hpp>

#include <petalkit/analysis.hpp>
#include <petalkit/gallery.hpp>
#include <petalkit/nonregular.hpp>

#include <random>

using namespace petalkit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using V = FixedPointReport::Verdict;

namespace {

// {x > 0, y > -1/x}, no evaluatable Koenigs map.
SemigroupModel cusp_model() {
  SemigroupModel m;
  m.kind = ModelKind::parabolic_pos;
  m.side = 1;
  m.domain = StarlikeAtInfinityDomain(CombProfile(0, inf, {Piece::make_rational(0, inf, 0, -1, 1, 0)}));
  m.validate();
  return m;
}

// Channel access without edge clearance control: samples crowd the walls as L grows.
AccessSampler crowding_access(double a1, double a2, int across = 33) {
  return [=](int L) {
    const double eps = std::ldexp(1.0, -2 * L - 6), depth = -std::ldexp(1.0, L);
    std::vector<cplx> out;
    for (int j = 0; j < across; ++j) {
      const double f = j == 0 ? eps : (j == across - 1 ? 1 - eps : static_cast<double>(j) / (across - 1));
      out.push_back({a1 + (a2 - a1) * f, depth});
    }
    return out;
  };
}

}  // namespace

TEST_CASE("spirallike argument", "[analysis]") {
  CHECK_THAT(arg_lambda(1, cplx(0, 5)), WithinAbs(pi / 2, 1e-15));
  CHECK_THAT(arg_lambda(1, -2.0), WithinAbs(-pi, 1e-15));
  CHECK_THAT(arg_lambda(cplx(1, 1), std::exp(-cplx(1, 1))), WithinAbs(0, 1e-15));
  CHECK_THROWS_AS(arg_lambda(1, 0.0), domain_error);
  CHECK_THROWS_AS(arg_lambda(cplx(0, 1), 1.0), input_error);
}

TEST_CASE("spirallike argument reconstructs the point", "[analysis][property]") {
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int i = 0; i < 1000; ++i) {
    const cplx lambda{std::abs(U(g)) + 0.1, U(g)};
    const cplx w = std::exp(cplx(U(g), U(g)));
    const double t = -std::log(std::abs(w)) / lambda.real();
    const cplx back = std::exp(-lambda * t + I * arg_lambda(lambda, w));
    CHECK(std::abs(back - w) <= 1e-12 * std::abs(w));
  }
}

TEST_CASE("closed-form rates and spectral values", "[analysis]") {
  CHECK_THAT(sector_rate_closed_form(1, pi / 2), WithinAbs(0.5, 1e-15));
  CHECK_THAT(sector_rate_closed_form(1, pi), WithinAbs(0.25, 1e-15));
  CHECK_THAT(sector_rate_closed_form(cplx(2, 2), pi / 4), WithinAbs(4, 1e-14));
  CHECK_THAT(spectral_value_from_geometry(1.0), WithinAbs(-pi, 1e-15));
  CHECK_THAT(spectral_value_from_geometry(2.0), WithinAbs(-pi / 2, 1e-15));
  CHECK_THAT(spectral_value_from_geometry(cplx(1, 0), 2 * pi), WithinAbs(-0.5, 1e-15));
  CHECK_THROWS_AS(spectral_value_from_geometry(0.0), input_error);
  CHECK_THROWS_AS(sector_rate_closed_form(1, 4.0), input_error);
}

TEST_CASE("divergence rate of hyperbolic groups", "[analysis]") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto m = gallery::hyperbolic_group(lambda);
    const auto r = divergence_rate(m, cplx(0.3, 0.2), 1e3);
    INFO(lambda);
    CHECK_THAT(r.value, WithinRel(lambda / 2, 0.02));
    CHECK(r.trend == RateEstimate::Trend::converged);
  }
  CHECK_THROWS_AS(divergence_rate(gallery::hyperbolic_group(1), 0.1, 10), input_error);
}

TEST_CASE("divergence rate of sector groups matches the closed form", "[analysis]") {
  for (cplx mu : {cplx(1, 0), cplx(1, 1), cplx(2, -0.5)}) {
    for (double alpha : {pi / 4, pi / 2, pi}) {
      const auto m = gallery::sector_group(mu, alpha);
      const auto r = divergence_rate(m, cplx(-0.2, 0.1), 1e3);
      INFO(mu << " " << alpha);
      CHECK_THAT(r.value, WithinRel(sector_rate_closed_form(mu, alpha), 0.02));
    }
  }
}

TEST_CASE("rate consistency across petal geometry, closed forms and spectral values", "[analysis][property]") {
  std::vector<SemigroupModel> models{gallery::koebe_model(), gallery::slit_strip_model(2, 0), gallery::comb_model("type3", false),
                                     comb_semigroup_model(build_comb_sequence(3))};
  for (const auto& m : models) {
    for (const auto& P : find_petals(m)) {
      if (P.kind != Petal::Kind::hyperbolic) continue;
      const auto c = petal_rate_check(m, P);
      const double from_spectral = -spectral_value_from_geometry(P.geometry) / 2;
      const double closed = P.geometry.kind == PetalGeometry::Kind::sector
                                ? sector_rate_closed_form(P.geometry.sector.mu, P.geometry.sector.alpha())
                                : pi / (2 * (P.geometry.a2 - P.geometry.a1));
      CHECK(c.pass);
      CHECK_THAT(c.rate, WithinRel(from_spectral, 0.02));
      CHECK_THAT(closed, WithinRel(from_spectral, 0.02));
    }
  }
  const auto koebe = find_petals(gallery::koebe_model()).at(0);
  CHECK_THAT(petal_rate_check(gallery::koebe_model(), koebe).rate, WithinRel(0.25, 0.02));
  const auto type3 = find_petals(gallery::comb_model("type3", false)).at(0);
  CHECK_THAT(petal_rate_check(gallery::comb_model("type3", false), type3).rate, WithinRel(pi / 2, 0.02));
}

TEST_CASE("repelling rate of the Koebe petal", "[analysis]") {
  const auto m = gallery::koebe_model();
  const auto P = find_petals(m).at(0);
  const auto r = repelling_rate(m, P, cplx(0, 0.5), 50);
  CHECK_THAT(r.value, WithinRel(0.5, 0.02));
  CHECK_THROWS_AS(repelling_rate(m, P, cplx(0, 0.5), 1), indeterminate_error);
  CHECK_THROWS_AS(repelling_rate(m, P, -0.5, 50), input_error);
}

TEST_CASE("prime-end classification", "[analysis]") {
  SECTION("comb central channel is repelling with nu = -pi/2") {
    const auto m = comb_semigroup_model(build_comb_sequence(8));
    const auto r = classify_prime_end(m, channel_access(-1, 1));
    CHECK(r.verdict == V::repelling);
    CHECK_THAT(r.nu, WithinRel(-pi / 2, 0.02));
  }
  SECTION("slit tip is not a fixed point") {
    const auto m = gallery::slit_plane_model();
    const auto r = classify_prime_end(m, point_access([](double n) { return cplx(1, 0) + cplx(1, 1) / n; }));
    CHECK(r.verdict == V::not_fixed);
    REQUIRE(r.limit);
    CHECK(std::abs(*r.limit - 1.0) < 1e-3);
  }
  SECTION("cusp access is super-repelling") {
    const auto r = classify_prime_end(cusp_model(), point_access([](double n) { return cplx(1 / n, -n / 2); }));
    CHECK(r.verdict == V::super_repelling);
  }
  SECTION("upward access is the Denjoy-Wolff end") {
    CHECK(classify_prime_end(gallery::slit_plane_model(), ray_access(cplx(3, 0), I)).verdict == V::denjoy_wolff);
    CHECK(classify_prime_end(comb_semigroup_model(build_comb_sequence(2)), channel_access(-1, 1, 1)).verdict ==
          V::denjoy_wolff);
  }
  SECTION("access leaving the domain is rejected") {
    CHECK_THROWS_AS(classify_prime_end(gallery::slit_plane_model(), ray_access(cplx(1, 0), -I)), input_error);
  }
}

TEST_CASE("classifier agrees with the petal geometry", "[analysis][property]") {
  std::vector<SemigroupModel> models{gallery::koebe_model(), gallery::slit_strip_model(2, 0), gallery::comb_model("type3", false),
                                     gallery::comb_model("type4", false), comb_semigroup_model(build_comb_sequence(4))};
  for (const auto& m : models) {
    for (const auto& P : find_petals(m)) {
      if (P.kind != Petal::Kind::hyperbolic) continue;
      const auto& g = P.geometry;
      const auto access = g.kind == PetalGeometry::Kind::sector
                              ? spiral_access(g.sector.mu, g.sector.theta0 - g.sector.alpha(), g.sector.theta0 + g.sector.alpha())
                              : channel_access(g.a1, g.a2);
      const auto r = classify_prime_end(m, access);
      CHECK(r.verdict == V::repelling);
      CHECK_THAT(r.nu, WithinRel(P.lambda_rep, 0.02));
    }
  }
}

TEST_CASE("non-tangential and unrestricted channel samples give the same limits", "[analysis][property]") {
  std::vector<SemigroupModel> models{gallery::slit_strip_model(2, 0), gallery::comb_model("type3", false),
                                     comb_semigroup_model(build_comb_sequence(4))};
  for (const auto& m : models) {
    for (const auto& P : find_petals(m)) {
      const auto& g = P.geometry;
      if (g.kind != PetalGeometry::Kind::strip) continue;
      const auto a = classify_prime_end(m, channel_access(g.a1, g.a2));
      const auto b = classify_prime_end(m, crowding_access(g.a1, g.a2));
      REQUIRE(a.verdict == V::repelling);
      REQUIRE(b.verdict == V::repelling);
      const double width = g.a2 - g.a1;
      CHECK(std::abs(a.lo - b.lo) <= 0.02 * width);
      CHECK(std::abs(a.hi - b.hi) <= 0.02 * width);
    }
  }
}

TEST_CASE("slope laws at the Koebe repelling point", "[analysis]") {
  const auto m = gallery::koebe_model();
  const auto P = find_petals(m).at(0);
  for (double beta : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const auto s = slope_law_check(m, P, beta);
    INFO(beta << " measured " << s.measured << " predicted " << s.predicted);
    CHECK(s.pass);
  }
  CHECK_THAT(slope_law_check(m, P, 0).predicted, WithinAbs(0, 1e-15));
  CHECK_THROWS_AS(slope_law_check(m, P, 2.0), input_error);
}

TEST_CASE("slope laws in the slit strip petals", "[analysis]") {
  const auto m = gallery::slit_strip_model(2, 0);
  for (const auto& P : find_petals(m))
    for (double beta : {-1.0, 0.0, 1.0}) CHECK(slope_law_check(m, P, beta).pass);
}
