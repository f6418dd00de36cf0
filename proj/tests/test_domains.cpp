#include <catch_amalgamated.hpp>

#include <petalkit/gallery.hpp>
#include <petalkit/nonregular.hpp>

#include <random>

using namespace petalkit;
using Catch::Matchers::WithinAbs;
using K = LineStatus::Kind;

namespace {

StarlikeAtInfinityDomain slit_plane(double x0 = 1, double y0 = 0) {
  return StarlikeAtInfinityDomain(
      CombProfile(-inf, inf, {Piece::make_free(-inf, x0), Piece::make_slit(x0, y0), Piece::make_free(x0, inf)}));
}

StarlikeAtInfinityDomain example_domain(const std::string& name) {
  return StarlikeAtInfinityDomain(gallery::comb_example(name).profile);
}

SpirallikeSlitDomain koebe_image() { return SpirallikeSlitDomain(1.0, {{cplx(-0.25, 0), 0.0}}); }

}  // namespace

TEST_CASE("membership in slit and comb domains", "[domains]") {
  const auto D = slit_plane();
  CHECK(D.contains(cplx(1, 1)).inside);
  CHECK_FALSE(D.contains(cplx(1, -1)).inside);
  CHECK(D.contains(cplx(0.5, -100)).inside);
  CHECK_THROWS_AS(D.contains(cplx(NAN, 0)), domain_error);

  const auto comb = comb_domain(build_comb_sequence(1));
  CHECK(comb.contains(0).inside);
  CHECK(comb.contains(cplx(0, -1e6)).inside);
  CHECK_FALSE(comb.contains(cplx(2, -1)).inside);
  CHECK_FALSE(comb.contains(cplx(-2, -1)).inside);
}

TEST_CASE("maximal strips", "[domains]") {
  const auto s3 = maximal_strips(example_domain("type3"));
  REQUIRE(s3.size() == 1);
  CHECK(s3[0] == std::pair{1.0, 2.0});
  CHECK(maximal_strips(StarlikeAtInfinityDomain(CombProfile(-inf, inf, {Piece::make_free(-inf, inf)}))).empty());

  const auto comb = comb_domain(build_comb_sequence(3));
  const auto sc = maximal_strips(comb);
  CHECK(std::find(sc.begin(), sc.end(), std::pair{-1.0, 1.0}) != sc.end());
  // the remaining strips are the gaps between consecutive slits of the two families
  for (const auto& [a, b] : sc)
    if (a != -1.0) CHECK(((a >= 1 && b <= 2) || (a >= -2 && b <= -1)));
}

TEST_CASE("maximal half-planes", "[domains]") {
  using S = HalfPlaneDescriptor::Side;
  const auto h5 = maximal_half_planes(example_domain("type5"));
  REQUIRE(h5.size() == 1);
  CHECK(h5[0] == HalfPlaneDescriptor{S::right, 1});
  const auto hs = maximal_half_planes(slit_plane());
  REQUIRE(hs.size() == 2);
  CHECK(hs[0] == HalfPlaneDescriptor{S::left, 1});
  CHECK(hs[1] == HalfPlaneDescriptor{S::right, 1});
  CHECK(maximal_half_planes(example_domain("type3")).empty());
}

TEST_CASE("maximal spirallike sectors", "[domains]") {
  const auto k = maximal_spirallike_sectors(koebe_image());
  REQUIRE(k.size() == 1);
  CHECK_THAT(k[0].two_alpha, WithinAbs(2 * pi, 1e-14));
  CHECK_THAT(k[0].theta0, WithinAbs(0, 1e-14));

  const SpirallikeSector half(1, pi, 0);
  const auto s = maximal_spirallike_sectors(SpirallikeSlitDomain(1, {}, half));
  REQUIRE(s.size() == 1);
  CHECK(s[0] == half);

  const auto two = maximal_spirallike_sectors(SpirallikeSlitDomain(1, {{1.0, inf}, {-1.0, inf}}));
  REQUIRE(two.size() == 2);
  std::vector<double> centers{wrap_angle(two[0].theta0), wrap_angle(two[1].theta0)};
  std::sort(centers.begin(), centers.end());
  CHECK_THAT(centers[0], WithinAbs(-pi / 2, 1e-12));
  CHECK_THAT(centers[1], WithinAbs(pi / 2, 1e-12));
  CHECK_THAT(two[0].two_alpha, WithinAbs(pi, 1e-12));
  CHECK_THAT(two[1].two_alpha, WithinAbs(pi, 1e-12));
}

TEST_CASE("vertical line and spiral status", "[domains]") {
  CHECK(example_domain("type4").vertical_line_status(1) == LineStatus{K::half_line, 0});
  CHECK(example_domain("type3").vertical_line_status(1).kind == K::full_line);
  CHECK(example_domain("type3").vertical_line_status(-1).kind == K::disjoint);
  CHECK(example_domain("type3").vertical_line_status(0.5) == LineStatus{K::half_line, -1});

  const auto kd = koebe_image();
  const auto st = spiral_status(kd, -pi);
  CHECK(st.kind == K::half_line);
  CHECK_THAT(st.r, WithinAbs(0.25, 1e-15));
  CHECK(spiral_status(kd, 0).kind == K::full_line);
  CHECK(spiral_status(SpirallikeSlitDomain(1, {}, SpirallikeSector(1, pi, 0)), 3 * pi / 4).kind == K::disjoint);
}

TEST_CASE("petal shape types of the gallery", "[domains]") {
  for (const auto& e : gallery::comb_examples()) {
    const StarlikeAtInfinityDomain D(e.profile);
    std::vector<int> types;
    for (const auto& [a, b] : maximal_strips(D)) types.push_back(petal_shape_type(D, PetalGeometry::make_strip(a, b)));
    for (const auto& h : maximal_half_planes(D)) types.push_back(petal_shape_type(D, PetalGeometry::make_half(h)));
    INFO(e.name);
    REQUIRE(types.size() == 1);
    CHECK(types[0] == e.expected_shape);
  }
  const auto kd = koebe_image();
  CHECK(petal_shape_type(kd, PetalGeometry::make_sector(maximal_spirallike_sectors(kd)[0])) == 1);
  // a strip petal whose lines miss the domain is a group, not a petal
  const StarlikeAtInfinityDomain S(CombProfile(0, 1, {Piece::make_free(0, 1)}));
  CHECK_THROWS_AS(petal_shape_type(S, PetalGeometry::make_strip(0, 1)), classification_error);
}

TEST_CASE("rational and slit-family pieces", "[domains]") {
  // y = -1/x on (0, inf)
  const StarlikeAtInfinityDomain cusp(CombProfile(0, inf, {Piece::make_rational(0, inf, 0, -1, 1, 0)}));
  CHECK(cusp.contains(cplx(0.5, -1.9)).inside);
  CHECK_FALSE(cusp.contains(cplx(0.5, -2.1)).inside);
  CHECK(maximal_half_planes(cusp).empty());
  CHECK(maximal_strips(cusp).empty());

  const StarlikeAtInfinityDomain fam(CombProfile(
      0, 3, {Piece::make_free(0, 1), Piece::make_slit_family(1, 2, {{2, 0}, {1.5, -5}, {1.25, -10}}, -20),
             Piece::make_free(2, 3)}));
  CHECK_FALSE(fam.contains(cplx(1.5, -6)).inside);
  CHECK(fam.contains(cplx(1.5, -4)).inside);
  CHECK(fam.contains(cplx(1.1, -19)).inside);
  // below tail_bound the tail region is unresolved: its strip is never reported
  for (const auto& [a, b] : maximal_strips(fam)) CHECK_FALSE((a < 1.25 && b > 1));
  CHECK_THROWS_AS(CombProfile(0, 2, {Piece::make_free(0, 1)}), input_error);
}

TEST_CASE("starlike domains are invariant under upward translation", "[domains][property]") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> U(0, 1), T(0, 10);
  std::vector<StarlikeAtInfinityDomain> doms{slit_plane(), comb_domain(build_comb_sequence(3))};
  for (const auto& e : gallery::comb_examples()) doms.emplace_back(e.profile);
  for (const auto& D : doms) {
    const double lo = std::isfinite(D.profile.lo()) ? D.profile.lo() : -5, hi = std::isfinite(D.profile.hi()) ? D.profile.hi() : 5;
    int tested = 0;
    for (int i = 0; i < 5000 && tested < 1000; ++i) {
      const cplx w{lo + (hi - lo) * U(g), -400 * U(g) + 20};
      if (!D.contains(w).inside) continue;
      ++tested;
      CHECK(D.contains(w + I * T(g)).inside);
    }
    CHECK(tested > 100);
  }
}

TEST_CASE("spirallike domains are invariant under the dilation flow", "[domains][property]") {
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> U(-1, 1), T(0, 10);
  for (cplx mu : {cplx(1, 0), cplx(1, 2), cplx(0.5, -1)}) {
    const SpirallikeSlitDomain D(mu, {{cplx(-0.3, 0.1), 0.5}, {cplx(0.2, 0.4), inf}});
    for (int i = 0; i < 1000; ++i) {
      const cplx w = std::exp(cplx(3 * U(g), pi * U(g)));
      if (!D.contains(w).inside) continue;
      CHECK(D.contains(std::exp(-mu * T(g)) * w).inside);
    }
  }
}

TEST_CASE("maximal strips are disjoint, maximal and full", "[domains][property]") {
  std::vector<StarlikeAtInfinityDomain> doms{slit_plane(), comb_domain(build_comb_sequence(4))};
  for (const auto& e : gallery::comb_examples()) doms.emplace_back(e.profile);
  for (const auto& D : doms) {
    const auto S = maximal_strips(D);
    const auto H = maximal_half_planes(D);
    for (std::size_t i = 0; i < S.size(); ++i) {
      const auto [a, b] = S[i];
      for (std::size_t j = i + 1; j < S.size(); ++j) CHECK((S[j].second <= a || S[j].first >= b));
      for (const auto& h : H) {
        const bool inside = h.side == HalfPlaneDescriptor::Side::right ? a >= h.a : b <= h.a;
        CHECK_FALSE(inside);
      }
      for (int k = 1; k < 64; ++k) CHECK(D.vertical_line_status(a + (b - a) * k / 64.0).kind == K::full_line);
      // maximal: the boundary line (a slit), the line just outside, or an accumulating slit family blocks
      const auto blocked = [&](double x, double out) {
        if (D.vertical_line_status(x).kind != K::full_line || D.vertical_line_status(out).kind != K::full_line) return true;
        for (const auto& P : D.profile.pieces()) {
          if (P.kind != Piece::Kind::slit_family) continue;
          const auto [t0, t1] = CombProfile::tail_interval(P);
          if (out > t0 && out < t1) return true;
        }
        return false;
      };
      CHECK(blocked(a, a - 1e-6));
      CHECK(blocked(b, b + 1e-6));
      const int type = petal_shape_type(D, PetalGeometry::make_strip(a, b));
      CHECK((type >= 1 && type <= 5));
    }
  }
}

TEST_CASE("canonical geometry helpers", "[domains]") {
  const auto g = PetalGeometry::make_strip(1, 2);
  CHECK(geometry_contains(g, cplx(1.5, -100)));
  CHECK_FALSE(geometry_contains(g, cplx(2.5, 0)));
  CHECK_THAT(geometry_boundary_gap(g, cplx(1.2, 3)), WithinAbs(0.2, 1e-15));
  CHECK_THAT(geometry_distance(g, cplx(1.5, 0), cplx(1.5, -1)), WithinAbs(pi / 2, 1e-12));
  const auto h = PetalGeometry::make_half({HalfPlaneDescriptor::Side::left, 1});
  CHECK_THAT(geometry_distance(h, 0.0, 1 - std::exp(2.0)), WithinAbs(1.0, 1e-12));
  const auto s = PetalGeometry::make_sector(SpirallikeSector(1, 2 * pi, 0));
  CHECK(geometry_contains(s, cplx(-1, 1e-9)));
  CHECK_FALSE(geometry_contains(s, -1.0));
}
