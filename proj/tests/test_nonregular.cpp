#include <catch_amalgamated.hpp>

#include <petalkit/gallery.hpp>
#include <petalkit/nonregular.hpp>

#include <random>

using namespace petalkit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Radius rho of the disc about 0 whose density at |z| = tanh M is c times the unit disc
// density: c rho^2 - (1 - r^2) rho - c r^2 = 0.
double localization_oracle(double c, double M) {
  const double r = std::tanh(M), q = 1 - r * r;
  const double rho = (q + std::sqrt(q * q + 4 * c * c * r * r)) / (2 * c);
  return std::atanh(rho);
}

const std::vector<CombSequenceState>& states8() {
  static const auto st = build_comb_sequence(8);
  return st;
}

}  // namespace

TEST_CASE("localization radius matches the density oracle", "[nonregular]") {
  for (double c : {1.05, 1.25, 1.5, 2.0}) {
    for (double M : {0.5, 1.0, pi}) {
      const auto res = localization_search(c, M);
      INFO(c << " " << M);
      // the search targets c - 1e-3 on sampled pairs; the oracle is the supremum over pairs
      CHECK_THAT(res.R, WithinAbs(localization_oracle(c - 1e-3, M), 2e-3 * localization_oracle(c - 1e-3, M)));
      CHECK(res.ratio <= c - 1e-3);
    }
  }
  CHECK_THROWS_AS(localization_search(1.0, 1.0), input_error);
  CHECK_THROWS_AS(localization_search(1.5, 0.0), input_error);
}

TEST_CASE("localization ratio decreases with the radius", "[nonregular][property]") {
  const auto S = detail::localization_pairs(1.0, 500, 3);
  double prev = inf;
  for (double R = 1.05; R < 6; R += 0.25) {
    const double v = detail::localization_ratio(S, R);
    CHECK(v <= prev);
    CHECK(v >= 1);
    prev = v;
  }
}

TEST_CASE("comb sequence construction", "[nonregular]") {
  const auto& st = states8();
  REQUIRE(st.size() == 8);
  CHECK(st[0].y == 0.0);
  CHECK(st[0].alpha == -0.5);
  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto& s = st[i];
    INFO(s.k);
    CHECK(s.c == default_c_schedule(s.k));
    CHECK(s.margin >= 0);
    CHECK(s.ball_certified);
    CHECK(s.ratio <= s.c);
    CHECK(s.next_y < s.beta);
    CHECK(s.alpha < s.y);
    CHECK(s.kDk_lower <= s.kDk_upper);
    CHECK_THAT(s.half_step, WithinAbs(pi / (8 * (1 + 1.0 / s.k)), 1e-12));
    if (i > 0) {
      CHECK(s.beta < st[i - 1].beta);
      CHECK(s.y == st[i - 1].next_y);
    }
  }
  CHECK_THROWS_AS(build_comb_sequence(0), input_error);
  CHECK_THROWS_AS(build_comb_sequence(2, [](int k) { return k == 2 ? 1.0 : 1.5; }), input_error);
}

TEST_CASE("certificate series is the shifted harmonic sum", "[nonregular]") {
  const auto& st = states8();
  double prev = -1;
  for (int k = 1; k <= 8; ++k) {
    const auto cert = nonregularity_certificate(st, k);
    CHECK_THAT(cert.series, WithinAbs((pi / 8) * (harmonic(k) - 1), 1e-12));
    CHECK(cert.lhs_lower >= cert.series - 1e-12);
    CHECK(cert.terms.size() == static_cast<std::size_t>(k - 1));
    if (k > 1) CHECK(cert.series > prev);
    prev = cert.series;
  }
  CHECK_THAT(nonregularity_certificate(st, 8).series, WithinAbs(0.6746009224895939, 1e-12));
  CHECK_THROWS_AS(nonregularity_certificate(st, 9), input_error);
}

TEST_CASE("certificate series grows without bound", "[nonregular][property]") {
  // (pi/8)(H_k - 1) for k up to 1000: strictly increasing, passes any fixed level eventually
  double prev = -1, s = 0;
  for (int k = 1; k <= 1000; ++k) {
    if (k > 1) s += (pi / 8) / k;
    CHECK_THAT(s, WithinAbs((pi / 8) * (harmonic(k) - 1), 1e-12));
    CHECK(s > prev);
    prev = s;
  }
  CHECK(s > 2.5);
  CHECK(s > (pi / 8) * (std::log(1000.0) - 1));
}

TEST_CASE("comb domains are nested", "[nonregular][property]") {
  const auto& st = states8();
  const auto D = comb_domain(st);
  std::mt19937_64 g(51);
  std::uniform_real_distribution<double> X(-3, 3), Y(-450, 5);
  int tested = 0;
  for (int i = 0; i < 20000 && tested < 2000; ++i) {
    const cplx w{X(g), Y(g)};
    bool in = false;
    try {
      in = D.contains(w).inside;
    } catch (const domain_error&) {
      continue;
    }
    if (!in) continue;
    ++tested;
    for (const auto& s : st) CHECK(comb_domain_k(s.k, s.y).contains(w).inside);
  }
  CHECK(tested > 500);
}

TEST_CASE("distance bounds respect domain inclusion", "[nonregular][property]") {
  const auto& st = states8();
  const auto D = comb_domain(st);
  std::mt19937_64 g(52);
  std::uniform_real_distribution<double> X(-0.95, 0.95), Y(-100, 3);
  for (int i = 0; i < 200; ++i) {
    const cplx a{X(g), Y(g)}, b{X(g), Y(g)};
    const auto bD = dist_comb_bounds(D, a, b);
    CHECK(bD.lower <= bD.upper);
    for (int k : {1, 2, 4}) {
      // D is inside D_k, so k_{D_k} <= k_D
      const auto bK = dist_comb_bounds(comb_domain_k(k, st[k - 1].y), a, b);
      CHECK(bK.lower <= bK.upper);
      CHECK(bK.lower <= bD.upper * (1 + 1e-9));
    }
    // and D_k, D lie inside the slit-free plane minus the bounding slits at +-2
    CHECK(bD.lower >= 0);
  }
}

TEST_CASE("distance bounds bracket exact strip and slit-plane distances", "[nonregular][property]") {
  std::mt19937_64 g(53);
  std::uniform_real_distribution<double> X(-0.9, 0.9), Y(-5, 5);
  const StarlikeAtInfinityDomain S(CombProfile(-1, 1, {Piece::make_free(-1, 1)}));
  const auto sp = slit_plane_map(1, 0);
  const StarlikeAtInfinityDomain P(
      CombProfile(-inf, inf, {Piece::make_free(-inf, 1), Piece::make_slit(1, 0), Piece::make_free(1, inf)}));
  for (int i = 0; i < 200; ++i) {
    const cplx a{X(g), Y(g)}, b{X(g), Y(g)};
    const double ks = dist_strip(1, a, b);
    const auto bs = dist_comb_bounds(S, a, b);
    CHECK(bs.lower <= ks * (1 + 1e-9));
    CHECK(bs.upper >= ks * (1 - 1e-9));
    const double kp = omega(sp.inverse(a), sp.inverse(b));
    const auto bp = dist_comb_bounds(P, a, b);
    CHECK(bp.lower <= kp * (1 + 1e-9));
    CHECK(bp.upper >= kp * (1 - 1e-9));
  }
}

TEST_CASE("density bounds are within the Koebe quarter factor on short pairs", "[nonregular][property]") {
  const auto st = build_comb_sequence(4);
  std::vector<StarlikeAtInfinityDomain> doms{comb_domain_k(2, 0), comb_domain(st)};
  std::mt19937_64 g(54);
  std::uniform_real_distribution<double> X(-3, 3), Y(-200, 3), A(0, 2 * pi);
  for (const auto& D : doms) {
    int n = 0;
    for (int i = 0; i < 5000 && n < 300; ++i) {
      const cplx a{X(g), Y(g)};
      try {
        if (!D.contains(a).inside) continue;
      } catch (const domain_error&) {
        continue;
      }
      const auto db = boundary_distance_bounds(D.profile, a);
      CHECK(db.lo <= db.hi);
      const cplx b = a + 1e-4 * db.lo * std::polar(1.0, A(g));
      const auto bd = dist_comb_bounds(D, a, b);
      CHECK(bd.upper / bd.lower <= 4 + 1e-3);
      ++n;
    }
    CHECK(n == 300);
  }
}

TEST_CASE("regularity probe on the comb domain", "[nonregular]") {
  const auto& st = states8();
  const double horizon = std::abs(st.back().alpha) + 0.5;
  const auto r = regularity_probe(st, horizon);
  CHECK(r.verdict == RegularityProbe::Verdict::unbounded_evidence);
  REQUIRE(r.value.size() == 8);
  for (std::size_t i = 0; i < r.value.size(); ++i) {
    CHECK(r.value[i] <= r.upper[i] + 1e-12);
    if (i > 0) CHECK(r.value[i] >= r.value[i - 1]);
  }
  CHECK_THAT(r.value.back(), WithinAbs(nonregularity_certificate(st, 8).lhs_lower +
                                           (dist_strip(1.0, {0, st[7].alpha - 0.5}, {0, st[7].alpha + 0.5}) -
                                            st[7].c * dist_strip(1.125, {0, st[7].alpha - 0.5}, {0, st[7].alpha + 0.5})),
                                       1e-12));
  CHECK_THROWS_AS(regularity_probe(st, 0.0), indeterminate_error);
}

TEST_CASE("regularity probe on the Koebe pre-model is bounded", "[nonregular]") {
  const auto m = gallery::koebe_model();
  const auto P = find_petals(m).at(0);
  const auto pm = build_premodel(m, P);
  // 1 - h^{-1}(w) for large w without cancellation
  const auto gap = [](cplx w) { return detail::Koebe::one_minus_inverse(w); };
  const auto r = regularity_probe(pm, m, 200, 0, gap);
  CHECK(r.verdict == RegularityProbe::Verdict::bounded);
  CHECK(std::abs(r.value.back() - r.value[r.value.size() - 2]) < 1e-6);
}

TEST_CASE("probe verdict rules", "[nonregular]") {
  using Vd = RegularityProbe::Verdict;
  CHECK(detail::probe_verdict({0, 0.1, 0.5, 1, 1.001, 1.002, 1.001, 1.0}) == Vd::bounded);
  CHECK(detail::probe_verdict({0, 0.1, 0.2, 0.3, 0.5, 0.8, 1.1, 1.4}) == Vd::unbounded_evidence);
  CHECK_THROWS_AS(detail::probe_verdict({0, 1, 2, 3, 5, 2, 6, 1}), indeterminate_error);
}
