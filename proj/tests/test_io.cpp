#include <catch_amalgamated.hpp>

#include <petalkit/io.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace petalkit;
using io::json;

namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(PETALKIT_DATA_DIR) + "/" + name; }

json strip_spec(double lo, double hi) {
  return {{"model", "hyperbolic"},
          {"domain", {{"kind", "starlike_at_infinity"}, {"bounding_strip", {lo, hi}}, {"pieces", {{{"type", "free"}, {"x", {lo, hi}}}}}}},
          {"koenigs", "none"}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("petalkit-io-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("numbers, infinities and complex values", "[io]") {
  CHECK(io::num(json(2.5)) == 2.5);
  CHECK(io::num(json("inf")) == inf);
  CHECK(io::num(json("+inf")) == inf);
  CHECK(io::num(json("-inf")) == -inf);
  CHECK_THROWS_AS(io::num(json("infinity")), input_error);
  CHECK(io::num_out(inf) == "inf");
  CHECK(io::num_out(-inf) == "-inf");
  CHECK(io::num_out(std::nan("")).is_null());
  CHECK(io::cnum(json::array({1, "-inf"})) == cplx(1, -inf));
  CHECK(io::cnum(json(3)) == cplx(3, 0));
  CHECK_THROWS_AS(io::cnum(json::array({1, 2, 3})), input_error);
  CHECK(io::cplx_out(cplx(1, 2)) == json::array({1.0, 2.0}));
}

TEST_CASE("domain files round trip", "[io][property]") {
  std::mt19937_64 g(61);
  std::uniform_real_distribution<double> U(-4, 4);
  for (const char* f : {"type2.json", "type2-2.json", "type3.json", "type4.json", "type5.json", "no_free_set.json"}) {
    INFO(f);
    const auto D = io::domain_from_json(io::read_json_file(data(f)));
    const json once = io::domain_to_json(D);
    const auto D2 = io::domain_from_json(json::parse(once.dump()));
    CHECK(io::domain_to_json(D2) == once);
    for (int i = 0; i < 500; ++i) {
      const cplx w{U(g), U(g)};
      bool a = false, b = false, ea = false, eb = false;
      try {
        a = contains(D, w).inside;
      } catch (const domain_error&) {
        ea = true;
      }
      try {
        b = contains(D2, w).inside;
      } catch (const domain_error&) {
        eb = true;
      }
      CHECK(a == b);
      CHECK(ea == eb);
    }
  }
  const auto spiral = io::domain_from_json(io::read_json_file(data("koebe.json")).at("domain"));
  CHECK(io::domain_to_json(io::domain_from_json(io::domain_to_json(spiral))) == io::domain_to_json(spiral));
  const auto comb = io::spec_from_json(io::read_json_file(data("comb_k8.json")));
  CHECK(io::domain_to_json(io::domain_from_json(io::domain_to_json(comb.domain))) == io::domain_to_json(comb.domain));
}

TEST_CASE("domain schema errors", "[io]") {
  CHECK_THROWS_AS(io::domain_from_json(io::read_json_file(data("bad_schema.json"))), input_error);
  CHECK_THROWS_AS(io::domain_from_json(json{{"kind", "annulus"}}), input_error);
  CHECK_THROWS_AS(io::domain_from_json(json{{"kind", "starlike_at_infinity"}}), input_error);
  CHECK_THROWS_AS(io::piece_from_json(json{{"type", "free"}, {"x", {0}}}), input_error);
  CHECK_THROWS_AS(io::piece_from_json(json{{"type", "curve"}, {"x", {0, 2}}, {"samples", {{0, 0}, {1, 0}}}}), input_error);
  CHECK_THROWS_AS(io::read_json_file(data("no_such_file.json")), input_error);
}

TEST_CASE("model files load and validate", "[io]") {
  for (const char* f : {"koebe.json", "slit_plane.json", "cusp.json", "hyperbolic_1.json", "comb_k8.json"}) {
    INFO(f);
    CHECK_NOTHROW(io::spec_from_json(io::read_json_file(data(f))));
  }
  const auto h = io::spec_from_json(io::read_json_file(data("hyperbolic_1.json")));
  CHECK(h.kind == ModelKind::hyperbolic);
  CHECK(h.lambda == 1.0);
  CHECK(h.is_group());
  const auto k = io::spec_from_json(io::read_json_file(data("koebe.json")));
  CHECK(k.koenigs->name() == "koebe");
  CHECK(k.tau_hint == cplx(0, 0));
  // lambda is derived from the strip width when omitted
  CHECK(io::spec_from_json(strip_spec(0, 2)).lambda == pi / 2);
}

TEST_CASE("model file errors", "[io]") {
  auto s = strip_spec(0, 2);
  s["lambda"] = 3.0;
  CHECK_THROWS_AS(io::spec_from_json(s), input_error);
  s = strip_spec(0, 2);
  s["model"] = "loxodromic";
  CHECK_THROWS_AS(io::spec_from_json(s), input_error);
  s = strip_spec(0, 2);
  s["koenigs"] = "magic";
  CHECK_THROWS_AS(io::spec_from_json(s), input_error);
  s = strip_spec(0, 2);
  s["koenigs"] = "catalog:unknown";
  CHECK_THROWS_AS(io::spec_from_json(s), input_error);
  s = strip_spec(0, 2);
  s["model"] = "parabolic_pos";
  s["side"] = "left";
  CHECK_THROWS_AS(io::spec_from_json(s), input_error);
  s = strip_spec(0, 2);
  s["model"] = "elliptic";
  CHECK_THROWS_AS(io::spec_from_json(s), input_error);
  s = strip_spec(0, 2);
  s["koenigs"] = "numeric";
  s["anchor"] = {1, 0};
  s["resolution"] = 4;
  CHECK_THROWS_AS(io::spec_from_json(s), input_error);
  CHECK_THROWS_AS(io::spec_from_json(json::object()), input_error);
}

TEST_CASE("reports serialize deterministically", "[io]") {
  const auto m = io::spec_from_json(io::read_json_file(data("comb_k8.json")));
  const auto r1 = classify_prime_end(m, channel_access(-1, 1));
  const auto r2 = classify_prime_end(m, channel_access(-1, 1));
  CHECK(io::fixed_point_report_to_json(r1).dump(2) == io::fixed_point_report_to_json(r2).dump(2));
  const auto s1 = build_comb_sequence(3), s2 = build_comb_sequence(3);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(io::comb_state_to_json(s1[i]).dump() == io::comb_state_to_json(s2[i]).dump());
  CHECK(io::certificate_to_json(nonregularity_certificate(s1, 3)).dump() ==
        io::certificate_to_json(nonregularity_certificate(s2, 3)).dump());
  const auto k = io::spec_from_json(io::read_json_file(data("koebe.json")));
  const auto P = find_petals(k).at(0);
  const json pj = io::petal_to_json(P);
  CHECK(pj.at("kind") == "hyperbolic");
  CHECK(pj.at("shape_type") == 1);
  CHECK(pj.at("lambda_rep") == -0.5);
  CHECK(pj.dump() == io::petal_to_json(find_petals(k).at(0)).dump());
}

TEST_CASE("fitted maps are cached on disk", "[io]") {
  TempDir tmp;
  const auto D = std::get<StarlikeAtInfinityDomain>(io::domain_from_json(io::read_json_file(data("type3.json"))));
  const FitOptions opt{400, 1e-8};
  const cplx anchor{1.5, 0};
  const auto key = io::map_cache_key(D, anchor, opt);
  CHECK(key.size() == 16);
  CHECK(key == io::map_cache_key(D, anchor, opt));
  CHECK(key != io::map_cache_key(D, anchor, {800, 1e-8}));
  CHECK(key != io::map_cache_key(D, cplx(1.5, 1), opt));
  const fs::path file = tmp.path / ("map-" + key + ".json");

  const auto m1 = io::fit_numeric_map_cached(D, anchor, opt, tmp.path.string());
  REQUIRE(fs::exists(file));
  const auto m2 = io::fit_numeric_map_cached(D, anchor, opt, tmp.path.string());
  for (cplx z : {cplx(0, 0), cplx(0.4, 0.3), cplx(-0.6, -0.2)}) CHECK(std::abs(m1(z) - m2(z)) <= 1e-12);

  {
    std::ofstream(file) << "{ not json";
  }
  const auto m3 = io::fit_numeric_map_cached(D, anchor, opt, tmp.path.string());
  CHECK(std::abs(m3(0.3) - m1(0.3)) <= 1e-12);
  json parsed;
  CHECK_NOTHROW(parsed = json::parse(std::ifstream(file)));
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
}

TEST_CASE("CSV writers", "[io]") {
  OrbitTrace tr;
  tr.t = {0, -1};
  tr.z = {cplx(0.5, 0), cplx(std::nan(""), std::nan(""))};
  tr.w = {cplx(2, 0), cplx(4, 0)};
  std::ostringstream a, b;
  io::write_trace_csv(a, tr);
  CHECK(a.str() == "t,re,im\n0,0.5,0\n-1,nan,nan\n");
  io::write_trace_csv(b, tr, true);
  CHECK(b.str() == "t,re,im,w_re,w_im\n0,0.5,0,2,0\n-1,nan,nan,4,0\n");
  CHECK(io::fmt(0.1) == "0.10000000000000001");
  FixedPointReport r;
  r.levels = {0, 1};
  r.lo_trace = {-1, -1};
  r.hi_trace = {1, 1};
  std::ostringstream c;
  io::write_classify_csv(c, r);
  CHECK(c.str() == "level,liminf,limsup\n0,-1,1\n1,-1,1\n");
}
