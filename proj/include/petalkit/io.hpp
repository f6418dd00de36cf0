#pragma once

// JSON for domains, semigroup specs and reports; CSV traces; on-disk cache of fitted maps.

#include <petalkit/analysis.hpp>
#include <petalkit/nonregular.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace petalkit::io {

using json = nlohmann::json;

/// Number or one of the strings "inf", "+inf", "-inf".
inline double num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return inf;
    if (s == "-inf") return -inf;
  }
  throw input_error("expected a number or \"inf\"/\"-inf\", got " + j.dump());
}

inline json num_out(double x) {
  if (x == inf) return "inf";
  if (x == -inf) return "-inf";
  if (std::isnan(x)) return nullptr;
  return x;
}

/// [re, im] or a real number.
inline cplx cnum(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0};
  if (j.is_array() && j.size() == 2) return {num(j[0]), num(j[1])};
  throw input_error("expected a complex number [re, im], got " + j.dump());
}

inline json cplx_out(cplx z) { return json::array({num_out(z.real()), num_out(z.imag())}); }

namespace detail {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw input_error(std::string(what) + ": " + e.what());
  }
}

inline std::pair<double, double> interval(const json& j) {
  if (!j.is_array() || j.size() != 2) throw input_error("expected an interval [a, b], got " + j.dump());
  return {num(j[0]), num(j[1])};
}

}  // namespace detail

// ---------------------------------------------------------------------------------------
// Domains

inline Piece piece_from_json(const json& j) {
  return detail::guarded("piece", [&] {
    const auto type = j.at("type").get<std::string>();
    if (type == "free") {
      const auto [a, b] = detail::interval(j.at("x"));
      return Piece::make_free(a, b);
    }
    if (type == "slit") return Piece::make_slit(num(j.at("x")), num(j.at("top")));
    if (type == "curve") {
      std::vector<std::pair<double, double>> s;
      for (const auto& p : j.at("samples")) s.push_back({num(p.at(0)), num(p.at(1))});
      Piece P = Piece::make_curve(s);
      if (j.contains("x")) {
        const auto [a, b] = detail::interval(j.at("x"));
        if (a != s.front().first || b != s.back().first) throw input_error("curve piece: x must span the samples");
      }
      return P;
    }
    if (type == "rational") {
      const auto [a, b] = detail::interval(j.at("x"));
      const auto& c = j.at("coeffs");
      return Piece::make_rational(a, b, num(c.at(0)), num(c.at(1)), num(c.at(2)), num(c.at(3)));
    }
    if (type == "slit_family") {
      const auto [a, b] = detail::interval(j.at("x"));
      std::vector<std::pair<double, double>> s;
      for (const auto& p : j.at("slits")) s.push_back({num(p.at(0)), num(p.at(1))});
      return Piece::make_slit_family(a, b, s, num(j.at("tail_bound")));
    }
    throw input_error("unknown piece type '" + type + "'");
  });
}

inline json piece_to_json(const Piece& P) {
  switch (P.kind) {
    case Piece::Kind::free: return {{"type", "free"}, {"x", {num_out(P.x0), num_out(P.x1)}}};
    case Piece::Kind::slit: return {{"type", "slit"}, {"x", num_out(P.x0)}, {"top", num_out(P.top)}};
    case Piece::Kind::curve: {
      json s = json::array();
      for (const auto& [x, y] : P.samples) s.push_back({num_out(x), num_out(y)});
      return {{"type", "curve"}, {"x", {num_out(P.x0), num_out(P.x1)}}, {"samples", s}};
    }
    case Piece::Kind::rational:
      return {{"type", "rational"}, {"x", {num_out(P.x0), num_out(P.x1)}}, {"coeffs", {P.p, P.q, P.r, P.s}}};
    case Piece::Kind::slit_family: {
      json s = json::array();
      for (const auto& [x, y] : P.slits) s.push_back({num_out(x), num_out(y)});
      return {{"type", "slit_family"}, {"x", {num_out(P.x0), num_out(P.x1)}}, {"slits", s}, {"tail_bound", num_out(P.tail_bound)}};
    }
  }
  return {};
}

inline SpirallikeSector sector_from_json(const json& j, cplx mu) {
  return detail::guarded("sector", [&] {
    const cplx m = j.contains("mu") ? cnum(j.at("mu")) : mu;
    return SpirallikeSector(m, num(j.at("two_alpha")), j.contains("theta0") ? num(j.at("theta0")) : 0.0);
  });
}

inline PlanarDomain domain_from_json(const json& j) {
  return detail::guarded("domain", [&]() -> PlanarDomain {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "starlike_at_infinity") {
      double lo = -inf, hi = inf;
      if (j.contains("bounding_strip") && !j.at("bounding_strip").is_null())
        std::tie(lo, hi) = detail::interval(j.at("bounding_strip"));
      std::vector<Piece> pieces;
      for (const auto& p : j.at("pieces")) pieces.push_back(piece_from_json(p));
      return StarlikeAtInfinityDomain(CombProfile(lo, hi, std::move(pieces)));
    }
    if (kind == "spirallike") {
      const cplx mu = cnum(j.at("mu"));
      std::vector<SpirallikeSlitDomain::Obstruction> obs;
      if (j.contains("obstructions"))
        for (const auto& o : j.at("obstructions"))
          obs.push_back({cnum(o.at("c")), o.contains("s_max") ? num(o.at("s_max")) : inf});
      std::optional<SpirallikeSector> sec;
      if (j.contains("sector") && !j.at("sector").is_null()) sec = sector_from_json(j.at("sector"), mu);
      return SpirallikeSlitDomain(mu, std::move(obs), sec);
    }
    throw input_error("unknown domain kind '" + kind + "'");
  });
}

inline json domain_to_json(const PlanarDomain& D) {
  if (const auto* s = std::get_if<StarlikeAtInfinityDomain>(&D)) {
    json pieces = json::array();
    for (const auto& P : s->profile.pieces()) pieces.push_back(piece_to_json(P));
    json bs = nullptr;
    if (s->bounding_strip) bs = {num_out(s->bounding_strip->first), num_out(s->bounding_strip->second)};
    return {{"kind", "starlike_at_infinity"}, {"bounding_strip", bs}, {"pieces", pieces}};
  }
  const auto& d = std::get<SpirallikeSlitDomain>(D);
  json obs = json::array();
  for (const auto& o : d.obstructions) obs.push_back({{"c", cplx_out(o.c)}, {"s_max", num_out(o.s_max)}});
  json sec = nullptr;
  if (d.sector) sec = {{"mu", cplx_out(d.sector->mu)}, {"two_alpha", d.sector->two_alpha}, {"theta0", d.sector->theta0}};
  return {{"kind", "spirallike"}, {"mu", cplx_out(d.mu)}, {"obstructions", obs}, {"sector", sec}};
}

inline json geometry_to_json(const PetalGeometry& g) {
  switch (g.kind) {
    case PetalGeometry::Kind::strip: return {{"type", "strip"}, {"a1", g.a1}, {"a2", g.a2}};
    case PetalGeometry::Kind::half_plane:
      return {{"type", "half_plane"}, {"side", g.half.side == HalfPlaneDescriptor::Side::right ? "right" : "left"}, {"a", g.half.a}};
    case PetalGeometry::Kind::sector:
      return {{"type", "sector"}, {"mu", cplx_out(g.sector.mu)}, {"two_alpha", g.sector.two_alpha}, {"theta0", g.sector.theta0}};
  }
  return {};
}

// ---------------------------------------------------------------------------------------
// Fitted-map cache

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string map_cache_key(const StarlikeAtInfinityDomain& D, cplx anchor, const FitOptions& opt) {
  const json key = {{"domain", domain_to_json(D)}, {"anchor", cplx_out(anchor)}, {"resolution", opt.resolution},
                    {"channel_radius", opt.channel_radius}};
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key.dump());
  return os.str();
}

/// fit_numeric_map through a directory of JSON files named map-<key>.json; empty dir disables.
inline ConformalMap fit_numeric_map_cached(const StarlikeAtInfinityDomain& D, cplx anchor, const FitOptions& opt,
                                           const std::string& cache_dir) {
  if (cache_dir.empty()) return fit_numeric_map(D, anchor, opt);
  namespace fs = std::filesystem;
  const fs::path file = fs::path(cache_dir) / ("map-" + map_cache_key(D, anchor, opt) + ".json");
  if (fs::exists(file)) {
    std::ifstream in(file);
    try {
      return numeric_map_from_json(json::parse(in), D);
    } catch (const std::exception&) {
      // unreadable entries are refitted and overwritten
    }
  }
  auto m = fit_numeric_map(D, anchor, opt);
  fs::create_directories(cache_dir);
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << numeric_map_to_json(m).dump();
  }
  fs::rename(tmp, file);
  return m;
}

// ---------------------------------------------------------------------------------------
// Semigroup specs

struct SpecOptions {
  std::string cache_dir;
  FitOptions fit;
};

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "elliptic") return ModelKind::elliptic;
  if (s == "hyperbolic") return ModelKind::hyperbolic;
  if (s == "parabolic_pos") return ModelKind::parabolic_pos;
  if (s == "parabolic_zero") return ModelKind::parabolic_zero;
  throw input_error("unknown model kind '" + s + "'");
}

/// Fills `canonical` and `model_metric` when h(D) is a strip, half-plane or sector itself,
/// and the window metric for other comb domains.
inline void attach_model_metric(SemigroupModel& m) {
  if (const auto* s = m.starlike()) {
    const auto& pieces = s->profile.pieces();
    const double lo = s->profile.lo(), hi = s->profile.hi();
    const bool single_free = pieces.size() == 1 && pieces[0].kind == Piece::Kind::free && pieces[0].x0 == lo && pieces[0].x1 == hi;
    if (single_free && std::isfinite(lo) && std::isfinite(hi)) m.canonical = PetalGeometry::make_strip(lo, hi);
    if (single_free && std::isfinite(lo) && hi == inf) m.canonical = PetalGeometry::make_half({HalfPlaneDescriptor::Side::right, lo});
    if (single_free && lo == -inf && std::isfinite(hi)) m.canonical = PetalGeometry::make_half({HalfPlaneDescriptor::Side::left, hi});
    if (!m.canonical && std::isfinite(lo) && std::isfinite(hi))
      m.model_metric = [prof = s->profile](cplx a, cplx b) { return window_distance(prof, a, b, 4.0, 800); };
  } else if (const auto* d = m.spirallike()) {
    if (d->obstructions.empty() && d->sector) m.canonical = PetalGeometry::make_sector(*d->sector);
  }
  if (m.canonical) m.model_metric = [g = *m.canonical](cplx a, cplx b) { return geometry_distance(g, a, b); };
}

/// {"model", "mu" | "lambda" | "side", "domain", "koenigs": "catalog:<name>" | "numeric" | "none",
///  "koenigs_params", "anchor", "resolution", "tau"}.
inline SemigroupModel spec_from_json(const json& j, const SpecOptions& so = {}) {
  return detail::guarded("spec", [&] {
    SemigroupModel m;
    m.kind = model_kind_from_string(j.at("model").get<std::string>());
    if (j.contains("mu")) m.mu = cnum(j.at("mu"));
    if (j.contains("lambda")) m.lambda = num(j.at("lambda"));
    if (j.contains("side")) {
      const auto s = j.at("side").get<std::string>();
      if (s != "H" && s != "H-") throw input_error("side must be \"H\" or \"H-\"");
      m.side = s == "H" ? 1 : -1;
    }
    m.domain = domain_from_json(j.at("domain"));
    if (m.kind == ModelKind::hyperbolic && !j.contains("lambda")) {
      const auto* s = m.starlike();
      if (s && std::isfinite(s->profile.lo()) && std::isfinite(s->profile.hi()))
        m.lambda = pi / (s->profile.hi() - s->profile.lo());
    }
    if (m.kind == ModelKind::elliptic && !j.contains("mu"))
      if (const auto* d = m.spirallike()) m.mu = d->mu;
    const std::string kk = j.value("koenigs", std::string("none"));
    if (kk.rfind("catalog:", 0) == 0) {
      m.koenigs = catalog_map(kk.substr(8), j.value("koenigs_params", json::object()));
    } else if (kk == "numeric") {
      const auto* s = m.starlike();
      if (!s) throw input_error("numeric Koenigs maps need a starlike-at-infinity domain");
      FitOptions opt = so.fit;
      if (j.contains("resolution")) opt.resolution = j.at("resolution").get<int>();
      if (opt.resolution < 16) throw input_error("resolution must be at least 16");
      m.koenigs = fit_numeric_map_cached(*s, cnum(j.at("anchor")), opt, so.cache_dir);
    } else if (kk != "none") {
      throw input_error("koenigs must be \"catalog:<name>\", \"numeric\" or \"none\"");
    }
    if (j.contains("tau")) m.tau_hint = cnum(j.at("tau"));
    attach_model_metric(m);
    m.validate();
    return m;
  });
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw input_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------------------
// Reports

inline json petal_to_json(const Petal& P) {
  json j = {{"kind", P.kind == Petal::Kind::hyperbolic ? "hyperbolic" : "parabolic"},
            {"geometry", geometry_to_json(P.geometry)},
            {"shape_type", P.shape_type}};
  if (P.kind == Petal::Kind::hyperbolic) {
    j["lambda_rep"] = P.lambda_rep;
    j["sigma"] = P.sigma ? cplx_out(*P.sigma) : json(nullptr);
    if (P.sigma) j["sigma_gap"] = P.sigma_gap;
  }
  return j;
}

inline json rate_to_json(const RateEstimate& r) {
  json v = json::array(), t = json::array();
  for (double x : r.values) v.push_back(num_out(x));
  for (double x : r.times) t.push_back(x);
  return {{"value", num_out(r.value)}, {"horizon", r.horizon}, {"trend", to_string(r.trend)}, {"upstairs", r.upstairs},
          {"times", t}, {"values", v}};
}

inline json fixed_point_report_to_json(const FixedPointReport& r) {
  json j = {{"verdict", to_string(r.verdict)}};
  if (r.verdict == FixedPointReport::Verdict::repelling) j["nu"] = r.nu;
  if (r.verdict == FixedPointReport::Verdict::repelling || r.verdict == FixedPointReport::Verdict::super_repelling) {
    j["liminf"] = r.lo;
    j["limsup"] = r.hi;
  }
  if (r.limit) j["limit"] = cplx_out(*r.limit);
  json trace = json::array();
  for (std::size_t i = 0; i < r.levels.size(); ++i)
    trace.push_back({{"level", r.levels[i]}, {"liminf", r.lo_trace[i]}, {"limsup", r.hi_trace[i]}, {"longitudinal", r.long_trace[i]}});
  j["diagnostics"] = trace;
  return j;
}

inline json comb_state_to_json(const CombSequenceState& s) {
  return {{"k", s.k},         {"c", s.c},           {"y", s.y},
          {"alpha", s.alpha}, {"R", s.R},           {"ratio", s.ratio},
          {"beta", s.beta},   {"next_y", s.next_y}, {"half_step", s.half_step},
          {"kDk_lower", s.kDk_lower}, {"kDk_upper", num_out(s.kDk_upper)}, {"margin", s.margin},
          {"ball_certified", s.ball_certified}};
}

inline json certificate_to_json(const NonregularityCertificate& c) {
  return {{"k", c.k}, {"lhs_lower", c.lhs_lower}, {"series", c.series}, {"terms", c.terms}};
}

inline json probe_to_json(const RegularityProbe& p) {
  json pts = json::array();
  for (std::size_t i = 0; i < p.t.size(); ++i)
    pts.push_back({{"t", p.t[i]}, {"value", p.value[i]}, {"upper", num_out(p.upper[i])}});
  return {{"verdict", to_string(p.verdict)}, {"checkpoints", pts}};
}

// ---------------------------------------------------------------------------------------
// CSV

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// t,re,im[,w_re,w_im]; unresolved points are written as nan.
inline void write_trace_csv(std::ostream& os, const OrbitTrace& tr, bool with_model = false) {
  os << (with_model ? "t,re,im,w_re,w_im\n" : "t,re,im\n");
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << fmt(tr.t[k]) << ',' << fmt(tr.z[k].real()) << ',' << fmt(tr.z[k].imag());
    if (with_model) os << ',' << fmt(tr.w[k].real()) << ',' << fmt(tr.w[k].imag());
    os << '\n';
  }
}

/// level,liminf,limsup
inline void write_classify_csv(std::ostream& os, const FixedPointReport& r) {
  os << "level,liminf,limsup\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) os << r.levels[i] << ',' << fmt(r.lo_trace[i]) << ',' << fmt(r.hi_trace[i]) << '\n';
}

}  // namespace petalkit::io
