// petalkit: batch front end. Reports are JSON, traces and polylines CSV.
//
// exit codes: 0 ok, 2 input error, 3 numeric failure

#include <petalkit/gallery.hpp>
#include <petalkit/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace petalkit;
using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string out;
  std::string cache_dir;
  double tol = 1e-9;
  double horizon = 0;  // 0: command default
  std::uint64_t seed = 0;

  json to_json() const {
    json j = {{"command", command}, {"inputs", inputs}, {"tol", tol}, {"seed", seed}, {"version", kVersion}};
    j["horizon"] = horizon > 0 ? json(horizon) : json(nullptr);
    return j;
  }
};

cplx parse_cplx(const std::string& s) {
  std::istringstream in(s);
  double re = 0, im = 0;
  char comma = 0;
  if (!(in >> re)) throw input_error("cannot parse complex number '" + s + "'");
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw input_error("cannot parse complex number '" + s + "'");
  }
  std::string rest;
  if (in >> rest) throw input_error("cannot parse complex number '" + s + "'");
  return {re, im};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw input_error("cannot parse number '" + item + "'");
    }
  }
  return out;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw input_error("cannot write '" + cfg.out + "'");
  f << text;
}

void emit_json(const RunConfig& cfg, json report) {
  report["config"] = cfg.to_json();
  emit(cfg, report.dump(2) + "\n");
}

io::SpecOptions spec_options(const RunConfig& cfg) {
  io::SpecOptions so;
  so.cache_dir = cfg.cache_dir;
  return so;
}

SemigroupModel load_spec(const RunConfig& cfg, const std::string& path) {
  return io::spec_from_json(io::read_json_file(path), spec_options(cfg));
}

/// Model from a bare domain file: the kind follows from the shape of h(D).
SemigroupModel model_from_domain(const json& j) {
  SemigroupModel m;
  m.domain = io::domain_from_json(j);
  if (const auto* d = m.spirallike()) {
    m.kind = ModelKind::elliptic;
    m.mu = d->mu;
  } else {
    const auto& p = m.starlike()->profile;
    const bool lo = std::isfinite(p.lo()), hi = std::isfinite(p.hi());
    if (lo && hi) {
      m.kind = ModelKind::hyperbolic;
      m.lambda = pi / (p.hi() - p.lo());
    } else if (lo || hi) {
      m.kind = ModelKind::parabolic_pos;
      m.side = lo ? 1 : -1;
    } else {
      m.kind = ModelKind::parabolic_zero;
    }
  }
  io::attach_model_metric(m);
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------------------
// polylines

void write_boundary_csv(std::ostream& os, const PlanarDomain& D, double clip) {
  os << "component,x,y\n";
  int comp = 0;
  if (const auto* s = std::get_if<StarlikeAtInfinityDomain>(&D)) {
    for (const auto& st : boundary_strokes(s->profile)) {
      const bool open = st.start_at_infinity() || st.end_at_infinity();
      const int n = 129;
      for (int i = 0; i < n; ++i) {
        double u = static_cast<double>(i) / (n - 1);
        if (open) u = 0.01 + 0.98 * u;
        const cplx w = st.at(u);
        if (!finite(w) || std::abs(w.imag()) > clip) continue;
        os << comp << ',' << io::fmt(w.real()) << ',' << io::fmt(w.imag()) << '\n';
      }
      ++comp;
    }
    return;
  }
  const auto& d = std::get<SpirallikeSlitDomain>(D);
  for (const auto& o : d.obstructions) {
    const double s1 = std::isfinite(o.s_max) ? o.s_max : clip;
    for (int i = 0; i <= 256; ++i) {
      const cplx w = o.c * std::exp(-d.mu * (s1 - 2 * clip * i / 256.0));
      if (std::abs(w) > std::exp(clip)) break;
      os << comp << ',' << io::fmt(w.real()) << ',' << io::fmt(w.imag()) << '\n';
    }
    ++comp;
  }
}

// ---------------------------------------------------------------------------------------
// analyze

int cmd_analyze(const RunConfig& cfg, const std::string& model_kind, const std::string& boundary_csv) {
  const json in = io::read_json_file(cfg.inputs.at(0));
  SemigroupModel m = in.contains("model") ? io::spec_from_json(in, spec_options(cfg)) : model_from_domain(in);
  if (!model_kind.empty()) {
    m.kind = io::model_kind_from_string(model_kind);
    m.validate();
  }
  const auto petals = find_petals(m);
  json list = json::array();
  for (const auto& P : petals) {
    json p = io::petal_to_json(P);
    if (P.kind == Petal::Kind::hyperbolic && m.koenigs && P.sigma) {
      try {
        const auto st = stolz_inclusion_probe(m, P, 2.0, 1000, 20, cfg.seed);
        p["stolz_M2_epsilon"] = st.epsilon;
      } catch (const std::exception& e) {
        p["stolz_M2_epsilon"] = nullptr;
      }
    }
    list.push_back(p);
  }
  json report = {{"model", to_string(m.kind)}, {"group", m.is_group()}, {"petal_count", petals.size()}, {"petals", list}};
  if (!boundary_csv.empty()) {
    std::ofstream f(boundary_csv);
    if (!f) throw input_error("cannot write '" + boundary_csv + "'");
    write_boundary_csv(f, m.domain, 8.0);
    report["boundary_csv"] = boundary_csv;
  }
  emit_json(cfg, report);
  return 0;
}

// ---------------------------------------------------------------------------------------
// orbit

std::string orbit_footer(const OrbitTrace& tr, const SemigroupModel& m) {
  std::ostringstream os;
  os << "# landed=" << (tr.landed ? "true" : "false") << " truncated=" << (tr.truncated ? "true" : "false")
     << " model_deviation=" << io::fmt(tr.model_deviation) << '\n';
  if (tr.direction == OrbitTrace::Direction::backward && tr.size() > 2) {
    try {
      const auto st = hyperbolic_step(tr);
      os << "# hyperbolic_step=" << (st.diverging ? std::string("inf") : io::fmt(st.value)) << '\n';
    } catch (const std::exception& e) {
      os << "# hyperbolic_step unavailable: " << e.what() << '\n';
    }
    try {
      const auto L = landing_analysis(tr, m);
      os << "# landing verdict=" << to_string(L.verdict) << " sigma=" << io::fmt(L.sigma_hat.real()) << ','
         << io::fmt(L.sigma_hat.imag()) << " slope=" << io::fmt(L.slope_hat) << " tangential=" << (L.tangential ? "true" : "false");
      if (L.verdict == LandingReport::Verdict::dw_tangential) os << " R=" << io::fmt(L.R_hat) << " R_spread=" << io::fmt(L.R_spread);
      os << '\n';
    } catch (const std::exception& e) {
      os << "# landing unavailable: " << e.what() << '\n';
    }
  }
  return os.str();
}

int cmd_orbit(const RunConfig& cfg, const std::string& z0s, const std::string& range, const std::string& method,
              int samples) {
  const SemigroupModel m = load_spec(cfg, cfg.inputs.at(0));
  const cplx z0 = parse_cplx(z0s);
  if (!(std::abs(z0) < 1)) throw input_error("orbit: z0 must lie in the unit disc");
  const auto tr_ = parse_list(range);
  if (tr_.size() != 2) throw input_error("orbit: --t-range expects t0,t1");
  const double t0 = tr_[0], span = tr_[1] - tr_[0];
  if (samples < 2) throw input_error("orbit: --samples must be at least 2");
  if (method != "ode" && method != "model") throw input_error("orbit: --method must be ode or model");

  std::ostringstream os;
  os << "# config " << cfg.to_json().dump() << '\n';
  auto finish = [&](OrbitTrace tr) {
    for (auto& t : tr.t) t += t0;
    io::write_trace_csv(os, tr, m.koenigs.has_value());
    os << orbit_footer(tr, m);
    emit(cfg, os.str());
  };
  OrbitTrace tr;
  try {
    if (method == "model" && span != 0.0) {
      tr = sample_orbit(m, z0, std::abs(span), std::abs(span) / (samples - 1),
                        span < 0 ? OrbitTrace::Direction::backward : OrbitTrace::Direction::forward);
    } else {
      IntegrateOptions opt;
      opt.tol = std::min(cfg.tol, 1e-9);
      opt.samples = samples;
      tr = integrate_orbit(m, z0, span, opt);
    }
  } catch (const integration_error& e) {
    finish(e.partial);
    throw;
  }
  finish(std::move(tr));
  return 0;
}

// ---------------------------------------------------------------------------------------
// classify

AccessSampler access_from_json(const json& a, int& max_level) {
  return io::detail::guarded("access", [&]() -> AccessSampler {
    const auto type = a.at("type").get<std::string>();
    if (type == "channel") {
      const auto [a1, a2] = io::detail::interval(a.at("x"));
      return channel_access(a1, a2, a.value("dir", -1), a.contains("im0") ? io::num(a.at("im0")) : 0.0);
    }
    if (type == "spiral") {
      const auto [t1, t2] = io::detail::interval(a.at("theta"));
      return spiral_access(io::cnum(a.at("mu")), t1, t2);
    }
    if (type == "ray") return ray_access(io::cnum(a.at("w0")), io::cnum(a.at("d")));
    if (type == "power_sum") {
      // w(n) = sum_k coef_k n^{power_k}, n = 2^level
      std::vector<std::pair<cplx, double>> terms;
      for (const auto& t : a.at("terms")) terms.push_back({io::cnum(t.at("coef")), io::num(t.at("power"))});
      return point_access([terms](double n) {
        cplx w = 0;
        for (const auto& [c, p] : terms) w += c * std::pow(n, p);
        return w;
      });
    }
    if (type == "points") {
      std::vector<cplx> pts;
      for (const auto& p : a.at("points")) pts.push_back(io::cnum(p));
      if (pts.size() < 5) throw input_error("points access needs at least 5 points");
      max_level = std::min<int>(max_level, static_cast<int>(pts.size()) - 1);
      return [pts](int L) { return std::vector<cplx>{pts.at(L)}; };
    }
    throw input_error("unknown access type '" + type + "'");
  });
}

int cmd_classify(const RunConfig& cfg, const std::string& access, int levels) {
  const SemigroupModel m = load_spec(cfg, cfg.inputs.at(0));
  json aj;
  if (!access.empty() && (access.front() == '{')) {
    try {
      aj = json::parse(access);
    } catch (const json::exception& e) {
      throw input_error(std::string("access: ") + e.what());
    }
  } else {
    aj = io::read_json_file(access);
  }
  int max_level = levels;
  const auto sampler = access_from_json(aj, max_level);
  const auto rep = classify_prime_end(m, sampler, max_level);
  json report = io::fixed_point_report_to_json(rep);
  report["access"] = aj;
  emit_json(cfg, report);
  return 0;
}

// ---------------------------------------------------------------------------------------
// rates

int cmd_rates(const RunConfig& cfg, const std::string& z0s, double rep_horizon) {
  const SemigroupModel m = load_spec(cfg, cfg.inputs.at(0));
  const double T = cfg.horizon > 0 ? cfg.horizon : 1e3;
  json report;
  if (!z0s.empty() || m.koenigs) {
    const cplx z = z0s.empty() ? cplx(0) : parse_cplx(z0s);
    report["divergence"] = io::rate_to_json(divergence_rate(m, z, T));
  }
  json list = json::array();
  for (const auto& P : find_petals(m)) {
    json p = io::petal_to_json(P);
    if (P.kind == Petal::Kind::hyperbolic) {
      const auto c = petal_rate_check(m, P, T);
      p["step_rate"] = {{"value", c.rate}, {"expected", c.expected}, {"pass", c.pass}};
      try {
        const cplx zp = m.h().inverse(central_backward_point(P.geometry, 0));
        p["repelling_rate"] = io::rate_to_json(repelling_rate(m, P, zp, rep_horizon));
      } catch (const std::exception& e) {
        p["repelling_rate"] = {{"error", e.what()}};
      }
    }
    list.push_back(p);
  }
  report["petals"] = list;
  report["repelling_horizon"] = rep_horizon;
  emit_json(cfg, report);
  return 0;
}

// ---------------------------------------------------------------------------------------
// premodel

int cmd_premodel(const RunConfig& cfg, int petal, double M, long samples, bool probe) {
  const SemigroupModel m = load_spec(cfg, cfg.inputs.at(0));
  const auto petals = find_petals(m);
  if (petal < 0 || petal >= static_cast<int>(petals.size()))
    throw input_error("premodel: petal index out of range (" + std::to_string(petals.size()) + " petals)");
  const Petal& P = petals[petal];
  const auto pm = build_premodel(m, P, std::max(cfg.tol, 1e-12));
  json report = {{"petal", io::petal_to_json(P)},
                 {"sigma", io::cplx_out(pm.sigma)},
                 {"lambda_rep", pm.lambda_rep},
                 {"residual", pm.residual},
                 {"semiconformal_defect", pm.semiconformal_defect}};
  const auto st = stolz_inclusion_probe(m, P, M, samples, 20, cfg.seed);
  report["stolz"] = {{"M", M}, {"epsilon", st.epsilon}, {"samples", st.samples}, {"counterexamples", st.counterexamples}};
  json slopes = json::array();
  for (double beta : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const auto s = slope_law_check(m, P, beta);
    slopes.push_back({{"beta", beta}, {"predicted", s.predicted}, {"measured", s.measured}, {"pass", s.pass}});
  }
  report["slope_laws"] = slopes;
  if (probe) {
    // the generic gap 1 - conj(sigma) h^{-1}(w) resolves about e^{-20}
    const double H = cfg.horizon > 0 ? cfg.horizon : 40;
    try {
      report["regularity_probe"] = io::probe_to_json(regularity_probe(pm, m, H));
    } catch (const std::exception& e) {
      report["regularity_probe"] = {{"verdict", "indeterminate"}, {"error", e.what()}};
    }
    report["probe_horizon"] = H;
  }
  emit_json(cfg, report);
  return 0;
}

// ---------------------------------------------------------------------------------------
// nonregular

int cmd_nonregular(const RunConfig& cfg, int k_max, const std::string& schedule, const std::string& domain_out) {
  std::function<double(int)> c_of = default_c_schedule;
  std::vector<double> cs;
  if (!schedule.empty()) {
    cs = parse_list(schedule);
    if (static_cast<int>(cs.size()) < k_max) throw input_error("nonregular: --c-schedule needs k_max entries");
    for (double c : cs)
      if (!(c > 1)) throw input_error("nonregular: every c_k must exceed 1");
    c_of = [&cs](int k) { return cs.at(k - 1); };
  }
  const auto st = build_comb_sequence(k_max, c_of);
  json states = json::array(), certs = json::array();
  for (const auto& s : st) states.push_back(io::comb_state_to_json(s));
  for (int k = 1; k <= k_max; ++k) certs.push_back(io::certificate_to_json(nonregularity_certificate(st, k, cfg.tol)));
  const double H = cfg.horizon > 0 ? cfg.horizon : std::abs(st.back().alpha) + 0.5;
  json report = {{"k_max", k_max}, {"states", states}, {"certificates", certs}, {"probe_horizon", H}};
  try {
    report["regularity_probe"] = io::probe_to_json(regularity_probe(st, H));
  } catch (const indeterminate_error& e) {
    report["regularity_probe"] = {{"verdict", "indeterminate"}, {"error", e.what()}};
  }
  if (!domain_out.empty()) {
    const json spec = {{"model", "parabolic_zero"}, {"domain", io::domain_to_json(comb_domain(st))}, {"koenigs", "none"}};
    std::ofstream f(domain_out);
    if (!f) throw input_error("cannot write '" + domain_out + "'");
    f << spec.dump(2) << '\n';
    report["spec_out"] = domain_out;
  }
  emit_json(cfg, report);
  return 0;
}

// ---------------------------------------------------------------------------------------
// confmap

int cmd_confmap_fit(const RunConfig& cfg, const std::string& anchor, int resolution, double channel_radius) {
  const json in = io::read_json_file(cfg.inputs.at(0));
  const PlanarDomain D = io::domain_from_json(in.contains("domain") ? in.at("domain") : in);
  const auto* s = std::get_if<StarlikeAtInfinityDomain>(&D);
  if (!s) throw input_error("confmap-fit: needs a starlike-at-infinity domain");
  FitOptions opt;
  opt.resolution = resolution;
  opt.channel_radius = channel_radius;
  if (opt.resolution < 16) throw input_error("confmap-fit: resolution must be at least 16");
  const auto map = io::fit_numeric_map_cached(*s, parse_cplx(anchor), opt, cfg.cache_dir);
  json j = numeric_map_to_json(map);
  j["config"] = cfg.to_json();
  j["domain"] = io::domain_to_json(D);
  emit(cfg, j.dump() + "\n");
  return 0;
}

ConformalMap load_map(const json& j) {
  if (j.contains("catalog")) return catalog_map(j.at("catalog").get<std::string>(), j.value("params", json::object()));
  std::optional<StarlikeAtInfinityDomain> D;
  if (j.contains("domain"))
    if (const auto d = io::domain_from_json(j.at("domain")); std::holds_alternative<StarlikeAtInfinityDomain>(d))
      D = std::get<StarlikeAtInfinityDomain>(d);
  return numeric_map_from_json(j, D);
}

int cmd_confmap_eval(const RunConfig& cfg, const std::string& points, const std::string& points_file, bool inverse,
                     bool derivative) {
  const ConformalMap h = load_map(io::read_json_file(cfg.inputs.at(0)));
  std::vector<cplx> zs;
  std::stringstream ps(points);
  for (std::string item; std::getline(ps, item, ';');)
    if (!item.empty()) zs.push_back(parse_cplx(item));
  if (!points_file.empty()) {
    std::ifstream f(points_file);
    if (!f) throw input_error("cannot open '" + points_file + "'");
    for (std::string line; std::getline(f, line);)
      if (!line.empty() && line[0] != '#' && line.find_first_of("0123456789") != std::string::npos &&
          line.find_first_of("reimRI") == std::string::npos)
        zs.push_back(parse_cplx(line));
  }
  if (zs.empty()) throw input_error("confmap-eval: no points given");
  std::ostringstream os;
  os << "# config " << cfg.to_json().dump() << '\n';
  os << (derivative ? "re,im,f_re,f_im,d_re,d_im\n" : "re,im,f_re,f_im\n");
  for (cplx z : zs) {
    const cplx f = inverse ? h.inverse(z) : h(z);
    os << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << ',' << io::fmt(f.real()) << ',' << io::fmt(f.imag());
    if (derivative) {
      const cplx d = inverse ? 1.0 / h.derivative(f) : h.derivative(z);
      os << ',' << io::fmt(d.real()) << ',' << io::fmt(d.imag());
    }
    os << '\n';
  }
  emit(cfg, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"petalkit: semigroups of holomorphic self-maps of the disc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--tol", cfg.tol, "numerical tolerance")->check(CLI::PositiveNumber);
  app.add_option("--horizon", cfg.horizon, "time horizon (command default when unset)")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "output file (stdout when unset)");
  app.add_option("--cache-dir", cfg.cache_dir, "directory for fitted maps");
  app.add_option("--seed", cfg.seed, "random seed");

  std::string input, model_kind, boundary_csv, z0 = "0", t_range = "0,10", method = "ode", access, zr, schedule, domain_out,
                                                anchor, points, points_file;
  int samples = 101, levels = 16, petal = 0, k_max = 8, resolution = FitOptions{}.resolution;
  long stolz_samples = 10000;
  double stolz_M = 2, rep_horizon = 50, channel_radius = FitOptions{}.channel_radius;
  bool probe = false, inverse = false, derivative = false;

  auto* analyze = app.add_subcommand("analyze", "petals of a domain or semigroup spec");
  analyze->add_option("input", input, "domain or spec JSON")->required()->check(CLI::ExistingFile);
  analyze->add_option("--model", model_kind, "override the model kind");
  analyze->add_option("--boundary-csv", boundary_csv, "write the boundary of h(D) as a polyline CSV");

  auto* orbit = app.add_subcommand("orbit", "orbit trace as CSV");
  orbit->add_option("spec", input, "semigroup spec JSON")->required()->check(CLI::ExistingFile);
  orbit->add_option("--z0", z0, "starting point re,im")->required();
  orbit->add_option("--t-range", t_range, "t0,t1 (t1 < t0 runs backward)");
  orbit->add_option("--method", method, "ode or model");
  orbit->add_option("--samples", samples, "output rows");

  auto* classify = app.add_subcommand("classify", "prime end of an access");
  classify->add_option("spec", input, "semigroup spec JSON")->required()->check(CLI::ExistingFile);
  classify->add_option("--access", access, "access JSON (inline or file)")->required();
  classify->add_option("--levels", levels, "refinement levels");

  auto* rates = app.add_subcommand("rates", "divergence and repelling rates");
  rates->add_option("spec", input, "semigroup spec JSON")->required()->check(CLI::ExistingFile);
  rates->add_option("--z0", zr, "point for the divergence rate");
  rates->add_option("--repelling-horizon", rep_horizon, "backward time for repelling rates")->check(CLI::PositiveNumber);

  auto* premodel = app.add_subcommand("premodel", "pre-model at a hyperbolic petal");
  premodel->add_option("spec", input, "semigroup spec JSON")->required()->check(CLI::ExistingFile);
  premodel->add_option("--petal", petal, "petal index");
  premodel->add_option("--stolz-m", stolz_M, "Stolz aperture")->check(CLI::Range(1.0 + 1e-9, 1e6));
  premodel->add_option("--stolz-samples", stolz_samples, "Stolz samples")->check(CLI::PositiveNumber);
  premodel->add_flag("--probe", probe, "run the regularity probe");

  auto* nonregular = app.add_subcommand("nonregular", "comb construction, certificate and probe");
  nonregular->add_option("--k-max", k_max, "number of stages")->check(CLI::Range(1, 64));
  nonregular->add_option("--c-schedule", schedule, "comma-separated c_1..c_kmax (each > 1)");
  nonregular->add_option("--spec-out", domain_out, "write the comb semigroup spec JSON");

  auto* fit = app.add_subcommand("confmap-fit", "fit a numeric Koenigs map");
  fit->add_option("domain", input, "domain or spec JSON")->required()->check(CLI::ExistingFile);
  fit->add_option("--anchor", anchor, "point of h(D) sent to 0")->required();
  fit->add_option("--resolution", resolution, "boundary nodes");
  fit->add_option("--channel-radius", channel_radius, "channel truncation radius")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("confmap-eval", "evaluate a map");
  eval->add_option("map", input, "numeric map JSON or {\"catalog\": name, \"params\": {...}}")->required()->check(CLI::ExistingFile);
  eval->add_option("--points", points, "re,im;re,im;...");
  eval->add_option("--points-file", points_file, "one re,im per line");
  eval->add_flag("--inverse", inverse, "evaluate h^{-1}");
  eval->add_flag("--derivative", derivative, "also print the derivative");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!input.empty()) cfg.inputs = {input};
  try {
    if (*analyze) return cmd_analyze(cfg, model_kind, boundary_csv);
    if (*orbit) return cmd_orbit(cfg, z0, t_range, method, samples);
    if (*classify) return cmd_classify(cfg, access, levels);
    if (*rates) return cmd_rates(cfg, zr, rep_horizon);
    if (*premodel) return cmd_premodel(cfg, petal, stolz_M, stolz_samples, probe);
    if (*nonregular) return cmd_nonregular(cfg, k_max, schedule, domain_out);
    if (*fit) return cmd_confmap_fit(cfg, anchor, resolution, channel_radius);
    if (*eval) return cmd_confmap_eval(cfg, points, points_file, inverse, derivative);
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
