// percospec command-line driver: one subcommand per experiment, CSV data plus a JSON sidecar.

#include <boost/version.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "percospec/boolean/estimate.hpp"
#include "percospec/experiments/alpha.hpp"
#include "percospec/experiments/hoeffding_suite.hpp"
#include "percospec/experiments/noise.hpp"
#include "percospec/experiments/quasimult.hpp"
#include "percospec/io/csv.hpp"
#include "percospec/spectral/moments.hpp"

namespace ps = percospec;
using cli::json;
using cli::Kind;
using cli::ValidationError;
using ps::io::format_number;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCheck = 3;

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

class Run {
 public:
  Run(std::string command, json cfg) : command_(std::move(command)), cfg_(std::move(cfg)), hash_(cli::config_hash(cfg_)) {}

  const json& cfg() const { return cfg_; }
  double number(const std::string& k) const { return cfg_.at(k).get<double>(); }
  std::uint64_t integer(const std::string& k) const { return cfg_.at(k).get<std::uint64_t>(); }
  std::string text(const std::string& k) const { return cfg_.at(k).get<std::string>(); }
  std::vector<double> numbers(const std::string& k) const { return cfg_.at(k).get<std::vector<double>>(); }
  bool present(const std::string& k) const { return cfg_.contains(k) && !cfg_.at(k).is_null(); }

  std::uint64_t master_seed() const { return integer("seed"); }
  ps::SeedSpec seed() const { return ps::SeedSpec(master_seed(), command_); }
  unsigned threads() const { return static_cast<unsigned>(std::max<std::uint64_t>(1, integer("threads"))); }
  std::filesystem::path output() const { return text("output"); }

  void open(std::vector<std::string> header) {
    header.push_back("seed");
    header.push_back("config_hash");
    const auto out = output();
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    csv_.emplace(out, header);
  }

  void row(std::vector<std::string> fields) {
    fields.push_back(std::to_string(master_seed()));
    fields.push_back(hash_);
    csv_->row(fields);
    ++rows_;
  }

  void check(const std::string& name, bool pass, const std::string& detail) {
    checks_.push_back({{"name", name}, {"passed", pass}, {"detail", detail}});
    passed_ = passed_ && pass;
  }

  void note(const std::string& key, json v) { notes_[key] = std::move(v); }

  bool passed() const { return passed_; }

  void write_sidecar(double seconds) const {
    json meta;
    meta["command"] = command_;
    meta["seed"] = master_seed();
    meta["config_hash"] = hash_;
    meta["config"] = cfg_;
    meta["runtime_seconds"] = seconds;
    meta["rows"] = rows_;
    meta["versions"] = {{"percospec", PERCOSPEC_VERSION},
                        {"compiler", __VERSION__},
                        {"boost", BOOST_LIB_VERSION},
                        {"cli11", CLI11_VERSION},
                        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    meta["checks"] = checks_;
    meta["all_checks_passed"] = passed_;
    if (!notes_.empty()) meta["results"] = notes_;
    std::ofstream out(ps::io::sidecar_path(output()));
    out << meta.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write metadata sidecar");
  }

 private:
  std::string command_;
  json cfg_;
  std::string hash_;
  std::optional<ps::io::CsvWriter> csv_;
  std::uint64_t rows_ = 0;
  json checks_ = json::array();
  json notes_ = json::object();
  bool passed_ = true;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

ps::Model model_of(const Run& run) {
  try {
    return ps::parse_model(run.text("model"));
  } catch (const ps::ParameterError& e) {
    throw ValidationError(e.what());
  }
}

double intensity_of(const Run& run, ps::Model m) {
  if (m == ps::Model::voronoi) {
    require(!run.present("lambda") || run.number("lambda") == 1.0, "voronoi model runs at intensity 1");
    return 1.0;
  }
  const double lam = run.present("lambda") ? run.number("lambda") : ps::kLambdaCritical;
  require(lam > 0.0 && std::isfinite(lam), "lambda must be positive");
  return lam;
}

void require_positive(const std::vector<double>& v, const std::string& name, bool allow_zero = false) {
  require(!v.empty(), name + " must be nonempty");
  for (double x : v) require(std::isfinite(x) && (allow_zero ? x >= 0.0 : x > 0.0), name + " values out of range");
}

ps::AlphaCache cache() { return ps::AlphaCache(ps::default_cache_dir()); }

ps::AlphaKey alpha_key(ps::Model m, double lambda, double r, double R, double h, const std::string& pattern,
                       std::uint64_t family) {
  ps::AlphaKey k;
  k.model = m;
  k.lambda = m == ps::Model::voronoi ? 1.0 : lambda;
  k.r = r;
  k.R = R;
  k.h = h;
  k.pattern = pattern;
  k.seed_family = family;
  return k;
}

// ---- subcommands ----

void cmd_sample(Run& run) {
  const auto m = model_of(run);
  const double L = run.number("L");
  require(L > 0.0, "L must be positive");
  const double lam = intensity_of(run, m);
  const double pad = m == ps::Model::boolean ? ps::kBooleanPad : ps::kVoronoiPad;
  const auto cfg = ps::sample_poisson(lam, ps::Region::square(L).padded(pad), run.seed().with_replica(run.integer("replica")),
                                      m == ps::Model::voronoi);
  run.open({"index", "x", "y", "mark"});
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    run.row({num(std::uint64_t{i}), num(cfg[i].loc.x), num(cfg[i].loc.y), std::to_string(cfg[i].mark)});
  }
  const bool crossing = m == ps::Model::boolean ? ps::crossing_indicator_fL(cfg, L) == 1
                                                : ps::voronoi_crossing(cfg, ps::Region::square(L), 1, ps::Axis::LR);
  run.note("points", cfg.size());
  run.note("crossing", crossing);
}

void cmd_crossing(Run& run) {
  const auto m = model_of(run);
  const double lam = intensity_of(run, m);
  const auto Ls = run.numbers("Ls");
  require_positive(Ls, "Ls");
  const auto n = run.integer("replicas");
  require(n >= 100, "replicas must be >= 100");
  run.open({"model", "L", "lambda", "n", "estimate", "stderr"});
  for (std::size_t k = 0; k < Ls.size(); ++k) {
    const auto s = run.seed().with_sub(k);
    const auto e = m == ps::Model::boolean ? ps::estimate_crossing_probability(Ls[k], lam, n, s, run.threads())
                                           : ps::estimate_voronoi_crossing_probability(Ls[k], n, s, run.threads());
    run.row({ps::to_string(m), num(Ls[k]), num(lam), num(e.n), num(e.estimate), num(e.stderr)});
    if (m == ps::Model::voronoi) {
      run.check("self-dual crossing L=" + num(Ls[k]), std::fabs(e.estimate - 0.5) <= 3.0 * e.stderr,
                num(e.estimate) + " +- " + num(e.stderr));
    } else {
      run.check("nondegenerate crossing L=" + num(Ls[k]), e.estimate > 0.05 && e.estimate < 0.95, num(e.estimate));
    }
  }
}

void cmd_arm(Run& run) {
  const auto m = model_of(run);
  const double lam = intensity_of(run, m);
  const double r = run.number("r");
  const auto Rs = run.numbers("Rs");
  const double h = run.number("h");
  const auto pattern = run.text("pattern");
  const auto n = run.integer("replicas");
  require(r > 0.0, "r must be positive");
  require_positive(Rs, "Rs");
  for (double R : Rs) require(R > r, "every R must exceed r");
  require(h >= 0.0, "h must be >= 0");
  require(n >= 100, "replicas must be >= 100");
  const auto store = cache();
  run.open({"model", "r", "R", "h", "n", "estimate", "stderr"});
  std::vector<ps::EstimatorResult> est;
  for (double R : Rs) {
    const auto key = alpha_key(m, lam, r, R, h, pattern, run.master_seed());
    ps::EstimatorResult e;
    try {
      (void)key.spec();
    } catch (const ps::ParameterError& err) {
      throw ValidationError(err.what());
    }
    e = run.cfg().at("use_cache").get<bool>() ? ps::cached_alpha(store, key, n, run.threads())
                                              : ps::estimate_arm(m, key.spec(), key.lambda, h, n, key.seed(), run.threads());
    est.push_back(e);
    run.row({ps::to_string(m), num(r), num(R), num(h), num(e.n), num(e.estimate), num(e.stderr)});
  }
  if (Rs.size() >= 2 && std::all_of(est.begin(), est.end(), [](const auto& e) { return e.estimate > 0.0; })) {
    const auto s = ps::decay_exponent(Rs, est);
    run.note("decay_exponent", {{"estimate", s.estimate}, {"stderr", s.stderr}});
    if (run.present("exponent_range")) {
      const auto band = run.numbers("exponent_range");
      require(band.size() == 2 && band[0] <= band[1], "exponent_range must be [lo, hi]");
      run.check("decay exponent", s.estimate >= band[0] && s.estimate <= band[1], num(s.estimate) + " +- " + num(s.stderr));
    }
  }
  for (std::size_t i = 1; i < est.size(); ++i) {
    if (Rs[i] > Rs[i - 1]) {
      run.check("nonincreasing in R at " + num(Rs[i]),
                est[i].estimate <= est[i - 1].estimate + 3.0 * ps::combined_stderr(est[i], est[i - 1]), num(est[i].estimate));
    }
  }
  run.note("cache", store.file().string());
}

void cmd_intensity(Run& run) {
  const double L = run.number("L");
  const double lam = run.present("lambda") ? run.number("lambda") : ps::kLambdaCritical;
  const auto n = run.integer("replicas");
  const auto draws = run.integer("draws");
  require(L > 0.0 && lam > 0.0, "L and lambda must be positive");
  require(n >= 32 && draws >= 1, "need replicas >= 32 and draws >= 1");
  const auto r = ps::spectral_intensity_integral(ps::functionals::boolean_crossing(L), ps::Region::square(L + 1.0), lam, n,
                                                 run.seed(), run.threads(), draws);
  run.open({"route", "L", "lambda", "n", "estimate", "stderr"});
  for (const auto* e : {&r.uniform_x, &r.mecke}) {
    run.row({e->meta, num(L), num(lam), num(e->n), num(e->estimate), num(e->stderr)});
  }
  run.row({"mean_f2", num(L), num(lam), num(r.mean_f2.n), num(r.mean_f2.estimate), num(r.mean_f2.stderr)});
  run.check("routes agree", r.discrepancy <= 3.0, num(r.discrepancy) + " combined stderr");
  run.check("relative stderr", r.uniform_x.relative_stderr() <= 0.05 && r.mecke.relative_stderr() <= 0.05,
            num(r.uniform_x.relative_stderr()) + ", " + num(r.mecke.relative_stderr()));
}

ps::EstimatorResult alpha4_for(const Run& run, ps::Model m, double lam, double L) {
  const auto n = run.integer("alpha_replicas");
  require(n >= 100, "alpha_replicas must be >= 100");
  return ps::cached_alpha(cache(), alpha_key(m, lam, 1.0, L, 0.0, "OVOV", run.master_seed()), n, run.threads());
}

void cmd_noise(Run& run) {
  const auto m = model_of(run);
  const double lam = intensity_of(run, m);
  const double L = run.number("L");
  const auto ts = run.numbers("ts");
  const auto n = run.integer("replicas");
  require(L > 1.0, "L must exceed 1");
  require_positive(ts, "ts", true);
  require(n >= 32, "replicas must be >= 32");
  ps::DynamicsKind dyn;
  try {
    dyn = ps::parse_dynamics(run.text("dynamics"));
  } catch (const ps::ParameterError& e) {
    throw ValidationError(e.what());
  }
  require(!(m == ps::Model::boolean && dyn == ps::DynamicsKind::frozen), "frozen dynamics needs the voronoi model");
  const auto a4 = alpha4_for(run, m, lam, L);
  const auto c = ps::noise_curve(m, dyn, L, ts, n, run.seed(), run.threads(), a4.estimate, lam);
  run.open({"model", "dynamics", "L", "t", "u", "n", "p_differ", "p_stderr", "cov", "cov_stderr"});
  for (const auto& p : c.points) {
    run.row({ps::to_string(m), ps::to_string(dyn), num(L), num(p.t), num(p.u), num(std::uint64_t{n}), num(p.p_differ.estimate),
             num(p.p_differ.stderr), num(p.cov.estimate), num(p.cov.stderr)});
  }
  run.note("alpha4", {{"estimate", a4.estimate}, {"stderr", a4.stderr}, {"n", a4.n}});
  run.note("variance", c.variance.estimate);
  run.note("evaluations", {{"base", c.base_evaluations}, {"evolved", c.evolved_evaluations}});
  for (std::size_t j = 0; j < c.points.size(); ++j) {
    const auto& p = c.points[j];
    if (p.t == 0.0) {
      run.check("t=0 identities", p.p_differ.estimate == 0.0 && p.cov.estimate == c.variance.estimate, num(p.cov.estimate));
    }
    for (std::size_t i = 0; i < j; ++i) {
      const auto& q = c.points[i];
      if (q.t <= p.t) {
        run.check("monotone " + num(q.t) + " -> " + num(p.t),
                  q.p_differ.estimate <= p.p_differ.estimate + 3.0 * ps::combined_stderr(p.p_differ, q.p_differ), "");
      }
    }
  }
}

void cmd_quasimult(Run& run) {
  const auto m = model_of(run);
  const double lam = intensity_of(run, m);
  const auto n = run.integer("replicas");
  const auto n_max = run.integer("max_replicas");
  const double band = run.number("band");
  require(n >= 100 && n_max >= n, "need 100 <= replicas <= max_replicas");
  require(band >= 1.0, "band must be >= 1");
  std::vector<ps::ScaleTriple> triples;
  for (const auto& t : run.cfg().at("triples")) triples.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
  for (const auto& t : triples) require(1.0 <= t.r1 && t.r1 <= t.r2 && t.r2 <= t.r3, "triples need 1 <= r1 <= r2 <= r3");
  const auto store = cache();
  const ps::AlphaProvider alpha = [&](double r, double R, std::size_t k) {
    return ps::cached_alpha(store, alpha_key(m, lam, r, R, 0.0, "OVOV", run.master_seed()), k, run.threads());
  };
  const auto tab = ps::quasimult_table(alpha, triples, n, n_max);
  run.open({"model", "r1", "r2", "r3", "alpha12", "alpha12_stderr", "alpha23", "alpha23_stderr", "alpha13", "alpha13_stderr",
            "ratio", "ratio_stderr", "split_product", "split_product_stderr"});
  for (const auto& r : tab.rows) {
    run.row({ps::to_string(m), num(r.scales.r1), num(r.scales.r2), num(r.scales.r3), num(r.a12.estimate), num(r.a12.stderr),
             num(r.a23.estimate), num(r.a23.stderr), num(r.a13.estimate), num(r.a13.stderr), num(r.ratio), num(r.stderr),
             r.has_independence ? num(r.product) : "", r.has_independence ? num(r.product_stderr) : ""});
    run.check("split bound " + num(r.scales.r2), r.independence_holds(), num(r.a13.estimate) + " vs " + num(r.product));
  }
  run.check("common band", tab.within_band(band), "[" + num(tab.band_low) + ", " + num(tab.band_high) + "]");
}

void cmd_collapse(Run& run) {
  const double lam = run.present("lambda") ? run.number("lambda") : ps::kLambdaCritical;
  const auto Ls = run.numbers("Ls");
  const auto us = run.numbers("us");
  const auto n = run.integer("replicas");
  require_positive(Ls, "Ls");
  require_positive(us, "us");
  require(Ls.size() >= 3, "collapse needs at least 3 values of L");
  require(n >= 32, "replicas must be >= 32");
  std::vector<double> a4;
  for (double L : Ls) a4.push_back(alpha4_for(run, ps::Model::boolean, lam, L).estimate);
  const auto res = ps::instability_collapse(Ls, a4, us, n, run.seed(), run.threads(), lam);
  run.open({"L", "u", "t", "alpha4", "n", "estimate", "stderr"});
  for (const auto& r : res.rows) {
    run.row({num(r.L), num(r.u), num(r.t), num(r.alpha4), num(r.p_differ.n), num(r.p_differ.estimate), num(r.p_differ.stderr)});
    if (r.u <= 0.01) run.check("small u at L=" + num(r.L), r.p_differ.estimate <= 0.05, num(r.p_differ.estimate));
    if (r.u >= 10.0) run.check("large u at L=" + num(r.L), r.p_differ.estimate >= 0.1, num(r.p_differ.estimate));
  }
  for (std::size_t j = 0; j < us.size(); ++j) run.check("spread at u=" + num(us[j]), res.spread[j] <= 0.15, num(res.spread[j]));
  run.note("spread", res.spread);
}

void cmd_hoeffding(Run& run) {
  const auto pts = run.integer("n_points");
  const auto reps = run.integer("replicas");
  const auto funcs = run.integer("cube_functions");
  require(pts >= 1 && pts <= 16, "n_points must lie in 1..16");
  require(reps >= 1 && funcs >= 1, "replicas and cube_functions must be positive");
  const auto r = ps::run_hoeffding_suite(pts, reps, run.seed(), run.threads(), funcs);
  const double tol = r.tolerance;
  run.open({"subject", "quantity", "value", "tolerance", "passed"});
  auto line = [&](const std::string& subj, const std::string& q, double v, double t) {
    run.row({subj, q, num(v), num(t), v <= t ? "true" : "false"});
  };
  line("random cubes", "parseval", r.cubes.parseval, tol);
  line("random cubes", "reconstruction", r.cubes.reconstruction, tol);
  line("random cubes", "direct coefficients", r.cubes.direct, tol);
  line("random cubes", "projection identity", r.cubes.projection, tol);
  line("random cubes", "alternating sum", r.cubes.alternating, tol);
  line("random cubes", "vanishing coefficients", r.cubes.vanishing, tol);
  for (const auto& c : r.correlations) {
    line(c.functional, "phi1 - 2 psi1", c.first_order, tol);
    line(c.functional, "psi - phi", c.psi_excess, tol);
    line(c.functional, "psi2 - E Z1^2", c.z1, tol);
    line(c.functional, "phi2 - sum E Zi^2", c.z_sum, tol);
    line(c.functional, "replicas over 9 psi2 + 48 P(E)", static_cast<double>(c.lemma_failures), 0.0);
    line(c.functional, "replicas over 12 psi2 + 48 P(E)", static_cast<double>(c.loose_lemma_failures), 0.0);
    run.note(c.functional, {{"nontrivial_replicas", c.nontrivial},
                            {"mark_vectors", c.mark_vectors},
                            {"marks_over_9", c.lemma_mark_failures},
                            {"marks_over_12", c.loose_lemma_mark_failures}});
  }
  run.check("cube identities", r.cubes_pass() && r.identities_pass(), "");
  run.check("first order", r.first_order_pass(), "");
  run.check("psi <= phi", r.ordering_pass(), "");
  run.check("second order identities", r.z_pass(), "");
  run.check("second order bound, constant 9", r.bound_pass(), "");
  run.check("second order bound, constant 12", r.loose_bound_pass(), "");
}

void cmd_calibrate(Run& run) {
  const auto Ls = run.numbers("Ls");
  const double tol = run.number("tolerance");
  const auto n = run.integer("replicas");
  require_positive(Ls, "Ls");
  require(tol > 0.0, "tolerance must be positive");
  require(n >= 10, "replicas must be >= 10");
  run.open({"step", "lambda", "gap"});
  ps::CalibrationResult c;
  try {
    c = ps::calibrate_lambda_c(Ls, tol, run.seed(), n, run.threads(), run.number("lo"), run.number("hi"));
  } catch (const ps::CalibrationError& e) {
    run.check("bracket", false, e.what());
    return;
  }
  for (std::size_t i = 0; i < c.probed.size(); ++i) run.row({num(std::uint64_t{i}), num(c.probed[i]), num(c.gap[i])});
  run.row({"result", num(c.lambda), ""});
  run.note("lambda", c.lambda);
  run.check("near reference value", std::fabs(c.lambda - ps::kLambdaCritical) <= 0.02, num(c.lambda));
}

void cmd_ou_vs_frozen(Run& run) {
  const double L = run.number("L");
  const auto ts = run.numbers("ts");
  const auto n = run.integer("replicas");
  require(L > 1.0, "L must exceed 1");
  require_positive(ts, "ts", true);
  require(n >= 32, "replicas must be >= 32");
  const auto rows = ps::ou_vs_frozen_covariance(L, ts, n, run.seed(), run.threads());
  run.open({"L", "t", "n", "cov_ou", "cov_ou_stderr", "cov_frozen", "cov_frozen_stderr", "paired_difference",
            "paired_stderr"});
  for (const auto& r : rows) {
    run.row({num(L), num(r.t), num(std::uint64_t{n}), num(r.cov_ou.estimate), num(r.cov_ou.stderr), num(r.cov_frozen.estimate),
             num(r.cov_frozen.stderr), num(r.paired_difference.estimate), num(r.paired_difference.stderr)});
    run.check("ou <= frozen at t=" + num(r.t), r.ou_not_above(), num(r.cov_ou.estimate) + " vs " + num(r.cov_frozen.estimate));
  }
}

struct Command {
  std::string name;
  std::string help;
  cli::Schema schema;
  std::function<void(Run&)> run;
};

cli::Schema common(const std::string& name, cli::Schema s) {
  s.push_back({"seed", Kind::integer, 1});
  s.push_back({"threads", Kind::integer, 1});
  s.push_back({"output", Kind::string, name + ".csv"});
  s.push_back({"check", Kind::boolean, false});
  return s;
}

std::vector<Command> commands() {
  const json grid = {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
  std::vector<Command> c;
  c.push_back({"sample", "draw one configuration",
               common("sample", {{"model", Kind::string, "boolean"}, {"L", Kind::number, 4}, {"lambda", Kind::number, nullptr},
                                 {"replica", Kind::integer, 0}}),
               cmd_sample});
  c.push_back({"crossing-prob", "left-right crossing probabilities",
               common("crossing-prob", {{"model", Kind::string, "boolean"}, {"Ls", Kind::numbers, {8}},
                                        {"lambda", Kind::number, nullptr}, {"replicas", Kind::integer, 2000}}),
               cmd_crossing});
  c.push_back({"arm-prob", "arm event probabilities over annuli",
               common("arm-prob", {{"model", Kind::string, "boolean"}, {"r", Kind::number, 1}, {"Rs", Kind::numbers, {4, 8, 16}},
                                   {"h", Kind::number, 0}, {"pattern", Kind::string, "OVOV"}, {"lambda", Kind::number, nullptr},
                                   {"replicas", Kind::integer, 2000}, {"use_cache", Kind::boolean, true},
                                   {"exponent_range", Kind::numbers, nullptr}}),
               cmd_arm});
  c.push_back({"spectral-intensity", "spectral intensity of the crossing event by two routes",
               common("spectral-intensity", {{"L", Kind::number, 8}, {"lambda", Kind::number, nullptr},
                                             {"replicas", Kind::integer, 3000}, {"draws", Kind::integer, 20}}),
               cmd_intensity});
  c.push_back({"noise-curve", "P(f != f^t) and Cov(f, f^t) over a time grid",
               common("noise-curve", {{"model", Kind::string, "boolean"}, {"dynamics", Kind::string, "ou"}, {"L", Kind::number, 8},
                                      {"ts", Kind::numbers, grid}, {"lambda", Kind::number, nullptr},
                                      {"replicas", Kind::integer, 2000}, {"alpha_replicas", Kind::integer, 4000}}),
               cmd_noise});
  c.push_back({"quasimult", "four-arm quasi-multiplicativity ratios",
               common("quasimult", {{"model", Kind::string, "boolean"}, {"triples", Kind::triples, {{1, 4, 32}, {1, 8, 32}}},
                                    {"lambda", Kind::number, nullptr}, {"replicas", Kind::integer, 2000},
                                    {"max_replicas", Kind::integer, 64000}, {"band", Kind::number, 4}}),
               cmd_quasimult});
  c.push_back({"collapse", "instability curves on the rescaled axis",
               common("collapse", {{"Ls", Kind::numbers, {8, 16, 32}}, {"us", Kind::numbers, {0.01, 0.1, 1, 10}},
                                   {"lambda", Kind::number, nullptr}, {"replicas", Kind::integer, 4000},
                                   {"alpha_replicas", Kind::integer, 4000}}),
               cmd_collapse});
  c.push_back({"hoeffding-check", "exact Hoeffding identities on small configurations",
               common("hoeffding-check", {{"n_points", Kind::integer, 10}, {"replicas", Kind::integer, 200},
                                          {"cube_functions", Kind::integer, 200}}),
               cmd_hoeffding});
  c.push_back({"calibrate-lambda", "finite-size estimate of the critical intensity",
               common("calibrate-lambda", {{"Ls", Kind::numbers, {8, 16, 32}}, {"tolerance", Kind::number, 0.005},
                                           {"replicas", Kind::integer, 4000}, {"lo", Kind::number, 0.25},
                                           {"hi", Kind::number, 0.5}}),
               cmd_calibrate});
  c.push_back({"ou-vs-frozen", "Voronoi covariance under OU and frozen dynamics",
               common("ou-vs-frozen", {{"L", Kind::number, 8}, {"ts", Kind::numbers, grid}, {"replicas", Kind::integer, 4000}}),
               cmd_ou_vs_frozen});
  return c;
}

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> threads, replicas, n_points, seed;
  std::optional<double> L, lambda;
  std::optional<std::string> output, model;
  bool check = false;
};

int execute(const Command& cmd, const Overrides& o) {
  json given = o.config.empty() ? json::object() : cli::load_config_file(o.config);
  auto set = [&](const std::string& key, const json& v) {
    bool known = false;
    for (const auto& f : cmd.schema) known = known || f.name == key;
    if (!known) throw ValidationError(cmd.name + " does not take --" + key);
    given[key] = v;
  };
  if (o.threads) set("threads", *o.threads);
  if (o.replicas) set("replicas", *o.replicas);
  if (o.n_points) set("n_points", *o.n_points);
  if (o.seed) set("seed", *o.seed);
  if (o.L) set("L", *o.L);
  if (o.lambda) set("lambda", *o.lambda);
  if (o.output) set("output", *o.output);
  if (o.model) set("model", *o.model);
  if (o.check) set("check", true);
  Run run(cmd.name, cli::apply_schema(cmd.schema, given, cmd.name));
  ps::Stopwatch sw;
  cmd.run(run);
  run.write_sidecar(sw.seconds());
  const bool check_mode = run.cfg().at("check").get<bool>();
  if (!run.passed()) {
    std::cerr << cmd.name << ": some checks failed (see " << ps::io::sidecar_path(run.output()).string() << ")\n";
    if (check_mode) return kExitCheck;
  }
  std::cout << run.output().string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"percospec: spectral and pivotal statistics of planar continuum percolation"};
  app.require_subcommand(1);
  const auto cmds = commands();
  Overrides o;
  std::vector<std::pair<const Command*, CLI::App*>> subs;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--threads", o.threads, "worker threads (does not change results)");
    sub->add_option("--replicas", o.replicas, "replica count");
    sub->add_option("--n-points", o.n_points, "background points");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--L", o.L, "box half-width");
    sub->add_option("--lambda", o.lambda, "intensity");
    sub->add_option("--model", o.model, "boolean or voronoi");
    sub->add_option("--out", o.output, "CSV output path");
    sub->add_flag("--check", o.check, "exit 3 when a check fails");
    subs.push_back({&c, sub});
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }
  for (const auto& [c, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      return execute(*c, o);
    } catch (const ValidationError& e) {
      std::cerr << "invalid configuration: " << e.what() << '\n';
      return kExitValidation;
    } catch (const ps::ParameterError& e) {
      std::cerr << "invalid parameter: " << e.what() << '\n';
      return kExitValidation;
    } catch (const ps::UsageError& e) {
      std::cerr << "invalid request: " << e.what() << '\n';
      return kExitValidation;
    } catch (const ps::SizeError& e) {
      std::cerr << "too large: " << e.what() << '\n';
      return kExitValidation;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  std::cerr << app.help();
  return kExitValidation;
}
