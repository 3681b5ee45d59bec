#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "percospec/boolean/estimate.hpp"
#include "percospec/boolean/raster.hpp"
#include "percospec/experiments/noise.hpp"
#include "percospec/voronoi/connectivity.hpp"

namespace percospec {

/// Arm probability estimate for either model; h > 0 selects the raster evaluator (Boolean only).
inline EstimatorResult estimate_arm(Model model, const ArmEventSpec& spec, double lambda, double h, std::size_t n,
                                    const SeedSpec& seed, unsigned threads = 1) {
  if (h < 0.0 || !std::isfinite(h)) throw ParameterError("raster step h must be finite and >= 0");
  if (model == Model::voronoi) {
    if (h > 0.0) throw UsageError("raster evaluation is only available for the Boolean model");
    return estimate_voronoi_arm_probability(spec, n, seed, threads);
  }
  if (h == 0.0) return estimate_arm_probability(spec, lambda, n, seed, threads);
  if (n < 100) throw ParameterError("estimate_arm needs n >= 100");
  spec.validate();
  Stopwatch sw;
  const Region window = spec.region.padded(kBooleanPad);
  const auto hits = parallel_map(n, threads, [&](std::size_t i) -> char {
    const auto cfg = sample_poisson(lambda, window, seed.with_replica(i));
    return arm_event_raster(cfg.view(), spec, h) ? 1 : 0;
  });
  std::uint64_t s = 0;
  for (char c : hits) s += static_cast<std::uint64_t>(c);
  EstimatorResult r = bernoulli_estimate(s, n);
  r.seed = seed;
  r.meta = "boolean raster arm " + spec.pattern;
  r.wall_seconds = sw.seconds();
  return r;
}

struct AlphaKey {
  Model model = Model::boolean;
  double lambda = kLambdaCritical;
  double r = 1.0;
  double R = 2.0;
  double h = 0.0;
  std::string pattern = "OVOV";
  std::uint64_t seed_family = 0;

  [[nodiscard]] std::string text() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s\t%.17g\t%.17g\t%.17g\t%.17g\t%s\t%llu", to_string(model).c_str(), lambda, r, R, h,
                  pattern.c_str(), static_cast<unsigned long long>(seed_family));
    return buf;
  }
  /// Seed of the estimate: one stream per key within a seed family.
  [[nodiscard]] SeedSpec seed() const { return SeedSpec(seed_family, "alpha").with_purpose(text()); }
  [[nodiscard]] ArmEventSpec spec() const {
    if (pattern == "OVO|VOV") return arms::three_arm_half(r, R);
    if (pattern == "OV|VO") return arms::two_arm_quarter(r, R);
    ArmEventSpec s{Region::annulus({0, 0}, r, R), pattern};
    s.validate();
    return s;
  }
};

inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("PERCOSPEC_CACHE_DIR"); env != nullptr && *env != '\0') return env;
  return ".percospec-cache";
}

/*
 * Tab-separated store of arm probability estimates, one line per key. Rewrites go through a
 * temporary file and a rename, so readers never see a partial file.
 */
class AlphaCache {
 public:
  explicit AlphaCache(std::filesystem::path dir = default_cache_dir()) : dir_(std::move(dir)) {}

  [[nodiscard]] std::filesystem::path file() const { return dir_ / "alpha.tsv"; }

  [[nodiscard]] std::optional<EstimatorResult> lookup(const AlphaKey& key, std::size_t min_n = 0) const {
    for (const auto& e : load()) {
      if (e.key == key.text() && e.value.n >= min_n) return e.value;
    }
    return std::nullopt;
  }

  void store(const AlphaKey& key, const EstimatorResult& value) const {
    auto entries = load();
    bool replaced = false;
    for (auto& e : entries) {
      if (e.key == key.text()) {
        e.value = value;
        replaced = true;
      }
    }
    if (!replaced) entries.push_back({key.text(), value});
    std::filesystem::create_directories(dir_);
    const auto tmp = dir_ / "alpha.tsv.tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << "model\tlambda\tr\tR\th\tpattern\tseed\tn\testimate\tstderr\n";
      char buf[128];
      for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "\t%llu\t%.17g\t%.17g", static_cast<unsigned long long>(e.value.n),
                      e.value.estimate, e.value.stderr);
        out << e.key << buf << '\n';
      }
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, file());
  }

 private:
  struct Entry {
    std::string key;
    EstimatorResult value;
  };

  [[nodiscard]] std::vector<Entry> load() const {
    std::vector<Entry> out;
    std::ifstream in(file());
    if (!in) return out;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      std::string tok;
      while (std::getline(ss, tok, '\t')) f.push_back(tok);
      if (f.size() != 10) continue;
      Entry e;
      for (int i = 0; i < 7; ++i) e.key += (i ? "\t" : "") + f[i];
      e.value.n = std::stoull(f[7]);
      e.value.estimate = std::stod(f[8]);
      e.value.stderr = std::stod(f[9]);
      e.value.seed = SeedSpec(std::stoull(f[6]), "alpha");
      e.value.meta = "cached";
      out.push_back(e);
    }
    return out;
  }

  std::filesystem::path dir_;
};

/// Cached estimate with at least n replicas; computes and stores it when missing.
inline EstimatorResult cached_alpha(const AlphaCache& cache, const AlphaKey& key, std::size_t n, unsigned threads = 1) {
  if (auto hit = cache.lookup(key, n)) return *hit;
  EstimatorResult r = estimate_arm(key.model, key.spec(), key.lambda, key.h, n, key.seed(), threads);
  cache.store(key, r);
  return r;
}

}  // namespace percospec
