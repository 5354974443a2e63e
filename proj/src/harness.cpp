#include "srma/harness.hpp"

#include "srma/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <limits>
#include <sstream>

namespace srma {
namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

PolicyFamily parse_family(std::string_view name) {
  if (name == "gaussian") return PolicyFamily::kGaussian;
  if (name == "cauchy") return PolicyFamily::kCauchy;
  throw std::invalid_argument("unknown policy family '" + std::string(name) + "'");
}

template <typename T>
T checked_narrow(long value, SectionReader& reader, std::string_view key) {
  if (value < 0 || value > static_cast<long>(std::numeric_limits<T>::max()))
    reader.fail(key, "out of range");
  return static_cast<T>(value);
}

struct MeanStd {
  std::optional<double> mean;
  std::optional<double> std;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  out.mean = mean;
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  make_environment(env);
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  if (iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
  if (seeds < 1) throw std::invalid_argument("seeds must be at least 1");
  if (eval_every < 0 || eval_rollouts < 1) throw std::invalid_argument("invalid evaluation settings");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(w_max > 0.0)) throw std::invalid_argument("w_max must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (!(kl_anchor >= 0.0)) throw std::invalid_argument("kl_anchor must be nonnegative");
  if (feature_count < 1) throw std::invalid_argument("feature_count must be at least 1");
  if (!(feature_bandwidth > 0.0) || !(feature_cap > 0.0))
    throw std::invalid_argument("feature_bandwidth and feature_cap must be positive");
  if (algorithms.empty()) throw std::invalid_argument("no algorithm sections");
  for (std::size_t i = 0; i < algorithms.size(); ++i) make_algo_config(*this, algorithms[i], 0).validate();
}

ExperimentConfig parse_experiment(const IniDocument& doc) {
  const auto check = [&](SectionReader& reader, std::string_view key, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      reader.fail(key, e.what());
    }
  };
  ExperimentConfig cfg;
  SectionReader top(doc, doc.sections.front());
  if (auto v = top.text("env")) cfg.env = *v;
  if (auto v = top.number("gamma")) cfg.gamma = *v;
  if (auto v = top.number("eta")) cfg.eta = *v;
  if (auto v = top.integer("iterations")) cfg.iterations = *v;
  if (auto v = top.integer("seeds")) cfg.seeds = checked_narrow<int>(*v, top, "seeds");
  if (auto v = top.unsigned_integer("master_seed")) cfg.master_seed = *v;
  if (auto v = top.integer("eval_every")) cfg.eval_every = checked_narrow<int>(*v, top, "eval_every");
  if (auto v = top.integer("eval_rollouts")) cfg.eval_rollouts = checked_narrow<int>(*v, top, "eval_rollouts");
  if (auto v = top.text("eval_policy")) check(top, "eval_policy", [&] { cfg.eval_policy = parse_eval_policy(*v); });
  if (auto v = top.text("output_dir")) cfg.output_dir = *v;
  if (auto v = top.number("sigma")) cfg.sigma = *v;
  if (auto v = top.number("w_max")) cfg.w_max = *v;
  if (auto v = top.integer("batch_size")) cfg.batch_size = checked_narrow<int>(*v, top, "batch_size");
  if (auto v = top.number("kl_anchor")) cfg.kl_anchor = *v;
  if (auto v = top.integer("feature_count")) cfg.feature_count = checked_narrow<int>(*v, top, "feature_count");
  if (auto v = top.number("feature_bandwidth")) cfg.feature_bandwidth = *v;
  if (auto v = top.number("feature_cap")) cfg.feature_cap = *v;
  if (auto v = top.boolean("timing")) cfg.timing = *v;
  if (auto v = top.integer("workers")) cfg.workers = checked_narrow<unsigned>(*v, top, "workers");
  top.reject_unknown();

  check(top, "env", [&] { make_environment(cfg.env); });

  for (std::size_t i = 1; i < doc.sections.size(); ++i) {
    const IniSection& section = doc.sections[i];
    SectionReader reader(doc, section);
    AlgorithmSpec spec;
    spec.id = section.name;
    const auto algorithm = reader.text("algorithm");
    if (!algorithm) reader.fail("algorithm", "missing in section [" + section.name + "]");
    check(reader, "algorithm", [&] { spec.algorithm = parse_algorithm(*algorithm); });
    if (auto v = reader.text("family")) check(reader, "family", [&] { spec.family = parse_family(*v); });
    if (auto v = reader.text("geometry")) check(reader, "geometry", [&] { spec.geometry = parse_geometry(*v); });
    spec.beta = reader.number("beta");
    spec.c1 = reader.number("c1");
    spec.sigma = reader.number("sigma");
    spec.eta = reader.number("eta");
    spec.w_max = reader.number("w_max");
    reader.reject_unknown();
    if (spec.beta && spec.c1) reader.fail("c1", "give either beta or c1, not both");
    check(reader, "algorithm", [&] { make_algo_config(cfg, spec, 0).validate(); });
    cfg.algorithms.push_back(std::move(spec));
  }
  if (cfg.algorithms.empty()) throw ConfigError(doc.source, 0, "", "no algorithm sections");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(doc.source, 0, "", e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return parse_experiment(load_ini(path));
}

FeatureMap<double> make_features(const ExperimentConfig& cfg, const Environment& env) {
  return FeatureMap<double>::evenly_spaced(env.state_lo(), env.state_hi(), cfg.feature_count,
                                           cfg.feature_bandwidth, cfg.feature_cap);
}

AlgoConfig make_algo_config(const ExperimentConfig& cfg, const AlgorithmSpec& spec, int seed) {
  AlgoConfig algo;
  algo.algorithm = spec.algorithm;
  algo.eta = spec.eta.value_or(cfg.eta);
  if (spec.beta) {
    algo.beta = *spec.beta;
  } else if (spec.c1) {
    algo.beta = std::min(*spec.c1 * algo.eta, 1.0);
  } else {
    algo.beta = kDefaultBeta;
  }
  algo.gamma = cfg.gamma;
  algo.iterations = cfg.iterations;
  algo.batch_size = cfg.batch_size;
  algo.geometry = BregmanGeometry::euclidean();
  if (spec.geometry == GeometryKind::kPolicyKL) {
    algo.geometry.kind = GeometryKind::kPolicyKL;
    algo.geometry.anchor = cfg.kl_anchor;
  }
  algo.family = spec.family;
  algo.sigma = spec.sigma.value_or(cfg.sigma);
  algo.geometry.family = algo.family;
  algo.geometry.sigma = algo.sigma;
  algo.seed = derive_seed(cfg.master_seed, fnv1a(spec.id) ^ mix_seed(static_cast<std::uint64_t>(seed)));
  algo.w_max = spec.w_max.value_or(cfg.w_max);
  algo.eval_every = cfg.eval_every;
  algo.eval_rollouts = cfg.eval_rollouts;
  algo.eval_policy = cfg.eval_policy;
  algo.timing = cfg.timing;
  return algo;
}

ExperimentResult execute_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto env = make_environment(cfg.env);
  const FeatureMap<double> features = make_features(cfg, *env);

  ExperimentResult out;
  out.iterations = cfg.iterations;
  for (const auto& spec : cfg.algorithms) out.algorithm_ids.push_back(spec.id);
  const std::size_t n_seeds = static_cast<std::size_t>(cfg.seeds);
  out.runs.resize(cfg.algorithms.size() * n_seeds);
  parallel_for(
      out.runs.size(),
      [&](std::size_t i) {
        const AlgorithmSpec& spec = cfg.algorithms[i / n_seeds];
        const int seed = static_cast<int>(i % n_seeds);
        SeedRun& run = out.runs[i];
        run.algorithm = spec.id;
        run.seed = seed;
        run.result = run_algorithm(make_algo_config(cfg, spec, seed), *env, features);
        for (RunRecord& rec : run.result.records) {
          rec.algorithm = spec.id;
          rec.seed = static_cast<std::uint64_t>(seed);
        }
      },
      cfg.workers);
  return out;
}

void write_raw_csv(std::ostream& out, const ExperimentResult& result) {
  out << "algorithm,seed,k,return,eval_return,breg_grad_norm,ghat_norm,theta_norm,wall_ms,diverged\n";
  for (const SeedRun& run : result.runs)
    for (const RunRecord& r : run.result.records)
      out << r.algorithm << ',' << r.seed << ',' << r.k << ',' << format_double(r.ret) << ','
          << optional_field(r.eval_return) << ',' << format_double(r.breg_grad_norm) << ','
          << format_double(r.ghat_norm) << ',' << format_double(r.theta_norm) << ','
          << format_double(r.wall_ms) << ',' << (r.diverged ? 1 : 0) << '\n';
}

void write_aggregate_csv(std::ostream& out, const ExperimentResult& result) {
  out << "algorithm,k,mean_return,std_return,mean_breg_grad_norm,std_breg_grad_norm,n_seeds_ok,"
         "n_seeds_diverged\n";
  for (const std::string& id : result.algorithm_ids) {
    std::vector<const SeedRun*> runs;
    for (const SeedRun& run : result.runs)
      if (run.algorithm == id) runs.push_back(&run);
    for (long k = 1; k <= result.iterations; ++k) {
      std::vector<double> returns;
      std::vector<double> norms;
      int diverged = 0;
      for (const SeedRun* run : runs) {
        const auto& recs = run->result.records;
        if (run->result.diverged && recs.back().k <= k) ++diverged;
        if (static_cast<std::size_t>(k) > recs.size()) continue;
        const RunRecord& r = recs[static_cast<std::size_t>(k - 1)];
        if (r.diverged) continue;
        returns.push_back(r.ret);
        norms.push_back(r.breg_grad_norm);
      }
      const MeanStd ret = mean_std(returns);
      const MeanStd norm = mean_std(norms);
      out << id << ',' << k << ',' << optional_field(ret.mean) << ',' << optional_field(ret.std) << ','
          << optional_field(norm.mean) << ',' << optional_field(norm.std) << ',' << returns.size()
          << ',' << diverged << '\n';
    }
  }
}

std::vector<AlgorithmSummary> summarize(const ExperimentResult& result) {
  std::vector<AlgorithmSummary> out;
  for (const std::string& id : result.algorithm_ids) {
    AlgorithmSummary s;
    s.algorithm = id;
    std::vector<double> finals;
    int reached = 0;
    for (const SeedRun& run : result.runs) {
      if (run.algorithm != id) continue;
      ++s.seeds;
      if (run.result.diverged) ++s.diverged;
      const auto& recs = run.result.records;
      if (std::any_of(recs.begin(), recs.end(), [](const RunRecord& r) { return r.reached_terminal; }))
        ++reached;
      if (run.result.diverged) continue;
      for (auto it = recs.rbegin(); it != recs.rend(); ++it)
        if (it->eval_return) {
          finals.push_back(*it->eval_return);
          break;
        }
    }
    const MeanStd ms = mean_std(finals);
    s.final_eval_mean = ms.mean;
    s.final_eval_std = ms.std;
    s.reached_terminal_fraction = s.seeds ? static_cast<double>(reached) / s.seeds : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  out << "algorithm,seeds,diverged,final_eval_mean,final_eval_std,reached_terminal_fraction\n";
  for (const AlgorithmSummary& s : summarize(result))
    out << s.algorithm << ',' << s.seeds << ',' << s.diverged << ',' << optional_field(s.final_eval_mean)
        << ',' << optional_field(s.final_eval_std) << ',' << format_double(s.reached_terminal_fraction)
        << '\n';
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result = execute_experiment(cfg);
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + cfg.output_dir.string() + "': " + ec.message());
  std::ostringstream raw, aggregate, summary;
  write_raw_csv(raw, result);
  write_aggregate_csv(aggregate, result);
  write_summary_csv(summary, result);
  write_file(cfg.output_dir / "raw.csv", raw.str());
  write_file(cfg.output_dir / "aggregate.csv", aggregate.str());
  write_file(cfg.output_dir / "summary.csv", summary.str());
  return result;
}

ProbeConfig parse_probe_config(const IniDocument& doc) {
  if (doc.sections.size() > 1)
    throw ConfigError(doc.source, doc.sections[1].line, "", "probe configs take no sections");
  ProbeConfig cfg;
  SectionReader top(doc, doc.sections.front());
  if (auto v = top.integer("dimension")) cfg.dimension = *v;
  if (auto v = top.number("smoothness")) cfg.smoothness = *v;
  if (auto v = top.number("noise")) cfg.noise = *v;
  if (auto v = top.number_list("beta")) cfg.betas = *v;
  if (auto v = top.number("eta")) cfg.eta = *v;
  if (auto v = top.integer("iterations")) cfg.iterations = *v;
  if (auto v = top.unsigned_integer("seed")) cfg.seed = *v;
  if (auto v = top.integer("replicates")) cfg.replicates = checked_narrow<int>(*v, top, "replicates");
  if (auto v = top.text("output")) cfg.output = *v;
  top.reject_unknown();
  if (cfg.dimension < 1) top.fail("dimension", "must be at least 1");
  if (!(cfg.smoothness >= 1.0)) top.fail("smoothness", "must be at least 1");
  if (!(cfg.noise >= 0.0)) top.fail("noise", "must be nonnegative");
  for (double b : cfg.betas)
    if (!(b > 0.0 && b <= 1.0)) top.fail("beta", "each beta must lie in (0, 1]");
  if (!(cfg.eta >= 0.0)) top.fail("eta", "must be nonnegative");
  if (cfg.iterations < 0) top.fail("iterations", "must be nonnegative");
  if (cfg.replicates < 1) top.fail("replicates", "must be at least 1");
  return cfg;
}

ProbeConfig load_probe_config(const std::filesystem::path& path) {
  return parse_probe_config(load_ini(path));
}

void write_probe_csv(std::ostream& out, const ProbeConfig& cfg) {
  const SyntheticObjective obj = make_synthetic(cfg.dimension, cfg.smoothness, cfg.noise, cfg.seed);
  out << "beta,k,epsilon\n";
  for (double beta : cfg.betas) {
    const std::vector<double> eps =
        tracking_error_probe(obj, beta, cfg.eta, cfg.iterations, cfg.seed, cfg.replicates);
    for (std::size_t k = 0; k < eps.size(); ++k)
      out << format_double(beta) << ',' << (k + 1) << ',' << format_double(eps[k]) << '\n';
  }
}

}  // namespace srma
