/*
 * Copyright 2026 The fairrank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairrank/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fairrank/dataset.h"
#include "fairrank/eodds.h"
#include "fairrank/eopp.h"
#include "fairrank/error.h"
#include "fairrank/eval.h"
#include "fairrank/io.h"
#include "fairrank/position_bias.h"
#include "fairrank/rng.h"
#include "fairrank/simulate.h"
#include "json.hpp"

#ifndef FAIRRANK_VERSION
#define FAIRRANK_VERSION "0.0.0"
#endif

namespace fairrank::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t default_threads() {
  const char* env = std::getenv(kThreadsEnv);
  if (env == nullptr || *env == '\0') return 1;
  std::size_t n = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, n);
  if (res.ec != std::errc() || res.ptr != end || n == 0) {
    throw UsageFailure(std::string(kThreadsEnv) + " must be a positive integer");
  }
  return n;
}

double parse_real(const std::string& text, const char* what) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageFailure(std::string("bad value for ") + what + ": '" + text + "'");
  }
  return v;
}

// "start:stop:step" or a comma-separated list.
std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageFailure("--alphas expects start:stop:step");
    const double start = parse_real(parts[0], "--alphas");
    const double stop = parse_real(parts[1], "--alphas");
    const double step = parse_real(parts[2], "--alphas");
    if (!(step > 0.0) || stop < start) throw UsageFailure("--alphas needs step > 0, stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
      // Snap to 12 decimals so 0.1 * 3 prints as 0.3.
      out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_real(p, "--alphas"));
  }
  if (out.empty()) throw UsageFailure("--alphas is empty");
  return out;
}

ordered_json option_values(const CLI::App& sub) {
  ordered_json config = ordered_json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_expected_min() == 0) {
      config[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      std::string joined;
      for (const std::string& r : opt->results()) {
        if (!joined.empty()) joined += ',';
        joined += r;
      }
      config[name] = joined;
    } else {
      config[name] = opt->get_default_str();
    }
  }
  return config;
}

void write_metadata(const fs::path& path, const CLI::App& sub,
                    const std::vector<std::string>& args) {
  ordered_json j;
  j["format"] = "fairrank.metadata";
  j["version"] = 1;
  j["tool"] = "fairrank";
  j["tool_version"] = FAIRRANK_VERSION;
  j["rng"] = kRngName;
  j["subcommand"] = sub.get_name();
  j["config"] = option_values(sub);
  j["argv"] = args;
  write_file_atomic(path, j.dump(2) + "\n");
}

fs::path meta_path(const fs::path& out) {
  fs::path p = out;
  p += ".meta.json";
  return p;
}

ValidatedDataset load_log(const std::string& path, std::int32_t max_label = 1) {
  return validate_dataset(read_impressions_csv(path).records, {max_label, {}});
}

PositionWeights load_weights(const std::string& path, const ValidatedDataset& data) {
  if (path.empty()) return PositionWeights::uniform(data.max_position());
  return weights_from_json(read_file(path));
}

SimConfig sim_config(std::int64_t queries, std::int32_t slots, std::int64_t population,
                     std::uint64_t seed) {
  SimConfig c;
  c.n_queries = queries;
  c.slots = slots;
  c.population_size = population;
  c.seed = seed;
  return c;
}

std::string fmt(double v) { return format_double(v); }

struct EoddsFlags {
  std::size_t bins = 100;
  std::string mode = "strict";
  std::int32_t outcomes = 1;
  std::string eps0 = "inf";
  std::string eps1 = "inf";

  void add(CLI::App* sub) {
    sub->add_option("--bins", bins, "Equal-width score intervals on [0, 1)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--mode", mode, "Constraint set")
        ->capture_default_str()
        ->check(CLI::IsMember({"strict", "multi", "diff"}));
    sub->add_option("--outcomes", outcomes, "Highest label M in multi mode")
        ->capture_default_str();
    sub->add_option("--eps0", eps0, "Negative-label epsilon in diff mode")->capture_default_str();
    sub->add_option("--eps1", eps1, "Positive-label epsilon in diff mode")->capture_default_str();
  }

  EoddsConstraintSpec spec() const {
    EoddsConstraintSpec s;
    s.mode = eodds_mode_from_string(mode);
    s.outcomes = outcomes;
    s.epsilon0 = parse_real(eps0, "--eps0");
    s.epsilon1 = parse_real(eps1, "--eps1");
    s.validate();
    return s;
  }

  std::int32_t max_label() const { return mode == "multi" ? outcomes : 1; }
};

struct Context {
  const std::vector<std::string>& args;
  std::ostream& out;
  std::ostream& err;
};

// simulate ---------------------------------------------------------------

struct SimulateCmd {
  std::int64_t queries = 100'000;
  std::int32_t slots = 50;
  std::int64_t population = 50'000;
  std::uint64_t seed = 7;
  std::uint64_t split = 0;
  std::string out;
  std::string truth;

  void add(CLI::App* sub) {
    sub->add_option("--queries", queries)->capture_default_str();
    sub->add_option("--slots", slots)->capture_default_str();
    sub->add_option("--population", population)->capture_default_str();
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_option("--split", split, "Independent query set index (0 = training)")
        ->capture_default_str();
    sub->add_option("--out", out, "Impression log CSV")->required();
    sub->add_option("--truth", truth, "Ground-truth CSV");
  }

  void operator()(const CLI::App& sub, Context& ctx) const {
    const SimConfig c = sim_config(queries, slots, population, seed);
    const auto pop = generate_population(c);
    const SimLog log = generate_queries(pop, c, split);
    write_impressions_csv(out, {log.records, std::nullopt});
    if (!truth.empty()) write_file_atomic(truth, truth_csv(log.truth));
    write_metadata(meta_path(out), sub, ctx.args);
    ctx.out << "wrote " << log.records.size() << " rows to " << out << "\n";
  }
};

// estimate-bias ----------------------------------------------------------

struct EstimateBiasCmd {
  std::string input;
  std::string mode = "observational";
  std::int32_t truncation = 30;
  std::int32_t bins = 50;
  double epsilon = 1e-6;
  double ratio_cap = 20.0;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--input", input)->required();
    sub->add_option("--mode", mode)
        ->capture_default_str()
        ->check(CLI::IsMember({"randomized", "observational"}));
    sub->add_option("-T,--T", truncation, "Truncation position; later slots reuse w_T")
        ->capture_default_str();
    sub->add_option("--bins", bins, "Histogram bins per density")->capture_default_str();
    sub->add_option("--epsilon", epsilon, "Histogram smoothing")->capture_default_str();
    sub->add_option("--ratio-cap", ratio_cap, "Importance ratio clip")->capture_default_str();
    sub->add_option("--out", out)->required();
  }

  void operator()(const CLI::App& sub, Context& ctx) const {
    const ValidatedDataset data = load_log(input);
    PositionWeights w = PositionWeights::uniform(1);
    if (mode == "randomized") {
      w = estimate_weights_randomized(data, truncation);
    } else {
      ObservationalOptions o;
      o.truncation = truncation;
      o.density_bins = bins;
      o.smoothing_epsilon = epsilon;
      o.ratio_cap = ratio_cap;
      w = estimate_weights_observational(data, o);
    }
    write_file_atomic(out, weights_to_json(w));
    write_metadata(meta_path(out), sub, ctx.args);
    ctx.out << "estimated " << w.size() << " position weights (" << to_string(w.source())
            << ")\n";
  }
};

// train-eopp -------------------------------------------------------------

struct TrainEoppCmd {
  std::string input;
  std::string weights;
  double alpha = 1.0;
  bool no_rescale = false;
  std::optional<double> discretize;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--input", input)->required();
    sub->add_option("--weights", weights, "weights.json (default: no position bias)");
    sub->add_option("--alpha", alpha)->capture_default_str();
    sub->add_flag("--no-rescale", no_rescale, "Keep fair scores on the [0, 1] scale");
    sub->add_option("--discretize", discretize, "Store CDFs at this cumulative-mass step");
    sub->add_option("--out", out)->required();
  }

  void operator()(const CLI::App& sub, Context& ctx) const {
    const ValidatedDataset data = load_log(input);
    EoppOptions o;
    o.alpha = alpha;
    o.rescale = !no_rescale;
    o.discretize_step = discretize;
    const EoppModel m = train_eopp(data, load_weights(weights, data), o);
    write_file_atomic(out, eopp_to_json(m));
    write_metadata(meta_path(out), sub, ctx.args);
    ctx.out << "trained EOpp transform for " << m.per_group_cdf.size() << " groups\n";
  }
};

// train-eodds ------------------------------------------------------------

struct TrainEoddsCmd {
  std::string input;
  std::string weights;
  EoddsFlags lp;
  double alpha = 1.0;
  bool no_rescale = false;
  std::uint64_t seed = 0;
  std::string score_map = "inverse_logit";
  std::string dump_lp;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--input", input)->required();
    sub->add_option("--weights", weights, "weights.json (default: no position bias)");
    lp.add(sub);
    sub->add_option("--alpha", alpha)->capture_default_str();
    sub->add_flag("--no-rescale", no_rescale, "Keep fair scores on the [0, 1] scale");
    sub->add_option("--seed", seed, "Scoring seed stored in the model")->capture_default_str();
    sub->add_option("--score-map", score_map)
        ->capture_default_str()
        ->check(CLI::IsMember({"inverse_logit", "identity"}));
    sub->add_option("--dump-lp", dump_lp, "Write the LP in a plain-text listing");
    sub->add_option("--out", out)->required();
  }

  void operator()(const CLI::App& sub, Context& ctx) const {
    const EoddsConstraintSpec spec = lp.spec();
    const ValidatedDataset data = load_log(input, lp.max_label());
    const PositionWeights w = load_weights(weights, data);
    const ScorePartition partition = ScorePartition::equal_width(lp.bins);
    EoddsOptions o;
    o.alpha = alpha;
    o.rescale = !no_rescale;
    o.seed = seed;
    o.score_map = score_map_from_string(score_map);
    if (!dump_lp.empty()) {
      const auto probs =
          estimate_bin_probs(adjust_counts(tally_counts(data, partition, o.score_map), w));
      std::ostringstream listing;
      write_listing(listing, build_lp(probs, partition, spec));
      write_file_atomic(dump_lp, listing.str());
    }
    const EoddsModel m = train_eodds(data, w, partition, spec, o);
    write_file_atomic(out, eodds_to_json(m, spec));
    write_metadata(meta_path(out), sub, ctx.args);
    const EoddsTrainingReport& r = m.report;
    ctx.out << "LP " << to_string(r.lp_status) << " after " << r.lp_iterations
            << " iterations, objective " << fmt(r.lp_objective) << ", residual "
            << fmt(r.max_constraint_residual) << ", floored negatives "
            << r.floored_negatives << "\n";
    ctx.err << "LP solve took " << r.solve_seconds << " s\n";
  }
};

// score ------------------------------------------------------------------

struct ScoreCmd {
  std::string model;
  std::string input;
  std::optional<double> alpha;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--model", model, "eopp.json or eodds.json")->required();
    sub->add_option("--input", input)->required();
    sub->add_option("--alpha", alpha, "Override the model's blend weight");
    sub->add_option("--out", out, "Input rows plus a fair_score column")->required();
  }

  void operator()(const CLI::App& sub, Context& ctx) const {
    const std::string text = read_file(model);
    ImpressionTable t = read_impressions_csv(input);
    std::vector<double> fair(t.records.size());
    if (model_kind(text) == "eopp") {
      EoppModel m = eopp_from_json(text);
      if (alpha) m = m.with_alpha(*alpha);
      for (std::size_t i = 0; i < fair.size(); ++i) {
        fair[i] = score_eopp(m, t.records[i].score, t.records[i].group);
      }
    } else {
      EoddsModel m = eodds_from_json(text);
      if (alpha) m = m.with_alpha(*alpha);
      for (std::size_t i = 0; i < fair.size(); ++i) fair[i] = eodds_fair_score(m, t.records[i]);
    }
    t.fair_score = std::move(fair);
    write_impressions_csv(out, t);
    write_metadata(meta_path(out), sub, ctx.args);
    ctx.out << "scored " << t.records.size() << " rows\n";
  }
};

// evaluate ---------------------------------------------------------------

ordered_json label_map(const std::map<std::int32_t, double>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = v;
  return j;
}

ordered_json group_map(const std::map<GroupId, double>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = v;
  return j;
}

// Riemann AUC of the evaluated scores, binned after the inverse-logit map.
std::optional<double> auc_of(const std::vector<ImpressionRecord>& records, std::size_t bins) {
  try {
    const ValidatedDataset data = validate_dataset(records, {1, {}});
    const BinCounts counts =
        tally_counts(data, ScorePartition::equal_width(bins), ScoreMap::kInverseLogit);
    const ConditionalBinProbs probs =
        estimate_bin_probs(adjust_counts(counts, PositionWeights::uniform(data.max_position())));
    std::map<GroupId, double> priors;
    for (GroupId g : data.groups()) {
      priors[g] = static_cast<double>(data.group_count(g)) / static_cast<double>(data.size());
    }
    return riemann_auc(probs, priors);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyStratum || e.code() == ErrorCode::kLabelOutOfRange) {
      return std::nullopt;
    }
    throw;
  }
}

struct EvaluateCmd {
  std::string input;
  std::string truth;
  std::string score_column = "auto";
  std::uint64_t seed = 7;
  std::size_t bins = 100;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--input", input, "Scored impression CSV")->required();
    sub->add_option("--truth", truth,
                    "Ground truth; when given, queries are re-ranked by the chosen score "
                    "and labels redrawn at the new positions");
    sub->add_option("--score-column", score_column, "auto picks fair_score when present")
        ->capture_default_str()
        ->check(CLI::IsMember({"auto", "score", "fair_score"}));
    sub->add_option("--seed", seed, "Relabel seed")->capture_default_str();
    sub->add_option("--bins", bins, "Intervals for the Riemann AUC")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "report.json")->required();
  }

  void operator()(const CLI::App& sub, Context& ctx) const {
    ImpressionTable t = read_impressions_csv(input);
    std::string column = score_column;
    if (column == "auto") column = t.fair_score ? "fair_score" : "score";
    if (column == "fair_score") {
      if (!t.fair_score) throw UsageFailure("input has no fair_score column");
      for (std::size_t i = 0; i < t.records.size(); ++i) t.records[i].score = (*t.fair_score)[i];
    }
    std::vector<ImpressionRecord> evaluated;
    std::optional<std::map<GroupId, double>> exposure;
    if (!truth.empty()) {
      SimLog log;
      log.records = std::move(t.records);
      log.truth = read_truth_csv(truth);
      SimConfig c;
      c.seed = seed;
      const SimLog relabeled =
          rerank_and_relabel(log, [](const ImpressionRecord& r) { return r.score; }, c);
      exposure = exposure_parity(relabeled);
      evaluated = relabeled.records;
    } else {
      evaluated = std::move(t.records);
    }
    ordered_json j;
    j["format"] = "fairrank.eval";
    j["version"] = 1;
    j["score_column"] = column;
    j["relabeled"] = !truth.empty();
    j["rows"] = evaluated.size();
    const auto ks = unfairness_report(evaluated);
    j["ks_by_label"] = label_map(ks);
    j["ctr"] = ctr(evaluated);
    const auto auc = auc_of(evaluated, bins);
    j["auc_riemann"] = auc ? ordered_json(*auc) : ordered_json(nullptr);
    if (exposure) {
      j["exposure_ratios"] = group_map(*exposure);
      j["max_relative_exposure_gap"] = max_relative_exposure_gap(*exposure);
    }
    write_file_atomic(out, j.dump(2) + "\n");
    write_metadata(meta_path(out), sub, ctx.args);
    for (const auto& [label, d] : ks) ctx.out << "KS label " << label << ": " << fmt(d) << "\n";
    ctx.out << "CTR: " << fmt(ctr(evaluated)) << "\n";
  }
};

// sweep and reproduce-figures share the simulated split -------------------

struct Split {
  SimConfig config;
  SimLog train;
  SimLog validation;
};

Split simulate_split(std::int64_t train_queries, std::int64_t validation_queries,
                     std::uint64_t seed) {
  Split s;
  s.config = sim_config(train_queries, 50, 50'000, seed);
  const auto pop = generate_population(s.config);
  s.train = generate_queries(pop, s.config, 0);
  SimConfig v = s.config;
  v.n_queries = validation_queries;
  s.validation = generate_queries(pop, v, 1);
  return s;
}

void write_tradeoff(const std::string& path, const std::vector<TradeoffRow>& rows) {
  std::ostringstream ss;
  write_tradeoff_csv(ss, rows);
  write_file_atomic(path, ss.str());
}

struct SweepCmd {
  std::string alphas = "0:1:0.1";
  std::string reranker = "eopp";
  EoddsFlags lp;
  std::string train;
  std::string validation;
  std::string truth;
  std::string weights;
  std::int64_t queries = 20'000;
  std::int64_t validation_queries = 0;
  std::uint64_t seed = 7;
  std::int32_t truncation = 30;
  std::size_t threads = 0;
  std::string out;

  void add(CLI::App* sub) {
    sub->add_option("--alphas", alphas, "start:stop:step or a comma list")->capture_default_str();
    sub->add_option("--reranker", reranker)
        ->capture_default_str()
        ->check(CLI::IsMember({"eopp", "eodds"}));
    lp.add(sub);
    sub->add_option("--train", train, "Training log (default: simulate)");
    sub->add_option("--validation", validation, "Validation log; needs --truth");
    sub->add_option("--truth", truth, "Ground truth for the validation log");
    sub->add_option("--weights", weights, "weights.json (default: estimate from training)");
    sub->add_option("--queries", queries, "Simulated training queries")->capture_default_str();
    sub->add_option("--validation-queries", validation_queries,
                    "Simulated validation queries (default: half of --queries)");
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_option("-T,--T", truncation, "Truncation for estimated weights")
        ->capture_default_str();
    sub->add_option("--threads", threads, std::string("Workers (default: $") + kThreadsEnv + ")");
    sub->add_option("--out", out, "tradeoff.csv")->required();
  }

  void operator()(const CLI::App& sub, Context& ctx) const {
    const std::vector<double> grid = parse_alphas(alphas);
    const EoddsConstraintSpec spec = lp.spec();
    std::optional<ValidatedDataset> data;
    SimLog valid;
    SimConfig config;
    config.seed = seed;
    if (!train.empty()) {
      if (validation.empty() || truth.empty()) {
        throw UsageFailure("--train needs --validation and --truth");
      }
      data = load_log(train, lp.max_label());
      valid.records = read_impressions_csv(validation).records;
      valid.truth = read_truth_csv(truth);
    } else {
      if (!validation.empty() || !truth.empty()) {
        throw UsageFailure("--validation and --truth need --train");
      }
      Split s = simulate_split(queries, validation_queries > 0 ? validation_queries : queries / 2,
                               seed);
      data = validate_dataset(std::move(s.train.records), {lp.max_label(), {}});
      valid = std::move(s.validation);
      config = s.config;
    }
    PositionWeights w = PositionWeights::uniform(1);
    if (!weights.empty()) {
      w = weights_from_json(read_file(weights));
    } else {
      ObservationalOptions o;
      o.truncation = truncation;
      w = estimate_weights_observational(*data, o);
    }
    SweepOptions opt;
    opt.bins = lp.bins;
    opt.eodds_spec = spec;
    opt.threads = threads > 0 ? threads : default_threads();
    const auto rows =
        tradeoff_sweep(*data, w, valid, config, grid, reranker_from_string(reranker), opt);
    write_tradeoff(out, rows);
    write_metadata(meta_path(out), sub, ctx.args);
    ctx.out << "wrote " << rows.size() << " sweep points to " << out << "\n";
  }
};

struct ReproduceCmd {
  std::string outdir;
  bool full_scale = false;
  std::int64_t queries = 0;
  std::int64_t validation_queries = 0;
  std::uint64_t seed = 7;
  std::size_t bins = 100;
  std::string alphas = "0:1:0.1";
  std::size_t threads = 0;

  void add(CLI::App* sub) {
    sub->add_option("--outdir", outdir)->required();
    sub->add_flag("--full-scale,--paper-scale", full_scale,
                  "100k training / 50k validation queries");
    sub->add_option("--queries", queries, "Training queries (default 20000)");
    sub->add_option("--validation-queries", validation_queries,
                    "Validation queries (default: half of training)");
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_option("--bins", bins)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--alphas", alphas)->capture_default_str();
    sub->add_option("--threads", threads, std::string("Workers (default: $") + kThreadsEnv + ")");
  }

  void operator()(const CLI::App& sub, Context& ctx) const {
    const std::vector<double> grid = parse_alphas(alphas);
    const std::int64_t n_train = queries > 0 ? queries : (full_scale ? 100'000 : 20'000);
    const std::int64_t n_valid = validation_queries > 0 ? validation_queries : n_train / 2;
    const std::size_t workers = threads > 0 ? threads : default_threads();
    fs::create_directories(outdir);
    const fs::path dir(outdir);

    Split s = simulate_split(n_train, n_valid, seed);
    const ValidatedDataset data = validate_dataset(s.train.records, {1, {}});
    const PositionWeights w = estimate_weights_observational(data, {});
    ctx.out << "simulated " << data.size() << " training rows; weights estimated\n";

    std::string fig1 = "j,w_true,w_hat\n";
    for (std::int32_t j = 2; j <= w.size(); ++j) {
      fig1 += std::to_string(j) + "," + fmt(simulated_decay(j)) + "," + fmt(w.at(j)) + "\n";
    }
    write_file_atomic(dir / "fig1_bias.csv", fig1);

    const EoppModel eopp = train_eopp(data, w);
    EoddsOptions eo;
    eo.seed = seed;
    const EoddsModel eodds =
        train_eodds(data, w, ScorePartition::equal_width(bins), {}, eo);
    ctx.out << "EOdds LP " << to_string(eodds.report.lp_status) << ", objective "
            << fmt(eodds.report.lp_objective) << "\n";

    std::string fig2 = "stage,group,label,score\n";
    auto add_stage = [&](const char* stage, const SimLog& log) {
      for (const ImpressionRecord& r : log.records) {
        fig2 += stage;
        fig2 += ',' + std::to_string(r.group) + ',' + std::to_string(r.label) + ',' +
                fmt(r.score) + '\n';
      }
      const auto ks = unfairness_report(log.records);
      ctx.out << stage << ": KS negative " << fmt(ks.at(0)) << ", positive " << fmt(ks.at(1))
              << "\n";
    };
    add_stage("original", rerank_and_relabel(
                              s.validation, [](const ImpressionRecord& r) { return r.score; },
                              s.config));
    add_stage("eopp", rerank_and_relabel(
                          s.validation,
                          [&](const ImpressionRecord& r) {
                            return score_eopp(eopp, r.score, r.group);
                          },
                          s.config));
    add_stage("eodds", rerank_and_relabel(
                           s.validation,
                           [&](const ImpressionRecord& r) { return eodds_fair_score(eodds, r); },
                           s.config));
    write_file_atomic(dir / "fig2_distributions.csv", fig2);

    std::string fig3 = "reranker,alpha,ks_pos,ks_neg,ctr\n";
    auto add_sweep = [&](const char* name, const std::vector<TradeoffRow>& rows) {
      for (const TradeoffRow& r : rows) {
        fig3 += std::string(name) + ',' + fmt(r.alpha) + ',' + fmt(r.ks_pos) + ',' +
                fmt(r.ks_neg) + ',' + fmt(r.ctr) + '\n';
      }
    };
    add_sweep("eopp", sweep_eopp(eopp, s.validation, s.config, grid, workers));
    add_sweep("eodds", sweep_eodds(eodds, s.validation, s.config, grid, workers));
    write_file_atomic(dir / "fig3_tradeoff.csv", fig3);
    write_metadata(dir / "metadata.json", sub, ctx.args);
    ctx.out << "wrote fig1_bias.csv, fig2_distributions.csv, fig3_tradeoff.csv to " << outdir
            << "\n";
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Fairness post-processing for ranked recommendations under position bias",
               "fairrank");
  app.require_subcommand(1);
  app.set_version_flag("--version", FAIRRANK_VERSION);

  SimulateCmd simulate;
  EstimateBiasCmd estimate_bias;
  TrainEoppCmd train_eopp_cmd;
  TrainEoddsCmd train_eodds_cmd;
  ScoreCmd score;
  EvaluateCmd evaluate;
  SweepCmd sweep;
  ReproduceCmd reproduce;
  std::string metadata;

  std::vector<std::pair<CLI::App*, std::function<void(const CLI::App&, Context&)>>> commands;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.add(sub);
    commands.emplace_back(sub, [&cmd](const CLI::App& s, Context& c) { cmd(s, c); });
  };
  add("simulate", "Generate a synthetic impression log with known ground truth", simulate);
  add("estimate-bias", "Estimate position weights from a log", estimate_bias);
  add("train-eopp", "Train the equality-of-opportunity transform", train_eopp_cmd);
  add("train-eodds", "Train the equalized-odds transition model", train_eodds_cmd);
  add("score", "Append fair scores to a log", score);
  add("evaluate", "Fairness and performance metrics of a scored log", evaluate);
  add("sweep", "Tradeoff curve over the blend weight", sweep);
  add("reproduce-figures", "Simulate, train and write the plot-ready CSV bundle", reproduce);
  CLI::App* rerun = app.add_subcommand("rerun", "Repeat a run from its metadata record");
  rerun->add_option("--metadata", metadata, "*.meta.json or metadata.json")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    const CLI::App* scope = &app;
    for (const CLI::App* sub : app.get_subcommands()) scope = sub;
    err << "usage error: " << e.what() << "\n\n" << scope->help();
    return kUsageError;
  }

  try {
    if (rerun->parsed()) {
      const auto j = nlohmann::json::parse(read_file(metadata));
      if (!j.contains("argv") || !j.at("argv").is_array()) {
        throw Error(ErrorCode::kSchemaMismatch, "metadata has no argv record");
      }
      const auto recorded = j.at("argv").get<std::vector<std::string>>();
      if (!recorded.empty() && recorded.front() == "rerun") {
        throw Error(ErrorCode::kSchemaMismatch, "metadata points at another rerun");
      }
      return run(recorded, out, err);
    }
    for (auto& [sub, fn] : commands) {
      if (sub->parsed()) {
        Context ctx{args, out, err};
        fn(*sub, ctx);
      }
    }
    return kOk;
  } catch (const UsageFailure& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kModuleError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << code_name(ErrorCode::kParseError) << ": " << e.what() << "\n";
    return kModuleError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kModuleError;
  }
}

}  // namespace fairrank::cli
