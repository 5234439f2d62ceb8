#include "totp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "totp/capp.hpp"
#include "totp/estimator.hpp"
#include "totp/oracle.hpp"
#include "totp/problems.hpp"

namespace totp::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct CommonFlags {
  std::string problem;
  std::string input;
  double delta = 0.1;
  std::uint64_t seed = 0;
  double burn_const = 2.0;
  unsigned workers = 1;
  std::string backend = "auto";
  double tv_tolerance = 0.0;  // 0 = default schedule
};

EstimatorConfig make_config(const CommonFlags& f, double xi) {
  EstimatorConfig c;
  c.xi = xi;
  c.delta = f.delta;
  c.seed = f.seed;
  c.chain.burn_in_constant = f.burn_const;
  c.chain.workers = f.workers;
  c.chain.backend = parse_backend(f.backend);
  if (f.tv_tolerance != 0.0) {
    c.chain.tv_tolerance = f.tv_tolerance;
  }
  return c;
}

json big_to_json(const BigInt& v) {
  if (v >= 0 && v <= BigInt(std::numeric_limits<std::int64_t>::max())) {
    return v.convert_to<std::int64_t>();
  }
  return v.str();
}

json base_record(const std::string& command, const CommonFlags& f) {
  json r;
  r["command"] = command;
  r["problem"] = f.problem;
  r["input"] = f.input;
  return r;
}

json chain_params(const CommonFlags& f) {
  json p;
  p["delta"] = f.delta;
  p["seed"] = f.seed;
  p["burn_const"] = f.burn_const;
  p["workers"] = f.workers;
  p["backend"] = f.backend;
  if (f.tv_tolerance != 0.0) {
    p["tv_tolerance"] = f.tv_tolerance;
  }
  return p;
}

void put_estimate(json& r, const EstimateReport& e) {
  r["estimate"] = e.size_estimate;
  r["rounded_estimate"] = big_to_json(e.rounded_estimate);
  r["fraction"] = e.fraction;
  r["error_radius"] = e.error_radius;
  r["height"] = e.height;
  r["exact"] = e.exact.has_value();
  r["steps"] = e.chain_steps;
  json depths = json::array();
  for (std::size_t i = 0; i < e.per_depth.size(); ++i) {
    const AlphaEstimate& a = e.per_depth[i];
    depths.push_back({{"depth", i},
                      {"alpha", a.value},
                      {"root_hit_fraction", a.root_hit_fraction},
                      {"samples", a.samples},
                      {"repetitions", a.repetitions},
                      {"burn_in", a.burn_in}});
  }
  r["per_depth"] = std::move(depths);
}

void emit(std::ostream& out, const json& record) { out << record.dump() << '\n'; }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ProblemInput load(const CommonFlags& f) { return load_problem(parse_problem_kind(f.problem), f.input); }

void add_common(CLI::App* cmd, CommonFlags& f, bool randomized) {
  cmd->add_option("--problem", f.problem, "is | dnf | cnf | mono | tree")->required();
  cmd->add_option("--input", f.input, "instance file")->required();
  if (randomized) {
    cmd->add_option("--delta", f.delta, "failure probability in (0,1)");
    cmd->add_option("--seed", f.seed, "master seed")->required();
    cmd->add_option("--burn-const", f.burn_const, "burn-in constant C");
    cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--backend", f.backend, "simulate | propagate | auto");
    cmd->add_option("--tv-tolerance", f.tv_tolerance, "fixed total-variation tolerance");
  }
}

// --- commands ----------------------------------------------------------------------

json cmd_estimate(const CommonFlags& f, double xi) {
  const auto t0 = Clock::now();
  const ProblemInput input = load(f);
  const EstimatorConfig config = make_config(f, xi);
  const EstimateReport e = with_branching_tree(input, [&](const BranchingTree& t) { return estimate_size(t, config); });
  json r = base_record("estimate", f);
  json params = chain_params(f);
  params["xi"] = xi;
  r["params"] = std::move(params);
  put_estimate(r, e);
  r["duration_s"] = seconds_since(t0);
  return r;
}

json cmd_exact(const CommonFlags& f, const std::string& threshold_text) {
  const auto t0 = Clock::now();
  if (threshold_text.empty() || threshold_text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParameterError("--threshold must be a nonnegative integer, got '" + threshold_text + "'");
  }
  const BigInt threshold(threshold_text);
  const ProblemInput input = load(f);
  const CountOutcome c = with_branching_tree(input, [&](const BranchingTree& t) { return count_up_to(t, threshold); });
  json r = base_record("exact", f);
  r["params"] = {{"threshold", big_to_json(threshold)}};
  r["outcome"] = c.exact() ? "exact" : "exceeds";
  if (c.exact()) {
    r["value"] = big_to_json(c.value);
  }
  r["visits"] = c.visits;
  r["duration_s"] = seconds_since(t0);
  return r;
}

json cmd_ras(const CommonFlags& f, double k, double beta) {
  const auto t0 = Clock::now();
  if (!(k >= 1.0)) {
    throw ParameterError("--k must be >= 1");
  }
  const ProblemInput input = load(f);
  const EstimatorConfig config = make_config(f, 1.0);
  const RasReport rr = with_branching_tree(input, [&](const BranchingTree& t) { return ras(t, k, beta, config); });
  json r = base_record("ras", f);
  json params = chain_params(f);
  params["k"] = k;
  params["beta"] = beta;
  r["params"] = std::move(params);
  r["branch"] = rr.exact_branch ? "exact" : "estimate";
  r["threshold"] = big_to_json(rr.threshold);
  put_estimate(r, rr.estimate);
  r["relative_error_bound"] = rr.exact_branch ? 0.0 : 1.0 / k;
  r["duration_s"] = seconds_since(t0);
  return r;
}

void put_capp(json& r, const CappResult& c) {
  r["p_hat"] = c.p_hat;
  r["route"] = to_string(c.route);
  r["variables"] = c.variables;
  r["estimate"] = c.report.size_estimate;
  r["fraction"] = c.report.fraction;
  r["error_radius"] = c.report.error_radius;
  r["steps"] = c.report.chain_steps;
}

json cmd_capp(const CommonFlags& f, double epsilon) {
  const auto t0 = Clock::now();
  const ProblemInput input = load(f);
  const CappResult c = capp(input, epsilon, make_config(f, 1.0));
  json r = base_record("capp", f);
  json params = chain_params(f);
  params["epsilon"] = epsilon;
  r["params"] = std::move(params);
  put_capp(r, c);
  r["duration_s"] = seconds_since(t0);
  return r;
}

json cmd_gapcsat(const CommonFlags& f, double rho) {
  const auto t0 = Clock::now();
  const ProblemInput input = load(f);
  const GapResult g = gap_csat(input, rho, make_config(f, 1.0));
  json r = base_record("gapcsat", f);
  json params = chain_params(f);
  params["rho"] = rho;
  r["params"] = std::move(params);
  r["verdict"] = to_string(g.verdict);
  put_capp(r, g.capp);
  r["duration_s"] = seconds_since(t0);
  return r;
}

// --- bench -----------------------------------------------------------------------------

// Exact count for coverage statistics, or nullopt past the enumeration guards.
std::optional<BigInt> ground_truth(const ProblemInput& input) {
  try {
    return std::visit(
        [](const auto& family) -> std::optional<BigInt> {
          using T = std::decay_t<decltype(family)>;
          if constexpr (std::is_same_v<T, Graph>) {
            return count_independent_sets(family);
          } else if constexpr (std::is_same_v<T, ExplicitTree>) {
            return BigInt(exact_size(family));
          } else {
            return count_sat(family);
          }
        },
        input);
  } catch (const GuardError&) {
    return std::nullopt;
  }
}

std::vector<double> number_list(const json& entry, const char* key) {
  const json& v = entry.at(key);
  if (v.is_number()) {
    return {v.get<double>()};
  }
  if (!v.is_array() || v.empty()) {
    throw ParseError(std::string("manifest field '") + key + "' must be a number or a nonempty array of numbers");
  }
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) {
      throw ParseError(std::string("manifest field '") + key + "' must contain numbers only");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::uint64_t> seed_list(const json& entry) {
  if (entry.contains("seeds")) {
    const json& v = entry.at("seeds");
    if (!v.is_array()) {
      throw ParseError("manifest field 'seeds' must be an array of unsigned integers");
    }
    std::vector<std::uint64_t> out;
    for (const json& s : v) {
      if (!s.is_number_unsigned()) {
        throw ParseError("manifest field 'seeds' must be an array of unsigned integers");
      }
      out.push_back(s.get<std::uint64_t>());
    }
    return out;
  }
  const json& runs = entry.at("runs");
  if (!runs.is_number_unsigned()) {
    throw ParseError("manifest field 'runs' must be an unsigned integer");
  }
  const std::uint64_t first = entry.value("seed", std::uint64_t{1});
  std::vector<std::uint64_t> out(runs.get<std::uint64_t>());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = first + i;
  }
  return out;
}

struct BenchEntry {
  std::string command;
  CommonFlags flags;
  std::vector<double> accuracies;
  std::vector<std::uint64_t> seeds;
};

std::vector<BenchEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open suite manifest '" + path + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("suite manifest is not valid JSON: ") + e.what());
  }
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  std::vector<BenchEntry> entries;
  try {
    if (!doc.is_object() || !doc.contains("entries") || !doc.at("entries").is_array()) {
      throw ParseError("suite manifest must be an object with an 'entries' array");
    }
    for (const json& e : doc.at("entries")) {
      BenchEntry b;
      b.command = e.value("command", std::string("estimate"));
      if (b.command != "estimate" && b.command != "capp") {
        throw ParseError("manifest command must be 'estimate' or 'capp', got '" + b.command + "'");
      }
      b.flags.problem = e.at("problem").get<std::string>();
      std::filesystem::path input = e.at("input").get<std::string>();
      b.flags.input = (input.is_relative() ? dir / input : input).string();
      b.flags.delta = e.value("delta", 0.1);
      b.flags.burn_const = e.value("burn_const", 2.0);
      b.flags.workers = e.value("workers", 1U);
      b.flags.backend = e.value("backend", std::string("auto"));
      b.accuracies = number_list(e, b.command == "capp" ? "epsilon" : "xi");
      b.seeds = seed_list(e);
      entries.push_back(std::move(b));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed suite manifest: ") + e.what());
  }
  return entries;
}

int cmd_bench(const std::string& suite, const std::string& out_path, std::ostream& err) {
  const std::vector<BenchEntry> entries = read_manifest(suite);
  // Validate every entry before running anything.
  for (const BenchEntry& b : entries) {
    parse_problem_kind(b.flags.problem);
    parse_backend(b.flags.backend);
  }
  std::ofstream out(out_path);
  if (!out) {
    throw ParseError("cannot open output file '" + out_path + "'");
  }
  std::size_t runs = 0;
  std::size_t covered = 0;
  std::size_t judged = 0;
  for (const BenchEntry& b : entries) {
    const ProblemInput input = load(b.flags);
    const std::optional<BigInt> truth = ground_truth(input);
    for (double accuracy : b.accuracies) {
      for (std::uint64_t seed : b.seeds) {
        CommonFlags f = b.flags;
        f.seed = seed;
        const auto t0 = Clock::now();
        json r = base_record(b.command, f);
        json params = chain_params(f);
        std::optional<bool> hit;
        if (b.command == "capp") {
          params["epsilon"] = accuracy;
          const CappResult c = capp(input, accuracy, make_config(f, 1.0));
          put_capp(r, c);
          if (truth) {
            std::size_t vars = c.variables;
            const double p = std::ldexp(truth->convert_to<double>(), -static_cast<int>(vars));
            r["truth"] = p;
            hit = std::fabs(c.p_hat - p) <= accuracy;
          }
        } else {
          params["xi"] = accuracy;
          const EstimatorConfig config = make_config(f, accuracy);
          const EstimateReport e =
              with_branching_tree(input, [&](const BranchingTree& t) { return estimate_size(t, config); });
          put_estimate(r, e);
          if (truth) {
            r["truth"] = big_to_json(*truth);
            hit = std::fabs(e.size_estimate - truth->convert_to<double>()) <= e.error_radius;
          }
        }
        r["params"] = std::move(params);
        if (hit) {
          r["covered"] = *hit;
          ++judged;
          covered += *hit ? 1 : 0;
        }
        r["duration_s"] = seconds_since(t0);
        out << r.dump() << '\n';
        ++runs;
      }
    }
  }
  err << "bench: " << runs << " runs";
  if (judged > 0) {
    err << ", coverage " << covered << "/" << judged << " = " << static_cast<double>(covered) / static_cast<double>(judged);
  }
  err << '\n';
  return kOk;
}

void summarize(std::ostream& err, const json& r) {
  err << r.at("command").get<std::string>() << ":";
  for (const char* key : {"estimate", "error_radius", "outcome", "value", "p_hat", "verdict", "branch", "steps"}) {
    if (r.contains(key)) {
      err << ' ' << key << '=' << r.at(key).dump();
    }
  }
  err << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov-chain estimator for TotP counting problems"};
  app.require_subcommand(1);

  CommonFlags estimate_flags, exact_flags, ras_flags, capp_flags, gap_flags;
  double xi = 0.1;
  auto* estimate = app.add_subcommand("estimate", "additive-error estimate of f(x)");
  add_common(estimate, estimate_flags, true);
  estimate->add_option("--xi", xi, "additive error target in (0,1]");

  std::string threshold;
  auto* exact = app.add_subcommand("exact", "decide f(x) <= threshold by bounded search");
  add_common(exact, exact_flags, false);
  exact->add_option("--threshold", threshold, "nonnegative integer")->required();

  double k = 2.0, beta = 0.5;
  auto* ras_cmd = app.add_subcommand("ras", "relative-error approximation f(x)(1 +- 1/k)");
  add_common(ras_cmd, ras_flags, true);
  ras_cmd->add_option("--k", k, "accuracy parameter k >= 1");
  ras_cmd->add_option("--beta", beta, "time/accuracy trade-off in (0,1)");

  double epsilon = kDefaultCappEpsilon;
  auto* capp_cmd = app.add_subcommand("capp", "circuit acceptance probability");
  add_common(capp_cmd, capp_flags, true);
  capp_cmd->add_option("--epsilon", epsilon, "additive error in (0,1)");

  double rho = 0.5;
  auto* gap_cmd = app.add_subcommand("gapcsat", "gap circuit satisfiability");
  add_common(gap_cmd, gap_flags, true);
  gap_cmd->add_option("--rho", rho, "gap in (0,1]");

  std::string suite, bench_out;
  auto* bench = app.add_subcommand("bench", "run a JSON suite manifest, write JSON lines");
  bench->add_option("--suite", suite, "manifest path")->required();
  bench->add_option("--out", bench_out, "output path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    json record;
    if (estimate->parsed()) {
      record = cmd_estimate(estimate_flags, xi);
    } else if (exact->parsed()) {
      record = cmd_exact(exact_flags, threshold);
    } else if (ras_cmd->parsed()) {
      record = cmd_ras(ras_flags, k, beta);
    } else if (capp_cmd->parsed()) {
      record = cmd_capp(capp_flags, epsilon);
    } else if (gap_cmd->parsed()) {
      record = cmd_gapcsat(gap_flags, rho);
    } else {
      return cmd_bench(suite, bench_out, err);
    }
    emit(out, record);
    summarize(err, record);
    return kOk;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UnsupportedFamilyError& e) {
    err << "error: unsupported family: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace totp::cli
