// ncbm: correlated node behavior model toolkit.
//
// Subcommands: tpm, steady, limiting, transient, compose, simulate, estimate,
// sweep. Options may come from flags or from a `key = value` config file
// (--config or $NCBM_CONFIG); flags win. Exit codes: 0 success, 2 validation,
// 3 numerical, 4 degenerate composition, 5 input parse, 6 infeasible sweep.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncbm/behavior.hpp"
#include "ncbm/correlation.hpp"
#include "ncbm/estimation.hpp"
#include "ncbm/io.hpp"
#include "ncbm/scenarios.hpp"
#include "ncbm/smp.hpp"
#include "ncbm/svg.hpp"
#include "ncbm/version.hpp"

namespace {

using namespace ncbm;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

bool is_set(double v) { return !std::isnan(v); }

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    throw ParseError("config key '" + key + "': not a number: '" + value + "'");
  return v;
}

long long to_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size())
    throw ParseError("config key '" + key + "': not an integer: '" + value + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError("config key '" + key + "': not a boolean: '" + value + "'");
}

std::vector<int> parse_node_list(const std::string& text) {
  std::vector<int> nodes;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    char* end = nullptr;
    const long v = std::strtol(token.c_str(), &end, 10);
    if (token.empty() || end != token.c_str() + token.size() || v < 1)
      throw ValidationError("node list must be comma-separated positive integers, got '" + text +
                            "'");
    nodes.push_back(static_cast<int>(v));
  }
  if (nodes.empty()) throw ValidationError("node list is empty");
  return nodes;
}

// One config-file key bound to a subcommand option: applied only when the
// flag was not given on the command line.
struct KeyBinding {
  CLI::Option* opt = nullptr;
  std::function<void(const std::string&)> set;
};

using KeyMap = std::map<std::string, KeyBinding>;

std::set<std::string>& global_keys() {
  static std::set<std::string> keys;
  return keys;
}

void bind_key(KeyMap& keys, const std::string& key, CLI::Option* opt,
          std::function<void(const std::string&)> set) {
  keys[key] = KeyBinding{opt, std::move(set)};
  global_keys().insert(key);
}

void bind_double(CLI::App* cmd, KeyMap& keys, const std::string& key, double& var,
                 const std::string& desc) {
  CLI::Option* opt = cmd->add_option("--" + key, var, desc);
  bind_key(keys, key, opt, [key, &var](const std::string& v) { var = to_double(key, v); });
}

void bind_named_double(CLI::App* cmd, KeyMap& keys, const std::string& flag,
                       const std::string& key, double& var, const std::string& desc) {
  CLI::Option* opt = cmd->add_option(flag, var, desc);
  bind_key(keys, key, opt, [key, &var](const std::string& v) { var = to_double(key, v); });
}

void bind_string(CLI::App* cmd, KeyMap& keys, const std::string& flag, const std::string& key,
                 std::string& var, const std::string& desc) {
  CLI::Option* opt = cmd->add_option(flag, var, desc);
  bind_key(keys, key, opt, [&var](const std::string& v) { var = v; });
}

void bind_uint64(CLI::App* cmd, KeyMap& keys, const std::string& flag, const std::string& key,
                 std::uint64_t& var, const std::string& desc) {
  CLI::Option* opt = cmd->add_option(flag, var, desc);
  bind_key(keys, key, opt, [key, &var](const std::string& v) {
    const long long parsed = to_int(key, v);
    if (parsed < 0) throw ParseError("config key '" + key + "': must be >= 0");
    var = static_cast<std::uint64_t>(parsed);
  });
}

void bind_int(CLI::App* cmd, KeyMap& keys, const std::string& flag, const std::string& key,
              int& var, const std::string& desc) {
  CLI::Option* opt = cmd->add_option(flag, var, desc);
  bind_key(keys, key, opt, [key, &var](const std::string& v) {
    var = static_cast<int>(to_int(key, v));
  });
}

void bind_flag(CLI::App* cmd, KeyMap& keys, const std::string& flag, const std::string& key,
               bool& var, const std::string& desc) {
  CLI::Option* opt = cmd->add_flag(flag, var, desc);
  bind_key(keys, key, opt, [key, &var](const std::string& v) { var = to_bool(key, v); });
}

// Shared parameter block (a..e required via flag or config; eta defaulted).
struct ParamOpts {
  double a = kUnset, b = kUnset, c = kUnset, d = kUnset, e = kUnset;
  double eta = 10.0;

  void register_options(CLI::App* cmd, KeyMap& keys, bool required) {
    required_ = required;
    bind_double(cmd, keys, "a", a, "probability of dropping (selfishness)");
    bind_double(cmd, keys, "b", b, "probability of forwarding");
    bind_double(cmd, keys, "c", c, "probability of injecting");
    bind_double(cmd, keys, "d", d, "probability of loss");
    bind_double(cmd, keys, "e", e, "probability of recovery");
    bind_double(cmd, keys, "eta", eta, "selfish threshold parameter (> 1)");
  }

  BehaviorParams validated() const {
    if (required_) {
      const struct {
        const char* name;
        double value;
      } fields[] = {{"a", a}, {"b", b}, {"c", c}, {"d", d}, {"e", e}};
      for (const auto& f : fields)
        if (!is_set(f.value))
          throw ValidationError(std::string("parameter ") + f.name +
                                " is required (flag or config)");
    }
    return validate_params(a, b, c, d, e, eta);
  }

  std::string meta() const {
    std::ostringstream out;
    out << "a=" << short_num(a) << " b=" << short_num(b) << " c=" << short_num(c)
        << " d=" << short_num(d) << " e=" << short_num(e) << " eta=" << short_num(eta);
    return out.str();
  }

 private:
  bool required_ = true;
};

struct SojournOpts {
  std::string family = "exponential";
  double mean_all = 1.0;
  double mean_w = kUnset, mean_d = kUnset, mean_i = kUnset, mean_l = kUnset;

  void register_options(CLI::App* cmd, KeyMap& keys) {
    bind_string(cmd, keys, "--sojourn-family", "sojourn_family", family,
                "holding-time family: exponential|deterministic");
    bind_named_double(cmd, keys, "--mean-all", "mean_all", mean_all,
                      "holding-time mean for every transition");
    bind_named_double(cmd, keys, "--mean-w", "mean_w", mean_w, "mean for transitions out of W");
    bind_named_double(cmd, keys, "--mean-d", "mean_d", mean_d, "mean for transitions out of D");
    bind_named_double(cmd, keys, "--mean-i", "mean_i", mean_i, "mean for transitions out of I");
    bind_named_double(cmd, keys, "--mean-l", "mean_l", mean_l, "mean for transitions out of L");
  }

  SojournSpec spec() const {
    SojournFamily fam;
    if (family == "exponential") {
      fam = SojournFamily::Exponential;
    } else if (family == "deterministic") {
      fam = SojournFamily::Deterministic;
    } else {
      throw ValidationError("sojourn_family must be 'exponential' or 'deterministic', got '" +
                            family + "'");
    }
    SojournSpec s = SojournSpec::uniform(mean_all, fam);
    const double per_state[4] = {mean_w, mean_d, mean_i, mean_l};
    for (int i = 0; i < 4; ++i)
      if (is_set(per_state[i])) s.mean[i].fill(per_state[i]);
    return s;
  }

  std::string meta() const {
    std::ostringstream out;
    out << "sojourn_family=" << family << " mean_all=" << short_num(mean_all);
    const struct {
      const char* name;
      double value;
    } overrides[] = {{"mean_w", mean_w}, {"mean_d", mean_d}, {"mean_i", mean_i}, {"mean_l", mean_l}};
    for (const auto& o : overrides)
      if (is_set(o.value)) out << ' ' << o.name << '=' << short_num(o.value);
    return out.str();
  }
};

std::string metadata_line(const std::string& command, const std::string& fields) {
  std::ostringstream out;
  out << "# ncbm " << kVersion << " | " << command;
  if (!fields.empty()) out << " | " << fields;
  return out.str();
}

void emit(const std::string& content, const std::string& out_path) {
  std::cout << content;
  if (!out_path.empty()) write_file(out_path, content);
}

std::string tpm_table(const Mat4& m, const std::array<const char*, 4>& names) {
  std::ostringstream out;
  out << "state";
  for (const char* n : names) out << ',' << n;
  out << "\n";
  for (int i = 0; i < 4; ++i) {
    out << names[i];
    for (int j = 0; j < 4; ++j) out << ',' << format_g12(m[i][j]);
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommand contexts

struct CommandCtx {
  CLI::App* cmd = nullptr;
  KeyMap keys;
  std::string config_path;
  std::function<int()> run;
};

CommandCtx* make_ctx(std::vector<std::unique_ptr<CommandCtx>>& ctxs, CLI::App& app,
                     const std::string& name, const std::string& desc) {
  auto ctx = std::make_unique<CommandCtx>();
  ctx->cmd = app.add_subcommand(name, desc);
  ctx->cmd->add_option("--config", ctx->config_path,
                       "key = value config file (default: $NCBM_CONFIG)");
  ctxs.push_back(std::move(ctx));
  return ctxs.back().get();
}

void setup_tpm(std::vector<std::unique_ptr<CommandCtx>>& ctxs, CLI::App& app) {
  CommandCtx* ctx = make_ctx(ctxs, app, "tpm", "print the embedded 4x4 transition matrix");
  auto params = std::make_shared<ParamOpts>();
  auto out_path = std::make_shared<std::string>();
  params->register_options(ctx->cmd, ctx->keys, true);
  bind_string(ctx->cmd, ctx->keys, "--out", "out", *out_path, "write the matrix file here");
  ctx->run = [params, out_path]() {
    const EmbeddedTpm tpm = build_tpm(params->validated());
    const std::string meta = metadata_line("tpm", params->meta());
    std::cout << meta << "\n" << tpm_table(tpm.p, kStateNames);
    if (!out_path->empty()) write_file(*out_path, matrix_file_content(tpm.p, meta, kStateNames));
    return 0;
  };
}

void setup_steady(std::vector<std::unique_ptr<CommandCtx>>& ctxs, CLI::App& app,
                  const std::string& name) {
  CommandCtx* ctx = make_ctx(
      ctxs, app, name, "embedded-chain stationary vector and SMP limiting distribution");
  auto params = std::make_shared<ParamOpts>();
  auto sojourn = std::make_shared<SojournOpts>();
  auto out_path = std::make_shared<std::string>();
  params->register_options(ctx->cmd, ctx->keys, true);
  sojourn->register_options(ctx->cmd, ctx->keys);
  bind_string(ctx->cmd, ctx->keys, "--out", "out", *out_path, "write the CSV here");
  ctx->run = [params, sojourn, out_path, name]() {
    const EmbeddedTpm tpm = build_tpm(params->validated());
    const SteadyState steady = limiting_distribution(tpm, sojourn->spec());
    std::ostringstream csv;
    csv << metadata_line(name, params->meta() + " " + sojourn->meta()) << "\n";
    csv << "state,pi,mean_sojourn,limiting\n";
    for (int i = 0; i < 4; ++i)
      csv << kStateNames[i] << ',' << format_g12(steady.pi[i]) << ','
          << format_g12(steady.mean_sojourn[i]) << ',' << format_g12(steady.limiting[i]) << "\n";
    emit(csv.str(), *out_path);
    return 0;
  };
}

void setup_transient(std::vector<std::unique_ptr<CommandCtx>>& ctxs, CLI::App& app) {
  CommandCtx* ctx =
      make_ctx(ctxs, app, "transient", "state occupancy after a number of embedded steps");
  auto params = std::make_shared<ParamOpts>();
  auto out_path = std::make_shared<std::string>();
  auto initial = std::make_shared<std::string>("W");
  auto steps = std::make_shared<std::uint64_t>(100);
  params->register_options(ctx->cmd, ctx->keys, true);
  bind_string(ctx->cmd, ctx->keys, "--initial", "initial", *initial, "initial state (W|D|I|L)");
  bind_uint64(ctx->cmd, ctx->keys, "--steps", "steps", *steps, "number of embedded steps");
  bind_string(ctx->cmd, ctx->keys, "--out", "out", *out_path, "write the CSV here");
  ctx->run = [params, out_path, initial, steps]() {
    const EmbeddedTpm tpm = build_tpm(params->validated());
    const auto state = parse_state(*initial);
    if (!state) throw ValidationError("initial state must be one of W, D, I, L");
    const Vec4 occ = transient_occupancy(tpm, *state, *steps);
    std::ostringstream csv;
    csv << metadata_line("transient", params->meta() + " initial=" + *initial +
                                          " steps=" + std::to_string(*steps))
        << "\n";
    csv << "state,occupancy\n";
    for (int i = 0; i < 4; ++i) csv << kStateNames[i] << ',' << format_g12(occ[i]) << "\n";
    emit(csv.str(), *out_path);
    return 0;
  };
}

void setup_compose(std::vector<std::unique_ptr<CommandCtx>>& ctxs, CLI::App& app) {
  CommandCtx* ctx = make_ctx(ctxs, app, "compose",
                             "compose a correlated cluster chain and its u,v,w,x functions");
  auto members_path = std::make_shared<std::string>();
  auto out_path = std::make_shared<std::string>();
  auto eta = std::make_shared<double>(10.0);
  auto deferred = std::make_shared<bool>(false);
  bind_string(ctx->cmd, ctx->keys, "--members", "members", *members_path,
              "member spec file (node_id,a,b,c,d,e)");
  bind_double(ctx->cmd, ctx->keys, "eta", *eta, "selfish threshold applied to members");
  bind_flag(ctx->cmd, ctx->keys, "--deferred-normalization", "deferred_normalization", *deferred,
            "normalize once after multiplying all members");
  bind_string(ctx->cmd, ctx->keys, "--out", "out", *out_path, "write the result here");
  ctx->run = [members_path, out_path, eta, deferred]() {
    if (members_path->empty()) throw ValidationError("--members file is required");
    const auto specs = parse_member_file(*members_path);
    std::vector<BehaviorParams> members;
    members.reserve(specs.size());
    for (const auto& s : specs) members.push_back(validate_params(s.a, s.b, s.c, s.d, s.e, *eta));
    const FoldNormalization mode =
        *deferred ? FoldNormalization::Deferred : FoldNormalization::PerStep;
    const CorrelatedCluster cluster = compose_cluster(members, SojournSpec::uniform(1.0), mode);

    std::ostringstream body;
    body << metadata_line("compose", "members=" + *members_path + " m=" +
                                         std::to_string(members.size()) + " eta=" +
                                         short_num(*eta) + " normalization=" +
                                         (*deferred ? "deferred" : "per-step"))
         << "\n";
    body << "# states: S0 S1 S2 S3\n";
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (j) body << ' ';
        body << format_g12(cluster.cluster_tpm[i][j]);
      }
      body << "\n";
    }
    const CorrelatedFunctionsReport report = correlated_functions_report(cluster);
    const struct {
      const char* name;
      const std::optional<double>& value;
    } fns[] = {{"u", report.u}, {"v", report.v}, {"w", report.w}, {"x", report.x}};
    for (const auto& fn : fns)
      body << fn.name << " = " << (fn.value ? format_g12(*fn.value) : "nan") << "\n";
    for (const auto& err : report.errors) body << "# " << err << "\n";
    emit(body.str(), *out_path);
    return 0;
  };
}

void setup_simulate(std::vector<std::unique_ptr<CommandCtx>>& ctxs, CLI::App& app) {
  CommandCtx* ctx = make_ctx(ctxs, app, "simulate",
                             "Monte Carlo occupancy vs the analytic limiting distribution");
  auto params = std::make_shared<ParamOpts>();
  auto sojourn = std::make_shared<SojournOpts>();
  auto out_path = std::make_shared<std::string>();
  auto initial = std::make_shared<std::string>("W");
  auto horizon = std::make_shared<double>(1000.0);
  auto trajectories = std::make_shared<int>(100);
  auto seed = std::make_shared<std::uint64_t>(42);
  auto threads = std::make_shared<int>(1);
  params->register_options(ctx->cmd, ctx->keys, true);
  sojourn->register_options(ctx->cmd, ctx->keys);
  bind_string(ctx->cmd, ctx->keys, "--initial", "initial", *initial, "initial state (W|D|I|L)");
  bind_named_double(ctx->cmd, ctx->keys, "--horizon", "horizon", *horizon,
                    "simulated time horizon");
  bind_int(ctx->cmd, ctx->keys, "--trajectories", "trajectories", *trajectories,
           "number of trajectories");
  bind_uint64(ctx->cmd, ctx->keys, "--seed", "seed", *seed, "RNG seed");
  bind_int(ctx->cmd, ctx->keys, "--threads", "threads", *threads,
           "worker threads (output is identical for any value)");
  bind_string(ctx->cmd, ctx->keys, "--out", "out", *out_path, "write the CSV here");
  ctx->run = [params, sojourn, out_path, initial, horizon, trajectories, seed, threads]() {
    const EmbeddedTpm tpm = build_tpm(params->validated());
    const auto state = parse_state(*initial);
    if (!state) throw ValidationError("initial state must be one of W, D, I, L");
    const SojournSpec spec = sojourn->spec();
    const auto trajs =
        simulate_many(tpm, spec, *state, *horizon, *trajectories, *seed, *threads);
    const OccupancyStats stats = occupancy_estimate(trajs);
    const SteadyState steady = limiting_distribution(tpm, spec);
    std::ostringstream csv;
    // The thread count is deliberately absent: output does not depend on it.
    csv << metadata_line("simulate",
                         params->meta() + " " + sojourn->meta() + " initial=" + *initial +
                             " horizon=" + short_num(*horizon) + " trajectories=" +
                             std::to_string(*trajectories) + " seed=" + std::to_string(*seed))
        << "\n";
    csv << "state,occupancy,stderr,analytic_limiting,abs_error\n";
    for (int i = 0; i < 4; ++i)
      csv << kStateNames[i] << ',' << format_g12(stats.occupancy[i]) << ','
          << format_g12(stats.std_error[i]) << ',' << format_g12(steady.limiting[i]) << ','
          << format_g12(std::fabs(stats.occupancy[i] - steady.limiting[i])) << "\n";
    emit(csv.str(), *out_path);
    return 0;
  };
}

void setup_estimate(std::vector<std::unique_ptr<CommandCtx>>& ctxs, CLI::App& app) {
  CommandCtx* ctx = make_ctx(ctxs, app, "estimate",
                             "estimate behavior parameters per node from a traffic log");
  auto log_path = std::make_shared<std::string>();
  auto out_path = std::make_shared<std::string>();
  auto eta = std::make_shared<double>(10.0);
  auto theta_drop = std::make_shared<double>(0.3);
  auto theta_forward = std::make_shared<double>(0.5);
  auto theta_inject = std::make_shared<double>(0.3);
  bind_string(ctx->cmd, ctx->keys, "--log", "log", *log_path, "traffic log CSV");
  bind_double(ctx->cmd, ctx->keys, "eta", *eta, "selfish threshold parameter (> 1)");
  bind_named_double(ctx->cmd, ctx->keys, "--theta-drop", "theta_drop", *theta_drop,
                    "dropping threshold");
  bind_named_double(ctx->cmd, ctx->keys, "--theta-forward", "theta_forward", *theta_forward,
                    "forwarding threshold");
  bind_named_double(ctx->cmd, ctx->keys, "--theta-inject", "theta_inject", *theta_inject,
                    "injecting threshold");
  bind_string(ctx->cmd, ctx->keys, "--out", "out", *out_path, "write the CSV here");
  ctx->run = [log_path, out_path, eta, theta_drop, theta_forward, theta_inject]() {
    if (log_path->empty()) throw ValidationError("--log file is required");
    const StatusThresholds thresholds =
        validate_thresholds(*theta_drop, *theta_forward, *theta_inject);
    const auto records = parse_traffic_log(*log_path);
    if (records.empty()) throw ParseError(*log_path + ": no data rows");

    // Group intervals per node, preserving first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<TrafficRecord>> by_node;
    for (const auto& rec : records) {
      if (!by_node.count(rec.node_id)) order.push_back(rec.node_id);
      by_node[rec.node_id].push_back(rec);
    }

    std::ostringstream csv;
    csv << metadata_line("estimate", "log=" + *log_path + " eta=" + short_num(*eta) +
                                         " theta_drop=" + short_num(*theta_drop) +
                                         " theta_forward=" + short_num(*theta_forward) +
                                         " theta_inject=" + short_num(*theta_inject))
        << "\n";
    csv << "node_id,a_raw,b_raw,c_raw,d_raw,e_raw,a,b,c,d,e,L_bar,t_selfish,status,flags\n";
    for (const auto& node : order) {
      const TrafficRecord merged = aggregate_records(by_node[node]);
      const RawEstimate est = estimate_params(merged, *eta);
      std::vector<std::string> flags = est.flags;
      for (const auto& p : est.division_by_zero) flags.push_back("division_by_zero:" + p);

      double pa = kUnset, pb = kUnset, pc = kUnset, pd = kUnset, pe = kUnset;
      std::string status = "unclassifiable";
      if (est.ok()) {
        const FeasibleProjection proj = project_feasible(est.a, est.b, est.c, est.d, est.e, *eta);
        for (const auto& adj : proj.adjustments) flags.push_back(adj.what);
        pa = proj.params.a;
        pb = proj.params.b;
        pc = proj.params.c;
        pd = proj.params.d;
        pe = proj.params.e;
        const auto cls =
            classify_status({pa, pb, pc, pd, pe}, thresholds);
        status = cls ? name(*cls) : "unclassifiable";
      }
      csv << node << ',' << format_g12(est.a) << ',' << format_g12(est.b) << ','
          << format_g12(est.c) << ',' << format_g12(est.d) << ',' << format_g12(est.e) << ','
          << format_g12(pa) << ',' << format_g12(pb) << ',' << format_g12(pc) << ','
          << format_g12(pd) << ',' << format_g12(pe) << ',' << format_g12(est.life.avg_lifetime)
          << ',' << format_g12(est.life.t_selfish) << ',' << status << ',';
      for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) csv << ';';
        csv << flags[i];
      }
      csv << "\n";
    }
    emit(csv.str(), *out_path);
    return 0;
  };
}

void setup_sweep(std::vector<std::unique_ptr<CommandCtx>>& ctxs, CLI::App& app) {
  CommandCtx* ctx =
      make_ctx(ctxs, app, "sweep", "run one of the four survivability sweep scenarios");
  auto scenario_name = std::make_shared<std::string>();
  auto nodes_text = std::make_shared<std::string>("5,15,25,50");
  auto grid = std::make_shared<int>(50);
  auto horizon_steps = std::make_shared<std::uint64_t>(100);
  auto metric_name = std::make_shared<std::string>("both");
  auto params = std::make_shared<ParamOpts>();
  auto out_path = std::make_shared<std::string>();
  auto chart_path = std::make_shared<std::string>();
  bind_string(ctx->cmd, ctx->keys, "--scenario", "scenario", *scenario_name,
              "forwarding|dropping|injection|loss");
  bind_string(ctx->cmd, ctx->keys, "--nodes", "nodes", *nodes_text,
              "comma-separated node counts");
  bind_int(ctx->cmd, ctx->keys, "--grid", "grid", *grid, "number of sweep points");
  bind_uint64(ctx->cmd, ctx->keys, "--horizon", "horizon", *horizon_steps,
              "embedded-chain steps for transient survivability");
  bind_string(ctx->cmd, ctx->keys, "--metric", "metric", *metric_name,
              "cluster|independent|both");
  params->register_options(ctx->cmd, ctx->keys, false);
  bind_string(ctx->cmd, ctx->keys, "--out", "out", *out_path, "write the CSV here");
  bind_string(ctx->cmd, ctx->keys, "--chart", "chart", *chart_path, "write an SVG chart here");
  ctx->run = [scenario_name, nodes_text, grid, horizon_steps, metric_name, params, out_path,
              chart_path]() {
    const auto scenario = parse_scenario(*scenario_name);
    if (!scenario)
      throw ValidationError("scenario must be forwarding|dropping|injection|loss, got '" +
                            *scenario_name + "'");
    const auto metric = parse_metric(*metric_name);
    if (!metric)
      throw ValidationError("metric must be cluster|independent|both, got '" + *metric_name + "'");

    SweepConfig config;
    config.scenario = *scenario;
    config.node_counts = parse_node_list(*nodes_text);
    config.grid = *grid;
    config.horizon_steps = *horizon_steps;
    config.metric = *metric;
    // Template overrides; unset fields keep the tool defaults.
    if (is_set(params->a)) config.fixed_params.a = params->a;
    if (is_set(params->b)) config.fixed_params.b = params->b;
    if (is_set(params->c)) config.fixed_params.c = params->c;
    if (is_set(params->d)) config.fixed_params.d = params->d;
    if (is_set(params->e)) config.fixed_params.e = params->e;
    config.fixed_params.eta = params->eta;

    const SweepResult result = run_sweep(config);
    const BehaviorParams effective =
        apply_scenario_constraints(config.scenario, config.fixed_params);

    std::ostringstream meta_fields;
    meta_fields << "scenario=" << name(config.scenario) << " nodes=";
    for (std::size_t i = 0; i < config.node_counts.size(); ++i) {
      if (i) meta_fields << ',';
      meta_fields << config.node_counts[i];
    }
    meta_fields << " grid=" << config.grid << " horizon_steps=" << config.horizon_steps
                << " metric=" << *metric_name << " param=" << result.param_name << " lo="
                << short_num(result.lo) << " hi=" << short_num(result.hi) << " a="
                << short_num(effective.a) << " b=" << short_num(effective.b) << " c="
                << short_num(effective.c) << " d=" << short_num(effective.d) << " e="
                << short_num(effective.e) << " eta=" << short_num(effective.eta);
    const std::string meta = metadata_line("sweep", meta_fields.str());

    std::ostringstream csv;
    csv << meta << "\n";
    csv << "scenario,m,param_name,param_value,surv_cluster,surv_independent,horizon_steps\n";
    for (const auto& row : result.rows)
      csv << name(row.scenario) << ',' << row.m << ',' << result.param_name << ','
          << format_g12(row.param_value) << ',' << format_g12(row.surv_cluster) << ','
          << format_g12(row.surv_independent) << ',' << row.horizon_steps << "\n";
    emit(csv.str(), *out_path);

    if (!chart_path->empty()) {
      // One line per node count; the cluster metric is charted unless the
      // sweep was independence-only.
      const bool use_cluster = config.metric != SurvivabilityMetric::IndependenceProduct;
      std::vector<ChartSeries> series;
      for (int m : config.node_counts) {
        ChartSeries s;
        s.label = "m = " + std::to_string(m) +
                  (use_cluster ? " (cluster)" : " (independent)");
        for (const auto& row : result.rows)
          if (row.m == m)
            s.points.emplace_back(row.param_value,
                                  use_cluster ? row.surv_cluster : row.surv_independent);
        series.push_back(std::move(s));
      }
      const std::string title =
          std::string("Survivability vs ") + result.param_name + " (" + name(config.scenario) +
          " scenario)";
      write_file(*chart_path,
                 render_line_chart(title, result.param_name, "survivability", series, meta));
    }
    return 0;
  };
}

void apply_config(CommandCtx& ctx) {
  std::string path = ctx.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("NCBM_CONFIG"); env && *env) path = env;
  }
  if (path.empty()) return;
  for (const auto& entry : parse_config_file(path)) {
    if (!global_keys().count(entry.key))
      throw ParseError(path + ": line " + std::to_string(entry.line) + ": unknown config key '" +
                       entry.key + "'");
    const auto it = ctx.keys.find(entry.key);
    if (it == ctx.keys.end()) continue;  // valid key for another subcommand
    if (it->second.opt != nullptr && it->second.opt->count() > 0) continue;  // flag wins
    it->second.set(entry.value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"correlated node behavior model toolkit"};
  app.set_version_flag("--version", std::string("ncbm ") + kVersion);
  app.require_subcommand(1);

  std::vector<std::unique_ptr<CommandCtx>> ctxs;
  setup_tpm(ctxs, app);
  setup_steady(ctxs, app, "steady");
  setup_steady(ctxs, app, "limiting");
  setup_transient(ctxs, app);
  setup_compose(ctxs, app);
  setup_simulate(ctxs, app);
  setup_estimate(ctxs, app);
  setup_sweep(ctxs, app);

  try {
    app.parse(argc, argv);
    for (auto& ctx : ctxs) {
      if (ctx->cmd->parsed()) {
        apply_config(*ctx);
        return ctx->run();
      }
    }
    std::cerr << "error: no subcommand given\n";
    return 2;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << e.what() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ncbm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
