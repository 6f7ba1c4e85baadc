#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wavesim/config.hpp"
#include "wavesim/energy.hpp"
#include "wavesim/errors.hpp"
#include "wavesim/hash.hpp"
#include "wavesim/metrics.hpp"
#include "wavesim/policy.hpp"
#include "wavesim/simulator.hpp"
#include "wavesim/train.hpp"
#include "wavesim/trajectory.hpp"

#ifndef WAVESIM_VERSION
#define WAVESIM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace wavesim::cli {

namespace {

class SimulationAborted : public Error {
 public:
  using Error::Error;
};

// A command and its options as strings; enough to replay the command.
struct Invocation {
  std::string command;
  std::map<std::string, std::string> options;
  std::optional<KeyValueConfig> embedded_config;  // set when replaying a manifest

  std::string opt(const std::string& key, const std::string& fallback = "") const {
    const auto it = options.find(key);
    return it == options.end() ? fallback : it->second;
  }
  bool has(const std::string& key) const { return options.count(key) > 0; }
};

class RunContext {
 public:
  RunContext(const Invocation& inv, fs::path out) : inv_(inv), out_(std::move(out)) {
    fs::create_directories(out_);
    start_ = std::chrono::steady_clock::now();
  }

  const fs::path& out() const { return out_; }

  template <typename Writer>
  void write_artifact(const std::string& name, Writer&& writer) {
    const fs::path path = out_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    writer(os);
    os.close();
    artifacts_.push_back({name, file_hash(path.string())});
  }

  void add_input(const std::string& path) { inputs_.push_back({path, file_hash(path)}); }
  void set_config(const KeyValueConfig& kv) { config_ = kv; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  void write_manifest() const {
    json m;
    m["command"] = inv_.command;
    m["version"] = WAVESIM_VERSION;
    m["options"] = inv_.options;
    if (seed_) m["seed"] = *seed_;
    if (config_) {
      m["config_hash"] = hex64(config_->hash());
      m["config"] = config_->canonical();
      m["config_base_dir"] = config_->base_dir();
    }
    m["inputs"] = json::array();
    for (const auto& [p, h] : inputs_) m["inputs"].push_back({{"path", p}, {"hash", h}});
    m["artifacts"] = json::array();
    for (const auto& [p, h] : artifacts_) m["artifacts"].push_back({{"path", p}, {"hash", h}});
    m["wall_clock_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream os(out_ / "manifest.json");
    os << m.dump(2) << '\n';
  }

 private:
  const Invocation& inv_;
  fs::path out_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> artifacts_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::optional<KeyValueConfig> config_;
  std::optional<std::uint64_t> seed_;
};

fs::path output_dir(const Invocation& inv) {
  if (inv.has("out")) return inv.opt("out");
  const char* root = std::getenv("WAVESIM_OUT");
  return fs::path(root && *root ? root : "wavesim-out") / inv.command;
}

KeyValueConfig load_config(const Invocation& inv, bool required) {
  if (inv.embedded_config) return *inv.embedded_config;
  if (!inv.has("config")) {
    if (required) throw ConfigError("--config is required");
    return {};
  }
  return KeyValueConfig::load(inv.opt("config"));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_file(const std::string& path) {
  if (!fs::exists(path)) throw MissingFile("no such file '" + path + "'");
}

// stub:<variant> yields a zero-weight policy written next to the outputs.
std::string materialize_policy(const std::string& spec, RunContext& ctx) {
  if (spec.rfind("stub:", 0) == 0) {
    const PolicyVariant variant = parse_policy_variant(spec.substr(5));
    const std::string name = "policy_stub.txt";
    ctx.write_artifact(name, [&](std::ostream& os) { write_policy(os, Policy::zeros(variant)); });
    return fs::absolute(ctx.out() / name).string();
  }
  check_file(spec);
  ctx.add_input(spec);
  return fs::absolute(spec).string();
}

void set_policy_controller(KeyValueConfig& kv, const std::string& policy_path) {
  const Policy p = load_policy(policy_path);
  kv.set("av", is_acc_variant(p.variant()) ? "rl_acc" : "rl_accel");
  kv.set("policy", policy_path);
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Invocation& inv) {
  RunContext ctx(inv, output_dir(inv));
  KeyValueConfig kv = load_config(inv, true);
  if (inv.has("seed")) kv.set("seed", inv.opt("seed"));
  if (inv.has("scenario")) kv.set("trajectory.kind", inv.opt("scenario"));
  if (inv.has("penetration")) {
    kv.erase("humans_per_platoon");
    kv.set("penetration", inv.opt("penetration"));
  }
  if (inv.has("policy")) set_policy_controller(kv, materialize_policy(inv.opt("policy"), ctx));
  if (kv.has("trajectory.file")) ctx.add_input(kv.resolve_path(kv.get_string("trajectory.file", "")));
  if (kv.has("policy") && !inv.has("policy")) ctx.add_input(kv.resolve_path(kv.get_string("policy", "")));

  const ScenarioConfig cfg = scenario_from_config(kv);
  kv.reject_unknown();
  ctx.set_config(kv);
  ctx.set_seed(cfg.seed);

  const SimulationTrace trace = run_scenario(cfg);
  ctx.write_artifact("trace.csv", [&](std::ostream& os) { write_trace_csv(os, trace); });
  if (!trace.rows.empty()) {
    const MetricsReport rep = compute_metrics(trace);
    ctx.write_artifact("metrics.csv", [&](std::ostream& os) { write_metrics_report_csv(os, rep); });
    ctx.write_artifact("vehicles.csv",
                       [&](std::ostream& os) { write_vehicle_stats_csv(os, rep.vehicles); });
  }
  ctx.write_manifest();
  if (trace.aborted) throw SimulationAborted("simulation aborted: " + trace.abort_reason);
  std::cout << "wrote " << trace.steps << " steps to " << ctx.out().string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- train

int cmd_train(const Invocation& inv) {
  RunContext ctx(inv, output_dir(inv));
  KeyValueConfig kv = load_config(inv, true);
  if (inv.has("seed")) kv.set("train.seed", inv.opt("seed"));
  const TrainConfig cfg = train_from_config(kv);
  kv.reject_unknown();
  ctx.set_config(kv);
  ctx.set_seed(cfg.seed);

  const bool quiet = inv.opt("quiet") == "true";
  const TrainResult res = train(cfg, [&](const CurvePoint& p, const PpoStats& s) {
    if (quiet) return;
    std::cerr << "iter " << p.iter << " return " << p.mean_return << " mpg " << p.system_mpg
              << " kl " << s.approx_kl << '\n';
  });
  ctx.write_artifact("policy.txt", [&](std::ostream& os) { write_policy(os, res.best); });
  ctx.write_artifact("learning_curve.csv",
                     [&](std::ostream& os) { write_learning_curve_csv(os, res.curve); });
  ctx.write_manifest();
  std::cout << "best iteration " << res.best_iter << ", policy in " << ctx.out().string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- evaluate

struct EvalRow {
  std::string scenario;
  std::string controller;
  MetricsReport report;
  bool aborted = false;
};

int cmd_evaluate(const Invocation& inv) {
  RunContext ctx(inv, output_dir(inv));
  KeyValueConfig base = load_config(inv, false);
  if (inv.has("seed")) base.set("seed", inv.opt("seed"));
  if (inv.has("penetration")) {
    base.erase("humans_per_platoon");
    base.set("penetration", inv.opt("penetration"));
  } else if (!base.has("humans_per_platoon") && !base.has("penetration")) {
    base.set("penetration", "0.04");
  }
  if (!base.has("n_platoons")) base.set("n_platoons", "8");

  std::optional<std::string> policy_path;
  if (inv.has("policy")) policy_path = materialize_policy(inv.opt("policy"), ctx);

  const auto scenarios = split_list(inv.opt("scenario", "bottleneck,shockwave,freeflow"));
  auto baselines = split_list(inv.opt("baseline", "idm,follower_stopper,stock_acc"));
  if (std::find(baselines.begin(), baselines.end(), "idm") == baselines.end()) {
    baselines.insert(baselines.begin(), "idm");
  }

  struct Job {
    std::string scenario, controller;
    KeyValueConfig kv;
  };
  std::vector<Job> jobs;
  for (const auto& sc : scenarios) {
    parse_trajectory_kind(sc);
    std::vector<std::string> controllers = baselines;
    if (policy_path) controllers.push_back("rl");
    for (const auto& c : controllers) {
      KeyValueConfig kv = base;
      kv.set("trajectory.kind", sc);
      if (c == "rl") {
        set_policy_controller(kv, *policy_path);
      } else {
        kv.set("av", c);
      }
      jobs.push_back({sc, c, kv});
    }
  }

  ScenarioConfig probe = scenario_from_config(jobs.front().kv);
  jobs.front().kv.reject_unknown();
  ctx.set_config(base);
  ctx.set_seed(probe.seed);

  // Independent runs; merged in job order.
  std::vector<std::future<EvalRow>> futures;
  for (const auto& job : jobs) {
    futures.push_back(std::async(std::launch::async, [job] {
      const ScenarioConfig cfg = scenario_from_config(job.kv);
      const SimulationTrace trace = run_scenario(cfg);
      return EvalRow{job.scenario, job.controller, compute_metrics(trace), trace.aborted};
    }));
  }
  std::vector<EvalRow> rows;
  for (auto& f : futures) rows.push_back(f.get());

  std::map<std::string, const EvalRow*> idm_of;
  for (const auto& r : rows) {
    if (r.controller == "idm") idm_of[r.scenario] = &r;
  }
  auto pct = [](double v, double b) { return b != 0 ? 100.0 * (v - b) / b : 0.0; };
  ctx.write_artifact("comparison.csv", [&](std::ostream& os) {
    os << "scenario,controller,fuel_economy_mpg,fuel_economy_pct,throughput_vph,throughput_pct,"
          "speed_mps,speed_pct,aborted\n";
    for (const auto& r : rows) {
      const MetricsReport& b = idm_of.at(r.scenario)->report;
      os << r.scenario << ',' << r.controller << ',' << format_double(r.report.system_mpg) << ','
         << format_double(pct(r.report.system_mpg, b.system_mpg)) << ','
         << format_double(r.report.throughput) << ','
         << format_double(pct(r.report.throughput, b.throughput)) << ','
         << format_double(r.report.mean_speed) << ','
         << format_double(pct(r.report.mean_speed, b.mean_speed)) << ',' << (r.aborted ? 1 : 0)
         << '\n';
    }
  });
  ctx.write_manifest();
  bool any_abort = false;
  for (const auto& r : rows) any_abort = any_abort || r.aborted;
  if (any_abort) throw SimulationAborted("at least one evaluation run aborted");
  std::cout << "wrote " << rows.size() << " rows to " << (ctx.out() / "comparison.csv").string()
            << '\n';
  return kOk;
}

// ---------------------------------------------------------------- analyze

double opt_double(const Invocation& inv, const std::string& key, double fallback) {
  if (!inv.has(key)) return fallback;
  try {
    return std::stod(inv.opt(key));
  } catch (const std::exception&) {
    throw ConfigError("--" + key + " expects a number");
  }
}

int cmd_analyze(const Invocation& inv) {
  if (!inv.has("trace")) throw ConfigError("--trace is required");
  const std::string path = inv.opt("trace");
  check_file(path);
  RunContext ctx(inv, output_dir(inv));
  ctx.add_input(path);
  std::ifstream in(path);
  const SimulationTrace trace = read_trace_csv(in);
  if (trace.rows.empty()) throw ConfigError("trace '" + path + "' has no rows");

  const double bin = opt_double(inv, "bin", 50.0);
  const double split = opt_double(inv, "split", 23.0);
  const double near = opt_double(inv, "near", 300.0);
  const double far = opt_double(inv, "far", 600.0);
  const double hist_bin = opt_double(inv, "hist-bin", 1.0);
  const auto decimate = static_cast<std::size_t>(opt_double(inv, "decimate", 1.0));
  const double cell_m = opt_double(inv, "cell-m", 50.0);
  const double cell_s = opt_double(inv, "cell-s", 10.0);

  const MetricsReport rep = compute_metrics(trace);
  ctx.write_artifact("metrics.csv", [&](std::ostream& os) { write_metrics_report_csv(os, rep); });
  ctx.write_artifact("vehicles.csv",
                     [&](std::ostream& os) { write_vehicle_stats_csv(os, rep.vehicles); });

  const auto annotated = distance_to_nearest_av(trace);
  if (!annotated.empty()) {
    const BinnedAvStats binned = binned_stats(annotated, bin);
    ctx.write_artifact("binned_stats.csv",
                       [&](std::ostream& os) { write_binned_stats_csv(os, binned); });
  }

  std::vector<std::pair<double, double>> near_pts, far_pts;
  for (const auto& s : annotated) {
    if (!s.distance) continue;
    if (*s.distance <= near) {
      near_pts.emplace_back(s.speed, s.accel);
    } else if (*s.distance <= far) {
      far_pts.emplace_back(s.speed, s.accel);
    }
  }
  ctx.write_artifact("va_determinants.csv", [&](std::ostream& os) {
    os << "group,lo_m,hi_m,count,det,mean_speed_mps,mean_accel_mps2\n";
    auto row = [&](const char* name, double lo, double hi,
                   const std::vector<std::pair<double, double>>& pts) {
      os << name << ',' << format_double(lo) << ',' << format_double(hi) << ',';
      try {
        const VaDeterminant d = va_gaussian_det(pts, split);
        os << d.count << ',' << format_double(d.det) << ',' << format_double(d.mean(0)) << ','
           << format_double(d.mean(1)) << '\n';
      } catch (const DegenerateCluster&) {
        os << "0,nan,nan,nan\n";
      }
    };
    row("near", 0.0, near, near_pts);
    row("far", near, far, far_pts);
  });

  const SpeedHistogram hist = speed_histogram(trace, hist_bin, std::max<std::size_t>(1, decimate));
  ctx.write_artifact("speed_histogram.csv", [&](std::ostream& os) { write_histogram_csv(os, hist); });
  const TimeSpaceGrid grid = time_space_grid(trace, cell_m, cell_s);
  ctx.write_artifact("time_space.csv", [&](std::ostream& os) { write_time_space_csv(os, grid); });
  ctx.write_manifest();
  std::cout << "analysis written to " << ctx.out().string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- gen-trajectory

int cmd_gen_trajectory(const Invocation& inv) {
  RunContext ctx(inv, output_dir(inv));
  const TrajectoryKind kind = parse_trajectory_kind(inv.opt("kind", "shockwave"));
  const double duration = opt_double(inv, "duration", 600.0);
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(inv.opt("seed", "0"));
  } catch (const std::exception&) {
    throw ConfigError("--seed expects a non-negative integer");
  }
  if (duration < 60.0) throw ConfigError("--duration must be at least 60 s");
  ctx.set_seed(seed);
  const LeaderTrajectory traj = synth_trajectory(kind, duration, seed);
  ctx.write_artifact("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  ctx.write_manifest();
  std::cout << "wrote " << traj.times.size() << " samples\n";
  return kOk;
}

// ---------------------------------------------------------------- fit-energy

int cmd_fit_energy(const Invocation& inv) {
  RunContext ctx(inv, output_dir(inv));
  const EnergyModel model = fit_energy_model(PhysicsBaseline{});
  const ConvexityReport report = check_convexity(model);
  ctx.write_artifact("energy_model.txt", [&](std::ostream& os) { write_energy_model(os, model); });
  ctx.write_artifact("convexity.csv", [&](std::ostream& os) {
    os << "direction,v_mps,a_mps2,second_derivative\n";
    for (const auto& v : report.violations) {
      os << v.direction << ',' << format_double(v.v) << ',' << format_double(v.a) << ','
         << format_double(v.second_derivative) << '\n';
    }
  });
  ctx.write_manifest();
  std::cout << report.violations.size() << " convexity violations over " << report.points_checked
            << " points\n";
  return kOk;
}

// ---------------------------------------------------------------- rerun

int dispatch(const Invocation& inv);

int cmd_rerun(const Invocation& inv) {
  if (!inv.has("manifest")) throw ConfigError("--manifest is required");
  const std::string path = inv.opt("manifest");
  check_file(path);
  std::ifstream in(path);
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  Invocation replay;
  replay.command = m.at("command").get<std::string>();
  if (replay.command == "rerun") throw ConfigError("cannot replay a rerun manifest");
  replay.options = m.at("options").get<std::map<std::string, std::string>>();
  if (m.contains("config")) {
    replay.embedded_config = KeyValueConfig::from_string(m.at("config").get<std::string>(),
                                                         m.value("config_base_dir", "."));
  }
  for (const auto& input : m.value("inputs", json::array())) {
    const auto p = input.at("path").get<std::string>();
    check_file(p);
    if (file_hash(p) != input.at("hash").get<std::string>()) {
      throw ConfigError("input '" + p + "' changed since the manifest was written");
    }
  }
  replay.options["out"] = inv.has("out") ? inv.opt("out") : (output_dir(replay).string() + "-rerun");
  return dispatch(replay);
}

int dispatch(const Invocation& inv) {
  if (inv.command == "simulate") return cmd_simulate(inv);
  if (inv.command == "train") return cmd_train(inv);
  if (inv.command == "evaluate") return cmd_evaluate(inv);
  if (inv.command == "analyze") return cmd_analyze(inv);
  if (inv.command == "gen-trajectory") return cmd_gen_trajectory(inv);
  if (inv.command == "fit-energy") return cmd_fit_energy(inv);
  if (inv.command == "rerun") return cmd_rerun(inv);
  throw ConfigError("unknown command '" + inv.command + "'");
}

struct Registered {
  CLI::App* app;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"wavesim: mixed-autonomy platoon simulation, training and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WAVESIM_VERSION);

  std::map<std::string, Registered> subs;
  auto add = [&](const std::string& name, const std::string& help,
                 const std::vector<std::pair<std::string, std::string>>& opts) {
    Registered& r = subs[name];
    r.app = app.add_subcommand(name, help);
    for (const auto& [flag, desc] : opts) {
      r.options[flag] = r.app->add_option("--" + flag, r.values[flag], desc);
    }
    r.options["out"] = r.app->add_option("--out", r.values["out"],
                                         "output directory (default $WAVESIM_OUT/<command>)");
  };
  add("simulate", "run one scenario and write its trace and metrics",
      {{"config", "scenario config file"}, {"seed", "override seed"},
       {"scenario", "override trajectory kind"}, {"penetration", "AV fraction"},
       {"policy", "policy file or stub:<variant>"}});
  add("train", "train a policy with PPO", {{"config", "training config file"}, {"seed", "override train.seed"}});
  subs["train"].app->add_flag("--quiet", "no per-iteration progress");
  add("evaluate", "compare controllers against the pure-IDM baseline",
      {{"config", "base scenario config"}, {"policy", "policy file or stub:<variant>"},
       {"scenario", "comma list of bottleneck,shockwave,freeflow"},
       {"baseline", "comma list of idm,follower_stopper,stock_acc"},
       {"penetration", "AV fraction (default 0.04)"}, {"seed", "override seed"}});
  add("analyze", "binned stats, determinants, histograms and time-space grid of a trace",
      {{"trace", "trace CSV"}, {"bin", "distance bin [m]"}, {"split", "v-a split speed [m/s]"},
       {"near", "near-group limit [m]"}, {"far", "far-group limit [m]"},
       {"hist-bin", "histogram bin [m/s]"}, {"decimate", "keep every n-th row"},
       {"cell-m", "grid cell [m]"}, {"cell-s", "grid cell [s]"}});
  add("gen-trajectory", "write a synthetic leader trajectory",
      {{"kind", "freeflow | shockwave | bottleneck"}, {"duration", "seconds"}, {"seed", "seed"}});
  add("fit-energy", "refit the default energy model and check convexity", {});
  add("rerun", "replay a command from its manifest", {{"manifest", "manifest.json"}});

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  Invocation inv;
  for (auto& [name, r] : subs) {
    if (!r.app->parsed()) continue;
    inv.command = name;
    for (const auto& [flag, opt] : r.options) {
      if (opt->count() > 0) inv.options[flag] = r.values[flag];
    }
    if (name == "train" && r.app->count("--quiet") > 0) inv.options["quiet"] = "true";
  }

  try {
    return dispatch(inv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const MissingFile& e) {
    std::cerr << "missing file: " << e.what() << '\n';
    return kMissingFile;
  } catch (const SimulationAborted& e) {
    std::cerr << e.what() << '\n';
    return kSimulationAbort;
  } catch (const CollisionError& e) {
    std::cerr << "simulation aborted: " << e.what() << '\n';
    return kSimulationAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace wavesim::cli
