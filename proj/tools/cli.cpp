#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "cohesion/trace.hpp"

namespace cohesion::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    parts.push_back(first == std::string::npos ? "" : item.substr(first, last - first + 1));
  }
  return parts;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::uint64_t to_seed(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size() || s.starts_with('-')) throw std::invalid_argument("bad seed '" + s + "'");
  return v;
}

std::vector<double> arithmetic(double start, double step, double stop) {
  if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad sigma range");
  std::vector<double> values;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    // Snap to a decimal grid so 0.1 + 0.05 prints and compares as 0.15.
    values.push_back(std::round((start + i * step) * 1e9) / 1e9);
  }
  return values;
}

struct Options {
  std::string scenario;
  std::string planner;
  double beta = 1.0;
  std::uint64_t seed = 0;
  int steps = 0;
  std::string sigmas = "0,0.05,...,0.5";
  std::string seeds = "0..9";
  std::string out;
  std::string config;
};

struct Flags {
  CLI::Option* scenario = nullptr;
  CLI::Option* planner = nullptr;
  CLI::Option* beta = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* steps = nullptr;
  CLI::Option* config = nullptr;
};

void add_common(CLI::App& cmd, Options& o, Flags& f, bool single_run, bool with_planner) {
  if (single_run) {
    f.scenario = cmd.add_option("--scenario", o.scenario, "Scenario name")
                     ->check(CLI::IsMember(scenario_names()));
    f.seed = cmd.add_option("--seed", o.seed, "Scenario seed");
  }
  if (with_planner) {
    f.planner = cmd.add_option("--planner", o.planner, "nominal | cohesive")
                    ->check(CLI::IsMember({"nominal", "cohesive"}));
  }
  f.beta = cmd.add_option("--beta", o.beta, "Cohesion trade-off weight")
               ->check(CLI::NonNegativeNumber);
  f.steps = cmd.add_option("--steps", o.steps, "Simulation steps")->check(CLI::PositiveNumber);
  cmd.add_option("--out", o.out, "Output directory");
  f.config = cmd.add_option("--config", o.config, "JSON config file");
}

// defaults <- config file <- flags
RunConfig resolve(const Options& o, const Flags& f) {
  RunConfig cfg;
  if (f.config && f.config->count() > 0) cfg = load_config_file(o.config, cfg);
  if (f.scenario && f.scenario->count() > 0) cfg.scenario = o.scenario;
  if (f.planner && f.planner->count() > 0) {
    cfg.sim.planner.mode = planner_mode_from_string(o.planner);
  }
  if (f.beta && f.beta->count() > 0) cfg.sim.planner.beta = o.beta;
  if (f.seed && f.seed->count() > 0) cfg.overrides.seed = o.seed;
  if (f.steps && f.steps->count() > 0) cfg.overrides.duration = o.steps;
  return cfg;
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) return {};
  fs::create_directories(out);
  return fs::path(out);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
}

void write_trace_file(const fs::path& path, const std::vector<StepRecord>& trace) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_trace(f, trace);
}

struct TimedRun {
  SimulationResult result;
  RunSummary summary;
};

TimedRun timed_simulate(const Scenario& scenario, const SimulationConfig& sim) {
  const auto begin = std::chrono::steady_clock::now();
  TimedRun run{simulate(scenario, sim), {}};
  const auto end = std::chrono::steady_clock::now();
  run.summary = {scenario.name, sim.planner.mode, sim.planner.beta, scenario.seed,
                 run.result.metrics, std::chrono::duration<double>(end - begin).count()};
  return run;
}

int cmd_run(const Options& o, const Flags& f, std::ostream& out) {
  const RunConfig cfg = resolve(o, f);
  const Scenario scenario = build_scenario(cfg.scenario, cfg.overrides);
  const TimedRun run = timed_simulate(scenario, cfg.sim);
  const json summary = summary_to_json(run.summary);
  if (const fs::path dir = prepare_out(o.out); !dir.empty()) {
    write_trace_file(dir / "trace.jsonl", run.result.trace);
    write_file(dir / "summary.json", summary.dump(2) + "\n");
  }
  out << summary.dump(2) << '\n';
  return kOk;
}

int cmd_compare(const Options& o, const Flags& f, std::ostream& out) {
  const RunConfig cfg = resolve(o, f);
  const Scenario scenario = build_scenario(cfg.scenario, cfg.overrides);

  SimulationConfig nominal_cfg = cfg.sim;
  nominal_cfg.planner.mode = PlannerMode::kNominal;
  SimulationConfig cohesive_cfg = cfg.sim;
  cohesive_cfg.planner.mode = PlannerMode::kCohesive;

  TimedRun nominal = timed_simulate(scenario, nominal_cfg);
  TimedRun cohesive = timed_simulate(scenario, cohesive_cfg);
  const Control worst = max_control_deviation(cohesive.result.controls, nominal.result.controls,
                                              cfg.sim.dynamics);
  cohesive.summary.metrics.max_deviation_from_nominal = worst;

  std::ostringstream deviation;
  for (std::size_t t = 0; t < nominal.result.controls.size(); ++t) {
    const Control& a = cohesive.result.controls[t];
    const Control& b = nominal.result.controls[t];
    deviation << json{{"step", t},
                      {"steering", std::abs(a.steering - b.steering) / cfg.sim.dynamics.steering_max},
                      {"accel", std::abs(a.accel - b.accel) / cfg.sim.dynamics.accel_max}}
                     .dump()
              << '\n';
  }

  const json summary = {{"nominal", summary_to_json(nominal.summary)},
                        {"cohesive", summary_to_json(cohesive.summary)},
                        {"max_deviation", {{"steering", worst.steering}, {"accel", worst.accel}}}};
  if (const fs::path dir = prepare_out(o.out); !dir.empty()) {
    write_trace_file(dir / "nominal.trace.jsonl", nominal.result.trace);
    write_trace_file(dir / "cohesive.trace.jsonl", cohesive.result.trace);
    write_file(dir / "deviation.jsonl", deviation.str());
    write_file(dir / "summary.json", summary.dump(2) + "\n");
  }
  out << summary.dump(2) << '\n';
  return kOk;
}

int cmd_sweep(const Options& o, const Flags& f, const std::vector<double>& sigmas,
              const std::vector<std::uint64_t>& seeds, std::ostream& out) {
  const RunConfig cfg = resolve(o, f);
  const std::vector<SweepRow> rows = noise_sweep(sigmas, seeds, cfg.sim, cfg.overrides);

  std::ostringstream csv;
  csv << "sigma,seed,collided,min_clearance\n";
  for (const auto& r : rows) {
    // json's number formatting is shortest round-trip, so 0.05 stays 0.05.
    csv << json(r.sigma).dump() << ',' << r.seed << ',' << (r.collided ? "true" : "false") << ','
        << json(r.min_clearance).dump() << '\n';
  }

  std::map<double, std::pair<int, int>> tally;  // sigma -> (successes, runs)
  for (const auto& r : rows) {
    auto& [ok, total] = tally[r.sigma];
    ok += r.collided ? 0 : 1;
    ++total;
  }
  json rates = json::array();
  std::optional<double> crossover;
  for (const auto& [sigma, counts] : tally) {
    const double rate = static_cast<double>(counts.first) / counts.second;
    rates.push_back({{"sigma", sigma}, {"success_rate", rate}, {"runs", counts.second}});
    if (!crossover && rate < 1.0) crossover = sigma;
  }
  const json summary = {{"rows", rows.size()},
                        {"success_rates", rates},
                        {"crossover_sigma", crossover ? json(*crossover) : json(nullptr)}};

  if (const fs::path dir = prepare_out(o.out); !dir.empty()) {
    write_file(dir / "sweep.csv", csv.str());
    write_file(dir / "sweep_summary.json", summary.dump(2) + "\n");
  } else {
    out << csv.str();
  }
  out << summary.dump(2) << '\n';
  return kOk;
}

}  // namespace

std::vector<double> parse_sigmas(const std::string& text) {
  const auto colon = split(text, ':');
  if (colon.size() == 3) {
    return arithmetic(to_double(colon[0]), to_double(colon[1]), to_double(colon[2]));
  }
  const auto parts = split(text, ',');
  std::vector<double> values;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] == "...") {
      if (values.size() < 2 || i + 1 != parts.size() - 1) {
        throw std::invalid_argument("sigmas: '...' needs two leading values and one final value");
      }
      const double step = values[values.size() - 1] - values[values.size() - 2];
      const double stop = to_double(parts[i + 1]);
      const auto tail = arithmetic(values.back(), step, stop);
      values.insert(values.end(), tail.begin() + 1, tail.end());
      if (std::abs(values.back() - stop) > 1e-9) values.push_back(stop);
      break;
    }
    values.push_back(to_double(parts[i]));
  }
  if (values.empty()) throw std::invalid_argument("sigmas: empty list");
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument("sigmas must be >= 0");
  }
  return values;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const std::uint64_t first = to_seed(text.substr(0, dots));
    const std::uint64_t last = to_seed(text.substr(dots + 2));
    if (last < first) throw std::invalid_argument("seeds: empty range");
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
    return seeds;
  }
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(text, ',')) seeds.push_back(to_seed(part));
  if (seeds.empty()) throw std::invalid_argument("seeds: empty list");
  return seeds;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cohesion-augmented MPC driving simulator"};
  app.require_subcommand(1);

  Options run_opts, compare_opts, sweep_opts;
  Flags run_flags, compare_flags, sweep_flags;

  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one scenario with one planner");
  add_common(*run_cmd, run_opts, run_flags, true, true);

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Run nominal and cohesive planners on one scenario");
  add_common(*compare_cmd, compare_opts, compare_flags, true, false);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Noise sweep over the swerve scenario");
  add_common(*sweep_cmd, sweep_opts, sweep_flags, false, false);
  sweep_cmd->add_option("--sigmas", sweep_opts.sigmas, "Noise scales, e.g. 0,0.05,...,0.5");
  sweep_cmd->add_option("--seeds", sweep_opts.seeds, "Seeds, e.g. 0..9");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kUsageError;
  }

  std::vector<double> sigmas;
  std::vector<std::uint64_t> seeds;
  if (*sweep_cmd) {
    try {
      sigmas = parse_sigmas(sweep_opts.sigmas);
      seeds = parse_seeds(sweep_opts.seeds);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n' << sweep_cmd->help();
      return kUsageError;
    }
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, run_flags, out);
    if (*compare_cmd) return cmd_compare(compare_opts, compare_flags, out);
    return cmd_sweep(sweep_opts, sweep_flags, sigmas, seeds, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace cohesion::cli
