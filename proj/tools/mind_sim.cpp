#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mind/harness.hpp"

namespace {

using namespace mind;

std::shared_ptr<const Profile> open_profile(const std::string& path) {
  return std::make_shared<const Profile>(load_profile(path));
}

// "perfect", "noisy:<confusion rate>"
UserModel parse_model(const std::string& spec, const LatencyModel& latency, std::uint64_t seed) {
  if (spec == "perfect") return UserModel::perfect(latency, seed);
  if (spec.rfind("noisy:", 0) == 0) {
    try {
      return UserModel::noisy(NoiseModel::symmetric_confusion(std::stod(spec.substr(6))), latency, seed);
    } catch (const std::logic_error&) {
    }
  }
  throw ConfigError("model must be 'perfect' or 'noisy:<rate>', got '" + spec + "'");
}

// "const:<ms>", "lognormal:<mu>,<sigma>"
LatencyModel parse_latency(const std::string& spec) {
  try {
    if (spec.rfind("const:", 0) == 0) return ConstantLatency{std::stoll(spec.substr(6))};
    if (spec.rfind("lognormal:", 0) == 0) {
      const auto rest = spec.substr(10);
      const auto comma = rest.find(',');
      if (comma != std::string::npos) {
        return LogNormalLatency{std::stod(rest.substr(0, comma)), std::stod(rest.substr(comma + 1))};
      }
    }
  } catch (const std::logic_error&) {
  }
  throw ConfigError("latency must be 'const:<ms>' or 'lognormal:<mu>,<sigma>', got '" + spec + "'");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Headless three-action keyboard and pointer engine: replay, planning and simulation"};
  app.require_subcommand(1);
  std::string profile_path = "profiles/default/profile.json";

  // run: decode a signal trace and feed it to the engine.
  auto* run_cmd = app.add_subcommand("run", "Decode a signal trace and write the engine event log");
  std::string trace_path, log_path = "-", focus = "desktop";
  run_cmd->add_option("--profile", profile_path, "Profile file")->capture_default_str();
  run_cmd->add_option("--trace", trace_path, "Trace file (timestamp, channel, intensity)")->required();
  run_cmd->add_option("--log", log_path, "Event log output, - for stdout")->capture_default_str();
  run_cmd->add_option("--app", focus, "Focused application at start")->capture_default_str();

  // simulate: script -> synthetic trace.
  auto* sim_cmd = app.add_subcommand("simulate", "Synthesize a signal trace for an action script");
  std::vector<std::string> actions;
  std::string sim_out = "-";
  double confusion = 0.0, miss = 0.0, false_fire = 0.0;
  Millis gap = 2000;
  std::uint64_t seed = 0;
  sim_cmd->add_option("--profile", profile_path, "Profile file (channel mapping)")->capture_default_str();
  sim_cmd->add_option("--actions", actions, "Actions: scroll, zoom_in, zoom_out")->required()->delimiter(',');
  sim_cmd->add_option("--confusion", confusion, "Symmetric confusion rate")->capture_default_str();
  sim_cmd->add_option("--miss", miss, "Miss rate")->capture_default_str();
  sim_cmd->add_option("--false-fire", false_fire, "Spurious detections per action")->capture_default_str();
  sim_cmd->add_option("--gap", gap, "Milliseconds between intended actions")->capture_default_str();
  sim_cmd->add_option("--seed", seed, "Noise seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "Trace output, - for stdout")->capture_default_str();

  // plan: optimal action sequence for a task.
  auto* plan_cmd = app.add_subcommand("plan", "Print an optimal plan for a task script");
  std::string task_path;
  plan_cmd->add_option("--profile", profile_path, "Profile file")->capture_default_str();
  plan_cmd->add_option("--task", task_path, "Task script")->required();

  // bench: simulated users on a task.
  auto* bench_cmd = app.add_subcommand("bench", "Run simulated users on a task and summarize");
  std::string model_spec = "perfect", latency_spec = "const:2000", tsv_path, json_path = "-";
  std::size_t seeds = 100;
  double per_action_s = 2.0;
  bench_cmd->add_option("--profile", profile_path, "Profile file")->capture_default_str();
  bench_cmd->add_option("--task", task_path, "Task script")->required();
  bench_cmd->add_option("--model", model_spec, "perfect | noisy:<rate>")->capture_default_str();
  bench_cmd->add_option("--latency", latency_spec, "const:<ms> | lognormal:<mu>,<sigma>")->capture_default_str();
  bench_cmd->add_option("--seeds", seeds, "Number of seeds")->capture_default_str();
  bench_cmd->add_option("--seed", seed, "First seed")->capture_default_str();
  bench_cmd->add_option("--per-action-s", per_action_s, "Seconds per action for the time projection")
      ->capture_default_str();
  bench_cmd->add_option("--tsv", tsv_path, "Per-run table output, - for stdout");
  bench_cmd->add_option("--json", json_path, "Summary output, - for stdout")->capture_default_str();

  // export-layout: the layout a profile uses for an application.
  auto* export_cmd = app.add_subcommand("export-layout", "Print the keyboard layout used for an application");
  export_cmd->add_option("--profile", profile_path, "Profile file")->capture_default_str();
  export_cmd->add_option("--app", focus, "Application id")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  auto emit = [](const std::string& path, const std::string& text) {
    if (path == "-") {
      std::cout << text;
    } else {
      open_out(path) << text;
    }
  };

  try {
    if (*run_cmd) {
      auto profile = open_profile(profile_path);
      std::ifstream in(trace_path);
      if (!in) throw IoError("cannot read " + trace_path);
      const auto events = decode_stream(read_trace(in), profile->detection);
      MockDesktop desk;
      desk.focused_app = focus;
      Workstation ws{Engine(profile, desk.screen, focus), desk};
      std::vector<OutputEvent> log;
      for (const auto& e : events) {
        auto out = ws.feed(e);
        log.insert(log.end(), out.begin(), out.end());
      }
      std::ostringstream os;
      write_event_log(os, log);
      emit(log_path, os.str());
    } else if (*sim_cmd) {
      auto profile = open_profile(profile_path);
      std::vector<UserAction> script;
      for (const auto& a : actions) {
        auto parsed = parse_action(a);
        if (!parsed) throw InputError("unknown action '" + a + "'");
        script.push_back(*parsed);
      }
      auto noise = NoiseModel::symmetric_confusion(confusion, seed);
      noise.miss_rate = miss;
      noise.false_fire_rate = false_fire;
      std::ostringstream os;
      write_trace(os, simulate_signals(script, noise, gap, profile->detection));
      emit(sim_out, os.str());
    } else if (*plan_cmd) {
      auto profile = open_profile(profile_path);
      const auto task = load_task(task_path);
      const auto plan = plan_optimal(task, profile);
      for (const auto& step : plan.steps) std::cout << to_string(step) << '\n';
      std::cout << "# " << plan.action_count() << " actions\n";
    } else if (*bench_cmd) {
      auto profile = open_profile(profile_path);
      Planner planner(load_task(task_path));
      const auto model = parse_model(model_spec, parse_latency(latency_spec), seed);
      const auto runs = run_seeds(planner, model, profile, seeds);
      if (!tsv_path.empty()) {
        std::ostringstream os;
        write_metrics_tsv(os, runs, seed);
        emit(tsv_path, os.str());
      }
      emit(json_path, summary_to_json(summarize(runs, per_action_s)).dump(2) + "\n");
    } else if (*export_cmd) {
      auto profile = open_profile(profile_path);
      std::cout << serialize_layout(layout_for(*profile, focus));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
