#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/planner.hpp"
#include "mind/rng.hpp"
#include "mind/signal.hpp"

namespace mind {

struct ConstantLatency {
  Millis ms = 2000;
  friend bool operator==(const ConstantLatency&, const ConstantLatency&) = default;
};

// Delay whose natural log is normal(mu, sigma), in milliseconds.
struct LogNormalLatency {
  double mu = 7.6;
  double sigma = 0.3;
  friend bool operator==(const LogNormalLatency&, const LogNormalLatency&) = default;
};

using LatencyModel = std::variant<ConstantLatency, LogNormalLatency>;

inline Millis draw_latency(const LatencyModel& m, Rng& rng) {
  if (const auto* c = std::get_if<ConstantLatency>(&m)) return c->ms;
  const auto& ln = std::get<LogNormalLatency>(m);
  const double ms = std::exp(rng.normal(ln.mu, ln.sigma));
  return std::max<Millis>(1, static_cast<Millis>(std::llround(std::min(ms, 1e12))));
}

enum class UserKind { Perfect, Noisy };

struct UserModel {
  UserKind kind = UserKind::Perfect;
  NoiseModel noise;  // ignored for Perfect
  LatencyModel latency = ConstantLatency{};
  std::uint64_t seed = 0;
  double budget_factor = 50.0;  // runs stop after budget_factor x minimal actions

  static UserModel perfect(LatencyModel latency, std::uint64_t seed = 0) {
    return {UserKind::Perfect, NoiseModel::none(), latency, seed};
  }
  static UserModel noisy(NoiseModel noise, LatencyModel latency, std::uint64_t seed = 0) {
    return {UserKind::Noisy, noise, latency, seed};
  }

  void validate() const {
    if (const auto* c = std::get_if<ConstantLatency>(&latency)) {
      if (c->ms <= 0) throw ConfigError("constant latency must be positive");
    } else if (!(std::get<LogNormalLatency>(latency).sigma >= 0.0)) {
      throw ConfigError("log-normal sigma must be non-negative");
    }
    if (!(budget_factor >= 1.0)) throw ConfigError("budget factor must be at least 1");
    if (kind == UserKind::Noisy) noise.validate();
  }
};

struct TaskMetrics {
  std::size_t actions_taken = 0;
  std::size_t minimal_actions = 0;
  long long excess = 0;
  Millis duration_ms = 0;
  bool success = false;
  friend bool operator==(const TaskMetrics&, const TaskMetrics&) = default;
};

struct RunResult {
  TaskMetrics metrics;
  std::vector<OutputEvent> log;
};

// One simulated attempt at a script.
//
// The user always performs the next step of an optimal plan from the state
// the system is actually in. A Perfect user never deviates, so this replays
// the initial plan; a Noisy user's detected actions pass through the noise
// model, and any deviation is corrected by replanning from where it landed.
// Latencies are drawn per intended action; waits run to the click deadline.
// The second press of a double click is hurried so it lands inside the click
// window. actions_taken counts intended actions (what the user did), not
// detections. The planner is shared across runs and reuses its state graph.
inline RunResult run_detailed(Planner& planner, const UserModel& model,
                              std::shared_ptr<const Profile> profile) {
  model.validate();
  const auto& script = planner.script();
  World w = initial_world(script, std::move(profile));
  RunResult r;
  auto& m = r.metrics;
  m.minimal_actions = planner.distance(w);
  const auto budget = static_cast<std::size_t>(
      std::ceil(model.budget_factor * static_cast<double>(std::max<std::size_t>(1, m.minimal_actions))));

  Rng latency_rng(model.seed);
  std::optional<NoiseChannel> channel;
  if (model.kind == UserKind::Noisy) {
    auto noise = model.noise;
    noise.seed = model.seed ^ 0x9e3779b97f4a7c15ULL;
    channel.emplace(noise);
  }

  auto record = [&](std::vector<OutputEvent> events) {
    r.log.insert(r.log.end(), events.begin(), events.end());
  };
  Millis t = 0;
  while (!w.tracker.done(script)) {
    std::optional<PlanStep> step;
    try {
      step = planner.next_step(w);
    } catch (const PlanningError&) {
      break;  // stranded: nothing completes the script from here
    }
    std::optional<Millis> deadline;
    if (w.engine.mode() == Mode::Pointer) deadline = w.engine.pointer().deadline;
    if (std::holds_alternative<WaitStep>(*step)) {
      t = std::max(t, *deadline);
      record(advance_world_to(w, script, t));
      continue;
    }
    if (m.actions_taken >= budget) break;
    Millis latency = draw_latency(model.latency, latency_rng);
    if (deadline) latency = std::clamp<Millis>(*deadline - t - 1, 1, latency);
    t += latency;
    ++m.actions_taken;
    const auto intended = std::get<UserAction>(*step);
    const auto detected = channel ? channel->perturb(intended) : std::vector<UserAction>{intended};
    for (std::size_t k = 0; k < detected.size(); ++k) {
      if (k > 0) ++t;  // spurious firings trail the intended one by a millisecond each
      record(advance_world_to(w, script, t));
      record(apply_input(w, script, UserActionEvent{detected[k], t}));
    }
  }
  m.success = w.tracker.done(script);
  m.duration_ms = t;
  m.excess = static_cast<long long>(m.actions_taken) - static_cast<long long>(m.minimal_actions);
  return r;
}

inline TaskMetrics run(Planner& planner, const UserModel& model, std::shared_ptr<const Profile> profile) {
  return run_detailed(planner, model, std::move(profile)).metrics;
}

inline TaskMetrics run(const TaskScript& script, const UserModel& model,
                       std::shared_ptr<const Profile> profile) {
  Planner planner(script);
  return run(planner, model, std::move(profile));
}

// Runs `count` seeds starting at model.seed.
inline std::vector<TaskMetrics> run_seeds(Planner& planner, UserModel model,
                                          const std::shared_ptr<const Profile>& profile,
                                          std::size_t count) {
  std::vector<TaskMetrics> out;
  const auto first = model.seed;
  for (std::size_t i = 0; i < count; ++i) {
    model.seed = first + i;
    out.push_back(run(planner, model, profile));
  }
  return out;
}

// ---- aggregation ------------------------------------------------------------

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
  friend bool operator==(const Stat&, const Stat&) = default;
};

inline Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// Squared Pearson correlation; undefined below two points or with a constant series.
inline std::optional<double> r_squared(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
  const auto mx = stat_of(xs).mean, my = stat_of(ys).mean;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy * sxy / (sxx * syy);
}

struct Summary {
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::size_t minimal_actions = 0;
  Stat actions;
  Stat excess;
  Stat duration_ms;
  std::optional<double> r2_duration_actions;
  double per_action_s = 0.0;
  double projected_duration_s = 0.0;  // mean actions x per_action_s; a projection, not a measurement
};

inline Summary summarize(const std::vector<TaskMetrics>& runs, double per_action_s) {
  Summary s;
  s.runs = runs.size();
  s.per_action_s = per_action_s;
  std::vector<double> actions, excess, duration;
  for (const auto& m : runs) {
    s.successes += m.success ? 1 : 0;
    s.minimal_actions = m.minimal_actions;
    actions.push_back(static_cast<double>(m.actions_taken));
    excess.push_back(static_cast<double>(m.excess));
    duration.push_back(static_cast<double>(m.duration_ms));
  }
  s.actions = stat_of(actions);
  s.excess = stat_of(excess);
  s.duration_ms = stat_of(duration);
  s.r2_duration_actions = r_squared(duration, actions);
  s.projected_duration_s = s.actions.mean * per_action_s;
  return s;
}

inline nlohmann::json summary_to_json(const Summary& s) {
  auto stat = [](const Stat& st) { return nlohmann::json{{"mean", st.mean}, {"stddev", st.stddev}}; };
  return {{"runs", s.runs},
          {"successes", s.successes},
          {"minimal_actions", s.minimal_actions},
          {"actions", stat(s.actions)},
          {"excess", stat(s.excess)},
          {"duration_ms", stat(s.duration_ms)},
          {"r2_duration_actions",
           s.r2_duration_actions ? nlohmann::json(*s.r2_duration_actions) : nlohmann::json(nullptr)},
          {"per_action_s", s.per_action_s},
          {"projected_duration_s", s.projected_duration_s}};
}

inline void write_metrics_tsv(std::ostream& os, const std::vector<TaskMetrics>& runs,
                              std::uint64_t first_seed = 0) {
  os << "seed\tactions\tminimal\texcess\tduration_ms\tsuccess\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& m = runs[i];
    os << first_seed + i << '\t' << m.actions_taken << '\t' << m.minimal_actions << '\t' << m.excess
       << '\t' << m.duration_ms << '\t' << (m.success ? 1 : 0) << '\n';
  }
}

}  // namespace mind
