// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "mind/mind.hpp"

namespace {

using namespace mind;
using Clock = std::chrono::steady_clock;

std::string source(const std::string& rel) { return std::string(MIND_SOURCE_DIR) + "/" + rel; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

int failures = 0;

void report(const char* name, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.fail(std::string("exception: ") + e.what());
  }
  if (!v.ok) ++failures;
  std::printf("%s %s: %s\n", v.ok ? "PASS" : "FAIL", name, v.detail.c_str());
  std::fflush(stdout);
}

// Witness replay emits exactly the leaf, and its length matches the
// closed form: one scroll per sibling index plus one zoom-in per level.
Verdict keyboard_oracle() {
  const auto t0 = Clock::now();
  const auto kb = default_layout();
  const auto leaves = leaf_paths(kb);
  Verdict v;
  if (leaves.size() < 40) v.fail("only " + std::to_string(leaves.size()) + " leaves");
  for (const auto& leaf : leaves) {
    const auto seq = witness_sequence(kb, leaf);
    std::size_t closed_form = leaf.size();
    for (auto i : leaf) closed_form += i;
    if (seq.size() != minimal_actions(kb, leaf) || seq.size() != closed_form) {
      v.fail("length mismatch at " + to_string(leaf));
    }
    NavCursor c;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      auto [next, effect] = apply_action(kb, c, seq[i]);
      c = next;
      const bool last = i + 1 == seq.size();
      if (effect.is_emit() != last || effect.kind == NavEffect<KeyPayload>::Kind::Cancelled) {
        v.fail("unexpected effect at step " + std::to_string(i) + " for " + to_string(leaf));
      }
      if (last && (!effect.payload || *effect.payload != *node_at(kb, leaf)->payload)) {
        v.fail("wrong payload for " + to_string(leaf));
      }
    }
    if (c != NavCursor{}) v.fail("cursor not back at root after " + to_string(leaf));
  }
  const double s = seconds_since(t0);
  if (s >= 1.0) v.fail("took " + std::to_string(s) + " s");
  if (v.ok) v.detail = std::to_string(leaves.size()) + " leaves, " + std::to_string(s) + " s";
  return v;
}

Verdict pointer_convergence() {
  const auto t0 = Clock::now();
  const ScreenRect screen{0, 0, 1920, 1080};
  Rng rng(2024);
  Verdict v;
  int worst_w = 0, worst_h = 0, worst_cheb = 0;
  for (int i = 0; i < 1000; ++i) {
    const int px = static_cast<int>(rng.below(1920));
    const int py = static_cast<int>(rng.below(1080));
    auto s = PointerState::fresh(screen, 7);
    Millis t = 0;
    for (auto a : pointer_navigation(screen, px, py, 7)) {
      auto step = step_pointer(s, a, ++t);
      if (step.output) v.fail("output during navigation");
      s = step.state;
    }
    const auto rect = s.current();
    if (!rect.contains(px, py)) v.fail("rect misses point");
    worst_w = std::max(worst_w, rect.w);
    worst_h = std::max(worst_h, rect.h);
    s = step_pointer(s, UserAction::ZoomIn, ++t).state;
    auto fired = step_pointer(s, ClockTick{*s.deadline}, *s.deadline);
    const auto* click = fired.output ? std::get_if<ClickEvent>(&*fired.output) : nullptr;
    if (!click || click->kind != ClickKind::Single) {
      v.fail("no single click");
      continue;
    }
    worst_cheb = std::max({worst_cheb, std::abs(click->x - px), std::abs(click->y - py)});
  }
  if (worst_w > 15 || worst_h > 9) v.fail("rect up to " + std::to_string(worst_w) + "x" + std::to_string(worst_h));
  if (worst_cheb > 15) v.fail("click off by " + std::to_string(worst_cheb) + " px");
  const double s = seconds_since(t0);
  if (s >= 1.0) v.fail("took " + std::to_string(s) + " s");
  if (v.ok) {
    v.detail = "max rect " + std::to_string(worst_w) + "x" + std::to_string(worst_h) + ", max Chebyshev " +
               std::to_string(worst_cheb) + " px, " + std::to_string(s) + " s";
  }
  return v;
}

// Every millisecond offset of a second event across a 5 s window after the
// click window opens, for each kind of second event.
Verdict click_timing() {
  const ScreenRect screen{0, 0, 64, 36};
  Verdict v;
  auto pending_at = [&](Millis start) {
    auto s = PointerState::fresh(screen, 1);
    s = step_pointer(s, UserAction::ZoomIn, start - 1).state;
    return step_pointer(s, UserAction::ZoomIn, start).state;  // click window [start, start + 4000)
  };
  auto kind_of = [](const PointerStep& st) -> std::optional<ClickKind> {
    if (!st.output) return std::nullopt;
    const auto* c = std::get_if<ClickEvent>(&*st.output);
    return c ? std::optional(c->kind) : std::nullopt;
  };
  std::size_t cases = 0;
  Rng rng(7);
  for (int round = 0; round < 3; ++round) {
    const Millis start = round == 0 ? 1000 : 1000 + static_cast<Millis>(rng.below(1'000'000));
    const auto pend = pending_at(start);
    const Millis deadline = start + kClickWindowMs;
    if (pend.deadline != deadline) v.fail("deadline not start + 4000");
    for (Millis d = 0; d <= 5000; ++d) {
      const Millis t = start + d;
      const bool before = t < deadline;
      // Second zoom-in.
      auto z = step_pointer(pend, UserAction::ZoomIn, t);
      if (kind_of(z) != (before ? ClickKind::Double : ClickKind::Single)) v.fail("zoom-in at +" + std::to_string(d));
      // Tick alone.
      auto k = step_pointer(pend, ClockTick{t}, t);
      if (kind_of(k) != (before ? std::nullopt : std::optional(ClickKind::Single))) {
        v.fail("tick at +" + std::to_string(d));
      }
      // Zoom-out, then the clock runs past the deadline: no click if in time.
      auto o = step_pointer(pend, UserAction::ZoomOut, t);
      if (before) {
        auto later = step_pointer(o.state, ClockTick{deadline + 10000}, deadline + 10000);
        if (o.output || o.state.pending() || later.output) v.fail("zoom-out at +" + std::to_string(d));
      } else if (kind_of(o) != ClickKind::Single) {
        v.fail("late zoom-out at +" + std::to_string(d));
      }
      // Scroll changes nothing while pending.
      auto sc = step_pointer(pend, UserAction::Scroll, t);
      if (before && (sc.output || sc.state != pend)) v.fail("scroll at +" + std::to_string(d));
      cases += 4;
    }
  }
  if (v.ok) v.detail = std::to_string(cases) + " timed cases, boundary t = deadline is single";
  return v;
}

Verdict typing_rate() {
  // Relative letter frequencies of English text, percent.
  const std::pair<char, double> letters[] = {
      {'a', 8.167}, {'b', 1.492}, {'c', 2.782}, {'d', 4.253}, {'e', 12.702}, {'f', 2.228}, {'g', 2.015},
      {'h', 6.094}, {'i', 6.966}, {'j', 0.153}, {'k', 0.772}, {'l', 4.025},  {'m', 2.406}, {'n', 6.749},
      {'o', 7.507}, {'p', 1.929}, {'q', 0.095}, {'r', 5.987}, {'s', 6.327},  {'t', 9.056}, {'u', 2.758},
      {'v', 0.978}, {'w', 2.360}, {'x', 0.150}, {'y', 1.974}, {'z', 0.074}};
  const double space_share = 0.183;  // fraction of all characters that are spaces
  const auto kb = default_layout();
  auto cost = [&](const std::string& key) -> double {
    for (const auto& leaf : leaf_paths(kb)) {
      if (*node_at(kb, leaf)->payload == KeyPayload{Keystroke{key}}) {
        return static_cast<double>(minimal_actions(kb, leaf));
      }
    }
    throw std::runtime_error("no key " + key);
  };
  double letter_sum = 0.0, weight = 0.0;
  for (const auto& [c, f] : letters) {
    letter_sum += f * cost(std::string(1, c));
    weight += f;
  }
  const double mean = (1.0 - space_share) * letter_sum / weight + space_share * cost("SPACE");
  Verdict v;
  if (!(mean >= 6.0 && mean <= 12.0)) v.fail("mean " + std::to_string(mean) + " outside [6, 12]");
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean %.3f actions/char; 20 s/char implies %.2f s/action", mean, 20.0 / mean);
  if (v.ok) v.detail = buf;
  return v;
}

Verdict email_projection() {
  const auto t0 = Clock::now();
  auto profile = std::make_shared<const Profile>(load_profile(source("profiles/default/profile.json")));
  const auto task = load_task(source("tasks/t5_email.json"));
  const auto plan = plan_optimal(task, profile);
  auto w = initial_world(task, profile);
  replay(w, task, plan);
  Verdict v;
  if (!w.tracker.done(task)) v.fail("plan does not complete the task");
  const double projected = static_cast<double>(plan.action_count()) * 2.5;
  if (!(projected < 13 * 60.0)) v.fail("projection " + std::to_string(projected) + " s");
  const double s = seconds_since(t0);
  if (s >= 5.0) v.fail("took " + std::to_string(s) + " s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu minimal actions x 2.5 s = %.1f s (%.2f min) < 13 min, %.3f s",
                plan.action_count(), projected, projected / 60.0, s);
  if (v.ok) v.detail = buf;
  return v;
}

Verdict noise_monotonicity() {
  const auto t0 = Clock::now();
  auto profile = std::make_shared<const Profile>(load_profile(source("profiles/default/profile.json")));
  Planner planner(load_task(source("tasks/t5_email.json")));
  Verdict v;
  std::string detail;
  double prev = -1.0;
  for (double rate : {0.0, 0.05, 0.10}) {
    const auto runs = run_seeds(
        planner, UserModel::noisy(NoiseModel::symmetric_confusion(rate), ConstantLatency{2000}, 1), profile, 100);
    const auto s = summarize(runs, 2.0);
    if (rate == 0.0 && (s.excess.mean != 0.0 || s.excess.stddev != 0.0)) v.fail("excess at rate 0");
    if (s.excess.mean < prev) v.fail("excess decreased at rate " + std::to_string(rate));
    prev = s.excess.mean;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%.2f: %.2f (%zu/100 ok)", detail.empty() ? "" : ", ", rate, s.excess.mean,
                  s.successes);
    detail += buf;
  }
  const double s = seconds_since(t0);
  if (s >= 30.0) v.fail("took " + std::to_string(s) + " s");
  if (v.ok) v.detail = "mean excess " + detail + ", " + std::to_string(s) + " s";
  return v;
}

// trace text -> decode -> engine -> log text, from a seed.
std::string pipeline_log(const Profile& profile, std::uint64_t seed) {
  Rng script_rng(seed);
  std::vector<UserAction> script;
  for (int i = 0; i < 400; ++i) script.push_back(static_cast<UserAction>(script_rng.below(3)));
  auto noise = NoiseModel::symmetric_confusion(0.1, seed);
  noise.false_fire_rate = 0.1;
  noise.miss_rate = 0.05;
  std::ostringstream trace;
  write_trace(trace, simulate_signals(script, noise, 1500, profile.detection));
  std::istringstream in(trace.str());
  const auto events = decode_stream(read_trace(in), profile.detection);
  auto shared = std::make_shared<const Profile>(profile);
  MockDesktop desk;
  Workstation ws{Engine(shared, desk.screen, desk.focused_app), desk};
  std::vector<OutputEvent> log;
  for (const auto& e : events) {
    auto out = ws.feed(e);
    log.insert(log.end(), out.begin(), out.end());
  }
  std::ostringstream os;
  os << trace.str();
  write_event_log(os, log);
  return os.str();
}

Verdict determinism() {
  const auto profile = load_profile(source("profiles/default/profile.json"));
  Verdict v;
  std::size_t bytes = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto a = pipeline_log(profile, seed);
    const auto b = pipeline_log(load_profile(source("profiles/default/profile.json")), seed);
    if (a != b) v.fail("pipeline log differs for seed " + std::to_string(seed));
    bytes += a.size();
  }
  // Simulated user runs, noisy and with random latency.
  auto shared = std::make_shared<const Profile>(profile);
  const auto task = load_task(source("tasks/t4_search.json"));
  auto noise = NoiseModel::symmetric_confusion(0.1);
  noise.false_fire_rate = 0.05;
  const auto model = UserModel::noisy(noise, LogNormalLatency{}, 11);
  Planner p1(task), p2(task);
  auto r1 = run_detailed(p1, model, shared);
  auto r2 = run_detailed(p2, model, shared);
  std::ostringstream l1, l2;
  write_event_log(l1, r1.log);
  write_event_log(l2, r2.log);
  if (l1.str() != l2.str() || r1.metrics != r2.metrics) v.fail("simulated run differs");
  if (v.ok) v.detail = "3 trace pipelines (" + std::to_string(bytes) + " bytes) and a noisy run byte-identical";
  return v;
}

Verdict round_trips() {
  Verdict v;
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / ("mind_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::copy(source("profiles/default"), dir, fs::copy_options::recursive);
  const auto original = load_profile(dir / "profile.json");
  save_profile(original, dir / "copy.json");
  if (load_profile(dir / "copy.json") != original) v.fail("profile save/load");
  fs::remove_all(dir);

  for (const auto& kb : {default_layout(), media_player_layout()}) {
    if (load_layout(serialize_layout(kb)) != kb) v.fail("layout serialize/parse");
  }

  Rng rng(5);
  std::size_t actions = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<UserAction> script;
    const auto n = 1 + rng.below(200);
    for (std::uint64_t i = 0; i < n; ++i) script.push_back(static_cast<UserAction>(rng.below(3)));
    const Millis gap = 301 + static_cast<Millis>(rng.below(3000));
    const auto decoded = decode_stream(simulate_signals(script, NoiseModel::none(trial), gap), default_detection());
    std::vector<UserAction> got;
    for (const auto& e : decoded) got.push_back(e.action);
    if (got != script) v.fail("signal identity, trial " + std::to_string(trial));
    actions += script.size();
  }
  if (v.ok) v.detail = "profile, 2 layouts, " + std::to_string(actions) + " actions through zero-noise signals";
  return v;
}

}  // namespace

int main() {
  report("keyboard-oracle-equivalence", keyboard_oracle);
  report("pointer-convergence", pointer_convergence);
  report("click-phase-timing", click_timing);
  report("typing-rate-consistency", typing_rate);
  report("email-task-projection", email_projection);
  report("noise-monotonicity", noise_monotonicity);
  report("determinism", determinism);
  report("round-trips", round_trips);
  return failures == 0 ? 0 : 1;
}
