#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mind/action.hpp"
#include "mind/error.hpp"
#include "mind/rng.hpp"

namespace mind {

struct RawSignalSample {
  Millis timestamp = 0;
  std::string channel;
  double intensity = 0.0;  // [0, 1]

  friend bool operator==(const RawSignalSample&, const RawSignalSample&) = default;
};

struct ChannelSpec {
  UserAction action = UserAction::Scroll;
  double threshold = 0.6;  // (0, 1]

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

inline constexpr Millis kDefaultDebounceMs = 300;

struct DetectionConfig {
  std::map<std::string, ChannelSpec> channels;
  Millis debounce_ms = kDefaultDebounceMs;

  friend bool operator==(const DetectionConfig&, const DetectionConfig&) = default;

  // Throws ConfigError unless there are exactly three channels covering the
  // three actions once each, with thresholds in (0, 1] and debounce >= 0.
  void validate() const {
    if (channels.size() != 3) {
      throw ConfigError("detection config needs exactly 3 channels, got " +
                        std::to_string(channels.size()));
    }
    std::array<bool, 3> seen{};
    for (const auto& [id, spec] : channels) {
      if (id.empty()) throw ConfigError("empty channel id");
      if (!(spec.threshold > 0.0 && spec.threshold <= 1.0)) {
        throw ConfigError("threshold for channel '" + id + "' must be in (0,1]");
      }
      auto& slot = seen[index_of(spec.action)];
      if (slot) {
        throw ConfigError("action '" + std::string(to_string(spec.action)) +
                          "' mapped by more than one channel");
      }
      slot = true;
    }
    if (debounce_ms < 0) throw ConfigError("debounce_ms must be non-negative");
  }

  const std::string& channel_for(UserAction a) const {
    for (const auto& [id, spec] : channels) {
      if (spec.action == a) return id;
    }
    throw ConfigError("no channel mapped to action '" + std::string(to_string(a)) + "'");
  }
};

// Left smirk, smile and right smirk drive the three actions.
inline DetectionConfig default_detection() {
  DetectionConfig c;
  c.channels["left_smirk"] = {UserAction::Scroll, 0.6};
  c.channels["smile"] = {UserAction::ZoomIn, 0.6};
  c.channels["right_smirk"] = {UserAction::ZoomOut, 0.6};
  return c;
}

// Edge-triggered threshold detector with a per-channel refractory period.
//
// An event fires when a channel goes from below its threshold to at-or-above
// it. A channel's level before its first sample counts as 0. A crossing less
// than debounce_ms after the last *emitted* event on the same channel is
// swallowed.
inline std::vector<UserActionEvent> decode_stream(const std::vector<RawSignalSample>& samples,
                                                  const DetectionConfig& config) {
  config.validate();
  struct ChannelState {
    double last = 0.0;
    std::optional<Millis> last_event;
  };
  std::map<std::string, ChannelState, std::less<>> state;
  std::vector<UserActionEvent> out;
  Millis prev_ts = 0;
  bool first = true;
  for (const auto& s : samples) {
    if (!first && s.timestamp < prev_ts) {
      throw InputError("samples out of order at t=" + std::to_string(s.timestamp));
    }
    first = false;
    prev_ts = s.timestamp;
    if (!(s.intensity >= 0.0 && s.intensity <= 1.0)) {
      throw InputError("intensity out of [0,1] at t=" + std::to_string(s.timestamp));
    }
    auto spec = config.channels.find(s.channel);
    if (spec == config.channels.end()) throw ConfigError("unknown channel '" + s.channel + "'");
    auto& st = state[s.channel];
    const double threshold = spec->second.threshold;
    const bool crossing = st.last < threshold && s.intensity >= threshold;
    st.last = s.intensity;
    if (!crossing) continue;
    if (st.last_event && s.timestamp - *st.last_event < config.debounce_ms) continue;
    st.last_event = s.timestamp;
    out.push_back({spec->second.action, s.timestamp});
  }
  return out;
}

using ConfusionMatrix = std::array<std::array<double, 3>, 3>;

struct NoiseModel {
  double miss_rate = 0.0;
  // confusion[intended][detected]; rows sum to 1.
  ConfusionMatrix confusion = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  double false_fire_rate = 0.0;  // expected spurious detections per intended action
  std::uint64_t seed = 0;

  static NoiseModel none(std::uint64_t seed = 0) {
    NoiseModel m;
    m.seed = seed;
    return m;
  }

  // Symmetric confusion: an intended action is detected correctly with
  // probability 1 - rate, otherwise as one of the other two, equally likely.
  static NoiseModel symmetric_confusion(double rate, std::uint64_t seed = 0) {
    NoiseModel m;
    m.seed = seed;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) m.confusion[i][j] = i == j ? 1.0 - rate : rate / 2.0;
    }
    return m;
  }

  bool is_noiseless() const {
    if (miss_rate != 0.0 || false_fire_rate != 0.0) return false;
    for (std::size_t i = 0; i < 3; ++i) {
      if (confusion[i][i] != 1.0) return false;
    }
    return true;
  }

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(miss_rate)) throw ConfigError("miss_rate must be in [0,1]");
    if (!(false_fire_rate >= 0.0)) throw ConfigError("false_fire_rate must be non-negative");
    for (const auto& row : confusion) {
      double sum = 0.0;
      for (double p : row) {
        if (!prob(p)) throw ConfigError("confusion entries must be in [0,1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("confusion rows must sum to 1");
    }
  }
};

// Stateful action-level view of a NoiseModel: turns one intended action into
// whatever the detector would report for it.
class NoiseChannel {
 public:
  explicit NoiseChannel(const NoiseModel& model) : model_(model), rng_(model.seed) {
    model_.validate();
  }

  // First element (if any) is the detection of the intended action; the rest
  // are spurious firings.
  std::vector<UserAction> perturb(UserAction intended) {
    std::vector<UserAction> out;
    // Draw order is fixed (miss, confusion, spurious count, spurious kinds) so
    // results depend on the seed alone.
    const bool missed = rng_.bernoulli(model_.miss_rate);
    const double u = rng_.uniform01();
    if (!missed) {
      const auto& row = model_.confusion[index_of(intended)];
      double acc = 0.0;
      std::size_t pick = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        if (row[j] > 0.0) pick = j;  // fallback if rounding leaves u above the row sum
      }
      for (std::size_t j = 0; j < 3; ++j) {
        acc += row[j];
        if (u < acc) {
          pick = j;
          break;
        }
      }
      out.push_back(static_cast<UserAction>(pick));
    }
    const auto spurious = rng_.poisson(model_.false_fire_rate);
    for (std::uint64_t k = 0; k < spurious; ++k) {
      out.push_back(static_cast<UserAction>(rng_.below(3)));
    }
    return out;
  }

 private:
  NoiseModel model_;
  Rng rng_;
};

// Synthesizes a three-channel trace for an intended action script.
//
// All channels start at 0 at t=0. Intended action i is performed at
// (i+1) * inter_action_ms as a rectangular pulse (1.0 for a quarter of the
// interval, at least 1 ms, then 0.0) on the channel of whatever action the
// noise model says gets detected. Spurious firings are spread evenly inside
// the same interval. With a noiseless model and inter_action_ms greater than
// the decoder's debounce, decode_stream recovers the script exactly.
inline std::vector<RawSignalSample> simulate_signals(const std::vector<UserAction>& intended,
                                                     const NoiseModel& noise,
                                                     Millis inter_action_ms,
                                                     const DetectionConfig& config) {
  if (inter_action_ms <= 0) throw InputError("inter_action_ms must be positive");
  config.validate();
  NoiseChannel channel(noise);
  const Millis width = std::max<Millis>(1, inter_action_ms / 4);

  struct Pulse {
    Millis t;
    UserAction detected;
  };
  std::vector<Pulse> pulses;
  for (std::size_t i = 0; i < intended.size(); ++i) {
    const Millis t = static_cast<Millis>(i + 1) * inter_action_ms;
    auto detected = channel.perturb(intended[i]);
    const std::size_t n = detected.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Millis offset = k == 0 ? 0 : inter_action_ms * static_cast<Millis>(k) /
                                             static_cast<Millis>(n + 1);
      pulses.push_back({t + offset, detected[k]});
    }
  }

  std::vector<RawSignalSample> out;
  for (const auto& [id, spec] : config.channels) out.push_back({0, id, 0.0});
  std::vector<RawSignalSample> edges;
  for (const auto& p : pulses) {
    const auto& id = config.channel_for(p.detected);
    edges.push_back({p.t, id, 1.0});
    edges.push_back({p.t + width, id, 0.0});
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  out.insert(out.end(), edges.begin(), edges.end());
  return out;
}

inline std::vector<RawSignalSample> simulate_signals(const std::vector<UserAction>& intended,
                                                     const NoiseModel& noise,
                                                     Millis inter_action_ms) {
  return simulate_signals(intended, noise, inter_action_ms, default_detection());
}

// Trace file: `timestamp_ms<TAB>channel_id<TAB>intensity` per line.
inline void write_trace(std::ostream& os, const std::vector<RawSignalSample>& samples) {
  for (const auto& s : samples) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, s.intensity);
    os << s.timestamp << '\t' << s.channel << '\t' << std::string_view(buf, res.ptr - buf)
       << '\n';
  }
}

inline std::vector<RawSignalSample> read_trace(std::istream& is) {
  std::vector<RawSignalSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw ParseError("trace line " + std::to_string(lineno) + ": expected 3 tab-separated fields");
    }
    RawSignalSample s;
    s.channel = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const char* b = line.data();
    auto r1 = std::from_chars(b, b + tab1, s.timestamp);
    auto r2 = std::from_chars(b + tab2 + 1, b + line.size(), s.intensity);
    if (r1.ec != std::errc{} || r1.ptr != b + tab1 || r2.ec != std::errc{} ||
        r2.ptr != b + line.size()) {
      throw ParseError("trace line " + std::to_string(lineno) + ": bad number");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mind
