#pragma once

// Glow semantics: potentiometer banding, RYB mixing, and glow/animation timelines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tieboard/board.hpp"
#include "tieboard/error.hpp"

namespace tieboard {

inline constexpr std::int64_t kDefaultBlinkPeriodMs = 500;

struct FixedGlow {
  PaletteColor color = PaletteColor::Red;
  bool operator==(const FixedGlow&) const = default;
};

struct PerStringGlow {
  std::vector<PaletteColor> colors;  // string i uses colors[i % size]
  bool operator==(const PerStringGlow&) const = default;
};

struct BlinkGlow {
  std::int64_t period_ms = kDefaultBlinkPeriodMs;
  std::vector<PaletteColor> colors;
  bool operator==(const BlinkGlow&) const = default;
};

using GlowProgram = std::variant<FixedGlow, PerStringGlow, BlinkGlow>;

/// LED state a glowing string shows under `program`.
inline LedState glow_state(const GlowProgram& program, std::size_t string_index) {
  auto pick = [&](const std::vector<PaletteColor>& colors) {
    return colors.empty() ? PaletteColor::Red : colors[string_index % colors.size()];
  };
  if (auto* f = std::get_if<FixedGlow>(&program)) return LedState::on(f->color);
  if (auto* p = std::get_if<PerStringGlow>(&program)) return LedState::on(pick(p->colors));
  return LedState::blinking(pick(std::get<BlinkGlow>(program).colors));
}

// ---------------------------------------------------------------------------
// Potentiometer

/// Five equal half-open bands [k/5, (k+1)/5) in palette order; 1.0 closes the last band.
inline PaletteColor pot_to_color(double reading) {
  if (!(reading >= 0.0 && reading <= 1.0)) fail(ErrorCode::OutOfRange, "pot reading must lie in [0, 1]");
  const int band = std::min(4, static_cast<int>(std::floor(reading * 5.0)));
  return kPalette[static_cast<std::size_t>(band)];
}

// ---------------------------------------------------------------------------
// Mixing

class MixTable {
 public:
  /// RYB wheel mixing closed over the five available LEDs.
  static MixTable standard() {
    using C = PaletteColor;
    MixTable t;
    for (C c : kPalette) t.put(c, c, c);
    t.put(C::Red, C::Blue, C::Purple);
    t.put(C::Yellow, C::Blue, C::Green);
    t.put(C::Red, C::Yellow, C::Yellow);  // orange has no LED
    t.put(C::Red, C::Purple, C::Purple);
    t.put(C::Blue, C::Purple, C::Purple);
    t.put(C::Yellow, C::Green, C::Green);
    t.put(C::Blue, C::Green, C::Green);
    t.put(C::Purple, C::Green, C::Blue);
    t.put(C::Red, C::Green, C::Red);       // complementary pairs keep the primary
    t.put(C::Yellow, C::Purple, C::Yellow);
    return t;
  }

  /// Parses 15 lines `colorA colorB result`, one per unordered pair. Blank lines and `#`
  /// comments are skipped.
  static MixTable parse(const std::string& text) {
    MixTable t;
    std::set<std::pair<int, int>> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string a, b, r, extra;
      if (!(ls >> a)) continue;
      if (!(ls >> b >> r) || (ls >> extra)) {
        fail(ErrorCode::ConfigError, "mix table line " + std::to_string(line_no) + ": expected `colorA colorB result`");
      }
      auto ca = parse_color(a), cb = parse_color(b), cr = parse_color(r);
      if (!ca || !cb || !cr) fail(ErrorCode::ConfigError, "mix table line " + std::to_string(line_no) + ": unknown color");
      const std::pair<int, int> key = std::minmax(static_cast<int>(*ca), static_cast<int>(*cb));
      if (!seen.insert(key).second) {
        fail(ErrorCode::ConfigError, "mix table line " + std::to_string(line_no) + ": pair listed twice");
      }
      if (*ca == *cb && *cr != *ca) {
        fail(ErrorCode::ConfigError, "mix table line " + std::to_string(line_no) + ": mixing a color with itself must return it");
      }
      t.put(*ca, *cb, *cr);
    }
    if (seen.size() != 15) fail(ErrorCode::ConfigError, "mix table must list all 15 color pairs");
    return t;
  }

  PaletteColor mix(PaletteColor a, PaletteColor b) const {
    return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }

  std::string render() const {
    std::string out;
    for (std::size_t i = 0; i < kPalette.size(); ++i) {
      for (std::size_t j = i; j < kPalette.size(); ++j) {
        out += std::string(color_name(kPalette[i])) + " " + std::string(color_name(kPalette[j])) + " " +
               std::string(color_name(table_[i][j])) + "\n";
      }
    }
    return out;
  }

  bool operator==(const MixTable&) const = default;

 private:
  void put(PaletteColor a, PaletteColor b, PaletteColor r) {
    table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = r;
    table_[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = r;
  }

  std::array<std::array<PaletteColor, 5>, 5> table_{};
};

/// Color of a fiber whose two ends sit on LEDs `a` and `b`.
inline PaletteColor mix(PaletteColor a, PaletteColor b) { return MixTable::standard().mix(a, b); }

// ---------------------------------------------------------------------------
// Timelines

struct TimelineEntry {
  std::int64_t time_ms = 0;
  LedFrame frame;
  bool operator==(const TimelineEntry&) const = default;
};

struct AnimationTimeline {
  std::vector<TimelineEntry> entries;  // strictly increasing times

  /// Frame showing at time t (the last entry at or before t); empty before the first entry.
  LedFrame at(std::int64_t t) const {
    LedFrame current;
    for (const auto& e : entries) {
      if (e.time_ms > t) break;
      current = e.frame;
    }
    return current;
  }
};

struct LacedString {
  int id = 0;  // user-facing label, e.g. the numbers written next to fibers
  std::vector<HoleId> holes;
};

enum class DelayMode { Absolute, Cumulative };

/// String i lights at delays_ms[i] (absolute, or the running sum in cumulative mode) and stays lit.
inline AnimationTimeline schedule(const std::vector<LacedString>& strings, const std::vector<std::int64_t>& delays_ms,
                                  PaletteColor color, DelayMode mode = DelayMode::Absolute) {
  if (strings.size() != delays_ms.size()) fail(ErrorCode::LengthMismatch, "one delay per string is required");
  std::map<std::int64_t, std::vector<std::size_t>> by_time;
  std::int64_t running = 0;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    if (delays_ms[i] < 0) fail(ErrorCode::OutOfRange, "delays must be non-negative");
    running = mode == DelayMode::Absolute ? delays_ms[i] : running + delays_ms[i];
    by_time[running].push_back(i);
  }
  AnimationTimeline tl;
  LedFrame lit;
  for (const auto& [t, idx] : by_time) {
    for (std::size_t i : idx) {
      for (HoleId h : strings[i].holes) lit.set(h, LedState::on(color));
    }
    tl.entries.push_back({t, lit});
  }
  return tl;
}

/// On for the first half of every period, off for the rest, sampled at each toggle before horizon.
inline AnimationTimeline blink_frames(const BlinkGlow& program, const std::vector<std::vector<HoleId>>& strings,
                                      std::int64_t horizon_ms) {
  if (program.period_ms < 2) fail(ErrorCode::InvalidPeriod, "blink period must be at least 2 ms");
  if (horizon_ms <= 0) fail(ErrorCode::OutOfRange, "horizon must be positive");
  LedFrame on;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    const LedState s = glow_state(program, i);
    for (HoleId h : strings[i]) on.set(h, LedState::on(s.color));
  }
  const std::int64_t half = program.period_ms / 2;
  AnimationTimeline tl;
  for (std::int64_t start = 0; start < horizon_ms; start += program.period_ms) {
    tl.entries.push_back({start, on});
    if (start + half < horizon_ms) tl.entries.push_back({start + half, LedFrame{}});
  }
  return tl;
}

}  // namespace tieboard
