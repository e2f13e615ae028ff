#pragma once

// Board substrate: hole addressing, grid templates, LED frames and fiber paths.

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tieboard/error.hpp"

namespace tieboard {

struct HoleId {
  int row = 0;
  int col = 0;

  auto operator<=>(const HoleId&) const = default;
};

inline std::string to_string(HoleId h) {
  return "(" + std::to_string(h.row) + "," + std::to_string(h.col) + ")";
}

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2D&) const = default;
};

enum class GridKind { Rectangular, Isometric, Circular };

constexpr std::string_view kind_name(GridKind kind) {
  switch (kind) {
    case GridKind::Rectangular: return "rectangular";
    case GridKind::Isometric: return "isometric";
    case GridKind::Circular: return "circular";
  }
  return "rectangular";
}

inline constexpr double kDefaultSpacingMm = 30.0;
inline constexpr double kHoleDiameterMm = 7.0;

/// Hole layout of one board face. Immutable once built; use the make_* factories.
///
/// For circular templates a HoleId is (ring, position): the center is (0, 0) and
/// ring r >= 1 holds positions 0..holes_per_ring-1.
class GridTemplate {
 public:
  GridKind kind() const noexcept { return kind_; }
  /// Row count (rectangular/isometric) or ring count excluding the center (circular).
  int rows() const noexcept { return rows_; }
  /// cols (rectangular), base_cols (isometric) or holes_per_ring (circular).
  int cols() const noexcept { return cols_; }
  double spacing_mm() const noexcept { return spacing_mm_; }
  double hole_diameter_mm() const noexcept { return hole_diameter_mm_; }

  std::size_t size() const noexcept { return positions_.size(); }
  const std::map<HoleId, Point2D>& positions() const noexcept { return positions_; }
  bool contains(HoleId h) const { return positions_.count(h) != 0; }

  /// Dimensions of the contact/scan matrix that covers every hole.
  int matrix_rows() const noexcept { return kind_ == GridKind::Circular ? rows_ + 1 : rows_; }
  int matrix_cols() const noexcept { return cols_; }

  bool operator==(const GridTemplate&) const = default;

 private:
  GridTemplate(GridKind kind, int rows, int cols, double spacing)
      : kind_(kind), rows_(rows), cols_(cols), spacing_mm_(spacing) {}

  friend GridTemplate make_rectangular(int, int, double);
  friend GridTemplate make_isometric(int, int, double);
  friend GridTemplate make_circular(int, int, double);
  friend GridTemplate with_hole_diameter(GridTemplate, double);

  GridKind kind_;
  int rows_;
  int cols_;
  double spacing_mm_;
  double hole_diameter_mm_ = kHoleDiameterMm;
  std::map<HoleId, Point2D> positions_;
};

inline void require_spacing(double spacing_mm) {
  if (!(spacing_mm > 0.0) || !std::isfinite(spacing_mm)) {
    fail(ErrorCode::NonPositiveSpacing, "spacing must be a positive finite length");
  }
}

inline GridTemplate make_rectangular(int rows, int cols, double spacing_mm = kDefaultSpacingMm) {
  if (rows < 1 || cols < 1) fail(ErrorCode::ZeroDimension, "rectangular template needs rows, cols >= 1");
  require_spacing(spacing_mm);
  GridTemplate t(GridKind::Rectangular, rows, cols, spacing_mm);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      t.positions_.emplace(HoleId{r, c}, Point2D{c * spacing_mm, r * spacing_mm});
    }
  }
  return t;
}

/// Even rows carry base_cols holes, odd rows base_cols-1 holes shifted by half a pitch.
inline GridTemplate make_isometric(int rows, int base_cols, double spacing_mm = kDefaultSpacingMm) {
  if (rows < 1 || base_cols < 2) fail(ErrorCode::ZeroDimension, "isometric template needs rows >= 1, base_cols >= 2");
  require_spacing(spacing_mm);
  GridTemplate t(GridKind::Isometric, rows, base_cols, spacing_mm);
  const double pitch = spacing_mm * std::numbers::sqrt3 / 2.0;
  for (int r = 0; r < rows; ++r) {
    const bool odd = (r % 2) == 1;
    const int count = odd ? base_cols - 1 : base_cols;
    const double offset = odd ? spacing_mm / 2.0 : 0.0;
    for (int c = 0; c < count; ++c) {
      t.positions_.emplace(HoleId{r, c}, Point2D{offset + c * spacing_mm, r * pitch});
    }
  }
  return t;
}

inline GridTemplate make_circular(int rings, int holes_per_ring, double ring_spacing_mm = kDefaultSpacingMm) {
  if (holes_per_ring < 3) fail(ErrorCode::TooFewHolesPerRing, "circular template needs at least 3 holes per ring");
  if (rings < 1) fail(ErrorCode::ZeroDimension, "circular template needs rings >= 1");
  require_spacing(ring_spacing_mm);
  GridTemplate t(GridKind::Circular, rings, holes_per_ring, ring_spacing_mm);
  t.positions_.emplace(HoleId{0, 0}, Point2D{0.0, 0.0});
  for (int r = 1; r <= rings; ++r) {
    const double radius = r * ring_spacing_mm;
    for (int p = 0; p < holes_per_ring; ++p) {
      const double angle = 2.0 * std::numbers::pi * p / holes_per_ring;
      t.positions_.emplace(HoleId{r, p}, Point2D{radius * std::cos(angle), radius * std::sin(angle)});
    }
  }
  return t;
}

inline GridTemplate with_hole_diameter(GridTemplate t, double diameter_mm) {
  if (!(diameter_mm > 0.0)) fail(ErrorCode::InvalidArgument, "hole diameter must be positive");
  t.hole_diameter_mm_ = diameter_mm;
  return t;
}

/// The 5x6 workshop board.
inline GridTemplate default_board() { return make_rectangular(5, 6, kDefaultSpacingMm); }

inline Point2D hole_position(const GridTemplate& t, HoleId h) {
  auto it = t.positions().find(h);
  if (it == t.positions().end()) fail(ErrorCode::UnknownHole, "hole " + to_string(h) + " is not on the template");
  return it->second;
}

inline void require_hole(const GridTemplate& t, HoleId h) {
  if (!t.contains(h)) fail(ErrorCode::UnknownHole, "hole " + to_string(h) + " is not on the template");
}

// ---------------------------------------------------------------------------
// Colors and LEDs

enum class PaletteColor { Red, Yellow, Blue, Purple, Green };

inline constexpr std::array<PaletteColor, 5> kPalette = {
    PaletteColor::Red, PaletteColor::Yellow, PaletteColor::Blue, PaletteColor::Purple, PaletteColor::Green};

constexpr std::string_view color_name(PaletteColor c) {
  switch (c) {
    case PaletteColor::Red: return "Red";
    case PaletteColor::Yellow: return "Yellow";
    case PaletteColor::Blue: return "Blue";
    case PaletteColor::Purple: return "Purple";
    case PaletteColor::Green: return "Green";
  }
  return "Red";
}

inline std::optional<PaletteColor> parse_color(std::string_view text) {
  for (PaletteColor c : kPalette) {
    std::string_view name = color_name(c);
    if (name.size() != text.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size(); ++i) {
      auto lower = [](char ch) { return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch; };
      if (lower(name[i]) != lower(text[i])) {
        same = false;
        break;
      }
    }
    if (same) return c;
  }
  return std::nullopt;
}

enum class LedMode { Off, On, Blinking };

struct LedState {
  LedMode mode = LedMode::Off;
  PaletteColor color = PaletteColor::Red;  // meaningless when Off

  static LedState off() { return {}; }
  static LedState on(PaletteColor c) { return {LedMode::On, c}; }
  static LedState blinking(PaletteColor c) { return {LedMode::Blinking, c}; }

  bool operator==(const LedState& o) const {
    return mode == o.mode && (mode == LedMode::Off || color == o.color);
  }
};

/// Per-hole LED snapshot. Holes without an entry are off; off entries are never stored.
class LedFrame {
 public:
  void set(HoleId h, LedState s) {
    if (s.mode == LedMode::Off) {
      states_.erase(h);
    } else {
      states_[h] = s;
    }
  }
  LedState at(HoleId h) const {
    auto it = states_.find(h);
    return it == states_.end() ? LedState::off() : it->second;
  }
  const std::map<HoleId, LedState>& states() const noexcept { return states_; }
  std::size_t lit_count() const noexcept { return states_.size(); }
  bool empty() const noexcept { return states_.empty(); }

  bool operator==(const LedFrame&) const = default;

 private:
  std::map<HoleId, LedState> states_;
};

// ---------------------------------------------------------------------------
// Fiber lacing

enum class Side { Front, Back };

constexpr Side opposite(Side s) { return s == Side::Front ? Side::Back : Side::Front; }

struct Pass {
  HoleId hole;
  Side side;

  bool operator==(const Pass&) const = default;
};

/// The ordered lacing of one fiber string. Sides alternate pass by pass.
struct FiberPath {
  Side start_side = Side::Back;
  std::vector<Pass> passes;

  bool empty() const noexcept { return passes.empty(); }
  std::size_t size() const noexcept { return passes.size(); }
  std::vector<HoleId> holes() const {
    std::vector<HoleId> out;
    out.reserve(passes.size());
    for (const auto& p : passes) out.push_back(p.hole);
    return out;
  }
  bool operator==(const FiberPath&) const = default;
};

inline FiberPath append_pass(FiberPath path, HoleId hole, const GridTemplate& t) {
  require_hole(t, hole);
  if (!path.passes.empty() && path.passes.back().hole == hole) {
    fail(ErrorCode::ConsecutiveDuplicateHole, "fiber already passes through " + to_string(hole));
  }
  const Side side = path.passes.empty() ? path.start_side : opposite(path.passes.back().side);
  path.passes.push_back({hole, side});
  return path;
}

inline FiberPath pop_pass(FiberPath path) {
  if (!path.passes.empty()) path.passes.pop_back();
  return path;
}

}  // namespace tieboard
