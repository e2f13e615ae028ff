#pragma once

// JSON forms of board values: template descriptors, axes, hole lists and session snapshots.
// nlohmann::json keeps object keys sorted, so dump() output is canonical.

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "tieboard/board.hpp"
#include "tieboard/engine.hpp"
#include "tieboard/error.hpp"
#include "tieboard/geometry.hpp"
#include "tieboard/glow.hpp"

namespace tieboard {

using nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorCode::ConfigError, "unknown key `" + key + "` in " + std::string(what));
    }
  }
}

template <class T>
T required(const json& j, const char* key, std::string_view what) {
  if (!j.contains(key)) fail(ErrorCode::ConfigError, std::string(what) + " is missing `" + key + "`");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::ConfigError, std::string(what) + ": `" + key + "` has the wrong type");
  }
}

}  // namespace detail

/// `{"kind":"rectangular","rows":5,"cols":6,"spacing_mm":30.0}`; isometric uses base_cols,
/// circular uses rings/holes_per_ring/ring_spacing_mm. `hole_diameter_mm` is optional metadata.
inline GridTemplate template_from_json(const json& j) {
  const std::string what = "template descriptor";
  const auto kind = detail::required<std::string>(j, "kind", what);
  GridTemplate t = default_board();
  if (kind == "rectangular") {
    detail::reject_unknown_keys(j, {"kind", "rows", "cols", "spacing_mm", "hole_diameter_mm"}, what);
    t = make_rectangular(detail::required<int>(j, "rows", what), detail::required<int>(j, "cols", what),
                         j.value("spacing_mm", kDefaultSpacingMm));
  } else if (kind == "isometric") {
    detail::reject_unknown_keys(j, {"kind", "rows", "base_cols", "spacing_mm", "hole_diameter_mm"}, what);
    t = make_isometric(detail::required<int>(j, "rows", what), detail::required<int>(j, "base_cols", what),
                       j.value("spacing_mm", kDefaultSpacingMm));
  } else if (kind == "circular") {
    detail::reject_unknown_keys(j, {"kind", "rings", "holes_per_ring", "ring_spacing_mm", "hole_diameter_mm"}, what);
    t = make_circular(detail::required<int>(j, "rings", what), detail::required<int>(j, "holes_per_ring", what),
                      j.value("ring_spacing_mm", kDefaultSpacingMm));
  } else {
    fail(ErrorCode::ConfigError, "unknown template kind `" + kind + "`");
  }
  if (j.contains("hole_diameter_mm")) t = with_hole_diameter(t, j.at("hole_diameter_mm").get<double>());
  return t;
}

inline json template_to_json(const GridTemplate& t) {
  json j;
  j["kind"] = std::string(kind_name(t.kind()));
  switch (t.kind()) {
    case GridKind::Rectangular:
      j["rows"] = t.rows();
      j["cols"] = t.cols();
      j["spacing_mm"] = t.spacing_mm();
      break;
    case GridKind::Isometric:
      j["rows"] = t.rows();
      j["base_cols"] = t.cols();
      j["spacing_mm"] = t.spacing_mm();
      break;
    case GridKind::Circular:
      j["rings"] = t.rows();
      j["holes_per_ring"] = t.cols();
      j["ring_spacing_mm"] = t.spacing_mm();
      break;
  }
  return j;
}

inline std::string orientation_name(AxisOrientation o) {
  switch (o) {
    case AxisOrientation::Horizontal: return "horizontal";
    case AxisOrientation::Vertical: return "vertical";
    case AxisOrientation::DiagonalUp: return "diagonal_up";
    case AxisOrientation::DiagonalDown: return "diagonal_down";
  }
  return "vertical";
}

inline SymmetryAxis axis_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"orientation", "doubled_intercept"}, "axis");
  const auto o = detail::required<std::string>(j, "orientation", "axis");
  SymmetryAxis a;
  if (o == "horizontal") a.orientation = AxisOrientation::Horizontal;
  else if (o == "vertical") a.orientation = AxisOrientation::Vertical;
  else if (o == "diagonal_up") a.orientation = AxisOrientation::DiagonalUp;
  else if (o == "diagonal_down") a.orientation = AxisOrientation::DiagonalDown;
  else fail(ErrorCode::ConfigError, "unknown axis orientation `" + o + "`");
  a.doubled_intercept = detail::required<int>(j, "doubled_intercept", "axis");
  return a;
}

inline json axis_to_json(const SymmetryAxis& a) {
  return {{"orientation", orientation_name(a.orientation)}, {"doubled_intercept", a.doubled_intercept}};
}

inline Relation relation_from_string(const std::string& s) {
  if (s == "congruent") return Relation::Congruent;
  if (s == "similar") return Relation::Similar;
  fail(ErrorCode::ConfigError, "relation must be `congruent` or `similar`");
}

inline std::string relation_name(Relation r) { return r == Relation::Congruent ? "congruent" : "similar"; }

inline PaletteColor color_from_json(const json& j) {
  if (!j.is_string()) fail(ErrorCode::ConfigError, "colors are strings");
  auto c = parse_color(j.get<std::string>());
  if (!c) fail(ErrorCode::ConfigError, "unknown color `" + j.get<std::string>() + "`");
  return *c;
}

inline std::vector<HoleId> holes_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::ConfigError, "hole lists are arrays of [row, col]");
  std::vector<HoleId> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      fail(ErrorCode::ConfigError, "each hole is a [row, col] pair of integers");
    }
    out.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return out;
}

inline json holes_to_json(const std::vector<HoleId>& holes) {
  json a = json::array();
  for (HoleId h : holes) a.push_back({h.row, h.col});
  return a;
}

inline json frame_to_json(const LedFrame& f) {
  json a = json::array();
  for (const auto& [h, s] : f.states()) {
    a.push_back({h.row, h.col, s.mode == LedMode::Blinking ? "blink" : "on", std::string(color_name(s.color))});
  }
  return a;
}

inline json fiber_to_json(const FiberPath& f) {
  json a = json::array();
  for (const auto& p : f.passes) a.push_back({p.hole.row, p.hole.col, p.side == Side::Back ? "B" : "F"});
  return a;
}

inline json glow_to_json(const GlowProgram& g) {
  auto colors = [](const std::vector<PaletteColor>& cs) {
    json a = json::array();
    for (auto c : cs) a.push_back(std::string(color_name(c)));
    return a;
  };
  if (auto* f = std::get_if<FixedGlow>(&g)) return {{"kind", "fixed"}, {"color", std::string(color_name(f->color))}};
  if (auto* p = std::get_if<PerStringGlow>(&g)) return {{"kind", "per_string"}, {"colors", colors(p->colors)}};
  const auto& b = std::get<BlinkGlow>(g);
  return {{"kind", "blink"}, {"period_ms", b.period_ms}, {"colors", colors(b.colors)}};
}

inline json match_to_json(const MatchResult& r) {
  if (auto* m = std::get_if<Match>(&r)) return {{"result", "match"}, {"offset", m->offset}, {"reversed", m->reversed}};
  if (auto* x = std::get_if<Mismatch>(&r)) return {{"result", "mismatch"}, {"wrong_holes", holes_to_json(x->wrong_holes)}};
  return {{"result", "incomplete"}, {"remaining", std::get<Incomplete>(r).remaining}};
}

/// Everything an observer needs to render and judge a board.
inline json snapshot_json(const SessionState& s) {
  json j;
  j["mode"] = int(s.mode);
  j["format"] = std::string(format_name(s.program.format));
  j["target"] = s.program.target.name;
  j["step_index"] = s.step_index;
  j["step_count"] = s.program.steps.size();
  if (const Step* cur = s.current_step()) {
    j["expect"] = std::string(expectation_name(cur->expected));
    j["group"] = cur->group;
  } else {
    j["expect"] = nullptr;
    j["group"] = nullptr;
  }
  j["frame"] = frame_to_json(current_frame(s));
  json fibers = json::array();
  for (const auto& f : s.strings) fibers.push_back(fiber_to_json(f));
  j["fiber"] = fibers;
  j["glow"] = glow_to_json(s.glow);
  j["glowing"] = s.glowing || s.program.free_play_glow;
  j["pot"] = s.pot;
  j["sensing"] = s.sensing_enabled;
  j["selection"] = s.selection ? json(*s.selection) : json(nullptr);
  j["correct"] = s.selection_correct ? json(*s.selection_correct) : json(nullptr);
  json verdict = json::array();
  for (const auto& r : verify_strings(s)) verdict.push_back(match_to_json(r));
  j["verdict"] = verdict;
  j["complete"] = lacing_complete(s);
  return j;
}

}  // namespace tieboard
