#pragma once

// The shape catalog: named targets, which modes use them, and the default curriculum.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tieboard/catalog_data.hpp"
#include "tieboard/collab.hpp"
#include "tieboard/engine.hpp"
#include "tieboard/json_io.hpp"

namespace tieboard {

struct ArrangementSpec {
  int board_rows = 1;
  int board_cols = 1;
  bool operator==(const ArrangementSpec&) const = default;
};

struct CatalogEntry {
  std::string name;
  std::vector<Mode> modes;
  CompositeShape target;
  std::optional<SymmetryAxis> axis;
  std::optional<std::vector<HoleId>> half;  // when the entry was authored as a half outline
  Relation relation = Relation::Congruent;
  std::optional<ArrangementSpec> arrangement;

  bool has_mode(Mode m) const { return std::find(modes.begin(), modes.end(), m) != modes.end(); }
  ModeTarget mode_target() const { return {target, axis, relation}; }
};

class Catalog {
 public:
  Catalog(GridTemplate board, std::vector<CatalogEntry> entries) : board_(std::move(board)), entries_(std::move(entries)) {}

  const GridTemplate& board() const noexcept { return board_; }
  const std::vector<CatalogEntry>& entries() const noexcept { return entries_; }

  const CatalogEntry* find(std::string_view name) const {
    for (const auto& e : entries_) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }

  const CatalogEntry& at(std::string_view name) const {
    if (const auto* e = find(name)) return *e;
    fail(ErrorCode::CatalogError, "no catalog entry named `" + std::string(name) + "`");
  }

  /// First single-board entry listed for the mode.
  const CatalogEntry* first_for(Mode m) const {
    for (const auto& e : entries_) {
      if (!e.arrangement && e.has_mode(m)) return &e;
    }
    return nullptr;
  }

  /// What PressCenter loads in each mode. A single board in Mode 5 falls back to the first
  /// symmetry target; free play has no target.
  std::map<Mode, ModeTarget> curriculum() const {
    std::map<Mode, ModeTarget> out;
    for (int m = 1; m <= 5; ++m) {
      const CatalogEntry* e = first_for(Mode(m));
      if (!e && Mode(m) == Mode::Collaboration) e = first_for(Mode::Symmetry);
      if (e) out[Mode(m)] = e->mode_target();
    }
    out[Mode::FreePlay] = ModeTarget{};
    return out;
  }

 private:
  GridTemplate board_;
  std::vector<CatalogEntry> entries_;
};

namespace detail {

inline ShapePart part_from_json(const nlohmann::json& j, std::string_view what) {
  reject_unknown_keys(j, {"vertices", "color_hint"}, what);
  ShapePart p;
  p.shape.vertices = holes_from_json(required<nlohmann::json>(j, "vertices", what));
  if (j.contains("color_hint")) p.color_hint = color_from_json(j.at("color_hint"));
  return p;
}

inline CatalogEntry entry_from_json(const nlohmann::json& j) {
  const std::string name = j.is_object() && j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "";
  if (name.empty()) fail(ErrorCode::CatalogError, "every catalog entry needs a non-empty `name`");
  const std::string what = "catalog entry `" + name + "`";
  try {
    reject_unknown_keys(j, {"name", "modes", "vertices", "color_hint", "parts", "half", "axis", "relation", "arrangement"}, what);
    CatalogEntry e;
    e.name = name;
    e.target.name = name;
    if (j.contains("modes")) {
      for (int m : required<std::vector<int>>(j, "modes", what)) e.modes.push_back(mode_from_int(m));
    }
    if (j.contains("relation")) e.relation = relation_from_string(j.at("relation").get<std::string>());
    if (j.contains("axis")) e.axis = axis_from_json(j.at("axis"));
    if (j.contains("arrangement")) {
      const auto& a = j.at("arrangement");
      reject_unknown_keys(a, {"board_rows", "board_cols"}, what + " arrangement");
      e.arrangement = ArrangementSpec{required<int>(a, "board_rows", what), required<int>(a, "board_cols", what)};
    }

    const int forms = int(j.contains("vertices")) + int(j.contains("parts")) + int(j.contains("half"));
    if (forms != 1) fail(ErrorCode::CatalogError, what + " needs exactly one of `vertices`, `parts`, `half`");
    if (j.contains("parts") && j.contains("color_hint")) fail(ErrorCode::CatalogError, what + ": color hints go on each part");
    PaletteColor hint = PaletteColor::Red;
    if (j.contains("color_hint")) hint = color_from_json(j.at("color_hint"));
    if (j.contains("vertices")) {
      e.target.parts.push_back({Shape{holes_from_json(j.at("vertices"))}, hint});
    } else if (j.contains("parts")) {
      if (!j.at("parts").is_array() || j.at("parts").empty()) fail(ErrorCode::CatalogError, what + ": `parts` must be a non-empty array");
      for (const auto& p : j.at("parts")) e.target.parts.push_back(part_from_json(p, what + " part"));
    } else {
      if (!e.axis) fail(ErrorCode::CatalogError, what + ": a half outline needs an `axis`");
      e.half = holes_from_json(j.at("half"));
      e.target.parts.push_back({complete_half(*e.half, *e.axis), hint});
    }
    return e;
  } catch (const Error& err) {
    if (err.code() == ErrorCode::CatalogError) throw;
    fail(ErrorCode::CatalogError, what + ": " + err.what());
  }
}

/// Compiling every (entry, mode) pair catches off-board vertices, degenerate outlines,
/// ambiguous odd-one-out sets and asymmetric symmetry targets.
inline void validate_entry(const CatalogEntry& e, const GridTemplate& board) {
  try {
    if (e.arrangement) {
      if (e.modes != std::vector<Mode>{Mode::Collaboration}) fail(ErrorCode::CatalogError, "multi-board entries are Mode 5 only");
      const Arrangement arr(e.arrangement->board_rows, e.arrangement->board_cols, board);
      const auto world = arr.world_template();
      validate_target(e.target, world);
      if (e.axis && !is_symmetric(e.target.parts.front().shape, *e.axis)) {
        fail(ErrorCode::CatalogError, "outline is not symmetric about its axis");
      }
      (void)partition(arr, compile_guided(arr, e.target));
      return;
    }
    validate_target(e.target, board);
    if (e.axis && !is_symmetric(e.target.parts.front().shape, *e.axis)) {
      fail(ErrorCode::CatalogError, "outline is not symmetric about its axis");
    }
    for (Mode m : e.modes) (void)compile(m, e.target, e.axis, e.relation, board);
  } catch (const Error& err) {
    fail(ErrorCode::CatalogError, "catalog entry `" + e.name + "`: " + err.what());
  }
}

}  // namespace detail

/// Accepts `{"template": {...}, "entries": [...]}` or a bare entry array on the default board.
inline Catalog parse_catalog(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::CatalogError, std::string("catalog is not valid JSON: ") + e.what());
  }
  GridTemplate board = default_board();
  nlohmann::json entries;
  if (j.is_array()) {
    entries = j;
  } else if (j.is_object()) {
    try {
      detail::reject_unknown_keys(j, {"template", "entries"}, "catalog");
      if (j.contains("template")) board = template_from_json(j.at("template"));
    } catch (const Error& err) {
      fail(ErrorCode::CatalogError, err.what());
    }
    if (!j.contains("entries") || !j.at("entries").is_array()) fail(ErrorCode::CatalogError, "catalog needs an `entries` array");
    entries = j.at("entries");
  } else {
    fail(ErrorCode::CatalogError, "catalog must be an object or an array");
  }

  std::vector<CatalogEntry> out;
  std::set<std::string> names;
  for (const auto& ej : entries) {
    CatalogEntry e = detail::entry_from_json(ej);
    if (!names.insert(e.name).second) fail(ErrorCode::CatalogError, "duplicate catalog entry `" + e.name + "`");
    detail::validate_entry(e, board);
    out.push_back(std::move(e));
  }
  return Catalog(std::move(board), std::move(out));
}

inline Catalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::CatalogError, "cannot open catalog `" + path + "`");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_catalog(ss.str());
}

inline const Catalog& builtin_catalog() {
  static const Catalog catalog = parse_catalog(kBuiltinCatalogJson);
  return catalog;
}

}  // namespace tieboard
