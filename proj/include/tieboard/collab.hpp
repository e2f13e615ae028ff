#pragma once

// Multi-board patchwork: world/local hole mapping, per-board program splitting and joint
// verification of the boards' fibers.

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tieboard/board.hpp"
#include "tieboard/engine.hpp"
#include "tieboard/error.hpp"
#include "tieboard/geometry.hpp"

namespace tieboard {

enum class ArrangementKind { Horizontal, Vertical, Patchwork };

constexpr std::string_view arrangement_name(ArrangementKind k) {
  switch (k) {
    case ArrangementKind::Horizontal: return "horizontal";
    case ArrangementKind::Vertical: return "vertical";
    case ArrangementKind::Patchwork: return "patchwork";
  }
  return "patchwork";
}

struct WorldHole {
  int row = 0;
  int col = 0;
  auto operator<=>(const WorldHole&) const = default;
};

struct LocalHole {
  std::size_t board = 0;
  HoleId local;
  auto operator<=>(const LocalHole&) const = default;
};

/// Identical rectangular boards tiled edge to edge, boards numbered row-major.
class Arrangement {
 public:
  Arrangement(int board_rows, int board_cols, GridTemplate board = default_board())
      : board_rows_(board_rows), board_cols_(board_cols), board_(std::move(board)) {
    if (board_rows_ < 1 || board_cols_ < 1) fail(ErrorCode::ZeroDimension, "arrangement needs at least one board");
    if (board_.kind() != GridKind::Rectangular) fail(ErrorCode::ConfigError, "collaboration boards must be rectangular");
  }

  int board_rows() const noexcept { return board_rows_; }
  int board_cols() const noexcept { return board_cols_; }
  std::size_t board_count() const noexcept { return static_cast<std::size_t>(board_rows_ * board_cols_); }
  const GridTemplate& board() const noexcept { return board_; }
  int world_rows() const noexcept { return board_rows_ * board_.rows(); }
  int world_cols() const noexcept { return board_cols_ * board_.cols(); }

  ArrangementKind kind() const noexcept {
    if (board_rows_ == 1) return ArrangementKind::Horizontal;
    if (board_cols_ == 1) return ArrangementKind::Vertical;
    return ArrangementKind::Patchwork;
  }

  GridTemplate world_template() const { return make_rectangular(world_rows(), world_cols(), board_.spacing_mm()); }

 private:
  int board_rows_;
  int board_cols_;
  GridTemplate board_;
};

inline LocalHole world_to_local(const Arrangement& arr, WorldHole w) {
  if (w.row < 0 || w.col < 0 || w.row >= arr.world_rows() || w.col >= arr.world_cols()) {
    fail(ErrorCode::OutOfWorld, "world hole (" + std::to_string(w.row) + "," + std::to_string(w.col) + ") is outside the arrangement");
  }
  const int tr = arr.board().rows(), tc = arr.board().cols();
  const auto board = static_cast<std::size_t>((w.row / tr) * arr.board_cols() + (w.col / tc));
  return {board, HoleId{w.row % tr, w.col % tc}};
}

inline WorldHole local_to_world(const Arrangement& arr, LocalHole l) {
  if (l.board >= arr.board_count() || !arr.board().contains(l.local)) {
    fail(ErrorCode::OutOfWorld, "no such board hole");
  }
  const int br = static_cast<int>(l.board) / arr.board_cols();
  const int bc = static_cast<int>(l.board) % arr.board_cols();
  return {br * arr.board().rows() + l.local.row, bc * arr.board().cols() + l.local.col};
}

inline WorldHole as_world(HoleId h) { return {h.row, h.col}; }

struct PartitionedProgram {
  std::vector<InstructionProgram> per_board;
  /// part_map[board][world part] = index of that part's slice in the board's strings.
  std::vector<std::vector<std::optional<std::size_t>>> part_map;
};

/// Shape-by-shape program over the world grid: one lacing step per part, then a joint glow.
inline InstructionProgram compile_guided(const Arrangement& arr, const CompositeShape& target) {
  InstructionProgram p;
  p.format = InstructionFormat::ShapeByShape;
  p.target = target;
  if (target.parts.empty()) {
    p.format = InstructionFormat::None;
    p.free_play_glow = true;
    return p;
  }
  validate_target(target, arr.world_template());
  for (std::size_t k = 0; k < target.parts.size(); ++k) {
    const auto& part = target.parts[k];
    p.steps.push_back({detail::frame_of(part.shape.vertices, part.color_hint), expect::LaceShape{part.shape}, k, k});
    p.strings.push_back({part.shape.vertices, true, part.color_hint});
  }
  p.steps.push_back({LedFrame{}, expect::ConnectGlow{}, std::nullopt, target.parts.size()});
  return p;
}

namespace detail {

inline std::size_t owner(const Arrangement& arr, HoleId world) { return world_to_local(arr, as_world(world)).board; }

inline HoleId to_local(const Arrangement& arr, HoleId world) { return world_to_local(arr, as_world(world)).local; }

/// Board b's share of a string, in lacing order. A closed string entirely on b stays closed;
/// otherwise the owned holes form an open run starting just after a seam crossing.
inline std::optional<LacingTarget> slice(const Arrangement& arr, const LacingTarget& src, std::size_t b) {
  const auto& h = src.holes;
  const std::size_t n = h.size();
  std::size_t owned = 0;
  for (HoleId v : h) owned += owner(arr, v) == b ? 1 : 0;
  if (owned == 0) return std::nullopt;
  LacingTarget out{{}, src.closed && owned == n, src.color};
  std::size_t start = 0;
  if (src.closed && owned < n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (owner(arr, h[i]) != b && owner(arr, h[(i + 1) % n]) == b) {
        start = (i + 1) % n;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    HoleId v = h[(start + i) % n];
    if (owner(arr, v) == b) out.holes.push_back(to_local(arr, v));
  }
  return out;
}

inline std::map<std::size_t, LedFrame> split_frame(const Arrangement& arr, const LedFrame& f) {
  std::map<std::size_t, LedFrame> out;
  for (const auto& [h, s] : f.states()) {
    const auto l = world_to_local(arr, as_world(h));
    out[l.board].set(l.local, s);
  }
  return out;
}

inline std::vector<HoleId> expectation_holes(const Expectation& e) {
  if (auto* i = std::get_if<expect::InsertAt>(&e)) return {i->hole};
  if (auto* s = std::get_if<expect::LaceShape>(&e)) return s->shape.vertices;
  if (auto* p = std::get_if<expect::LacePath>(&e)) return p->holes;
  if (auto* c = std::get_if<expect::CompleteSymmetric>(&e)) return c->remaining;
  return {};
}

}  // namespace detail

inline PartitionedProgram partition(const Arrangement& arr, const InstructionProgram& program) {
  const std::size_t boards = arr.board_count();
  PartitionedProgram out;
  out.per_board.resize(boards);
  out.part_map.assign(boards, std::vector<std::optional<std::size_t>>(program.strings.size()));

  for (std::size_t b = 0; b < boards; ++b) {
    auto& bp = out.per_board[b];
    bp.format = program.format;
    bp.relation = program.relation;
    bp.glow = program.glow;
    bp.free_play_glow = program.free_play_glow;
    bp.target.name = program.target.name;
    for (std::size_t k = 0; k < program.strings.size(); ++k) {
      if (auto s = detail::slice(arr, program.strings[k], b)) {
        out.part_map[b][k] = bp.strings.size();
        bp.strings.push_back(*s);
        if (s->closed) bp.target.parts.push_back({Shape{s->holes}, s->color});
      }
    }
  }

  for (const Step& st : program.steps) {
    if (std::holds_alternative<expect::ConnectGlow>(st.expected)) continue;
    auto frames = detail::split_frame(arr, st.frame);
    std::set<std::size_t> involved;
    for (const auto& [b, _] : frames) involved.insert(b);
    for (HoleId h : detail::expectation_holes(st.expected)) involved.insert(detail::owner(arr, h));
    for (std::size_t b : involved) {
      std::optional<std::size_t> local_part;
      if (st.part) local_part = out.part_map[b][*st.part];
      Expectation e = st.expected;
      if (auto* ins = std::get_if<expect::InsertAt>(&st.expected)) {
        e = expect::InsertAt{detail::to_local(arr, ins->hole)};
      } else if (!detail::expectation_holes(st.expected).empty()) {
        std::vector<HoleId> owned;
        for (HoleId h : detail::expectation_holes(st.expected)) {
          if (detail::owner(arr, h) == b) owned.push_back(detail::to_local(arr, h));
        }
        const LacingTarget* tgt = local_part ? &out.per_board[b].strings[*local_part] : nullptr;
        if (std::holds_alternative<expect::LaceShape>(st.expected) && tgt && tgt->closed) {
          e = expect::LaceShape{Shape{tgt->holes}};
        } else if (tgt && !std::holds_alternative<expect::CompleteSymmetric>(st.expected)) {
          e = expect::LacePath{tgt->holes};
        } else {
          e = expect::LacePath{owned};
        }
      }
      out.per_board[b].steps.push_back({frames[b], e, local_part, st.group});
    }
  }

  for (const Step& st : program.steps) {
    if (!std::holds_alternative<expect::ConnectGlow>(st.expected)) continue;
    auto frames = detail::split_frame(arr, st.frame);
    for (std::size_t b = 0; b < boards; ++b) {
      if (out.per_board[b].steps.empty() && frames.count(b) == 0) continue;
      std::optional<std::size_t> local_part;
      if (st.part) local_part = out.part_map[b][*st.part];
      out.per_board[b].steps.push_back({frames[b], expect::ConnectGlow{}, local_part, st.group});
    }
  }
  return out;
}

struct JointResult {
  std::set<WorldHole> coverage;
  std::map<std::size_t, std::vector<MatchResult>> per_board;  // boards with a non-empty program
  std::vector<std::size_t> incomplete_boards;
  bool complete = false;
};

/// Verifies each board's strings against its slice. Complete iff every board that was given
/// instructions matches.
inline JointResult merge_fibers(const Arrangement& arr, const PartitionedProgram& parts,
                                const std::map<std::size_t, std::vector<FiberPath>>& fibers) {
  JointResult r;
  bool any = false;
  for (std::size_t b = 0; b < parts.per_board.size(); ++b) {
    auto it = fibers.find(b);
    if (it != fibers.end()) {
      for (const auto& f : it->second) {
        for (const auto& pass : f.passes) r.coverage.insert(local_to_world(arr, {b, pass.hole}));
      }
    }
    const auto& prog = parts.per_board[b];
    if (prog.strings.empty()) continue;
    any = true;
    auto& results = r.per_board[b];
    bool ok = true;
    for (std::size_t k = 0; k < prog.strings.size(); ++k) {
      const FiberPath empty;
      const FiberPath& f = (it != fibers.end() && k < it->second.size()) ? it->second[k] : empty;
      results.push_back(verify_target(f, prog.strings[k]));
      ok = ok && is_match(results.back());
    }
    if (!ok) r.incomplete_boards.push_back(b);
  }
  r.complete = any && r.incomplete_boards.empty();
  return r;
}

}  // namespace tieboard
