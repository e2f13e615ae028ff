#pragma once

// The six-mode instruction engine: program compilation, the pure session transition
// function, lacing verification and LED frame composition.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tieboard/board.hpp"
#include "tieboard/error.hpp"
#include "tieboard/geometry.hpp"
#include "tieboard/glow.hpp"

namespace tieboard {

enum class Mode { BasicShape = 1, OrientationSize = 2, Symmetry = 3, ComplexShape = 4, Collaboration = 5, FreePlay = 6 };

inline constexpr Mode next_mode(Mode m) { return m == Mode::FreePlay ? Mode::BasicShape : Mode(int(m) + 1); }

inline Mode mode_from_int(int v) {
  if (v < 1 || v > 6) fail(ErrorCode::ConfigError, "mode must be 1..6");
  return Mode(v);
}

enum class InstructionFormat { StepByStep, ShapeByShape, HalfShape, None };

constexpr std::string_view format_name(InstructionFormat f) {
  switch (f) {
    case InstructionFormat::StepByStep: return "step_by_step";
    case InstructionFormat::ShapeByShape: return "shape_by_shape";
    case InstructionFormat::HalfShape: return "half_shape";
    case InstructionFormat::None: return "none";
  }
  return "none";
}

namespace expect {
struct InsertAt {
  HoleId hole;
  bool operator==(const InsertAt&) const = default;
};
struct LaceShape {
  Shape shape;
  bool operator==(const LaceShape&) const = default;
};
/// Open run of holes: one half of a symmetric figure, or a board's slice in a collaboration.
struct LacePath {
  std::vector<HoleId> holes;
  bool operator==(const LacePath&) const = default;
};
struct SelectShape {
  bool operator==(const SelectShape&) const = default;
};
struct CompleteSymmetric {
  SymmetryAxis axis;
  std::vector<HoleId> remaining;  // mirrored vertices still to lace, in lacing order
  bool operator==(const CompleteSymmetric&) const = default;
};
struct PressNext {
  bool operator==(const PressNext&) const = default;
};
struct ConnectGlow {
  bool operator==(const ConnectGlow&) const = default;
};
}  // namespace expect

using Expectation = std::variant<expect::InsertAt, expect::LaceShape, expect::LacePath, expect::SelectShape,
                                 expect::CompleteSymmetric, expect::PressNext, expect::ConnectGlow>;

constexpr std::string_view expectation_name(const Expectation& e) {
  constexpr std::string_view names[] = {"insert_at",          "lace_shape", "lace_path",   "select_shape",
                                        "complete_symmetric", "press_next", "connect_glow"};
  return names[e.index()];
}

struct Step {
  LedFrame frame;
  Expectation expected;
  std::optional<std::size_t> part;  // string that inserts during this step extend
  std::size_t group = 0;            // source step index; shared by collaboration sub-steps

  bool operator==(const Step&) const = default;
};

/// One string the student is expected to lace. Closed targets must return to their start.
struct LacingTarget {
  std::vector<HoleId> holes;
  bool closed = true;
  PaletteColor color = PaletteColor::Red;

  bool operator==(const LacingTarget&) const = default;
};

struct InstructionProgram {
  InstructionFormat format = InstructionFormat::None;
  std::vector<Step> steps;
  CompositeShape target;
  std::optional<SymmetryAxis> axis;
  Relation relation = Relation::Congruent;
  std::vector<LacingTarget> strings;
  std::optional<std::size_t> odd_index;
  GlowProgram glow = FixedGlow{};
  bool free_play_glow = false;  // strings glow while laced, PressNext cycles glow programs
};

// ---------------------------------------------------------------------------
// Verification

struct Match {
  std::size_t offset = 0;
  bool reversed = false;
  bool operator==(const Match&) const = default;
};
struct Mismatch {
  std::vector<HoleId> wrong_holes;
  bool operator==(const Mismatch&) const = default;
};
struct Incomplete {
  std::size_t remaining = 0;
  bool operator==(const Incomplete&) const = default;
};
using MatchResult = std::variant<Match, Mismatch, Incomplete>;

inline bool is_match(const MatchResult& r) { return std::holds_alternative<Match>(r); }

namespace detail {

struct Alignment {
  std::vector<HoleId> expected;
  std::size_t offset;
  bool reversed;
};

inline MatchResult match_alignments(const std::vector<HoleId>& fiber, const std::vector<Alignment>& alignments) {
  const std::size_t m = fiber.size();
  std::size_t best = 0;
  for (const auto& a : alignments) {
    const std::size_t len = a.expected.size();
    std::size_t prefix = 0;
    while (prefix < m && prefix < len && fiber[prefix] == a.expected[prefix]) ++prefix;
    if (prefix == m && m == len) return Match{a.offset, a.reversed};
    best = std::max(best, prefix);
  }
  for (const auto& a : alignments) {
    const std::size_t len = a.expected.size();
    if (m < len && std::equal(fiber.begin(), fiber.end(), a.expected.begin())) return Incomplete{len - m};
  }
  if (m == 0) return Incomplete{alignments.empty() ? 0 : alignments.front().expected.size()};
  return Mismatch{{fiber.begin() + static_cast<std::ptrdiff_t>(best), fiber.end()}};
}

}  // namespace detail

/// The fiber must trace the target cycle from any start, in either direction, and return to
/// its first hole.
inline MatchResult verify_lacing(const FiberPath& fiber, const Shape& target) {
  const std::size_t n = target.vertices.size();
  std::vector<detail::Alignment> alignments;
  for (int dir = 0; dir < 2; ++dir) {
    for (std::size_t o = 0; o < n; ++o) {
      detail::Alignment a{{}, o, dir == 1};
      for (std::size_t j = 0; j <= n; ++j) {
        const std::size_t idx = dir == 0 ? (o + j) % n : (o + n * (j + 1) - j) % n;
        a.expected.push_back(target.vertices[idx]);
      }
      alignments.push_back(std::move(a));
    }
  }
  return detail::match_alignments(fiber.holes(), alignments);
}

/// Open paths match front-to-back or back-to-front.
inline MatchResult verify_path(const FiberPath& fiber, const std::vector<HoleId>& path) {
  std::vector<detail::Alignment> alignments{{path, 0, false}};
  if (path.size() > 1) alignments.push_back({{path.rbegin(), path.rend()}, 0, true});
  return detail::match_alignments(fiber.holes(), alignments);
}

inline MatchResult verify_target(const FiberPath& fiber, const LacingTarget& target) {
  return target.closed ? verify_lacing(fiber, Shape{target.holes}) : verify_path(fiber, target.holes);
}

// ---------------------------------------------------------------------------
// Compilation

namespace detail {

inline void light(LedFrame& f, const std::vector<HoleId>& holes, PaletteColor c) {
  for (HoleId h : holes) f.set(h, LedState::on(c));
}

inline LedFrame frame_of(const std::vector<HoleId>& holes, PaletteColor c) {
  LedFrame f;
  light(f, holes, c);
  return f;
}

/// A color no part uses, so the symmetry line stands out.
inline PaletteColor axis_color(const CompositeShape& target) {
  for (PaletteColor c : {PaletteColor::Green, PaletteColor::Blue, PaletteColor::Yellow, PaletteColor::Purple,
                         PaletteColor::Red}) {
    bool used = false;
    for (const auto& p : target.parts) used = used || p.color_hint == c;
    if (!used) return c;
  }
  return PaletteColor::Green;
}

inline std::vector<HoleId> axis_holes(const GridTemplate& t, SymmetryAxis axis) {
  std::vector<HoleId> out;
  for (const auto& [h, _] : t.positions()) {
    if (on_axis(h, axis)) out.push_back(h);
  }
  return out;
}

inline std::vector<HoleId> closed_lacing(const Shape& s) {
  std::vector<HoleId> v = s.vertices;
  v.push_back(s.vertices.front());
  return v;
}

inline InstructionProgram compile_half_shape(const CompositeShape& target, SymmetryAxis axis, const GridTemplate& t) {
  if (target.parts.size() != 1) fail(ErrorCode::ModeTargetMismatch, "symmetry targets are a single outline");
  const ShapePart& part = target.parts.front();
  if (!is_symmetric(part.shape, axis)) fail(ErrorCode::ModeTargetMismatch, "target is not symmetric about the axis");
  const std::vector<HoleId> half = half_of(part.shape, axis);
  // Lacing order: the full cycle starting where the half starts, in the half's direction.
  const auto& cyc = part.shape.vertices;
  const std::size_t n = cyc.size();
  const std::size_t start = static_cast<std::size_t>(std::find(cyc.begin(), cyc.end(), half.front()) - cyc.begin());
  std::vector<HoleId> order;
  for (std::size_t i = 0; i < n; ++i) order.push_back(cyc[(start + i) % n]);
  if (!std::equal(half.begin(), half.end(), order.begin())) {
    std::reverse(order.begin() + 1, order.end());
  }

  const PaletteColor ac = axis_color(target);
  LedFrame axis_frame = frame_of(axis_holes(t, axis), ac);

  InstructionProgram p;
  p.format = InstructionFormat::HalfShape;
  p.target = target;
  p.axis = axis;
  LedFrame half_frame = axis_frame;
  light(half_frame, half, part.color_hint);
  p.steps.push_back({half_frame, expect::LacePath{half}, 0, 0});
  p.steps.push_back(
      {axis_frame, expect::CompleteSymmetric{axis, {order.begin() + static_cast<std::ptrdiff_t>(half.size()), order.end()}}, 0, 1});
  LedFrame glow_frame = axis_frame;
  glow_frame.set(order.front(), LedState::on(part.color_hint));
  p.steps.push_back({glow_frame, expect::ConnectGlow{}, 0, 2});
  p.strings.push_back({order, true, part.color_hint});
  return p;
}

}  // namespace detail

inline void validate_target(const CompositeShape& target, const GridTemplate& t) {
  for (const auto& part : target.parts) validate_shape(part.shape, t);
}

/// Builds the instruction program for one board.
inline InstructionProgram compile(Mode mode, const CompositeShape& target, std::optional<SymmetryAxis> axis,
                                  Relation relation, const GridTemplate& t) {
  validate_target(target, t);
  const auto& parts = target.parts;
  InstructionProgram p;
  p.target = target;
  p.relation = relation;
  p.axis = axis;

  switch (mode) {
    case Mode::BasicShape: {
      if (parts.empty()) fail(ErrorCode::ModeTargetMismatch, "basic shape mode needs an outline");
      p.format = InstructionFormat::StepByStep;
      const auto& outline = parts.front();
      p.steps.push_back({detail::frame_of(outline.shape.vertices, outline.color_hint), expect::PressNext{}, 0, 0});
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k > 0) {
          const auto& prev = parts[k - 1];
          const HoleId close = prev.shape.vertices.front();
          p.steps.push_back({detail::frame_of({close}, prev.color_hint), expect::InsertAt{close}, k - 1, 0});
        }
        for (HoleId v : parts[k].shape.vertices) {
          p.steps.push_back({detail::frame_of({v}, parts[k].color_hint), expect::InsertAt{v}, k, 0});
        }
      }
      const auto& last = parts.back();
      p.steps.push_back({detail::frame_of({last.shape.vertices.front()}, last.color_hint), expect::ConnectGlow{},
                         parts.size() - 1, 0});
      for (const auto& part : parts) p.strings.push_back({part.shape.vertices, true, part.color_hint});
      break;
    }
    case Mode::OrientationSize: {
      if (parts.size() != 3) fail(ErrorCode::ModeTargetMismatch, "odd-one-out mode needs exactly three shapes");
      p.format = InstructionFormat::ShapeByShape;
      std::vector<Shape> shapes;
      for (const auto& part : parts) shapes.push_back(part.shape);
      p.odd_index = odd_one_out(shapes, relation);
      for (std::size_t k = 0; k < 3; ++k) {
        p.steps.push_back({detail::frame_of(parts[k].shape.vertices, parts[k].color_hint), expect::LaceShape{parts[k].shape}, k, 0});
        p.strings.push_back({parts[k].shape.vertices, true, parts[k].color_hint});
      }
      const auto& odd = parts[*p.odd_index];
      p.steps.push_back({detail::frame_of(odd.shape.vertices, odd.color_hint), expect::SelectShape{}, std::nullopt, 0});
      p.steps.push_back({detail::frame_of(odd.shape.vertices, PaletteColor::Red), expect::ConnectGlow{}, std::nullopt, 0});
      break;
    }
    case Mode::Symmetry: {
      if (!axis) fail(ErrorCode::MissingAxis, "symmetry mode needs an axis");
      auto half = detail::compile_half_shape(target, *axis, t);
      half.relation = relation;
      p = std::move(half);
      break;
    }
    case Mode::ComplexShape: {
      if (parts.empty()) fail(ErrorCode::ModeTargetMismatch, "complex shape mode needs at least one part");
      p.format = InstructionFormat::ShapeByShape;
      std::vector<PaletteColor> hints;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        p.steps.push_back({detail::frame_of(parts[k].shape.vertices, parts[k].color_hint), expect::LaceShape{parts[k].shape}, k, 0});
        p.strings.push_back({parts[k].shape.vertices, true, parts[k].color_hint});
        hints.push_back(parts[k].color_hint);
      }
      p.steps.push_back({LedFrame{}, expect::ConnectGlow{}, std::nullopt, 0});
      p.glow = PerStringGlow{hints};
      break;
    }
    case Mode::Collaboration: {
      if (parts.empty()) {
        p.format = InstructionFormat::None;
        p.free_play_glow = true;
        break;
      }
      if (!axis) fail(ErrorCode::MissingAxis, "single-board collaboration uses half-shape instructions and needs an axis");
      auto half = detail::compile_half_shape(target, *axis, t);
      half.relation = relation;
      p = std::move(half);
      break;
    }
    case Mode::FreePlay: {
      if (!parts.empty()) fail(ErrorCode::ModeTargetMismatch, "free play takes no target");
      p.format = InstructionFormat::None;
      p.free_play_glow = true;
      break;
    }
  }
  for (std::size_t i = 0; i < p.steps.size(); ++i) p.steps[i].group = i;
  return p;
}

// ---------------------------------------------------------------------------
// Session

struct ModeTarget {
  CompositeShape target;
  std::optional<SymmetryAxis> axis;
  Relation relation = Relation::Congruent;
};

/// Immutable environment shared by every state of one session.
struct SessionContext {
  GridTemplate board = default_board();
  std::map<Mode, ModeTarget> curriculum;  // what each mode compiles after PressCenter
  Side start_side = Side::Back;
  bool mode_locked = false;  // boards of a collaboration cannot leave Mode 5
};

namespace event {
struct PressCenter {};
struct PressNext {};
struct PressBack {};
struct Insert {
  HoleId hole;
};
struct Remove {
  HoleId hole;
};
struct PotSet {
  double value = 0.0;
};
struct SenseConfirm {
  HoleId hole;
};
struct Select {
  std::size_t index = 0;
};
}  // namespace event

using Event = std::variant<event::PressCenter, event::PressNext, event::PressBack, event::Insert, event::Remove,
                           event::PotSet, event::SenseConfirm, event::Select>;

struct SessionState {
  std::shared_ptr<const SessionContext> context;
  Mode mode = Mode::BasicShape;
  InstructionProgram program;
  std::size_t step_index = 0;
  std::vector<FiberPath> strings;
  GlowProgram glow = FixedGlow{};
  bool glowing = false;
  std::optional<std::size_t> selection;
  std::optional<bool> selection_correct;
  double pot = 0.0;
  bool sensing_enabled = false;

  const Step* current_step() const {
    return program.steps.empty() ? nullptr : &program.steps[step_index];
  }
};

namespace detail {

inline GlowProgram default_glow(const InstructionProgram& p, double pot) {
  if (std::holds_alternative<PerStringGlow>(p.glow)) return p.glow;
  return FixedGlow{pot_to_color(pot)};
}

inline void load_program(SessionState& s, InstructionProgram program) {
  s.program = std::move(program);
  s.step_index = 0;
  s.strings.assign(s.program.strings.size(), FiberPath{s.context->start_side, {}});
  s.glow = default_glow(s.program, s.pot);
  s.glowing = false;
  s.selection.reset();
  s.selection_correct.reset();
}

inline bool string_closed(const FiberPath& f) {
  return f.size() >= 4 && f.passes.front().hole == f.passes.back().hole;
}

inline std::size_t active_string(SessionState& s) {
  if (s.program.steps.empty()) {
    if (s.strings.empty() || string_closed(s.strings.back())) s.strings.push_back(FiberPath{s.context->start_side, {}});
    return s.strings.size() - 1;
  }
  const auto& part = s.program.steps[s.step_index].part;
  if (!part) fail(ErrorCode::InvalidTransition, "no string is being laced at this step");
  return *part;
}

inline void insert(SessionState& s, HoleId h) {
  const std::size_t k = active_string(s);
  s.strings[k] = append_pass(std::move(s.strings[k]), h, s.context->board);
}

inline void advance(SessionState& s) {
  if (s.program.steps.empty()) return;
  if (s.step_index + 1 < s.program.steps.size()) {
    ++s.step_index;
  } else {
    s.glowing = true;
  }
}

inline void cycle_glow(SessionState& s) {
  const PaletteColor c = pot_to_color(s.pot);
  if (std::holds_alternative<FixedGlow>(s.glow)) {
    s.glow = PerStringGlow{{kPalette.begin(), kPalette.end()}};
  } else if (std::holds_alternative<PerStringGlow>(s.glow)) {
    s.glow = BlinkGlow{kDefaultBlinkPeriodMs, {c}};
  } else {
    s.glow = FixedGlow{c};
  }
}

inline void repaint(SessionState& s) {
  const PaletteColor c = pot_to_color(s.pot);
  if (auto* f = std::get_if<FixedGlow>(&s.glow)) {
    f->color = c;
  } else if (auto* b = std::get_if<BlinkGlow>(&s.glow)) {
    b->colors.assign(1, c);
  } else {
    auto& per = std::get<PerStringGlow>(s.glow);
    std::size_t last = 0;
    for (std::size_t k = 0; k < s.strings.size(); ++k) {
      if (!s.strings[k].empty()) last = k;
    }
    std::vector<PaletteColor> expanded;
    const std::size_t n = std::max(per.colors.size(), std::max(s.strings.size(), last + 1));
    for (std::size_t k = 0; k < n; ++k) {
      expanded.push_back(per.colors.empty() ? PaletteColor::Red : per.colors[k % per.colors.size()]);
    }
    expanded[last] = c;
    per.colors = std::move(expanded);
  }
}

inline std::optional<std::size_t> select_step_index(const InstructionProgram& p) {
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (std::holds_alternative<expect::SelectShape>(p.steps[i].expected)) return i;
  }
  return std::nullopt;
}

}  // namespace detail

inline SessionState start_session(std::shared_ptr<const SessionContext> ctx, Mode mode, bool sensing_enabled = false,
                                  double pot = 0.0) {
  SessionState s;
  s.context = std::move(ctx);
  s.mode = mode;
  s.sensing_enabled = sensing_enabled;
  s.pot = pot;
  auto it = s.context->curriculum.find(mode);
  const ModeTarget mt = it == s.context->curriculum.end() ? ModeTarget{} : it->second;
  detail::load_program(s, compile(mode, mt.target, mt.axis, mt.relation, s.context->board));
  return s;
}

/// Session around a precompiled program (used for collaboration boards).
inline SessionState start_session(std::shared_ptr<const SessionContext> ctx, Mode mode, InstructionProgram program,
                                  bool sensing_enabled = false) {
  SessionState s;
  s.context = std::move(ctx);
  s.mode = mode;
  s.sensing_enabled = sensing_enabled;
  detail::load_program(s, std::move(program));
  return s;
}

inline std::pair<SessionState, bool> select_odd(const SessionState& state, std::size_t choice) {
  if (state.mode != Mode::OrientationSize) fail(ErrorCode::NotInSelectionPhase, "selection only exists in odd-one-out mode");
  const auto sel = detail::select_step_index(state.program);
  if (!sel || state.step_index < *sel) fail(ErrorCode::NotInSelectionPhase, "all three shapes must be laced first");
  if (choice >= state.program.target.parts.size()) fail(ErrorCode::OutOfRange, "choice must name one of the three shapes");
  SessionState next = state;
  const bool correct = state.program.odd_index && *state.program.odd_index == choice;
  next.selection = choice;
  next.selection_correct = correct;
  return {std::move(next), correct};
}

/// Pure transition. Throws Error on an invalid event; the input state is never modified.
inline SessionState step(const SessionState& state, const Event& ev) {
  SessionState s = state;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, event::PressCenter>) {
          if (s.context->mode_locked) fail(ErrorCode::InvalidTransition, "collaboration boards stay in mode 5");
          s = start_session(s.context, next_mode(s.mode), s.sensing_enabled, s.pot);
        } else if constexpr (std::is_same_v<T, event::PressNext>) {
          if (s.program.free_play_glow) {
            detail::cycle_glow(s);
          } else {
            detail::advance(s);
          }
        } else if constexpr (std::is_same_v<T, event::PressBack>) {
          if (s.glowing) {
            s.glowing = false;
          } else if (s.step_index > 0) {
            --s.step_index;
          }
        } else if constexpr (std::is_same_v<T, event::Insert>) {
          detail::insert(s, e.hole);
        } else if constexpr (std::is_same_v<T, event::Remove>) {
          require_hole(s.context->board, e.hole);
          std::size_t k = 0;
          if (s.program.steps.empty()) {
            if (s.strings.empty()) fail(ErrorCode::InvalidTransition, "nothing is laced");
            k = s.strings.size() - 1;
          } else {
            k = detail::active_string(s);
          }
          auto& f = s.strings[k];
          if (f.empty() || f.passes.back().hole != e.hole) {
            fail(ErrorCode::InvalidTransition, "fiber does not end at " + to_string(e.hole));
          }
          f = pop_pass(std::move(f));
          if (s.program.steps.empty() && f.empty()) s.strings.pop_back();
        } else if constexpr (std::is_same_v<T, event::PotSet>) {
          if (!(e.value >= 0.0 && e.value <= 1.0)) fail(ErrorCode::OutOfRange, "pot value must lie in [0, 1]");
          s.pot = e.value;
          detail::repaint(s);
        } else if constexpr (std::is_same_v<T, event::SenseConfirm>) {
          if (!s.sensing_enabled) return;
          const Step* cur = s.current_step();
          const bool expected = cur && std::holds_alternative<expect::InsertAt>(cur->expected) &&
                                std::get<expect::InsertAt>(cur->expected).hole == e.hole;
          detail::insert(s, e.hole);
          if (expected) detail::advance(s);
        } else if constexpr (std::is_same_v<T, event::Select>) {
          if (s.mode != Mode::OrientationSize) fail(ErrorCode::InvalidTransition, "selection only exists in odd-one-out mode");
          s = select_odd(s, e.index).first;
        }
      },
      ev);
  return s;
}

/// The frame of the current step with glowing strings drawn over it.
inline LedFrame current_frame(const SessionState& s) {
  LedFrame f;
  if (const Step* cur = s.current_step()) f = cur->frame;
  const bool glow_all = s.program.free_play_glow || s.glowing;
  if (glow_all) {
    for (std::size_t k = 0; k < s.strings.size(); ++k) {
      const LedState ls = glow_state(s.glow, k);
      for (const auto& pass : s.strings[k].passes) f.set(pass.hole, ls);
    }
  }
  if (s.selection) {
    const std::size_t k = *s.selection;
    if (k < s.strings.size() && !s.strings[k].empty()) {
      for (const auto& pass : s.strings[k].passes) f.set(pass.hole, LedState::on(PaletteColor::Red));
    } else if (k < s.program.target.parts.size()) {
      for (HoleId h : s.program.target.parts[k].shape.vertices) f.set(h, LedState::on(PaletteColor::Red));
    }
  }
  return f;
}

inline std::vector<MatchResult> verify_strings(const SessionState& s) {
  std::vector<MatchResult> out;
  for (std::size_t k = 0; k < s.program.strings.size(); ++k) {
    out.push_back(verify_target(k < s.strings.size() ? s.strings[k] : FiberPath{}, s.program.strings[k]));
  }
  return out;
}

/// Every expected string matches. Programs without targets are never complete.
inline bool lacing_complete(const SessionState& s) {
  if (s.program.strings.empty()) return false;
  const auto results = verify_strings(s);
  return std::all_of(results.begin(), results.end(), is_match);
}

/// The event sequence of a student who does exactly what every step asks.
inline std::vector<Event> perfect_student(const InstructionProgram& p) {
  std::vector<Event> out;
  std::vector<std::vector<HoleId>> laced(p.strings.size());
  auto put = [&](std::optional<std::size_t> part, HoleId h) {
    out.push_back(event::Insert{h});
    if (part) laced[*part].push_back(h);
  };
  for (const Step& st : p.steps) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, expect::InsertAt>) {
            put(st.part, e.hole);
          } else if constexpr (std::is_same_v<T, expect::LaceShape>) {
            for (HoleId h : e.shape.vertices) put(st.part, h);
            put(st.part, e.shape.vertices.front());
          } else if constexpr (std::is_same_v<T, expect::LacePath>) {
            for (HoleId h : e.holes) put(st.part, h);
          } else if constexpr (std::is_same_v<T, expect::CompleteSymmetric>) {
            for (HoleId h : e.remaining) put(st.part, h);
          } else if constexpr (std::is_same_v<T, expect::SelectShape>) {
            if (p.odd_index) out.push_back(event::Select{*p.odd_index});
          } else if constexpr (std::is_same_v<T, expect::ConnectGlow>) {
            if (st.part && p.strings[*st.part].closed) {
              const auto& l = laced[*st.part];
              if (!l.empty() && l.front() != l.back()) put(st.part, l.front());
            }
          }
        },
        st.expected);
    out.push_back(event::PressNext{});
  }
  return out;
}

}  // namespace tieboard
