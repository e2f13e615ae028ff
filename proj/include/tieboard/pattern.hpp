#pragma once

// 0/1 pattern matrices (the brace-and-comma listing used in board firmware) and
// stop-motion scripts built from them.

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tieboard/board.hpp"
#include "tieboard/error.hpp"
#include "tieboard/glow.hpp"

namespace tieboard {

struct PatternMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> cells;  // row-major, each 0 or 1

  std::uint8_t at(int r, int c) const { return cells[static_cast<std::size_t>(r * cols + c)]; }
  std::uint8_t& at(int r, int c) { return cells[static_cast<std::size_t>(r * cols + c)]; }

  static PatternMatrix zeros(int rows, int cols) {
    return {rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(rows * cols), 0)};
  }
  bool operator==(const PatternMatrix&) const = default;
};

/// Braces, commas and whitespace separate tokens; every token must be 0 or 1.
/// BadToken messages carry the token index and byte offset.
inline PatternMatrix parse_pattern(std::string_view text, int rows, int cols) {
  if (rows < 1 || cols < 1) fail(ErrorCode::ZeroDimension, "pattern needs rows, cols >= 1");
  auto is_sep = [](char ch) {
    return ch == '{' || ch == '}' || ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r';
  };
  PatternMatrix m = PatternMatrix::zeros(rows, cols);
  const std::size_t expected = static_cast<std::size_t>(rows * cols);
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_sep(text[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && !is_sep(text[i])) ++i;
    std::string_view tok = text.substr(begin, i - begin);
    if (tok != "0" && tok != "1") {
      fail(ErrorCode::BadToken, "token " + std::to_string(count) + " at offset " + std::to_string(begin) + " is `" +
                                    std::string(tok) + "`, expected 0 or 1");
    }
    if (count < expected) m.cells[count] = tok == "1" ? 1 : 0;
    ++count;
  }
  if (count != expected) {
    fail(ErrorCode::WrongCount, "found " + std::to_string(count) + " cells, expected " + std::to_string(expected));
  }
  return m;
}

/// Canonical listing: one `{ a, b, ... }` row per line, commas between rows.
inline std::string render_pattern(const PatternMatrix& m) {
  std::string out;
  for (int r = 0; r < m.rows; ++r) {
    out += "{ ";
    for (int c = 0; c < m.cols; ++c) {
      out += m.at(r, c) ? '1' : '0';
      if (c + 1 < m.cols) out += ", ";
    }
    out += " }";
    if (r + 1 < m.rows) out += ',';
    out += '\n';
  }
  return out;
}

inline void require_matrix_fits(const PatternMatrix& m, const GridTemplate& t) {
  if (t.kind() != GridKind::Rectangular || m.rows != t.rows() || m.cols != t.cols()) {
    fail(ErrorCode::DimensionMismatch, "pattern is " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                                           " but the template is not a matching rectangular grid");
  }
}

inline LedFrame matrix_to_frame(const PatternMatrix& m, PaletteColor color, const GridTemplate& t) {
  require_matrix_fits(m, t);
  LedFrame f;
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (m.at(r, c)) f.set({r, c}, LedState::on(color));
    }
  }
  return f;
}

inline PatternMatrix frame_to_matrix(const LedFrame& f, const GridTemplate& t) {
  if (t.kind() != GridKind::Rectangular) fail(ErrorCode::DimensionMismatch, "pattern matrices need a rectangular template");
  PatternMatrix m = PatternMatrix::zeros(t.rows(), t.cols());
  for (const auto& [h, s] : f.states()) {
    require_hole(t, h);
    if (s.mode != LedMode::Off) m.at(h.row, h.col) = 1;
  }
  return m;
}

struct ScriptFrame {
  PatternMatrix matrix;
  std::int64_t duration_ms = 0;
};

struct AnimationScript {
  int rows = 0;
  int cols = 0;
  std::vector<ScriptFrame> frames;
};

/// `.anim` format: header `rows cols`, then frames each introduced by `@<duration_ms>` and
/// separated by blank lines.
inline AnimationScript parse_script(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  AnimationScript script;
  bool have_header = false;
  std::string body;
  std::int64_t duration = -1;
  int line_no = 0;
  auto flush = [&]() {
    if (duration < 0) return;
    script.frames.push_back({parse_pattern(body, script.rows, script.cols), duration});
    body.clear();
    duration = -1;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ' || trimmed.back() == '\t')) trimmed.pop_back();
    const auto first = trimmed.find_first_not_of(" \t");
    if (first == std::string::npos) {
      flush();
      continue;
    }
    trimmed.erase(0, first);
    if (trimmed[0] == '#') continue;
    if (!have_header) {
      std::istringstream hs(trimmed);
      std::string extra;
      if (!(hs >> script.rows >> script.cols) || (hs >> extra) || script.rows < 1 || script.cols < 1) {
        fail(ErrorCode::ScriptParseError, "line " + std::to_string(line_no) + ": expected header `rows cols`");
      }
      have_header = true;
      continue;
    }
    if (trimmed[0] == '@') {
      flush();
      try {
        std::size_t used = 0;
        duration = std::stoll(trimmed.substr(1), &used);
        if (used != trimmed.size() - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(ErrorCode::ScriptParseError, "line " + std::to_string(line_no) + ": bad duration `" + trimmed + "`");
      }
      if (duration <= 0) fail(ErrorCode::ScriptParseError, "line " + std::to_string(line_no) + ": duration must be positive");
      continue;
    }
    if (duration < 0) fail(ErrorCode::ScriptParseError, "line " + std::to_string(line_no) + ": pattern row before `@<duration_ms>`");
    body += trimmed;
    body += '\n';
  }
  flush();
  if (!have_header) fail(ErrorCode::ScriptParseError, "missing `rows cols` header");
  return script;
}

/// Frame k starts at the sum of the durations before it.
inline AnimationTimeline compile_script(const AnimationScript& script, PaletteColor color, const GridTemplate& t) {
  if (script.frames.empty()) fail(ErrorCode::EmptyScript, "animation script has no frames");
  AnimationTimeline tl;
  std::int64_t at = 0;
  for (const auto& f : script.frames) {
    if (f.duration_ms <= 0) fail(ErrorCode::OutOfRange, "frame durations must be positive");
    tl.entries.push_back({at, matrix_to_frame(f.matrix, color, t)});
    at += f.duration_ms;
  }
  return tl;
}

inline std::int64_t script_length_ms(const AnimationScript& script) {
  std::int64_t total = 0;
  for (const auto& f : script.frames) total += f.duration_ms;
  return total;
}

}  // namespace tieboard
