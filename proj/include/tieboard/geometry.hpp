#pragma once

// Exact lattice geometry on hole coordinates. Everything here is integer-only.
//
// Vectors use x = col and y = row. Lattice isometries are the eight maps of the
// square lattice's point group (quarter turns and mirrors) composed with a
// translation; similarity additionally allows a positive rational scale.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tieboard/board.hpp"
#include "tieboard/error.hpp"

namespace tieboard {

struct Shape {
  std::vector<HoleId> vertices;  // closed cycle: last connects back to first

  bool operator==(const Shape&) const = default;
};

struct ShapePart {
  Shape shape;
  PaletteColor color_hint = PaletteColor::Red;

  bool operator==(const ShapePart&) const = default;
};

struct CompositeShape {
  std::string name;
  std::vector<ShapePart> parts;

  bool operator==(const CompositeShape&) const = default;
};

enum class AxisOrientation { Horizontal, Vertical, DiagonalUp, DiagonalDown };

/// Reflection line in doubled coordinates:
///   Horizontal   2*row = d           Vertical     2*col = d
///   DiagonalDown 2*(col - row) = d   DiagonalUp   2*(row + col) = d
struct SymmetryAxis {
  AxisOrientation orientation = AxisOrientation::Vertical;
  int doubled_intercept = 0;

  bool operator==(const SymmetryAxis&) const = default;
};

enum class Relation { Congruent, Similar };

struct Vec {
  std::int64_t x = 0;
  std::int64_t y = 0;

  bool operator==(const Vec&) const = default;
};

struct EdgeSignature {
  std::vector<std::int64_t> sq_lengths;  // |e_i|^2, e_i = v_{i+1} - v_i
  std::vector<std::int64_t> turns;       // cross(e_{i-1}, e_i) at vertex i
  std::vector<Vec> edges;                // e_i, the lattice-invariant part used for matching

  bool operator==(const EdgeSignature&) const = default;
};

namespace detail {

inline void require_cycle(const Shape& s) {
  if (s.vertices.size() < 3) fail(ErrorCode::TooFewVertices, "a shape needs at least 3 vertices");
}

inline std::vector<Vec> edge_vectors(const Shape& s) {
  const std::size_t n = s.vertices.size();
  std::vector<Vec> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const HoleId a = s.vertices[i];
    const HoleId b = s.vertices[(i + 1) % n];
    out[i] = {b.col - a.col, b.row - a.row};
    if (out[i].x == 0 && out[i].y == 0) {
      fail(ErrorCode::DegenerateShape, "zero-length edge at vertex " + std::to_string(i));
    }
  }
  return out;
}

/// The eight point-group elements of the square lattice.
inline Vec apply_point_map(int g, Vec v) {
  const bool swap = (g & 4) != 0;
  Vec r = swap ? Vec{v.y, v.x} : v;
  if (g & 1) r.x = -r.x;
  if (g & 2) r.y = -r.y;
  return r;
}

/// Edge list of the same polygon traversed backwards.
inline std::vector<Vec> reversed_edges(const std::vector<Vec>& e) {
  std::vector<Vec> out(e.rbegin(), e.rend());
  for (auto& v : out) v = {-v.x, -v.y};
  return out;
}

/// True iff target[(k + i) % n] == scale * mapped(source[i]) for some shift k, where the
/// positive rational scale is fixed by the first edge (exactly 1 when `unit_scale`).
inline bool cyclic_match(const std::vector<Vec>& source, const std::vector<Vec>& target, int g, bool unit_scale) {
  const std::size_t n = source.size();
  std::vector<Vec> mapped(n);
  for (std::size_t i = 0; i < n; ++i) mapped[i] = apply_point_map(g, source[i]);
  for (std::size_t k = 0; k < n; ++k) {
    // scale = num / den, taken from the first edge pair; vectors must be parallel and same-directed.
    const Vec& m0 = mapped[0];
    const Vec& t0 = target[k % n];
    std::int64_t num = 1, den = 1;
    if (!unit_scale) {
      if (m0.x * t0.y - m0.y * t0.x != 0) continue;
      if (m0.x * t0.x + m0.y * t0.y <= 0) continue;
      if (m0.x != 0) {
        num = t0.x;
        den = m0.x;
      } else {
        num = t0.y;
        den = m0.y;
      }
      if (den < 0) {
        num = -num;
        den = -den;
      }
    }
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const Vec& m = mapped[i];
      const Vec& t = target[(k + i) % n];
      ok = t.x * den == m.x * num && t.y * den == m.y * num;
    }
    if (ok) return true;
  }
  return false;
}

inline bool related(const Shape& a, const Shape& b, bool unit_scale) {
  const auto ea = edge_vectors(a);
  const auto eb = edge_vectors(b);
  if (ea.size() != eb.size()) return false;
  const auto eb_rev = reversed_edges(eb);
  for (int g = 0; g < 8; ++g) {
    if (cyclic_match(ea, eb, g, unit_scale) || cyclic_match(ea, eb_rev, g, unit_scale)) return true;
  }
  return false;
}

/// Reflect in doubled coordinates. Returns nullopt when the image is not a lattice point.
inline std::optional<HoleId> reflect_point(HoleId h, SymmetryAxis axis) {
  const int r2 = 2 * h.row;
  const int c2 = 2 * h.col;
  const int d = axis.doubled_intercept;
  int rr = 0, cc = 0;
  switch (axis.orientation) {
    case AxisOrientation::Horizontal: rr = 2 * d - r2; cc = c2; break;
    case AxisOrientation::Vertical: rr = r2; cc = 2 * d - c2; break;
    case AxisOrientation::DiagonalDown: rr = c2 - d; cc = r2 + d; break;
    case AxisOrientation::DiagonalUp: rr = d - c2; cc = d - r2; break;
  }
  if ((rr % 2) != 0 || (cc % 2) != 0) return std::nullopt;
  return HoleId{rr / 2, cc / 2};
}

inline bool same_cycle(const std::vector<HoleId>& a, const std::vector<HoleId>& b) {
  const std::size_t n = a.size();
  if (n != b.size()) return false;
  if (n == 0) return true;
  for (std::size_t k = 0; k < n; ++k) {
    bool fwd = true, rev = true;
    for (std::size_t i = 0; i < n && (fwd || rev); ++i) {
      if (a[i] != b[(k + i) % n]) fwd = false;
      if (a[i] != b[(k + n - i) % n]) rev = false;
    }
    if (fwd || rev) return true;
  }
  return false;
}

inline void drop_cyclic_duplicates(std::vector<HoleId>& v) {
  v.erase(std::unique(v.begin(), v.end()), v.end());
  while (v.size() > 1 && v.front() == v.back()) v.pop_back();
}

}  // namespace detail

inline bool on_axis(HoleId h, SymmetryAxis axis) {
  auto img = detail::reflect_point(h, axis);
  return img && *img == h;
}

inline EdgeSignature edge_signature(const Shape& s) {
  detail::require_cycle(s);
  EdgeSignature sig;
  sig.edges = detail::edge_vectors(s);
  const std::size_t n = sig.edges.size();
  sig.sq_lengths.resize(n);
  sig.turns.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& e = sig.edges[i];
    const Vec& in = sig.edges[(i + n - 1) % n];
    sig.sq_lengths[i] = e.x * e.x + e.y * e.y;
    sig.turns[i] = in.x * e.y - in.y * e.x;
  }
  return sig;
}

inline bool congruent(const Shape& a, const Shape& b) {
  detail::require_cycle(a);
  detail::require_cycle(b);
  return detail::related(a, b, true);
}

inline bool similar(const Shape& a, const Shape& b) {
  detail::require_cycle(a);
  detail::require_cycle(b);
  return detail::related(a, b, false);
}

inline bool related(const Shape& a, const Shape& b, Relation rel) {
  return rel == Relation::Congruent ? congruent(a, b) : similar(a, b);
}

/// Reflect each vertex, keeping vertex order. Images must be non-negative lattice points.
inline Shape reflect(const Shape& s, SymmetryAxis axis) {
  Shape out;
  out.vertices.reserve(s.vertices.size());
  for (HoleId h : s.vertices) {
    auto img = detail::reflect_point(h, axis);
    if (!img || img->row < 0 || img->col < 0) {
      fail(ErrorCode::ReflectionOffGrid, "reflection of " + to_string(h) + " is not a grid hole");
    }
    out.vertices.push_back(*img);
  }
  return out;
}

inline Shape reflect(const Shape& s, SymmetryAxis axis, const GridTemplate& t) {
  Shape out = reflect(s, axis);
  for (HoleId h : out.vertices) {
    if (!t.contains(h)) fail(ErrorCode::ReflectionOffGrid, "reflection lands on " + to_string(h) + ", off the template");
  }
  return out;
}

inline bool is_symmetric(const Shape& s, SymmetryAxis axis) {
  Shape img;
  try {
    img = reflect(s, axis);
  } catch (const Error&) {
    return false;
  }
  auto a = s.vertices, b = img.vertices;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) return false;
  return detail::same_cycle(s.vertices, img.vertices);
}

/// Close a half outline by appending its mirror image in reverse. Vertices on the axis are
/// shared rather than repeated.
inline Shape complete_half(std::span<const HoleId> half, SymmetryAxis axis) {
  if (half.size() < 2) fail(ErrorCode::TooFewVertices, "a half outline needs at least 2 vertices");
  Shape h{{half.begin(), half.end()}};
  Shape mirrored = reflect(h, axis);
  std::vector<HoleId> cycle(half.begin(), half.end());
  cycle.insert(cycle.end(), mirrored.vertices.rbegin(), mirrored.vertices.rend());
  detail::drop_cyclic_duplicates(cycle);
  if (cycle.size() < 3) fail(ErrorCode::TooFewVertices, "completed outline has fewer than 3 vertices");
  return Shape{std::move(cycle)};
}

inline Shape complete_half(std::span<const HoleId> half, SymmetryAxis axis, const GridTemplate& t) {
  for (HoleId v : half) require_hole(t, v);
  Shape out = complete_half(half, axis);
  for (HoleId v : out.vertices) {
    if (!t.contains(v)) fail(ErrorCode::ReflectionOffGrid, "completed outline leaves the template at " + to_string(v));
  }
  return out;
}

/// Shortest contiguous run of `full` (in cycle order) whose completion is `full` again.
inline std::vector<HoleId> half_of(const Shape& full, SymmetryAxis axis) {
  const std::size_t n = full.vertices.size();
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t start = 0; start < n; ++start) {
      std::vector<HoleId> run;
      for (std::size_t i = 0; i < len; ++i) run.push_back(full.vertices[(start + i) % n]);
      try {
        if (detail::same_cycle(complete_half(run, axis).vertices, full.vertices)) return run;
      } catch (const Error&) {
      }
    }
  }
  fail(ErrorCode::ModeTargetMismatch, "shape is not the completion of any half about this axis");
}

inline std::size_t odd_one_out(std::span<const Shape> shapes, Relation rel) {
  if (shapes.size() != 3) fail(ErrorCode::InvalidArgument, "odd one out needs exactly 3 shapes");
  const bool r01 = related(shapes[0], shapes[1], rel);
  const bool r02 = related(shapes[0], shapes[2], rel);
  const bool r12 = related(shapes[1], shapes[2], rel);
  const int pairs = int(r01) + int(r02) + int(r12);
  if (pairs != 1) fail(ErrorCode::NoUniqueOdd, pairs == 0 ? "no two shapes are related" : "all three shapes are related");
  if (r01) return 2;
  if (r02) return 1;
  return 0;
}

inline void validate_shape(const Shape& s, const GridTemplate& t) {
  detail::require_cycle(s);
  for (HoleId v : s.vertices) require_hole(t, v);
  (void)detail::edge_vectors(s);
}

}  // namespace tieboard
