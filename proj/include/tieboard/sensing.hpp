#pragma once

// Contact-matrix sensing: row/column scan, k-scan debounce, and seeded phantom touches.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tieboard/board.hpp"
#include "tieboard/error.hpp"

namespace tieboard {

class ContactMatrix {
 public:
  ContactMatrix() = default;
  ContactMatrix(int rows, int cols) : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows * cols), false) {}

  static ContactMatrix for_template(const GridTemplate& t) { return {t.matrix_rows(), t.matrix_cols()}; }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool get(int r, int c) const { return cells_[index(r, c)]; }
  void set(int r, int c, bool v) { cells_[index(r, c)] = v; }

  bool operator==(const ContactMatrix&) const = default;

 private:
  std::size_t index(int r, int c) const {
    if (r < 0 || c < 0 || r >= rows_ || c >= cols_) fail(ErrorCode::OutOfRange, "contact cell out of range");
    return static_cast<std::size_t>(r * cols_ + c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<bool> cells_;
};

struct ScanConfig {
  int debounce_k = 3;
  std::int64_t scan_period_ms = 20;
};

struct NoiseModel {
  double spurious_probability = 0.0;
  std::uint64_t seed = 0;
};

enum class SenseKind { Confirm, Release };

struct SenseEvent {
  SenseKind kind = SenseKind::Confirm;
  HoleId hole;
  std::size_t scan_index = 0;

  bool operator==(const SenseEvent&) const = default;
};

/// Drive each row, read every column. Cells without a hole (short isometric rows) are skipped.
inline std::set<HoleId> scan_cycle(const ContactMatrix& m, const GridTemplate& t) {
  if (m.rows() != t.matrix_rows() || m.cols() != t.matrix_cols()) {
    fail(ErrorCode::DimensionMismatch, "contact matrix does not match the template");
  }
  std::set<HoleId> out;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m.get(r, c) && t.contains({r, c})) out.insert({r, c});
    }
  }
  return out;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform in [0, 1), a pure function of the key.
inline double cell_uniform(std::uint64_t seed, std::uint64_t scan, int row, int col) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ scan);
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(row)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(col)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Phantom touches only: false cells flip true independently, true cells are kept.
inline ContactMatrix inject_noise(const ContactMatrix& truth, const NoiseModel& model, std::uint64_t scan_index) {
  if (!(model.spurious_probability >= 0.0 && model.spurious_probability <= 1.0)) {
    fail(ErrorCode::OutOfRange, "spurious probability must lie in [0, 1]");
  }
  ContactMatrix out = truth;
  if (model.spurious_probability == 0.0) return out;
  for (int r = 0; r < truth.rows(); ++r) {
    for (int c = 0; c < truth.cols(); ++c) {
      if (!truth.get(r, c) && detail::cell_uniform(model.seed, scan_index, r, c) < model.spurious_probability) {
        out.set(r, c, true);
      }
    }
  }
  return out;
}

/// Incremental debouncer: a hole's confirmed state flips after debounce_k consecutive
/// scans that disagree with it.
class Debouncer {
 public:
  explicit Debouncer(ScanConfig config = {}) : config_(config) {
    if (config_.debounce_k < 1) fail(ErrorCode::InvalidArgument, "debounce_k must be >= 1");
  }

  std::vector<SenseEvent> feed(const std::set<HoleId>& scan) {
    std::vector<SenseEvent> out;
    std::set<HoleId> keys = scan;
    for (const auto& [h, _] : holes_) keys.insert(h);
    for (HoleId h : keys) {
      Track& tr = holes_[h];
      const bool present = scan.count(h) != 0;
      if (present == tr.confirmed) {
        tr.disagree = 0;
      } else if (++tr.disagree >= config_.debounce_k) {
        tr.confirmed = present;
        tr.disagree = 0;
        out.push_back({present ? SenseKind::Confirm : SenseKind::Release, h, scans_});
      }
      if (!tr.confirmed && tr.disagree == 0) holes_.erase(h);
    }
    ++scans_;
    return out;
  }

  std::size_t scans() const noexcept { return scans_; }

 private:
  struct Track {
    bool confirmed = false;
    int disagree = 0;
  };

  ScanConfig config_;
  std::map<HoleId, Track> holes_;
  std::size_t scans_ = 0;
};

inline std::vector<SenseEvent> debounce(const std::vector<std::set<HoleId>>& scans, ScanConfig config) {
  Debouncer d(config);
  std::vector<SenseEvent> out;
  for (const auto& s : scans) {
    auto ev = d.feed(s);
    out.insert(out.end(), ev.begin(), ev.end());
  }
  return out;
}

/// Scan fixtures: one line per scan cycle, holes as `r,c` separated by spaces; a blank line
/// is an empty scan.
inline std::vector<std::set<HoleId>> parse_scan_fixture(const std::string& text) {
  std::vector<std::set<HoleId>> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::set<HoleId> scan;
    std::istringstream ls(line);
    for (std::string tok; ls >> tok;) {
      const auto comma = tok.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument("no comma");
        std::size_t a = 0, b = 0;
        const int r = std::stoi(tok.substr(0, comma), &a);
        const int c = std::stoi(tok.substr(comma + 1), &b);
        if (a != comma || b != tok.size() - comma - 1) throw std::invalid_argument("trailing");
        scan.insert({r, c});
      } catch (const std::exception&) {
        fail(ErrorCode::ScriptParseError, "scan line " + std::to_string(line_no) + ": bad hole `" + tok + "`");
      }
    }
    out.push_back(std::move(scan));
  }
  return out;
}

/// Simulated clock driving scans of the fiber-tip contact. The tip touches the copper ring of
/// the hole it was last inserted through.
class SensingSim {
 public:
  SensingSim(GridTemplate templ, ScanConfig scan, NoiseModel noise)
      : template_(std::move(templ)), scan_(scan), noise_(noise), debouncer_(scan) {
    if (scan_.scan_period_ms <= 0) fail(ErrorCode::InvalidArgument, "scan period must be positive");
  }

  void touch(HoleId h) {
    require_hole(template_, h);
    tip_ = h;
  }
  void release(HoleId h) {
    if (tip_ == h) tip_.reset();
  }
  std::optional<HoleId> tip() const { return tip_; }
  std::int64_t clock_ms() const noexcept { return clock_ms_; }

  struct Timed {
    std::int64_t t_ms;
    SenseEvent event;
  };

  /// Advance the clock, scanning at every multiple of the scan period passed.
  std::vector<Timed> advance(std::int64_t ms) {
    if (ms < 0) fail(ErrorCode::OutOfRange, "cannot tick backwards");
    std::vector<Timed> out;
    const std::int64_t end = clock_ms_ + ms;
    std::int64_t next = (clock_ms_ / scan_.scan_period_ms + 1) * scan_.scan_period_ms;
    for (; next <= end; next += scan_.scan_period_ms) {
      ContactMatrix truth = ContactMatrix::for_template(template_);
      if (tip_) truth.set(tip_->row, tip_->col, true);
      const auto noisy = inject_noise(truth, noise_, debouncer_.scans());
      for (const auto& ev : debouncer_.feed(scan_cycle(noisy, template_))) out.push_back({next, ev});
    }
    clock_ms_ = end;
    return out;
  }

 private:
  GridTemplate template_;
  ScanConfig scan_;
  NoiseModel noise_;
  Debouncer debouncer_;
  std::optional<HoleId> tip_;
  std::int64_t clock_ms_ = 0;
};

}  // namespace tieboard
