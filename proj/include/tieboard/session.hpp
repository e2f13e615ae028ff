#pragma once

// Scripted sessions: config loading, the event script language, the driver that feeds
// engine + sensing and emits one trace record per event, and golden-trace comparison.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tieboard/catalog.hpp"
#include "tieboard/collab.hpp"
#include "tieboard/engine.hpp"
#include "tieboard/json_io.hpp"
#include "tieboard/sensing.hpp"

namespace tieboard {

// ---------------------------------------------------------------------------
// Config

struct SessionConfig {
  GridTemplate board = default_board();
  Mode mode = Mode::BasicShape;
  std::optional<std::string> target;               // catalog entry name
  std::optional<nlohmann::json> inline_target;     // or an entry body given in place
  std::optional<SymmetryAxis> axis;
  std::optional<Relation> relation;
  std::optional<ArrangementSpec> arrangement;
  bool sensing_enabled = false;
  ScanConfig scan;
  double spurious_probability = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> catalog_path;
  Side start_side = Side::Back;
  double pot = 0.0;
};

namespace detail {

inline std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument("seed");
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "seed `" + text + "` is not an unsigned integer");
  }
}

}  // namespace detail

/// TIEBOARD_SEED, when set, replaces the configured seed.
inline void apply_env_overrides(SessionConfig& cfg) {
  if (const char* s = std::getenv("TIEBOARD_SEED"); s && *s) cfg.seed = detail::parse_seed(s);
}

inline SessionConfig config_from_json(const nlohmann::json& j) {
  using detail::reject_unknown_keys;
  const std::string what = "session config";
  reject_unknown_keys(j,
                      {"template", "mode", "target", "axis", "relation", "arrangement", "sensing_enabled", "noise", "scan",
                       "seed", "catalog", "start_side", "pot"},
                      what);
  SessionConfig c;
  try {
    if (j.contains("template")) c.board = template_from_json(j.at("template"));
    if (j.contains("mode")) c.mode = mode_from_int(j.at("mode").get<int>());
    if (j.contains("target")) {
      const auto& t = j.at("target");
      if (t.is_string()) {
        c.target = t.get<std::string>();
      } else if (t.is_object()) {
        c.inline_target = t;
      } else {
        fail(ErrorCode::ConfigError, "`target` is a catalog name or an entry object");
      }
    }
    if (j.contains("axis")) c.axis = axis_from_json(j.at("axis"));
    if (j.contains("relation")) c.relation = relation_from_string(j.at("relation").get<std::string>());
    if (j.contains("arrangement")) {
      const auto& a = j.at("arrangement");
      reject_unknown_keys(a, {"board_rows", "board_cols"}, "arrangement");
      c.arrangement = ArrangementSpec{detail::required<int>(a, "board_rows", "arrangement"),
                                      detail::required<int>(a, "board_cols", "arrangement")};
    }
    if (j.contains("sensing_enabled")) c.sensing_enabled = j.at("sensing_enabled").get<bool>();
    if (j.contains("noise")) {
      reject_unknown_keys(j.at("noise"), {"spurious_probability"}, "noise");
      c.spurious_probability = j.at("noise").value("spurious_probability", 0.0);
      if (!(c.spurious_probability >= 0.0 && c.spurious_probability <= 1.0)) {
        fail(ErrorCode::ConfigError, "spurious_probability must lie in [0, 1]");
      }
    }
    if (j.contains("scan")) {
      reject_unknown_keys(j.at("scan"), {"debounce_k", "scan_period_ms"}, "scan");
      c.scan.debounce_k = j.at("scan").value("debounce_k", c.scan.debounce_k);
      c.scan.scan_period_ms = j.at("scan").value("scan_period_ms", c.scan.scan_period_ms);
      if (c.scan.debounce_k < 1 || c.scan.scan_period_ms < 1) fail(ErrorCode::ConfigError, "scan settings must be positive");
    }
    if (j.contains("seed")) {
      const auto& s = j.at("seed");
      c.seed = s.is_string() ? detail::parse_seed(s.get<std::string>()) : s.get<std::uint64_t>();
    }
    if (j.contains("catalog")) c.catalog_path = j.at("catalog").get<std::string>();
    if (j.contains("start_side")) {
      const auto side = j.at("start_side").get<std::string>();
      if (side == "back") c.start_side = Side::Back;
      else if (side == "front") c.start_side = Side::Front;
      else fail(ErrorCode::ConfigError, "start_side is `back` or `front`");
    }
    if (j.contains("pot")) {
      c.pot = j.at("pot").get<double>();
      if (!(c.pot >= 0.0 && c.pot <= 1.0)) fail(ErrorCode::ConfigError, "pot must lie in [0, 1]");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, what + ": " + e.what());
  }
  return c;
}

inline SessionConfig parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string read_text_file(const std::string& path, ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(code, "cannot open `" + path + "`");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SessionConfig load_config(const std::string& path) {
  SessionConfig c = parse_config(read_text_file(path, ErrorCode::ConfigError));
  apply_env_overrides(c);
  return c;
}

// ---------------------------------------------------------------------------
// Script events

enum class ScriptKind { PressCenter, PressNext, PressBack, Insert, Remove, Pot, Sense, Select, Tick };

struct ScriptEvent {
  ScriptKind kind = ScriptKind::PressNext;
  std::optional<std::size_t> board;  // unset: every board
  HoleId hole;
  double value = 0.0;
  std::size_t index = 0;
  std::int64_t ms = 0;
};

inline std::string_view script_kind_name(ScriptKind k) {
  switch (k) {
    case ScriptKind::PressCenter: return "press_center";
    case ScriptKind::PressNext: return "press_next";
    case ScriptKind::PressBack: return "press_back";
    case ScriptKind::Insert: return "insert";
    case ScriptKind::Remove: return "remove";
    case ScriptKind::Pot: return "pot";
    case ScriptKind::Sense: return "sense";
    case ScriptKind::Select: return "select";
    case ScriptKind::Tick: return "tick";
  }
  return "press_next";
}

inline std::optional<ScriptKind> script_kind_from_name(std::string_view s) {
  for (int k = 0; k <= int(ScriptKind::Tick); ++k) {
    if (script_kind_name(ScriptKind(k)) == s) return ScriptKind(k);
  }
  return std::nullopt;
}

/// Canonical one-line form, e.g. `1: insert 2 3`.
inline std::string describe(const ScriptEvent& e) {
  std::string out;
  if (e.board) out += std::to_string(*e.board) + ": ";
  out += script_kind_name(e.kind);
  switch (e.kind) {
    case ScriptKind::Insert:
    case ScriptKind::Remove:
    case ScriptKind::Sense: out += " " + std::to_string(e.hole.row) + " " + std::to_string(e.hole.col); break;
    case ScriptKind::Pot: out += " " + nlohmann::json(e.value).dump(); break;
    case ScriptKind::Select: out += " " + std::to_string(e.index); break;
    case ScriptKind::Tick: out += " " + std::to_string(e.ms); break;
    default: break;
  }
  return out;
}

namespace detail {

inline std::size_t arg_count(ScriptKind k) {
  switch (k) {
    case ScriptKind::Insert:
    case ScriptKind::Remove:
    case ScriptKind::Sense: return 2;
    case ScriptKind::Pot:
    case ScriptKind::Select:
    case ScriptKind::Tick: return 1;
    default: return 0;
  }
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  std::istringstream in{std::string(s)};
  T v{};
  if (!(in >> v)) return std::nullopt;
  char extra;
  if (in >> extra) return std::nullopt;
  return v;
}

}  // namespace detail

/// One event per line. `#` starts a comment; `N:` addresses board N.
inline ScriptEvent parse_script_line(std::string_view line, int line_no = 0) {
  auto bad = [&](const std::string& msg) -> ScriptEvent {
    fail(ErrorCode::ScriptParseError, "line " + std::to_string(line_no) + ": " + msg);
  };
  ScriptEvent ev;
  std::string text(line);
  if (auto colon = text.find(':'); colon != std::string::npos) {
    auto b = detail::parse_number<long long>(std::string_view(text).substr(0, colon));
    if (!b || *b < 0) return bad("board prefix must be a non-negative integer");
    ev.board = static_cast<std::size_t>(*b);
    text.erase(0, colon + 1);
  }
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  if (words.empty()) return bad("missing event");
  const auto kind = script_kind_from_name(words[0]);
  if (!kind) return bad("unknown event `" + words[0] + "`");
  ev.kind = *kind;
  if (words.size() - 1 != detail::arg_count(ev.kind)) {
    return bad("`" + words[0] + "` takes " + std::to_string(detail::arg_count(ev.kind)) + " argument(s)");
  }
  switch (ev.kind) {
    case ScriptKind::Insert:
    case ScriptKind::Remove:
    case ScriptKind::Sense: {
      auto r = detail::parse_number<int>(words[1]);
      auto c = detail::parse_number<int>(words[2]);
      if (!r || !c) return bad("hole coordinates must be integers");
      ev.hole = {*r, *c};
      break;
    }
    case ScriptKind::Pot: {
      auto v = detail::parse_number<double>(words[1]);
      if (!v) return bad("pot value must be a number");
      ev.value = *v;
      break;
    }
    case ScriptKind::Select: {
      auto i = detail::parse_number<long long>(words[1]);
      if (!i || *i < 0) return bad("select takes a non-negative index");
      ev.index = static_cast<std::size_t>(*i);
      break;
    }
    case ScriptKind::Tick: {
      auto ms = detail::parse_number<long long>(words[1]);
      if (!ms || *ms < 0) return bad("tick takes non-negative milliseconds");
      ev.ms = *ms;
      break;
    }
    default: break;
  }
  return ev;
}

inline std::vector<ScriptEvent> parse_event_script(std::string_view text) {
  std::vector<ScriptEvent> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_script_line(line, line_no));
  }
  return out;
}

/// Network form: `{"event":"insert","row":2,"col":3,"board":0}`.
inline ScriptEvent event_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("event") || !j.at("event").is_string()) {
    fail(ErrorCode::MalformedMessage, "message needs a string `event`");
  }
  const auto kind = script_kind_from_name(j.at("event").get<std::string>());
  if (!kind) fail(ErrorCode::MalformedMessage, "unknown event `" + j.at("event").get<std::string>() + "`");
  ScriptEvent ev;
  ev.kind = *kind;
  std::vector<std::string_view> allowed{"event", "board"};
  switch (ev.kind) {
    case ScriptKind::Insert:
    case ScriptKind::Remove:
    case ScriptKind::Sense: allowed.insert(allowed.end(), {"row", "col"}); break;
    case ScriptKind::Pot: allowed.push_back("value"); break;
    case ScriptKind::Select: allowed.push_back("index"); break;
    case ScriptKind::Tick: allowed.push_back("ms"); break;
    default: break;
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorCode::MalformedMessage, "unexpected field `" + key + "`");
    }
  }
  auto integer = [&](const char* key) -> std::int64_t {
    if (!j.contains(key) || !j.at(key).is_number_integer()) fail(ErrorCode::MalformedMessage, std::string("`") + key + "` must be an integer");
    return j.at(key).get<std::int64_t>();
  };
  if (j.contains("board")) {
    const auto b = integer("board");
    if (b < 0) fail(ErrorCode::MalformedMessage, "`board` must be non-negative");
    ev.board = static_cast<std::size_t>(b);
  }
  switch (ev.kind) {
    case ScriptKind::Insert:
    case ScriptKind::Remove:
    case ScriptKind::Sense: ev.hole = {int(integer("row")), int(integer("col"))}; break;
    case ScriptKind::Pot:
      if (!j.contains("value") || !j.at("value").is_number()) fail(ErrorCode::MalformedMessage, "`value` must be a number");
      ev.value = j.at("value").get<double>();
      break;
    case ScriptKind::Select: {
      const auto i = integer("index");
      if (i < 0) fail(ErrorCode::MalformedMessage, "`index` must be non-negative");
      ev.index = static_cast<std::size_t>(i);
      break;
    }
    case ScriptKind::Tick:
      ev.ms = integer("ms");
      if (ev.ms < 0) fail(ErrorCode::MalformedMessage, "`ms` must be non-negative");
      break;
    default: break;
  }
  return ev;
}

// ---------------------------------------------------------------------------
// Driver

namespace detail {

inline Event to_engine_event(const ScriptEvent& e) {
  switch (e.kind) {
    case ScriptKind::PressCenter: return event::PressCenter{};
    case ScriptKind::PressNext: return event::PressNext{};
    case ScriptKind::PressBack: return event::PressBack{};
    case ScriptKind::Insert: return event::Insert{e.hole};
    case ScriptKind::Remove: return event::Remove{e.hole};
    case ScriptKind::Pot: return event::PotSet{e.value};
    case ScriptKind::Sense: return event::SenseConfirm{e.hole};
    case ScriptKind::Select: return event::Select{e.index};
    case ScriptKind::Tick: break;
  }
  fail(ErrorCode::InvalidArgument, "tick is not an engine event");
}

inline nlohmann::json error_json(const Error& e) {
  return {{"code", std::string(code_name(e.code()))}, {"message", e.what()}};
}

}  // namespace detail

/// Owns one session (or one per board of an arrangement) and turns script events into
/// canonical trace records.
class SessionDriver {
 public:
  explicit SessionDriver(const SessionConfig& cfg) : cfg_(cfg) {
    catalog_ = std::make_shared<Catalog>(cfg.catalog_path ? load_catalog(*cfg.catalog_path) : builtin_catalog());
    const GridTemplate board = cfg.catalog_path ? catalog_->board() : cfg.board;

    std::optional<CatalogEntry> entry;
    if (cfg.target) entry = catalog_->at(*cfg.target);
    if (cfg.inline_target) {
      nlohmann::json body = *cfg.inline_target;
      if (!body.contains("name")) body["name"] = "inline";
      if (!body.contains("modes")) body["modes"] = {int(cfg.mode)};
      entry = detail::entry_from_json(body);
    }
    if (entry) {
      if (cfg.axis) entry->axis = cfg.axis;
      if (cfg.relation) entry->relation = *cfg.relation;
    }

    std::optional<ArrangementSpec> spec = cfg.arrangement;
    if (!spec && entry && entry->arrangement) spec = entry->arrangement;
    if (spec && spec->board_rows * spec->board_cols == 1) spec.reset();

    if (spec) {
      if (cfg.mode != Mode::Collaboration) fail(ErrorCode::ConfigError, "multi-board sessions run in mode 5");
      arrangement_.emplace(spec->board_rows, spec->board_cols, board);
      // No target: the uninstructed variant, jointly verified free play.
      parts_ = partition(*arrangement_, compile_guided(*arrangement_, entry ? entry->target : CompositeShape{}));
      auto ctx = std::make_shared<SessionContext>();
      ctx->board = board;
      ctx->start_side = cfg.start_side;
      ctx->mode_locked = true;
      for (std::size_t b = 0; b < arrangement_->board_count(); ++b) {
        SessionState s = start_session(ctx, Mode::Collaboration, parts_.per_board[b], cfg.sensing_enabled);
        s.pot = cfg.pot;
        s.glow = detail::default_glow(s.program, s.pot);
        boards_.push_back(std::move(s));
      }
    } else {
      auto ctx = std::make_shared<SessionContext>();
      ctx->board = board;
      ctx->start_side = cfg.start_side;
      ctx->curriculum = catalog_->curriculum();
      if (entry) ctx->curriculum[cfg.mode] = entry->mode_target();
      if (cfg.axis && !entry) ctx->curriculum[cfg.mode].axis = cfg.axis;
      if (cfg.relation && !entry) ctx->curriculum[cfg.mode].relation = *cfg.relation;
      boards_.push_back(start_session(ctx, cfg.mode, cfg.sensing_enabled, cfg.pot));
    }

    for (std::size_t b = 0; b < boards_.size(); ++b) {
      sims_.emplace_back(board, cfg.scan, NoiseModel{cfg.spurious_probability, cfg.seed + b});
    }
  }

  bool multi_board() const noexcept { return arrangement_.has_value(); }
  std::size_t board_count() const noexcept { return boards_.size(); }
  const SessionState& state(std::size_t b = 0) const { return boards_.at(b); }
  const std::optional<Arrangement>& arrangement() const noexcept { return arrangement_; }
  const PartitionedProgram& partitioned() const noexcept { return parts_; }
  std::int64_t clock_ms() const noexcept { return clock_ms_; }
  bool had_error() const noexcept { return had_error_; }
  std::size_t seq() const noexcept { return seq_; }

  std::optional<JointResult> joint() const {
    if (!arrangement_) return std::nullopt;
    std::map<std::size_t, std::vector<FiberPath>> fibers;
    for (std::size_t b = 0; b < boards_.size(); ++b) fibers[b] = boards_[b].strings;
    return merge_fibers(*arrangement_, parts_, fibers);
  }

  nlohmann::json init_record() const { return record("init", {}, nullptr); }

  /// Applies one event and returns its record. Engine errors leave the state untouched and
  /// are reported in the record's `error` field.
  nlohmann::json apply(const ScriptEvent& ev) {
    ++seq_;
    std::map<std::size_t, std::vector<HoleId>> sensed;
    nlohmann::json error = nullptr;
    try {
      if (ev.board && *ev.board >= boards_.size()) {
        fail(ErrorCode::OutOfRange, "no board " + std::to_string(*ev.board));
      }
      if (ev.kind == ScriptKind::Tick) {
        clock_ms_ += ev.ms;
        for (std::size_t b = 0; b < boards_.size(); ++b) {
          if (!boards_[b].sensing_enabled) continue;
          for (const auto& t : sims_[b].advance(ev.ms)) {
            if (t.event.kind != SenseKind::Confirm) continue;
            boards_[b] = step(boards_[b], event::SenseConfirm{t.event.hole});
            sensed[b].push_back(t.event.hole);
          }
        }
      } else {
        for (std::size_t b = 0; b < boards_.size(); ++b) {
          if (ev.board && *ev.board != b) continue;
          apply_to_board(b, ev);
        }
      }
    } catch (const Error& e) {
      error = detail::error_json(e);
      if (ev.board) error["board"] = *ev.board;
      had_error_ = true;
    }
    return record(describe(ev), sensed, error);
  }

 private:
  void apply_to_board(std::size_t b, const ScriptEvent& ev) {
    SessionState& s = boards_[b];
    if (s.sensing_enabled && ev.kind == ScriptKind::Insert) {
      require_hole(s.context->board, ev.hole);
      sims_[b].touch(ev.hole);
      return;
    }
    if (s.sensing_enabled && ev.kind == ScriptKind::Remove) {
      sims_[b].release(ev.hole);
      const auto holes = s.strings.empty() ? std::vector<HoleId>{} : last_touched(s);
      if (holes.empty() || holes.back() != ev.hole) return;  // never confirmed
    }
    s = step(s, detail::to_engine_event(ev));
  }

  static std::vector<HoleId> last_touched(const SessionState& s) {
    if (s.program.steps.empty()) return s.strings.back().holes();
    const auto& part = s.program.steps[s.step_index].part;
    if (!part) return {};
    return s.strings[*part].holes();
  }

  nlohmann::json record(const std::string& event, const std::map<std::size_t, std::vector<HoleId>>& sensed,
                        const nlohmann::json& error) const {
    nlohmann::json r;
    r["seq"] = seq_;
    r["event"] = event;
    r["t_ms"] = clock_ms_;
    if (!error.is_null()) r["error"] = error;
    if (!arrangement_) {
      const nlohmann::json snap = snapshot_json(boards_[0]);
      for (const auto& [k, v] : snap.items()) r[k] = v;
      if (auto it = sensed.find(0); it != sensed.end()) r["sensed"] = holes_to_json(it->second);
      return r;
    }
    nlohmann::json boards = nlohmann::json::array();
    for (std::size_t b = 0; b < boards_.size(); ++b) {
      nlohmann::json snap = snapshot_json(boards_[b]);
      snap["board"] = b;
      if (auto it = sensed.find(b); it != sensed.end()) snap["sensed"] = holes_to_json(it->second);
      boards.push_back(std::move(snap));
    }
    r["boards"] = boards;
    const JointResult jr = *joint();
    nlohmann::json coverage = nlohmann::json::array();
    for (const auto& w : jr.coverage) coverage.push_back({w.row, w.col});
    r["joint"] = {{"complete", jr.complete}, {"incomplete_boards", jr.incomplete_boards}, {"coverage", coverage}};
    r["arrangement"] = {{"board_rows", arrangement_->board_rows()},
                        {"board_cols", arrangement_->board_cols()},
                        {"kind", std::string(arrangement_name(arrangement_->kind()))}};
    return r;
  }

  SessionConfig cfg_;
  std::shared_ptr<const Catalog> catalog_;
  std::optional<Arrangement> arrangement_;
  PartitionedProgram parts_;
  std::vector<SessionState> boards_;
  std::vector<SensingSim> sims_;
  std::int64_t clock_ms_ = 0;
  std::size_t seq_ = 0;
  bool had_error_ = false;
};

inline ScriptEvent to_script_event(const Event& e, std::optional<std::size_t> board = std::nullopt) {
  ScriptEvent out;
  out.board = board;
  std::visit(
      [&](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, event::PressCenter>) out.kind = ScriptKind::PressCenter;
        else if constexpr (std::is_same_v<T, event::PressNext>) out.kind = ScriptKind::PressNext;
        else if constexpr (std::is_same_v<T, event::PressBack>) out.kind = ScriptKind::PressBack;
        else if constexpr (std::is_same_v<T, event::Insert>) out = {ScriptKind::Insert, board, ev.hole};
        else if constexpr (std::is_same_v<T, event::Remove>) out = {ScriptKind::Remove, board, ev.hole};
        else if constexpr (std::is_same_v<T, event::SenseConfirm>) out = {ScriptKind::Sense, board, ev.hole};
        else if constexpr (std::is_same_v<T, event::PotSet>) {
          out.kind = ScriptKind::Pot;
          out.value = ev.value;
        } else if constexpr (std::is_same_v<T, event::Select>) {
          out.kind = ScriptKind::Select;
          out.index = ev.index;
        }
      },
      e);
  return out;
}

/// The perfect student's script for the driver's current program(s), board by board.
inline std::vector<ScriptEvent> perfect_script(const SessionDriver& d) {
  std::vector<ScriptEvent> out;
  for (std::size_t b = 0; b < d.board_count(); ++b) {
    const auto board = d.multi_board() ? std::optional<std::size_t>(b) : std::nullopt;
    for (const Event& e : perfect_student(d.state(b).program)) out.push_back(to_script_event(e, board));
  }
  return out;
}

inline std::string render_script(const std::vector<ScriptEvent>& events) {
  std::string out;
  for (const auto& e : events) out += describe(e) + "\n";
  return out;
}

/// Writes the init record and one record per event as NDJSON. Returns false if any event
/// was rejected.
inline bool run_script(const SessionConfig& cfg, const std::vector<ScriptEvent>& events, std::ostream& out) {
  SessionDriver d(cfg);
  out << d.init_record().dump() << '\n';
  for (const auto& ev : events) out << d.apply(ev).dump() << '\n';
  return !d.had_error();
}

// ---------------------------------------------------------------------------
// Golden comparison

struct Divergence {
  std::size_t record = 0;  // 0-based line index
  std::string path;        // JSON pointer into the record, empty if a whole record is missing
  std::string expected;
  std::string actual;
};

inline std::vector<nlohmann::json> parse_trace(std::string_view text) {
  std::vector<nlohmann::json> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error&) {
      fail(ErrorCode::MalformedMessage, "trace line " + std::to_string(n) + " is not JSON");
    }
  }
  return out;
}

namespace detail {

inline std::optional<std::pair<std::string, std::pair<std::string, std::string>>> first_difference(
    const nlohmann::json& a, const nlohmann::json& e, const std::string& path) {
  if (a.type() == e.type() && a.is_object()) {
    std::set<std::string> keys;
    for (const auto& [k, _] : a.items()) keys.insert(k);
    for (const auto& [k, _] : e.items()) keys.insert(k);
    for (const auto& k : keys) {
      const std::string p = path + "/" + k;
      if (!a.contains(k)) return std::pair{p, std::pair{e.at(k).dump(), std::string("<absent>")}};
      if (!e.contains(k)) return std::pair{p, std::pair{std::string("<absent>"), a.at(k).dump()}};
      if (auto d = first_difference(a.at(k), e.at(k), p)) return d;
    }
    return std::nullopt;
  }
  if (a.type() == e.type() && a.is_array()) {
    const std::size_t n = std::max(a.size(), e.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::string p = path + "/" + std::to_string(i);
      if (i >= a.size()) return std::pair{p, std::pair{e[i].dump(), std::string("<absent>")}};
      if (i >= e.size()) return std::pair{p, std::pair{std::string("<absent>"), a[i].dump()}};
      if (auto d = first_difference(a[i], e[i], p)) return d;
    }
    return std::nullopt;
  }
  if (a != e) return std::pair{path.empty() ? std::string("/") : path, std::pair{e.dump(), a.dump()}};
  return std::nullopt;
}

}  // namespace detail

inline std::optional<Divergence> compare_golden(std::string_view actual, std::string_view expected) {
  const auto a = parse_trace(actual);
  const auto e = parse_trace(expected);
  const std::size_t n = std::max(a.size(), e.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= a.size()) return Divergence{i, "", e[i].dump(), "<missing record>"};
    if (i >= e.size()) return Divergence{i, "", "<missing record>", a[i].dump()};
    if (auto d = detail::first_difference(a[i], e[i], "")) return Divergence{i, d->first, d->second.first, d->second.second};
  }
  return std::nullopt;
}

inline std::string describe(const Divergence& d) {
  return "record " + std::to_string(d.record) + (d.path.empty() ? "" : " at " + d.path) + ": expected " + d.expected +
         ", got " + d.actual;
}

}  // namespace tieboard
