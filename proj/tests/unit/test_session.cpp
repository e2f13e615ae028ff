#include <cstdlib>
#include <sstream>

#include "test_util.hpp"
#include "tieboard/session.hpp"

using namespace tieboard;

namespace {

SessionConfig config(const std::string& text) { return parse_config(text); }

std::string run_text(const SessionConfig& cfg, const std::string& script) {
  std::ostringstream out;
  run_script(cfg, parse_event_script(script), out);
  return out.str();
}

ScriptEvent ev(const std::string& line) { return parse_script_line(line, 1); }

}  // namespace

TEST_CASE("config parsing", "[session]") {
  const auto c = config(R"({
    "mode": 3, "target": "butterfly", "sensing_enabled": true,
    "noise": {"spurious_probability": 0.01}, "scan": {"debounce_k": 2, "scan_period_ms": 10},
    "seed": "0x10", "start_side": "front", "pot": 0.5,
    "template": {"kind": "rectangular", "rows": 5, "cols": 6, "spacing_mm": 25}})");
  CHECK(c.mode == Mode::Symmetry);
  CHECK(c.target == "butterfly");
  CHECK(c.sensing_enabled);
  CHECK(c.spurious_probability == 0.01);
  CHECK(c.scan.debounce_k == 2);
  CHECK(c.scan.scan_period_ms == 10);
  CHECK(c.seed == 16);
  CHECK(c.start_side == Side::Front);
  CHECK(c.pot == 0.5);
  CHECK(c.board.spacing_mm() == 25);

  CHECK(config(R"({"seed": 7})").seed == 7);
  CHECK(config(R"({"target": {"vertices": [[0,0],[0,2],[2,0]]}})").inline_target.has_value());
  for (const char* bad : {R"({"colour": 1})", R"({"mode": 9})", R"({"seed": "-1"})", R"({"pot": 2})", R"({"scan": {"k": 1}})",
                          R"({"noise": {"spurious_probability": 3}})", R"({"start_side": "left"})", R"({"mode": "one"})",
                          R"({"target": 5})", R"({"arrangement": {"board_rows": 1}})", "[1, 2", R"({"scan": {"debounce_k": 0}})"}) {
    INFO(bad);
    REQUIRE_CODE(config(bad), ErrorCode::ConfigError);
  }
}

TEST_CASE("seed environment override", "[session]") {
  SessionConfig c = config(R"({"seed": 3})");
  ::setenv("TIEBOARD_SEED", "99", 1);
  apply_env_overrides(c);
  CHECK(c.seed == 99);
  ::setenv("TIEBOARD_SEED", "nine", 1);
  REQUIRE_CODE(apply_env_overrides(c), ErrorCode::ConfigError);
  ::unsetenv("TIEBOARD_SEED");
  apply_env_overrides(c);
  CHECK(c.seed == 99);
}

TEST_CASE("event script lines", "[session]") {
  const auto e = ev("1: insert 2 3");
  CHECK(e.board == 1u);
  CHECK(e.kind == ScriptKind::Insert);
  CHECK(e.hole == H(2, 3));
  CHECK(ev("pot 0.25").value == 0.25);
  CHECK(ev("tick 40").ms == 40);
  CHECK(ev("select 2").index == 2);
  CHECK(ev("  press_center ").kind == ScriptKind::PressCenter);

  const auto all = parse_event_script("# header\n\npress_next # go\ninsert 0 0\n0: remove 0 0\n");
  REQUIRE(all.size() == 3);
  CHECK_FALSE(all[0].board);

  for (const char* bad : {"insert 1", "insert a b", "jump", "pot x", "select -1", "tick -5", "x: press_next", "-1: press_next",
                          "press_next 3", ":"}) {
    INFO(bad);
    REQUIRE_CODE(ev(bad), ErrorCode::ScriptParseError);
  }
  try {
    (void)parse_event_script("press_next\ninsert 1\n");
    FAIL("expected ScriptParseError");
  } catch (const Error& err) {
    CHECK(std::string(err.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("describe is the canonical script text", "[session][property]") {
  for (const char* line : {"press_center", "press_next", "press_back", "insert 4 5", "remove 0 1", "pot 0.5", "pot 1.0", "sense 2 2",
                           "select 1", "tick 20", "3: insert 1 1"}) {
    const auto e = ev(line);
    CHECK(describe(e) == line);
    const auto again = ev(describe(e));
    CHECK(describe(again) == describe(e));
  }
}

TEST_CASE("protocol messages", "[session]") {
  const auto e = event_from_json(nlohmann::json::parse(R"({"event":"insert","row":2,"col":3,"board":1})"));
  CHECK(describe(e) == "1: insert 2 3");
  CHECK(event_from_json(nlohmann::json::parse(R"({"event":"pot","value":1})")).value == 1.0);
  for (const char* bad : {R"([])", R"({"row":1})", R"({"event":"fly"})", R"({"event":"insert","row":1})",
                          R"({"event":"insert","row":1,"col":"2"})", R"({"event":"press_next","extra":1})",
                          R"({"event":"tick","ms":-1})", R"({"event":"select","index":-2})", R"({"event":"pot"})",
                          R"({"event":"press_next","board":-1})"}) {
    INFO(bad);
    REQUIRE_CODE(event_from_json(nlohmann::json::parse(bad)), ErrorCode::MalformedMessage);
  }
}

TEST_CASE("single-board driver records", "[session]") {
  SessionDriver d(config(R"({"mode": 1, "target": "triangle"})"));
  const auto init = d.init_record();
  CHECK(init["seq"] == 0);
  CHECK(init["event"] == "init");
  CHECK(init["target"] == "triangle");
  CHECK(init["expect"] == "press_next");
  CHECK(init["frame"].size() == 3);
  CHECK(init["pot"].dump() == "0.0");

  const auto r1 = d.apply(ev("press_next"));
  CHECK(r1["seq"] == 1);
  CHECK(r1["frame"] == nlohmann::json::parse(R"([[1,2,"on","Yellow"]])"));
  const auto bad = d.apply(ev("insert 9 9"));
  CHECK(bad["error"]["code"] == "UnknownHole");
  CHECK(bad["step_index"] == r1["step_index"]);
  CHECK(d.had_error());
  REQUIRE_CODE(SessionDriver(config(R"({"target": "nope"})")), ErrorCode::CatalogError);
  REQUIRE_CODE(SessionDriver(config(R"({"mode": 2, "target": "square"})")), ErrorCode::ModeTargetMismatch);
}

TEST_CASE("perfect scripts complete single-board sessions", "[session]") {
  for (const char* name : {"square", "pentagon", "three-squares-size", "fish", "leaf", "boat"}) {
    const auto& e = builtin_catalog().at(name);
    SessionDriver d(config("{\"mode\": " + std::to_string(int(e.modes[0])) + ", \"target\": \"" + name + "\"}"));
    nlohmann::json last;
    for (const auto& s : perfect_script(d)) last = d.apply(s);
    INFO(name);
    CHECK(last["complete"] == true);
    CHECK(last["glowing"] == true);
    CHECK_FALSE(d.had_error());
  }
}

TEST_CASE("inline targets and overrides", "[session]") {
  SessionDriver d(config(R"({"mode": 1, "target": {"vertices": [[0,0],[0,2],[2,0]], "color_hint": "Green"}})"));
  CHECK(d.init_record()["target"] == "inline");
  CHECK(d.init_record()["frame"][0][3] == "Green");
  // Under similarity all three triangles are related, so no shape is the odd one.
  REQUIRE_CODE(SessionDriver(config(R"({"mode": 2, "target": "three-triangles", "relation": "similar"})")), ErrorCode::NoUniqueOdd);
}

TEST_CASE("runs are deterministic", "[session]") {
  const auto cfg = config(R"({"mode": 1, "target": "square", "sensing_enabled": true, "noise": {"spurious_probability": 0.02},
                               "scan": {"debounce_k": 2, "scan_period_ms": 10}, "seed": 5})");
  const std::string script = "press_next\ninsert 1 1\ntick 100\ninsert 1 3\ntick 100\ntick 500\n";
  const auto a = run_text(cfg, script);
  CHECK(a == run_text(cfg, script));
  CHECK(a == run_text(cfg, script));
}

TEST_CASE("sensing drives auto-advance", "[session]") {
  SessionDriver d(config(R"({"mode": 1, "target": "square", "sensing_enabled": true, "scan": {"debounce_k": 3, "scan_period_ms": 20}})"));
  d.apply(ev("press_next"));
  auto r = d.apply(ev("insert 1 1"));
  CHECK(r["step_index"] == 1);
  CHECK(r["fiber"][0].empty());
  r = d.apply(ev("tick 40"));
  CHECK(r["step_index"] == 1);
  CHECK_FALSE(r.contains("sensed"));
  r = d.apply(ev("tick 20"));
  CHECK(r["sensed"] == nlohmann::json::parse("[[1,1]]"));
  CHECK(r["step_index"] == 2);
  CHECK(r["t_ms"] == 60);

  // A wrong hole is laced but does not advance.
  d.apply(ev("insert 0 0"));
  r = d.apply(ev("tick 60"));
  CHECK(r["sensed"] == nlohmann::json::parse("[[0,0]]"));
  CHECK(r["step_index"] == 2);
  r = d.apply(ev("remove 0 0"));
  CHECK(r["fiber"][0].size() == 1);
  CHECK_FALSE(r.contains("error"));

  // An unconfirmed touch is simply withdrawn.
  r = d.apply(ev("insert 1 3"));
  r = d.apply(ev("remove 1 3"));
  CHECK(r["fiber"][0].size() == 1);
  r = d.apply(ev("tick 200"));
  CHECK_FALSE(r.contains("sensed"));
  CHECK(r["step_index"] == 2);
}

TEST_CASE("collaboration driver", "[session]") {
  SessionDriver d(config(R"({"mode": 5, "target": "butterfly-duo"})"));
  REQUIRE(d.multi_board());
  CHECK(d.board_count() == 2);
  const auto init = d.init_record();
  CHECK(init["arrangement"]["kind"] == "horizontal");
  CHECK(init["joint"]["complete"] == false);
  CHECK(init["boards"].size() == 2);

  nlohmann::json last;
  const auto script = perfect_script(d);
  for (const auto& s : script) {
    CHECK(s.board.has_value());
    last = d.apply(s);
  }
  CHECK(last["joint"]["complete"] == true);
  CHECK(last["joint"]["coverage"].size() == 10);

  const auto locked = d.apply(ev("press_center"));
  CHECK(locked["error"]["code"] == "InvalidTransition");
  CHECK(d.apply(ev("7: press_next"))["error"]["code"] == "OutOfRange");

  REQUIRE_CODE(SessionDriver(config(R"({"mode": 1, "arrangement": {"board_rows": 1, "board_cols": 2}})")), ErrorCode::ConfigError);
  SessionDriver free_play(config(R"({"mode": 5, "arrangement": {"board_rows": 2, "board_cols": 1}})"));
  CHECK(free_play.init_record()["arrangement"]["kind"] == "vertical");
  const auto r = free_play.apply(ev("1: insert 0 0"));
  CHECK(r["joint"]["coverage"] == nlohmann::json::parse("[[5,0]]"));
  CHECK(r["joint"]["complete"] == false);
}

TEST_CASE("golden comparison pinpoints the first difference", "[session]") {
  const std::string a = R"({"seq":0,"frame":[[1,2,"on","Red"]]})" "\n" R"({"seq":1})" "\n";
  CHECK_FALSE(compare_golden(a, a));
  const std::string b = R"({"seq":0,"frame":[[1,2,"on","Blue"]]})" "\n" R"({"seq":1})" "\n";
  const auto d = compare_golden(a, b);
  REQUIRE(d);
  CHECK(d->record == 0);
  CHECK(d->path == "/frame/0/3");
  CHECK(d->expected == "\"Blue\"");
  CHECK(d->actual == "\"Red\"");
  const auto missing = compare_golden(a, a + "{\"seq\":2}\n");
  REQUIRE(missing);
  CHECK(missing->record == 2);
  CHECK(describe(*missing).find("missing record") != std::string::npos);
  REQUIRE_CODE(compare_golden("{", a), ErrorCode::MalformedMessage);
}
