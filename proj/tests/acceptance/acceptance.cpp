// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "lattice_oracle.hpp"
#include "tieboard/tieboard.hpp"

using namespace tieboard;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr double kAc1BudgetSeconds = 10.0;
constexpr int kAc1RandomPolygons = 500;
constexpr int kAc3ReflectPairs = 1000;
constexpr std::size_t kAc5OddLeds = 3;
constexpr int kAc11Repeats = 3;

const fs::path kData = TIEBOARD_TEST_DATA_DIR;

struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok) ++failed;
    ++total;
  }
  int failed = 0;
  int total = 0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string str(const Shape& s) {
  std::string out;
  for (HoleId h : s.vertices) out += "(" + std::to_string(h.row) + "," + std::to_string(h.col) + ")";
  return out;
}

std::string strip_ws(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

std::vector<Shape> catalog_shapes() {
  std::vector<Shape> out;
  for (const auto& e : builtin_catalog().entries()) {
    for (const auto& p : e.target.parts) out.push_back(p.shape);
  }
  return out;
}

std::shared_ptr<SessionContext> context_for(const CatalogEntry& e, Mode m) {
  auto ctx = std::make_shared<SessionContext>();
  ctx->curriculum = builtin_catalog().curriculum();
  ctx->curriculum[m] = e.mode_target();
  return ctx;
}

std::map<std::size_t, std::vector<FiberPath>> perfect_fibers(const PartitionedProgram& parts) {
  std::map<std::size_t, std::vector<FiberPath>> out;
  for (std::size_t b = 0; b < parts.per_board.size(); ++b) {
    auto ctx = std::make_shared<SessionContext>();
    ctx->mode_locked = true;
    auto s = start_session(ctx, Mode::Collaboration, parts.per_board[b]);
    for (const auto& e : perfect_student(s.program)) s = step(s, e);
    out[b] = s.strings;
  }
  return out;
}

struct GoldenCase {
  std::string stem;
  SessionConfig config;
  std::vector<ScriptEvent> events;
  std::string golden;
};

std::vector<GoldenCase> golden_cases() {
  std::vector<GoldenCase> out;
  std::vector<fs::path> traces;
  for (const auto& entry : fs::directory_iterator(kData / "golden")) {
    if (entry.path().extension() == ".trace") traces.push_back(entry.path());
  }
  std::sort(traces.begin(), traces.end());
  for (const auto& t : traces) {
    const std::string stem = t.stem().string();
    out.push_back({stem, load_config((kData / "configs" / (stem + ".json")).string()),
                   parse_event_script(slurp(kData / "scripts" / (stem + ".events"))), slurp(t)});
  }
  return out;
}

std::string run_trace(const GoldenCase& g) {
  std::ostringstream out;
  run_script(g.config, g.events, out);
  return out.str();
}

std::string to_message(const ScriptEvent& e) {
  nlohmann::json j{{"event", std::string(script_kind_name(e.kind))}};
  if (e.board) j["board"] = *e.board;
  switch (e.kind) {
    case ScriptKind::Insert:
    case ScriptKind::Remove:
    case ScriptKind::Sense:
      j["row"] = e.hole.row;
      j["col"] = e.hole.col;
      break;
    case ScriptKind::Pot: j["value"] = e.value; break;
    case ScriptKind::Select: j["index"] = e.index; break;
    case ScriptKind::Tick: j["ms"] = e.ms; break;
    default: break;
  }
  return j.dump();
}

// ---------------------------------------------------------------------------

void ac1(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto cat = catalog_shapes();
  for (const auto& a : cat) {
    for (const auto& b : cat) {
      c.expect(congruent(a, b) == oracle::congruent(a, b), "congruent " + str(a) + " vs " + str(b));
      c.expect(similar(a, b) == oracle::similar(a, b), "similar " + str(a) + " vs " + str(b));
    }
  }
  std::mt19937_64 rng(1);
  for (int i = 0; i < kAc1RandomPolygons; ++i) {
    const Shape a = oracle::random_polygon(rng, 5, 6);
    std::vector<Shape> others{oracle::random_polygon(rng, 5, 6, int(a.vertices.size()), int(a.vertices.size()))};
    for (bool scale : {false, true}) {
      if (auto r = oracle::random_relative(rng, a, 5, 6, scale)) others.push_back(*r);
    }
    for (const auto& s : cat) {
      if (s.vertices.size() == a.vertices.size()) others.push_back(s);
    }
    for (const auto& b : others) {
      c.expect(congruent(a, b) == oracle::congruent(a, b), "congruent " + str(a) + " vs " + str(b));
      c.expect(similar(a, b) == oracle::similar(a, b), "similar " + str(a) + " vs " + str(b));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < kAc1BudgetSeconds, "runtime " + std::to_string(secs) + " s");
}

void ac2(Check& c) {
  std::vector<Shape> shapes;
  std::mt19937_64 rng(2);
  for (const auto& s : catalog_shapes()) {
    shapes.push_back(s);
    Shape rev = s;
    std::reverse(rev.vertices.begin(), rev.vertices.end());
    shapes.push_back(rev);
    for (bool scale : {false, true}) {
      if (auto r = oracle::random_relative(rng, s, 5, 6, scale)) shapes.push_back(*r);
    }
  }
  const std::size_t n = shapes.size();
  for (Relation rel : {Relation::Congruent, Relation::Similar}) {
    std::vector<std::vector<char>> m(n, std::vector<char>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m[i][j] = related(shapes[i], shapes[j], rel);
    }
    const std::string name = rel == Relation::Congruent ? "congruent" : "similar";
    for (std::size_t i = 0; i < n; ++i) {
      c.expect(m[i][i], name + " reflexive " + str(shapes[i]));
      for (std::size_t j = 0; j < n; ++j) {
        c.expect(m[i][j] == m[j][i], name + " symmetric " + str(shapes[i]) + " " + str(shapes[j]));
        if (!m[i][j]) continue;
        for (std::size_t k = 0; k < n; ++k) {
          if (m[j][k]) c.expect(m[i][k], name + " transitive via " + str(shapes[j]));
        }
      }
      if (rel == Relation::Similar) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (m[i][j]) c.expect(similar(shapes[i], shapes[j]), "congruent pair not similar");
      }
    }
  }
}

void ac3(Check& c) {
  int halves = 0;
  for (const auto& e : builtin_catalog().entries()) {
    if (!e.half || !e.axis) continue;
    ++halves;
    const Shape full = complete_half(*e.half, *e.axis);
    c.expect(is_symmetric(full, *e.axis), e.name + ": completed half not symmetric");
  }
  c.expect(halves > 0, "no catalog halves");

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> orient(0, 3), intercept(-2, 12);
  int done = 0, attempts = 0;
  while (done < kAc3ReflectPairs && attempts < 50 * kAc3ReflectPairs) {
    ++attempts;
    const Shape s = oracle::random_polygon(rng, 5, 6);
    const SymmetryAxis axis{AxisOrientation(orient(rng)), intercept(rng)};
    Shape r;
    try {
      r = reflect(s, axis);
    } catch (const Error& e) {
      c.expect(e.code() == ErrorCode::ReflectionOffGrid, std::string("reflect threw ") + e.what());
      continue;
    }
    ++done;
    c.expect(reflect(r, axis) == s, "reflect twice " + str(s));
  }
  c.expect(done == kAc3ReflectPairs, "only " + std::to_string(done) + " reflectable pairs");
}

void ac4(Check& c) {
  int sessions = 0;
  for (const auto& e : builtin_catalog().entries()) {
    if (e.arrangement) continue;
    for (Mode m : e.modes) {
      if (int(m) > 4) continue;
      ++sessions;
      auto s = start_session(context_for(e, m), m);
      for (const auto& ev : perfect_student(s.program)) s = step(s, ev);
      const std::string tag = e.name + " mode " + std::to_string(int(m));
      const auto results = verify_strings(s);
      c.expect(!results.empty() && std::all_of(results.begin(), results.end(), is_match), tag + ": not a match");
      c.expect(s.current_step() && std::holds_alternative<expect::ConnectGlow>(s.current_step()->expected),
               tag + ": not at the glow step");
      c.expect(s.glowing, tag + ": not glowing");
    }
  }
  c.expect(sessions > 0, "no sessions");
}

void ac5(Check& c) {
  const std::string stem = "mode2_three_triangles";
  const GoldenCase g{stem, load_config((kData / "configs" / (stem + ".json")).string()),
                     parse_event_script(slurp(kData / "scripts" / (stem + ".events"))),
                     slurp(kData / "golden" / (stem + ".trace"))};
  const std::string trace = run_trace(g);
  c.expect(trace == g.golden, "trace differs from golden");

  const auto& entry = builtin_catalog().at("three-triangles");
  const auto odd = entry.target.parts[1].shape.vertices;
  bool seen = false;
  for (const auto& rec : parse_trace(trace)) {
    if (rec.value("expect", "") != "select_shape") continue;
    seen = true;
    const auto& frame = rec["frame"];
    c.expect(frame.size() == kAc5OddLeds, "select frame lights " + std::to_string(frame.size()) + " LEDs");
    std::set<HoleId> lit;
    for (const auto& led : frame) lit.insert({led[0].get<int>(), led[1].get<int>()});
    c.expect(lit == std::set<HoleId>(odd.begin(), odd.end()), "lit LEDs are not the odd shape");
    break;
  }
  c.expect(seen, "trace never reaches the selection step");
}

void ac6(Check& c) {
  const auto& entry = builtin_catalog().at("three-triangles");
  std::vector<Shape> shapes;
  for (const auto& p : entry.target.parts) shapes.push_back(p.shape);
  c.expect(odd_one_out(shapes, entry.relation) == 1, "wrong odd index");
  c.expect(compile(Mode::OrientationSize, entry.target, std::nullopt, entry.relation, builtin_catalog().board()).odd_index == 1u,
           "compiled program disagrees");

  for (const auto& base : shapes) {
    std::vector<Shape> same{base, base, base};
    bool threw = false;
    try {
      (void)odd_one_out(same, entry.relation);
    } catch (const Error& e) {
      threw = e.code() == ErrorCode::NoUniqueOdd;
    }
    c.expect(threw, "identical inputs did not raise NoUniqueOdd");
  }

  std::mt19937_64 rng(6);
  int moved = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto input = shapes;
    for (auto& s : input) {
      if (trial % 2 == 0 && &s != &input[std::size_t(trial / 2) % 3]) continue;
      if (auto r = oracle::random_relative(rng, s, 5, 6, false)) {
        s = *r;
        ++moved;
      }
    }
    c.expect(odd_one_out(input, entry.relation) == 1, "odd index changed under an isometry");
  }
  c.expect(moved > 300, "too few isometric images fit the board");
}

void ac7(Check& c) {
  const std::string text = slurp(kData / ".." / "samples" / "diamond.pat");
  const auto m = parse_pattern(text, 5, 6);
  const std::set<std::pair<int, int>> ones{{1, 3}, {2, 2}, {2, 4}, {3, 3}};
  for (int r = 0; r < 5; ++r) {
    for (int col = 0; col < 6; ++col) c.expect(m.at(r, col) == (ones.count({r, col}) ? 1 : 0), "diamond cell mismatch");
  }
  c.expect(strip_ws(render_pattern(m)) == strip_ws(text), "render differs modulo whitespace");
  c.expect(parse_pattern(render_pattern(m), 5, 6) == m, "render does not parse back");

  auto errors = [](const std::string& t) {
    try {
      (void)parse_pattern(t, 5, 6);
    } catch (const Error&) {
      return true;
    }
    return false;
  };
  int mutations = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') continue;
    std::string removed = text;
    std::size_t end = i + 1;
    while (end < removed.size() && (removed[end] == ',' || removed[end] == ' ')) ++end;
    removed.erase(i, end - i);
    c.expect(errors(removed), "removing token at " + std::to_string(i) + " parsed");
    for (const char* extra : {"0, ", "1, "}) {
      std::string added = text;
      added.insert(i, extra);
      c.expect(errors(added), "adding a token at " + std::to_string(i) + " parsed");
    }
    mutations += 3;
  }
  c.expect(mutations == 90, "expected 30 tokens");
}

void ac8(Check& c) {
  std::vector<LacedString> strings;
  for (int i = 0; i < 4; ++i) strings.push_back({i + 1, {HoleId{i, i}, HoleId{i, i + 1}}});
  const auto tl = schedule(strings, {0, 100, 200, 300}, PaletteColor::Blue);
  std::vector<int> order;
  for (const auto& e : tl.entries) {
    for (const auto& s : strings) {
      const bool lit = e.frame.at(s.holes[0]).mode != LedMode::Off;
      if (lit && std::find(order.begin(), order.end(), s.id) == order.end()) order.push_back(s.id);
    }
  }
  c.expect(order == std::vector<int>{1, 2, 3, 4}, "glow order");
  c.expect(tl.entries.size() == 4 && tl.entries[3].time_ms == 300, "timeline times");

  for (std::int64_t period : {2, 300, 500, 1000}) {
    const BlinkGlow b{period, {PaletteColor::Purple}};
    const std::vector<std::vector<HoleId>> holes{{HoleId{1, 1}, HoleId{1, 2}}};
    const std::int64_t horizon = period * 6;
    const auto blink = blink_frames(b, holes, horizon);
    for (std::int64_t t = 0; t + period < horizon; t += std::max<std::int64_t>(1, period / 17)) {
      c.expect(blink.at(t) == blink.at(t + period), "blink not periodic at " + std::to_string(t));
    }
    c.expect(blink.at(0).lit_count() == 2 && blink.at(period / 2).empty(), "blink phases");
  }
}

void ac9(Check& c) {
  // Zero noise, k = 1: the confirm stream is the ground-truth touch sequence.
  std::mt19937_64 rng(9);
  const GridTemplate board = default_board();
  for (int trial = 0; trial < 50; ++trial) {
    SensingSim sim(board, ScanConfig{1, 10}, NoiseModel{});
    std::vector<HoleId> truth, seen;
    for (int i = 0; i < 20; ++i) {
      HoleId h{int(rng() % 5), int(rng() % 6)};
      if (!truth.empty() && truth.back() == h) continue;
      sim.touch(h);
      truth.push_back(h);
      for (const auto& t : sim.advance(10 * std::int64_t(1 + rng() % 4))) {
        if (t.event.kind == SenseKind::Confirm) seen.push_back(t.event.hole);
      }
    }
    c.expect(seen == truth, "k=1 confirm stream differs from ground truth");
  }

  // Presence runs shorter than k never confirm, so the session never moves.
  const auto& sq = builtin_catalog().at("square");
  for (int k = 2; k <= 5; ++k) {
    auto s = start_session(context_for(sq, Mode::BasicShape), Mode::BasicShape, true);
    s = step(s, event::PressNext{});
    const auto& want = std::get<expect::InsertAt>(s.current_step()->expected).hole;
    std::vector<std::set<HoleId>> scans;
    for (int i = 0; i < 200; ++i) {
      const int run = 1 + int(rng() % std::uint64_t(k - 1));
      for (int j = 0; j < run; ++j) scans.push_back({want, HoleId{4, 5}});
      for (int j = 0; j < k; ++j) scans.push_back({});
    }
    const std::size_t before = s.step_index;
    for (const auto& e : debounce(scans, ScanConfig{k, 20})) {
      if (e.kind == SenseKind::Confirm) s = step(s, event::SenseConfirm{e.hole});
    }
    c.expect(s.step_index == before, "spurious run advanced the session at k=" + std::to_string(k));
  }

  // End to end: a wrong hole never advances, the expected one does.
  SessionDriver d(parse_config(R"({"mode": 1, "target": "square", "sensing_enabled": true,
                                   "scan": {"debounce_k": 3, "scan_period_ms": 20}})"));
  const std::set<HoleId> targets(sq.target.parts[0].shape.vertices.begin(), sq.target.parts[0].shape.vertices.end());
  const HoleId wrong{0, 0};
  c.expect(!targets.count(wrong), "probe hole is part of the target");
  auto parse = [](const std::string& line) { return parse_script_line(line); };
  nlohmann::json last = d.init_record();
  auto progress = [](const nlohmann::json& r) { return std::pair{r["step_index"].get<int>(), r["complete"].get<bool>()}; };
  bool after_insert = false;
  for (const auto& ev : perfect_script(d)) {
    if (ev.kind != ScriptKind::Insert) {
      // The confirm already advanced past the step this press would have closed.
      const bool redundant = after_insert && ev.kind == ScriptKind::PressNext && !last["complete"].get<bool>();
      if (!redundant) last = d.apply(ev);
      after_insert = false;
      continue;
    }
    after_insert = true;
    const auto before = progress(last);
    d.apply(parse("insert 0 0"));
    auto r = d.apply(parse("tick 100"));
    c.expect(progress(r) == before, "wrong hole advanced the session");
    d.apply(parse("remove 0 0"));
    d.apply(parse("tick 100"));
    d.apply(ev);
    r = d.apply(parse("tick 59"));
    c.expect(progress(r) == before, "advanced before the debounce window");
    r = d.apply(parse("tick 1"));
    c.expect(progress(r) != before, "expected hole did not advance");
    c.expect(r.contains("sensed"), "no sensed confirm");
    last = r;
  }
  c.expect(last["complete"] == true && last["glowing"] == true, "sensed session did not complete");
  c.expect(!d.had_error(), "sensed session rejected an event");
}

void ac10(Check& c) {
  for (auto [rows, cols] : {std::pair{1, 2}, std::pair{2, 1}, std::pair{2, 2}}) {
    const Arrangement arr(rows, cols);
    std::set<std::pair<std::size_t, HoleId>> locals;
    for (int wr = 0; wr < arr.world_rows(); ++wr) {
      for (int wc = 0; wc < arr.world_cols(); ++wc) {
        const LocalHole l = world_to_local(arr, {wr, wc});
        c.expect(arr.board().contains(l.local), "local hole off board");
        c.expect(local_to_world(arr, l) == WorldHole{wr, wc}, "round trip");
        locals.insert({l.board, l.local});
      }
    }
    c.expect(locals.size() == arr.board_count() * arr.board().size(), "mapping not onto");
  }

  auto multiset_ok = [](const Arrangement& arr, const CompositeShape& t, const PartitionedProgram& parts) {
    std::multiset<WorldHole> got, want;
    for (std::size_t b = 0; b < parts.per_board.size(); ++b) {
      for (const auto& s : parts.per_board[b].strings) {
        for (HoleId h : s.holes) got.insert(local_to_world(arr, {b, h}));
      }
    }
    for (const auto& p : t.parts) {
      for (HoleId h : p.shape.vertices) want.insert(as_world(h));
    }
    return got == want;
  };

  for (const char* name : {"butterfly-duo", "patchwork-frame"}) {
    const auto& e = builtin_catalog().at(name);
    const Arrangement arr(e.arrangement->board_rows, e.arrangement->board_cols);
    const auto parts = partition(arr, compile_guided(arr, e.target));
    c.expect(multiset_ok(arr, e.target, parts), std::string(name) + ": hole multiset changed");
    const auto fibers = perfect_fibers(parts);
    const std::size_t n = parts.per_board.size();
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
      auto partial = fibers;
      std::vector<std::size_t> broken;
      for (std::size_t b = 0; b < n; ++b) {
        if (mask & (std::size_t(1) << b)) continue;
        broken.push_back(b);
        partial[b].back() = pop_pass(partial[b].back());
      }
      const auto joint = merge_fibers(arr, parts, partial);
      c.expect(joint.complete == broken.empty(), std::string(name) + ": joint completion mask " + std::to_string(mask));
      c.expect(joint.incomplete_boards == broken, std::string(name) + ": incomplete boards");
    }

    SessionDriver d(parse_config(std::string(R"({"mode": 5, "target": ")") + name + "\"}"));
    nlohmann::json last;
    for (const auto& ev : perfect_script(d)) last = d.apply(ev);
    c.expect(last["joint"]["complete"] == true, std::string(name) + ": driver not jointly complete");
  }
}

void ac11(Check& c) {
  const auto cases = golden_cases();
  c.expect(cases.size() >= 5, "too few golden scripts");
  for (const auto& g : cases) {
    for (int i = 0; i < kAc11Repeats; ++i) c.expect(run_trace(g) == g.golden, g.stem + ": run differs from golden");
  }

  for (const auto& g : cases) {
    std::vector<std::string> expected;
    std::istringstream lines(g.golden);
    for (std::string l; std::getline(lines, l);) expected.push_back(l);
    Server server(g.config);
    const auto port = server.listen("127.0.0.1", 0);
    server.start();
    {
      LineClient client("127.0.0.1", port);
      std::vector<std::string> got{client.receive().value_or("")};
      for (const auto& e : g.events) {
        client.send(to_message(e));
        got.push_back(client.receive().value_or(""));
      }
      c.expect(got == expected, g.stem + ": protocol replies differ from trace");
    }
    server.stop();
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"AC1 geometry agrees with brute-force oracle", ac1},
      {"AC2 relations are equivalences", ac2},
      {"AC3 symmetry round trip", ac3},
      {"AC4 perfect students complete modes 1-4", ac4},
      {"AC5 mode 2 golden leaves the odd shape lit", ac5},
      {"AC6 odd one out", ac6},
      {"AC7 pattern round trip and fuzz", ac7},
      {"AC8 animation order and blink period", ac8},
      {"AC9 sensing and auto-advance", ac9},
      {"AC10 multi-board collaboration", ac10},
      {"AC11 determinism and protocol parity", ac11},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("threw: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    const bool ok = c.failed == 0;
    failed += ok ? 0 : 1;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << c.total << " checks, " << ms << " ms)\n";
    for (const auto& f : c.failures) std::cout << "       " << f << "\n";
  }
  return failed == 0 ? 0 : 1;
}
