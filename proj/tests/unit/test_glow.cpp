#include <fstream>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "tieboard/glow.hpp"

using namespace tieboard;
using C = PaletteColor;

TEST_CASE("pot bands are half-open fifths", "[glow]") {
  CHECK(pot_to_color(0.0) == C::Red);
  CHECK(pot_to_color(0.1999) == C::Red);
  CHECK(pot_to_color(0.2) == C::Yellow);
  CHECK(pot_to_color(0.4) == C::Blue);
  CHECK(pot_to_color(0.5) == C::Blue);
  CHECK(pot_to_color(0.6) == C::Purple);
  CHECK(pot_to_color(0.8) == C::Green);
  CHECK(pot_to_color(1.0) == C::Green);
  REQUIRE_CODE(pot_to_color(-0.01), ErrorCode::OutOfRange);
  REQUIRE_CODE(pot_to_color(1.01), ErrorCode::OutOfRange);
  REQUIRE_CODE(pot_to_color(std::nan("")), ErrorCode::OutOfRange);
}

TEST_CASE("pot mapping is monotone over a fine sweep", "[glow][property]") {
  int last = 0;
  for (int i = 0; i <= 10000; ++i) {
    const int band = int(pot_to_color(i / 10000.0));
    CHECK(band >= last);
    last = band;
  }
  CHECK(last == 4);
}

TEST_CASE("standard mix table", "[glow]") {
  const MixTable t = MixTable::standard();
  CHECK(t.mix(C::Red, C::Blue) == C::Purple);
  CHECK(t.mix(C::Blue, C::Yellow) == C::Green);
  CHECK(mix(C::Yellow, C::Red) == C::Yellow);
  for (C a : kPalette) {
    CHECK(t.mix(a, a) == a);
    for (C b : kPalette) CHECK(t.mix(a, b) == t.mix(b, a));
  }
}

TEST_CASE("mix table text round trip", "[glow]") {
  const MixTable t = MixTable::standard();
  CHECK(MixTable::parse(t.render()) == t);
  std::ifstream in(TIEBOARD_DATA_DIR "/../samples/mix_table.txt");
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(MixTable::parse(ss.str()) == t);

  std::string text = t.render();
  REQUIRE_CODE(MixTable::parse(text.substr(0, text.rfind("Green Green"))), ErrorCode::ConfigError);
  REQUIRE_CODE(MixTable::parse(text + "Red Blue Purple\n"), ErrorCode::ConfigError);
  REQUIRE_CODE(MixTable::parse("Red Red Blue\n"), ErrorCode::ConfigError);
  REQUIRE_CODE(MixTable::parse("Red Orange Red\n"), ErrorCode::ConfigError);
  REQUIRE_CODE(MixTable::parse("Red Blue\n"), ErrorCode::ConfigError);
  CHECK(MixTable::parse("# header\n\n" + text) == t);
}

TEST_CASE("glow programs pick colors by string", "[glow]") {
  CHECK(glow_state(FixedGlow{C::Blue}, 7) == LedState::on(C::Blue));
  const PerStringGlow per{{C::Red, C::Green}};
  CHECK(glow_state(per, 0) == LedState::on(C::Red));
  CHECK(glow_state(per, 3) == LedState::on(C::Green));
  CHECK(glow_state(BlinkGlow{400, {C::Yellow}}, 2) == LedState::blinking(C::Yellow));
  CHECK(glow_state(PerStringGlow{}, 1) == LedState::on(C::Red));
}

TEST_CASE("schedule lights strings in delay order", "[glow]") {
  std::vector<LacedString> strings{{1, {H(0, 0)}}, {2, {H(0, 1)}}, {3, {H(0, 2)}}, {4, {H(0, 3)}}};
  const auto tl = schedule(strings, {0, 100, 200, 300}, C::Blue);
  REQUIRE(tl.entries.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(tl.entries[i].time_ms == std::int64_t(100 * i));
    CHECK(tl.entries[i].frame.lit_count() == i + 1);
  }
  CHECK(tl.at(-1).empty());
  CHECK(tl.at(150).at(H(0, 1)) == LedState::on(C::Blue));
  CHECK(tl.at(150).at(H(0, 2)) == LedState::off());

  const auto cum = schedule(strings, {0, 100, 100, 100}, C::Blue, DelayMode::Cumulative);
  CHECK(cum.entries.size() == 4);
  CHECK(cum.entries.back().time_ms == 300);

  const auto together = schedule(strings, {50, 50, 0, 50}, C::Red);
  REQUIRE(together.entries.size() == 2);
  CHECK(together.entries[0].frame.lit_count() == 1);
  CHECK(together.entries[1].frame.lit_count() == 4);

  REQUIRE_CODE(schedule(strings, {0, 1}, C::Red), ErrorCode::LengthMismatch);
  REQUIRE_CODE(schedule(strings, {0, 1, -1, 2}, C::Red), ErrorCode::OutOfRange);
}

TEST_CASE("schedule first-lit order follows sorted delays", "[glow][property]") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LacedString> strings;
    std::vector<std::int64_t> delays;
    for (int i = 0; i < 5; ++i) {
      strings.push_back({i + 1, {H(i % 5, i)}});
      delays.push_back(std::uniform_int_distribution<int>(0, 20)(rng) * 10);
    }
    const auto tl = schedule(strings, delays, C::Green);
    for (int i = 0; i < 5; ++i) {
      std::int64_t first = -1;
      for (const auto& e : tl.entries) {
        if (e.frame.at(strings[i].holes[0]).mode != LedMode::Off) {
          first = e.time_ms;
          break;
        }
      }
      CHECK(first == delays[i]);
    }
    for (std::size_t k = 1; k < tl.entries.size(); ++k) CHECK(tl.entries[k - 1].time_ms < tl.entries[k].time_ms);
  }
}

TEST_CASE("blink frames are periodic", "[glow]") {
  const BlinkGlow b{300, {C::Purple}};
  const std::vector<std::vector<HoleId>> strings{{H(1, 1), H(1, 2)}};
  const auto tl = blink_frames(b, strings, 1800);
  REQUIRE(tl.entries.size() == 12);
  for (std::int64_t t = 0; t + 300 < 1800; t += 7) CHECK(tl.at(t) == tl.at(t + 300));
  CHECK(tl.at(0).lit_count() == 2);
  CHECK(tl.at(149).lit_count() == 2);
  CHECK(tl.at(150).empty());
  REQUIRE_CODE(blink_frames(BlinkGlow{1, {C::Red}}, strings, 100), ErrorCode::InvalidPeriod);
  REQUIRE_CODE(blink_frames(BlinkGlow{0, {C::Red}}, strings, 100), ErrorCode::InvalidPeriod);
  REQUIRE_CODE(blink_frames(b, strings, 0), ErrorCode::OutOfRange);
}
