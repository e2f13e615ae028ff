// tieboard: run event scripts, compare traces, compile LED patterns, serve sessions.
//
// Exit codes: 0 ok, 1 usage, 2 session or input error, 3 golden mismatch.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tieboard/tieboard.hpp"

namespace {

using namespace tieboard;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSession = 2;
constexpr int kExitMismatch = 3;

int report(const Error& e) {
  std::cerr << "tieboard: error[" << code_name(e.code()) << "]: " << e.what() << '\n';
  return kExitSession;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ConfigError, "cannot write `" + path + "`");
  out << text;
}

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos) fail(ErrorCode::BindError, "endpoint must be host:port");
  const std::string host = endpoint.substr(0, colon);
  const std::string port = endpoint.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(port, &used);
    if (used != port.size() || v > 65535) throw std::out_of_range("port");
    return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(v)};
  } catch (const std::exception&) {
    fail(ErrorCode::BindError, "bad port `" + port + "`");
  }
}

int cmd_run(const std::string& config, const std::string& script, const std::string& trace) {
  const SessionConfig cfg = load_config(config);
  const auto events = script.empty() ? std::vector<ScriptEvent>{} : parse_event_script(read_text_file(script, ErrorCode::ScriptParseError));
  std::ostringstream out;
  const bool clean = run_script(cfg, events, out);
  write_output(trace, out.str());
  if (!clean) {
    std::cerr << "tieboard: error[SessionError]: at least one event was rejected; see the trace's error fields\n";
    return kExitSession;
  }
  return kExitOk;
}

int cmd_golden(const std::string& trace, const std::string& expect) {
  const auto d = compare_golden(read_text_file(trace, ErrorCode::MalformedMessage), read_text_file(expect, ErrorCode::MalformedMessage));
  if (!d) {
    std::cout << "golden: match\n";
    return kExitOk;
  }
  std::cout << "golden: mismatch at " << describe(*d) << '\n';
  return kExitMismatch;
}

int cmd_compile_pattern(const std::string& file, int rows, int cols, const std::string& color, bool as_frame) {
  const auto m = parse_pattern(read_text_file(file, ErrorCode::ConfigError), rows, cols);
  if (!as_frame) {
    std::cout << render_pattern(m);
    return kExitOk;
  }
  const auto c = parse_color(color);
  if (!c) fail(ErrorCode::ConfigError, "unknown color `" + color + "`");
  std::cout << frame_to_json(matrix_to_frame(m, *c, make_rectangular(rows, cols))).dump() << '\n';
  return kExitOk;
}

int cmd_animate(const std::string& file, const std::string& color) {
  const auto script = parse_script(read_text_file(file, ErrorCode::ScriptParseError));
  const auto c = parse_color(color);
  if (!c) fail(ErrorCode::ConfigError, "unknown color `" + color + "`");
  const auto tl = compile_script(script, *c, make_rectangular(script.rows, script.cols));
  for (const auto& e : tl.entries) std::cout << nlohmann::json{{"t_ms", e.time_ms}, {"frame", frame_to_json(e.frame)}}.dump() << '\n';
  return kExitOk;
}

int cmd_serve(const std::string& config, const std::string& endpoint) {
  const SessionConfig cfg = load_config(config);
  const auto [host, port] = split_endpoint(endpoint);
  Server server(cfg);
  const auto bound = server.listen(host, port);
  std::cerr << "tieboard: listening on " << host << ':' << bound << '\n';
  server.serve();
  return kExitOk;
}

int cmd_catalog_validate(const std::string& file) {
  const Catalog c = load_catalog(file);
  std::cout << "catalog: " << c.entries().size() << " entries ok\n";
  return kExitOk;
}

int cmd_perfect(const std::string& config) {
  const SessionDriver d(load_config(config));
  std::cout << render_script(perfect_script(d));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  CLI::App app{"TIEboard tangible geometry board simulator"};
  app.require_subcommand(1);

  std::string config, script, trace, expect, file, color = "Red", endpoint = "127.0.0.1:7464";
  int rows = 5, cols = 6;
  bool as_frame = false;

  auto* run = app.add_subcommand("run", "Run an event script and write its trace");
  run->add_option("--config", config, "Session config JSON")->required();
  run->add_option("--script", script, "Event script (omit for an empty script)");
  run->add_option("--trace", trace, "Trace output path (default stdout)");

  auto* golden = app.add_subcommand("golden", "Compare a trace with a golden trace");
  golden->add_option("--trace", trace)->required();
  golden->add_option("--expect", expect)->required();

  auto* pattern = app.add_subcommand("compile-pattern", "Parse a 0/1 pattern and print its canonical form");
  pattern->add_option("file", file)->required();
  pattern->add_option("--rows", rows)->check(CLI::PositiveNumber);
  pattern->add_option("--cols", cols)->check(CLI::PositiveNumber);
  pattern->add_option("--color", color, "LED color for --frame");
  pattern->add_flag("--frame", as_frame, "Print the LED frame JSON instead");

  auto* animate = app.add_subcommand("animate", "Compile a stop-motion script into a timeline");
  animate->add_option("file", file)->required();
  animate->add_option("--color", color);

  auto* serve = app.add_subcommand("serve", "Serve sessions over line-delimited JSON");
  serve->add_option("--config", config)->required();
  serve->add_option("--listen", endpoint, "host:port");

  auto* catalog = app.add_subcommand("catalog", "Catalog tools");
  catalog->require_subcommand(1);
  auto* validate = catalog->add_subcommand("validate", "Validate a catalog file");
  validate->add_option("file", file)->required();

  auto* perfect = app.add_subcommand("perfect", "Print the perfect-student script for a config");
  perfect->add_option("--config", config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config, script, trace);
    if (*golden) return cmd_golden(trace, expect);
    if (*pattern) return cmd_compile_pattern(file, rows, cols, color, as_frame);
    if (*animate) return cmd_animate(file, color);
    if (*serve) return cmd_serve(config, endpoint);
    if (*validate) return cmd_catalog_validate(file);
    if (*perfect) return cmd_perfect(config);
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "tieboard: error[Internal]: " << e.what() << '\n';
    return kExitSession;
  }
  return kExitUsage;
}
