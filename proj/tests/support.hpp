#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "aisette/typecheck.hpp"
#include "test_config.hpp"

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sample_path(const std::string& name) {
  return std::string(AISETTE_SAMPLES_DIR) + "/" + name;
}

inline std::string fixture_path(const std::string& name) {
  return std::string(AISETTE_FIXTURES_DIR) + "/" + name;
}

inline aisette::TypedModule compile_or_fail(const std::string& source) {
  auto result = aisette::compile_module(source);
  if (!result.ok()) {
    std::string all;
    for (const auto& d : result.diags.items()) {
      all += aisette::format_diagnostic(d) + "\n";
    }
    FAIL("compile failed:\n", all);
  }
  return std::move(*result.module);
}

inline aisette::TypedModule compile_sample(const std::string& name) {
  return compile_or_fail(read_file(sample_path(name)));
}

// Solver used by the sundew suites: AISETTE_SOLVER wins, then the vendored
// Z3 shim installed at configure time.
inline std::string test_solver_path() {
  if (const char* env = std::getenv("AISETTE_SOLVER")) return env;
  return AISETTE_SOLVER_SHIM;
}
