#pragma once

#include "config.hpp"

#include <filesystem>
#include <ostream>

namespace leakywire::cli {

enum ExitCode : int { kOk = 0, kError = 1, kNoBoundStates = 2, kFitFailure = 3 };

struct Context {
  RunConfig config;
  std::filesystem::path out = ".";
  bool verbose = false;
  std::ostream* log = nullptr;  // verbose messages; stderr when null
};

int cmd_spectrum(const Context& ctx);
int cmd_existence(const Context& ctx);
int cmd_hiatus(const Context& ctx);
int cmd_regcheck(const Context& ctx);
int cmd_eigfun(const Context& ctx);

// %.17g, with nan/inf spelled out.
std::string format_double(double v);

}  // namespace leakywire::cli
