#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cforge::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2, kIo = 3 };

/// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a flat key=value file ('#' comments, blank lines ignored) and
/// returns the equivalent `--key value` tokens.
std::vector<std::string> config_tokens(const std::string& path);

std::vector<double> parse_list(const std::string& text);

}  // namespace cforge::cli
