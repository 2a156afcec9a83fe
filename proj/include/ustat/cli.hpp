#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ustat/dataset.hpp"

namespace ustat::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kRuntimeError = 3 };

/// Comma-separated numeric table, one observation per line. A first row with
/// no numeric cell is taken as a header. Rows and columns in errors are
/// 1-based file positions.
Dataset load_csv(const std::string& path);
Dataset parse_csv(std::string_view text);

/// FNV-1a 64-bit hash as "fnv1a64:<16 hex digits>".
std::string digest(std::string_view bytes);
std::string file_digest(const std::string& path);

/// Runs the command line (args excludes the program name); JSON results go
/// to out unless --out is given, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace ustat::cli
