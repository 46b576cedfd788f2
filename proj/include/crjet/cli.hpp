#ifndef CRJET_CLI_HPP
#define CRJET_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace crjet {

enum ExitCode : int {
  kExitOk = 0,
  kExitNegative = 1,
  kExitInput = 2,
  kExitInternal = 3,
};

/// Runs one `crjet` command. `args` excludes the program name. The JSON
/// report (or error object) goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace crjet

#endif  // CRJET_CLI_HPP
