#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qad/adversary.hpp"

namespace qad::cli {

enum class Command { thresholds, attack, simulate, figure };
enum class OutFormat { csv, json };

/// Exit codes: 0 success, 1 runtime or numeric failure, 2 usage.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  Command command = Command::thresholds;
  int n = 2;
  int n_min = 2;
  int n_max = 25;
  std::optional<double> beta0;
  std::optional<int> block_size;
  std::optional<std::uint64_t> blocks;
  std::uint64_t seed = 0;
  std::optional<AttackKind> kind;
  OutFormat out_format = OutFormat::csv;
  std::optional<std::string> out_path;
  std::optional<std::string> dump_path;
  bool numeric = false;
  unsigned threads = 1;
};

/// Thrown by validate() for inconsistent or missing arguments.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Command-specific checks, run before any computation.
void validate(const RunConfig& config);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Data goes to `out` (or the requested file), diagnostics to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qad::cli
