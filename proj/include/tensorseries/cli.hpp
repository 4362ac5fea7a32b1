#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tensorseries/io.hpp"

namespace tensorseries::cli {

/// Stable process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 1, kViolation = 2 };

enum class Command { flatten, telescope, stress, ck_demo, span_demo };

/// Bad flags or config values.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  Command command = Command::flatten;
  std::string norm;  // empty: the command's default
  double c = 2.0;
  double tol = 1e-6;
  std::optional<std::size_t> max_terms;
  std::uint64_t seed = 0;
  std::string in;
  std::string out;
  std::string trace_out;
  std::string scheme = "svd";
  std::size_t trials = 1000;
  std::string vector_norm = "euclidean";
  std::string expansion = "automatic";
  int max_dim = kDefaultMaxDim;
  int atoms = 13;

  /// c > 1, tol > 0, caps positive, names known. Throws UsageError.
  void validate() const;
};

/// Overlays keys of a config object onto `config`, skipping the keys in
/// `explicit_flags` (flags win). Keys are the long flag names.
void apply_config(RunConfig& config, const io::json& j,
                  const std::set<std::string>& explicit_flags = {});

int cmd_flatten(const RunConfig& config, std::ostream& out);
int cmd_telescope(const RunConfig& config, std::ostream& out);
int cmd_stress(const RunConfig& config, std::ostream& out);
int cmd_ck_demo(const RunConfig& config, std::ostream& out);
int cmd_span_demo(const RunConfig& config, std::ostream& out);

/// Parses `args` (without the program name), dispatches, and maps errors to
/// exit codes. Messages go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tensorseries::cli
