#pragma once

// Command-line front end: config parsing, command dispatch and report files.
//
//   fracvar <identities|convergence|solve|demo-damped> --config <path>
//           [--out <dir>] [--filter <identity>] [--seed <u64>]
//
// Exit codes: 0 success, 2 invalid invocation or config, 3 numerical failure.

#include "fracvar/identities.hpp"
#include "fracvar/variational.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracvar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

enum class Command { identities, convergence, solve, demo_damped };

std::optional<Command> command_from_name(std::string_view name);
std::string_view command_name(Command c);

/// Invalid configuration. line == 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class Potential { harmonic, quartic, double_well };

struct RunConfig {
  Command command = Command::identities;
  double a = 0.0;
  double b = 1.0;
  std::vector<Index> n_list{512, 1024, 2048};
  std::vector<double> alphas{0.25, 0.5, 0.75};
  std::string family = "default";
  SignConvention convention = SignConvention::printed;
  std::uint64_t seed = 1;

  // solve / demo-damped
  Index n = 1024;
  double alpha1 = 0.5;
  std::optional<double> alpha2;  // must equal 1 - alpha1 when given
  double mass = 1.0;
  double friction = 0.5;
  double stiffness = 1.0;
  Potential potential = Potential::harmonic;
  BoundaryConditions bc{1.0, 0.0};
  RitzConfig ritz{48, 5000, 1e-9, 0.5, RitzMethod::newton};

  // key -> value as written, in file order, for the summary echo
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Defaults for a command before any key is read.
RunConfig default_config(Command command);

/// Parses `key = value` lines (# starts a comment) over the defaults of
/// `command` and validates the result. Throws ConfigError.
RunConfig parse_config(std::istream& in, Command command);
RunConfig load_config(const std::filesystem::path& path, Command command);

DissipativeParams dissipative_params(const RunConfig& cfg);

/// Shortest decimal form is not used; every float is written with 17
/// significant digits in scientific notation, independent of locale.
std::string format_double(double x);

struct RunOptions {
  Command command = Command::identities;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::string> filter;
  std::optional<std::uint64_t> seed;
};

/// Runs one command; messages go to `log` / `err`. Returns the exit code.
int run(const RunOptions& options, std::ostream& log, std::ostream& err);

/// Argument parsing plus run().
int main(int argc, char** argv);

}  // namespace fracvar::cli
