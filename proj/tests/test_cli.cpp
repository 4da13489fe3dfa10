#include "fracvar/cli.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace fracvar;
using namespace fracvar::cli;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("fracvar_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& body) {
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int run_cmd(Command c, const fs::path& cfg, const fs::path& out, std::string* err_text = nullptr,
            std::optional<std::uint64_t> seed = std::nullopt, std::optional<std::string> filter = std::nullopt) {
  std::ostringstream log, err;
  RunOptions opt;
  opt.command = c;
  opt.config_path = cfg;
  opt.out_dir = out;
  opt.seed = seed;
  opt.filter = std::move(filter);
  const int code = run(opt, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

RunConfig parse(const std::string& text, Command c = Command::identities) {
  std::istringstream in(text);
  return parse_config(in, c);
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse("# comment\n\na = -1\nb = 2   # trailing\nalphas = 0.1, 0.9\nn_list = 64,128\n"
                         "family = power2/bump\nsign_convention = corrected\nseed = 42\n");
  CHECK(cfg.a == -1.0);
  CHECK(cfg.b == 2.0);
  CHECK(cfg.alphas == std::vector<double>{0.1, 0.9});
  CHECK(cfg.n_list == std::vector<Index>{64, 128});
  CHECK(cfg.family == "power2/bump");
  CHECK(cfg.convention == SignConvention::corrected);
  CHECK(cfg.seed == 42);
  CHECK(cfg.echo.size() == 7);
  CHECK(cfg.echo.front().first == "a");

  const auto d = parse("", Command::demo_damped);
  CHECK(d.b == 5.0);
  CHECK(d.ritz.method == RitzMethod::newton);
  CHECK(parse("", Command::convergence).n_list.back() == 4096);
}

TEST_CASE("config errors carry the line number") {
  auto line_of = [](const std::string& text, Command c = Command::identities) {
    try {
      parse(text, c);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("a = 0\nbogus = 1\n") == 2);
  CHECK(line_of("a = 0\n\na = 1\n") == 3);
  CHECK(line_of("n_list = 64, x\n") == 1);
  CHECK(line_of("justtext\n") == 1);
  CHECK(line_of("alphas = 1.5\n") == 1);
  CHECK(line_of("# x\nfamily = nope\n") == 2);
  CHECK(line_of("b = 1\nn = 1\n", Command::solve) == 2);
  CHECK(line_of("mass = 0\n", Command::solve) == 1);
  CHECK(line_of("alpha1 = 0.3\nalpha2 = 0.5\n", Command::solve) == 2);
  CHECK(line_of("potential = quartic\n", Command::demo_damped) == 1);
  CHECK(line_of("sign_convention = upside_down\n") == 1);
  CHECK(line_of("n_list = 128, 64\n", Command::convergence) == 1);
  try {
    parse("n = 1\n", Command::solve);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "line 1: grid precondition violated: need n >= 2 subintervals, got n = 1");
  }
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.0) == "0.0000000000000000e+00");
  CHECK(format_double(-0.0) == "0.0000000000000000e+00");
  CHECK(format_double(1.0) == "1.0000000000000000e+00");
  CHECK(format_double(0.1) == "1.0000000000000001e-01");
  CHECK(format_double(-2.5e-300) == "-2.5000000000000000e-300");
  CHECK(std::stod(format_double(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("command names round trip") {
  for (auto c : {Command::identities, Command::convergence, Command::solve, Command::demo_damped})
    CHECK(command_from_name(command_name(c)) == c);
  CHECK(command_name(Command::demo_damped) == "demo-damped");
  CHECK_FALSE(command_from_name("plot").has_value());
}

TEST_CASE("identities: one row per identity, alpha and n") {
  const auto dir = temp_dir("identities");
  const auto cfg = write_file(dir, "c.cfg", "n_list = 64, 128\nalphas = 0.25, 0.5, 0.75\n");
  REQUIRE(run_cmd(Command::identities, cfg, dir) == kExitOk);
  const auto rows = lines_of(slurp(dir / "report.csv"));
  REQUIRE(rows.size() == 1 + 21 * 3 * 2);
  CHECK(rows[0] == "identity,alpha1,alpha2,family,n,norm_kind,residual,observed_order");
  CHECK(rows[1].rfind("INT_DUAL_LEFT,", 0) == 0);

  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["command"] == "identities");
  CHECK(summary["config"]["n_list"] == "64, 128");
  CHECK(summary.contains("checks"));

  REQUIRE(run_cmd(Command::identities, cfg, dir, nullptr, std::nullopt, "MIXED_IBP") == kExitOk);
  CHECK(lines_of(slurp(dir / "report.csv")).size() == 1 + 3 * 2);
  std::string err;
  CHECK(run_cmd(Command::identities, cfg, dir, &err, std::nullopt, "NOPE") == kExitConfig);
  CHECK(err.find("NOPE") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("identities: byte-identical reruns") {
  const auto dir = temp_dir("determinism");
  fs::create_directories(dir / "r1");
  fs::create_directories(dir / "r2");
  const auto cfg = write_file(dir, "c.cfg", "n_list = 64, 128\nfamily = left_image\n");
  REQUIRE(run_cmd(Command::identities, cfg, dir / "r1", nullptr, 7) == kExitOk);
  REQUIRE(run_cmd(Command::identities, cfg, dir / "r2", nullptr, 7) == kExitOk);
  CHECK(slurp(dir / "r1" / "report.csv") == slurp(dir / "r2" / "report.csv"));
  REQUIRE(run_cmd(Command::identities, cfg, dir / "r2", nullptr, 8) == kExitOk);
  CHECK(slurp(dir / "r1" / "report.csv") != slurp(dir / "r2" / "report.csv"));
  fs::remove_all(dir);
}

TEST_CASE("convergence: observed orders on coarser rows") {
  const auto dir = temp_dir("convergence");
  const auto cfg = write_file(dir, "c.cfg", "n_list = 128, 256, 512\nalphas = 0.5\n");
  REQUIRE(run_cmd(Command::convergence, cfg, dir, nullptr, std::nullopt, "FRAC_TO_CLASSICAL") == kExitOk);
  const auto rows = lines_of(slurp(dir / "report.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].back() != ',');
  CHECK(rows[3].back() == ',');
  fs::remove_all(dir);
}

TEST_CASE("exit codes and no partial output") {
  const auto dir = temp_dir("exits");
  std::string err;
  CHECK(run_cmd(Command::solve, write_file(dir, "bad.cfg", "b = 5\nn = 1\n"), dir, &err) == kExitConfig);
  CHECK(err.find("line 2") != std::string::npos);
  CHECK(err.find("grid precondition") != std::string::npos);
  CHECK(run_cmd(Command::solve, dir / "missing.cfg", dir) == kExitConfig);

  const auto stall = write_file(dir, "stall.cfg",
                                "n = 128\nmax_iters = 2\nritz_method = gradient_descent\nbasis_size = 6\n");
  CHECK(run_cmd(Command::solve, stall, dir, &err) == kExitNumerical);
  CHECK(err.find("ritz_solve") != std::string::npos);
  CHECK(err.find("max_iters reached") != std::string::npos);
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() == ".cfg");
  fs::remove_all(dir);
}

TEST_CASE("solve writes the trajectory table") {
  const auto dir = temp_dir("solve");
  const auto cfg = write_file(dir, "c.cfg", "b = 3\nn = 128\nfriction = 0\nbasis_size = 16\nsign_convention = corrected\n");
  REQUIRE(run_cmd(Command::solve, cfg, dir) == kExitOk);
  const auto rows = lines_of(slurp(dir / "trajectory.csv"));
  REQUIRE(rows.size() == 1 + 129);
  CHECK(rows[0] == "t,x_ritz,x_linear,el_residual,eom_residual");
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["ritz"]["status"] == "converged");
  CHECK(summary["sign_convention"] == "corrected");
  fs::remove_all(dir);
}

TEST_CASE("bundled configs parse") {
  const fs::path root = FRACVAR_CONFIG_DIR;
  CHECK_NOTHROW(load_config(root / "default.cfg", Command::identities));
  CHECK_NOTHROW(load_config(root / "convergence.cfg", Command::convergence));
  const auto demo = load_config(root / "demo-damped.cfg", Command::demo_damped);
  CHECK(demo.b == 5.0);
  CHECK(demo.friction == 0.5);
  CHECK(demo.bc.xa == 1.0);
  CHECK(demo.bc.xb == 0.0);
}
