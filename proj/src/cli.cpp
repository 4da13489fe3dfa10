#include "fracvar/cli.hpp"

#include "fracvar/duality.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <system_error>

namespace fracvar::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kWindow = kInteriorFraction;
constexpr double kSolverAgreement = 1e-3;
constexpr double kReductionTol = 1e-2;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& text, int line, const std::string& key) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(line, key + ": expected a finite real number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& text, int line, const std::string& key) {
  Int v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(line, key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

// Rethrows a domain error with the operation that raised it.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& op, const std::string& what)
      : std::runtime_error(op + ": " + what) {}
};

template <typename Fn>
auto step(const char* op, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw NumericalFailure(op, e.what());
  }
}

// Every output is staged next to its destination and renamed in one pass once
// the whole run has succeeded.
class StagedFiles {
 public:
  explicit StagedFiles(std::filesystem::path dir) : dir_(std::move(dir)) {}
  StagedFiles(const StagedFiles&) = delete;
  StagedFiles& operator=(const StagedFiles&) = delete;
  ~StagedFiles() {
    std::error_code ec;
    for (const auto& [tmp, dest] : files_) std::filesystem::remove(tmp, ec);
  }

  void add(const std::string& name, const std::string& contents) {
    const auto dest = dir_ / name;
    const auto tmp = dir_ / ("." + name + ".tmp");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    files_.emplace_back(tmp, dest);
  }

  void commit() {
    for (const auto& [tmp, dest] : files_) std::filesystem::rename(tmp, dest);
    files_.clear();
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> files_;
};

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string report_csv(const std::vector<IdentityReport>& rows) {
  std::string out = "identity,alpha1,alpha2,family,n,norm_kind,residual,observed_order\n";
  for (const auto& r : rows) {
    out += std::string(identity_info(r.id).name);
    out += ',' + format_double(r.alpha1);
    out += ',' + optional_field(r.alpha2);
    out += ',' + r.family;
    out += ',' + std::to_string(r.n);
    out += ',' + r.norm_kind;
    out += ',' + format_double(r.residual);
    out += ',' + optional_field(r.observed_order);
    out += '\n';
  }
  return out;
}

Json config_echo(const RunConfig& cfg, const RunOptions& opt) {
  Json echo = Json::object();
  for (const auto& [k, v] : cfg.echo) echo[k] = v;
  Json j = Json::object();
  j["command"] = std::string(command_name(cfg.command));
  j["config_path"] = opt.config_path.generic_string();
  j["seed"] = cfg.seed;
  j["sign_convention"] = cfg.convention == SignConvention::printed ? "printed" : "corrected";
  j["config"] = std::move(echo);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Groups of the catalog that share an acceptance threshold.
std::string_view identity_group(IdentityId id) {
  const auto& info = identity_info(id);
  const std::string_view name = info.name;
  if (name.starts_with("INT_DUAL") || name.starts_with("DER_DUAL")) return "duality_catalog";
  if (name.starts_with("IBP")) return "integration_by_parts";
  if (id == IdentityId::complement_compose) return "complementary_composition";
  return "fractional_to_classical";
}

Json identity_checks(const std::vector<IdentityReport>& rows) {
  Json checks = Json::object();
  Index finest = 0;
  for (const auto& r : rows) finest = std::max(finest, r.n);
  for (const auto& r : rows) {
    if (r.n != finest) continue;
    const std::string group(identity_group(r.id));
    const bool ok = r.residual <= residual_tolerance(r.id);
    if (!checks.contains(group)) checks[group] = true;
    checks[group] = checks[group].get<bool>() && ok;
  }
  Json out = Json::object();
  out["finest_n"] = finest;
  out["residual_within_tolerance"] = std::move(checks);
  return out;
}

std::vector<IdentityId> selected_identities(const std::optional<std::string>& filter) {
  std::vector<IdentityId> ids;
  if (filter) {
    const auto id = identity_from_name(upper(*filter));
    if (!id) throw ConfigError(0, "--filter: unknown identity '" + *filter + "'");
    ids.push_back(*id);
    return ids;
  }
  for (const auto& info : identity_catalog()) ids.push_back(info.id);
  return ids;
}

void run_identities(const RunConfig& cfg, const RunOptions& opt, StagedFiles& files,
                    std::ostream& log) {
  const auto ids = selected_identities(opt.filter);
  std::vector<IdentityReport> rows;
  for (const auto id : ids) {
    for (const double alpha : cfg.alphas) {
      const Orders orders = orders_for(id, alpha);
      for (const Index n : cfg.n_list) {
        const Grid grid(cfg.a, cfg.b, n);
        rows.push_back(step("evaluate_identity", [&] {
          auto ops = make_operands(id, cfg.family, grid, orders, cfg.seed);
          return evaluate_identity(id, ops.u, ops.v, orders, cfg.convention, ops.family);
        }));
      }
    }
  }
  files.add("report.csv", report_csv(rows));
  Json summary = config_echo(cfg, opt);
  summary["rows"] = rows.size();
  summary["checks"] = identity_checks(rows);
  files.add("summary.json", dump(summary));
  log << "identities: " << rows.size() << " rows\n";
}

void run_convergence(const RunConfig& cfg, const RunOptions& opt, StagedFiles& files,
                     std::ostream& log) {
  const auto ids = selected_identities(opt.filter);
  std::vector<IdentityReport> rows;
  Json orders_json = Json::object();
  for (const auto id : ids) {
    for (const double alpha : cfg.alphas) {
      const Orders orders = orders_for(id, alpha);
      auto sweep = step("refinement_sweep", [&] {
        return refinement_sweep(id, cfg.family, orders, cfg.n_list, cfg.a, cfg.b, cfg.seed,
                                cfg.convention);
      });
      std::optional<double> worst;
      for (const auto& r : sweep) {
        if (r.observed_order) worst = std::min(worst.value_or(*r.observed_order), *r.observed_order);
      }
      const std::string key = std::string(identity_info(id).name) + "@" + format_double(alpha);
      orders_json[key] = worst ? Json(*worst) : Json(nullptr);
      rows.insert(rows.end(), sweep.begin(), sweep.end());
    }
  }
  files.add("report.csv", report_csv(rows));
  Json summary = config_echo(cfg, opt);
  summary["rows"] = rows.size();
  summary["checks"] = identity_checks(rows);
  summary["min_observed_order"] = std::move(orders_json);
  files.add("summary.json", dump(summary));
  log << "convergence: " << rows.size() << " rows\n";
}

std::string trajectory_csv(const GridFunction& x_ritz, const std::optional<GridFunction>& x_lin,
                           const GridFunction& el, const GridFunction& eom) {
  std::string out = "t,x_ritz,x_linear,el_residual,eom_residual\n";
  const auto& g = x_ritz.grid();
  for (Index i = 0; i < g.size(); ++i) {
    out += format_double(g.node(i));
    out += ',' + format_double(x_ritz[i]);
    out += ',' + (x_lin ? format_double((*x_lin)[i]) : std::string());
    out += ',' + format_double(el[i]);
    out += ',' + format_double(eom[i]);
    out += '\n';
  }
  return out;
}

int run_variational(const RunConfig& cfg, const RunOptions& opt, StagedFiles& files,
                    std::ostream& log) {
  const Grid grid(cfg.a, cfg.b, cfg.n);
  const auto params = dissipative_params(cfg);
  const auto spec = step("dissipative_lagrangian",
                         [&] { return dissipative_lagrangian(params, FractionalOrder(cfg.alpha1)); });
  const auto ritz = step("ritz_solve", [&] { return ritz_solve(spec, cfg.bc, grid, cfg.ritz); });
  if (ritz.status != RitzStatus::converged) {
    throw NumericalFailure("ritz_solve", std::string(to_string(ritz.status)) + " after " +
                                             std::to_string(ritz.iterations) +
                                             " iterations, gradient sup " +
                                             format_double(ritz.gradient_sup));
  }
  std::optional<GridFunction> x_lin;
  if (params.stiffness) {
    x_lin = step("solve_linear_eom",
                 [&] { return solve_linear_eom(params, cfg.bc, grid, cfg.convention); });
  }
  const auto el = step("el_residual", [&] { return el_residual(spec, ritz.x, cfg.convention); });
  const auto eom =
      step("eom_residual", [&] { return eom_residual(ritz.x, params, cfg.convention); });
  const double delta = kWindow * grid.length();

  Json summary = config_echo(cfg, opt);
  Json r = Json::object();
  r["status"] = std::string(to_string(ritz.status));
  r["iterations"] = ritz.iterations;
  r["gradient_sup"] = ritz.gradient_sup;
  r["action"] = ritz.action;
  summary["ritz"] = std::move(r);
  Json norms = Json::object();
  norms["el_residual_interior_sup"] = interior_sup_norm(el, delta);
  norms["eom_residual_interior_sup"] = interior_sup_norm(eom, delta);
  // the equation of motion is the Euler-Lagrange equation times -1
  const double reduction = interior_sup_norm(el + eom, delta);
  norms["el_plus_eom_interior_sup"] = reduction;
  Json checks = Json::object();
  checks["stationary"] = ritz.gradient_sup <= cfg.ritz.grad_tol;
  checks["el_eom_reduction"] = reduction <= kReductionTol;
  if (x_lin) {
    const double gap = sup_norm(ritz.x - *x_lin);
    norms["ritz_vs_linear_sup"] = gap;
    checks["solver_agreement"] = gap <= kSolverAgreement;
  }
  summary["norms"] = std::move(norms);
  summary["checks"] = std::move(checks);

  files.add("trajectory.csv", trajectory_csv(ritz.x, x_lin, el, eom));
  files.add("summary.json", dump(summary));
  log << command_name(cfg.command) << ": ritz " << to_string(ritz.status) << " in "
      << ritz.iterations << " iterations";
  if (x_lin) log << ", sup |x_ritz - x_linear| = " << format_double(sup_norm(ritz.x - *x_lin));
  log << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Config keys

using Setter = std::function<void(RunConfig&, const std::string&, int, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"a", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.a = parse_real(v, l, k); }},
      {"b", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.b = parse_real(v, l, k); }},
      {"n", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         c.n = parse_int<Index>(v, l, k);
         c.n_list = {c.n};
       }},
      {"n_list", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         c.n_list.clear();
         for (const auto& item : split_list(v)) c.n_list.push_back(parse_int<Index>(item, l, k));
       }},
      {"alpha", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         c.alphas = {parse_real(v, l, k)};
       }},
      {"alphas", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         c.alphas.clear();
         for (const auto& item : split_list(v)) c.alphas.push_back(parse_real(item, l, k));
       }},
      {"family", [](RunConfig& c, const std::string& v, int, const std::string&) { c.family = v; }},
      {"sign_convention", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         if (v == "printed") c.convention = SignConvention::printed;
         else if (v == "corrected") c.convention = SignConvention::corrected;
         else throw ConfigError(l, k + ": expected printed or corrected, got '" + v + "'");
       }},
      {"seed", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         c.seed = parse_int<std::uint64_t>(v, l, k);
       }},
      {"alpha1", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.alpha1 = parse_real(v, l, k); }},
      {"alpha2", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.alpha2 = parse_real(v, l, k); }},
      {"mass", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.mass = parse_real(v, l, k); }},
      {"friction", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.friction = parse_real(v, l, k); }},
      {"stiffness", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.stiffness = parse_real(v, l, k); }},
      {"potential", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         if (v == "harmonic") c.potential = Potential::harmonic;
         else if (v == "quartic") c.potential = Potential::quartic;
         else if (v == "double_well") c.potential = Potential::double_well;
         else throw ConfigError(l, k + ": expected harmonic, quartic or double_well, got '" + v + "'");
       }},
      {"xa", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.bc.xa = parse_real(v, l, k); }},
      {"xb", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.bc.xb = parse_real(v, l, k); }},
      {"basis_size", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         c.ritz.basis_size = parse_int<Index>(v, l, k);
       }},
      {"max_iters", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         c.ritz.max_iters = parse_int<int>(v, l, k);
       }},
      {"grad_tol", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.ritz.grad_tol = parse_real(v, l, k); }},
      {"step_shrink", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         c.ritz.step_shrink = parse_real(v, l, k);
       }},
      {"ritz_method", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
         if (v == "gradient_descent") c.ritz.method = RitzMethod::gradient_descent;
         else if (v == "newton") c.ritz.method = RitzMethod::newton;
         else throw ConfigError(l, k + ": expected gradient_descent or newton, got '" + v + "'");
       }},
  };
  return table;
}

// Semantic checks, reported against the line that set the offending key.
void validate(const RunConfig& c, const std::map<std::string, int>& lines) {
  const auto at = [&](std::initializer_list<const char*> keys) {
    int line = 0;
    for (const char* k : keys) {
      if (auto it = lines.find(k); it != lines.end()) line = std::max(line, it->second);
    }
    return line;
  };
  const bool variational = c.command == Command::solve || c.command == Command::demo_damped;
  if (!(c.b > c.a)) throw ConfigError(at({"a", "b"}), "grid precondition violated: need a < b");
  if (variational) {
    if (c.n < 2) {
      throw ConfigError(at({"n"}), "grid precondition violated: need n >= 2 subintervals, got n = " +
                                       std::to_string(c.n));
    }
  } else {
    if (c.n_list.empty()) throw ConfigError(at({"n", "n_list"}), "n_list is empty");
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
      if (c.n_list[i] < 2) {
        throw ConfigError(at({"n", "n_list"}),
                          "grid precondition violated: need n >= 2 subintervals, got n = " +
                              std::to_string(c.n_list[i]));
      }
      if (c.command == Command::convergence && i > 0 && c.n_list[i] <= c.n_list[i - 1]) {
        throw ConfigError(at({"n_list"}), "n_list must be strictly ascending for convergence");
      }
    }
    if (c.alphas.empty()) throw ConfigError(at({"alpha", "alphas"}), "alphas is empty");
    for (const double a : c.alphas) {
      if (!(a >= 0.0 && a <= 1.0)) {
        throw ConfigError(at({"alpha", "alphas"}), "fractional order must lie in [0, 1]");
      }
    }
    const auto keys = family_keys();
    std::istringstream parts(c.family);
    std::string part;
    int count = 0;
    while (std::getline(parts, part, '/')) {
      ++count;
      if (std::find(keys.begin(), keys.end(), part) == keys.end()) {
        throw ConfigError(at({"family"}), "family: unknown key '" + part + "'");
      }
    }
    if (count < 1 || count > 2) throw ConfigError(at({"family"}), "family: expected key or key/key");
  }
  if (variational) {
    if (!(c.alpha1 > 0.0 && c.alpha1 < 1.0)) {
      throw ConfigError(at({"alpha1"}), "alpha1 must lie in (0, 1)");
    }
    if (c.alpha2 && std::abs(c.alpha1 + *c.alpha2 - 1.0) > 1e-12) {
      throw ConfigError(at({"alpha1", "alpha2"}),
                        "the dissipative Lagrangian needs alpha1 + alpha2 = 1");
    }
    if (!(c.mass > 0.0)) throw ConfigError(at({"mass"}), "mass must be positive");
    if (c.command == Command::demo_damped && c.potential != Potential::harmonic) {
      throw ConfigError(at({"potential"}), "demo-damped needs potential = harmonic");
    }
    try {
      fracvar::validate(c.ritz);
    } catch (const DomainError& e) {
      throw ConfigError(at({"basis_size", "max_iters", "grad_tol", "step_shrink"}), e.what());
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<Command> command_from_name(std::string_view name) {
  if (name == "identities") return Command::identities;
  if (name == "convergence") return Command::convergence;
  if (name == "solve") return Command::solve;
  if (name == "demo-damped") return Command::demo_damped;
  return std::nullopt;
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::identities: return "identities";
    case Command::convergence: return "convergence";
    case Command::solve: return "solve";
    case Command::demo_damped: return "demo-damped";
  }
  return "unknown";
}

RunConfig default_config(Command command) {
  RunConfig c;
  c.command = command;
  switch (command) {
    case Command::identities:
      break;
    case Command::convergence:
      c.n_list = {512, 1024, 2048, 4096};
      break;
    case Command::solve:
    case Command::demo_damped:
      c.a = 0.0;
      c.b = 5.0;
      break;
  }
  return c;
}

RunConfig parse_config(std::istream& in, Command command) {
  RunConfig cfg = default_config(command);
  std::map<std::string, int> lines;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key before '='");
    if (value.empty()) throw ConfigError(line, key + ": missing value");
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (lines.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
    it->second(cfg, value, line, key);
    lines[key] = line;
    cfg.echo.emplace_back(key, value);
  }
  validate(cfg, lines);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, Command command) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file " + path.string());
  return parse_config(in, command);
}

DissipativeParams dissipative_params(const RunConfig& cfg) {
  const double k = cfg.stiffness;
  switch (cfg.potential) {
    case Potential::harmonic:
      return DissipativeParams::harmonic(cfg.mass, cfg.friction, k);
    case Potential::quartic: {
      DissipativeParams p;
      p.mass = cfg.mass;
      p.friction = cfg.friction;
      p.U = [k](double x) { return 0.25 * k * x * x * x * x; };
      p.Uprime = [k](double x) { return k * x * x * x; };
      return p;
    }
    case Potential::double_well: {
      DissipativeParams p;
      p.mass = cfg.mass;
      p.friction = cfg.friction;
      p.U = [k](double x) { return 0.25 * k * (x * x - 1) * (x * x - 1); };
      p.Uprime = [k](double x) { return k * x * (x * x - 1); };
      return p;
    }
  }
  throw DomainError("unknown potential");
}

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // no negative zero in reports
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 16);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

int run(const RunOptions& options, std::ostream& log, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(options.config_path, options.command);
    if (options.seed) cfg.seed = *options.seed;
    if (options.filter) selected_identities(options.filter);
    std::filesystem::create_directories(options.out_dir);
  } catch (const ConfigError& e) {
    err << "fracvar: invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "fracvar: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    StagedFiles files(options.out_dir);
    switch (cfg.command) {
      case Command::identities:
        run_identities(cfg, options, files, log);
        break;
      case Command::convergence:
        run_convergence(cfg, options, files, log);
        break;
      case Command::solve:
      case Command::demo_damped:
        run_variational(cfg, options, files, log);
        break;
    }
    files.commit();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "fracvar: invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    err << "fracvar: numerical failure in " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "fracvar: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Fractional duality identities and left-operator variational problems"};
  app.require_subcommand(1, 1);
  RunOptions opt;
  std::string out_dir = ".";
  std::string config;
  std::string filter;
  std::uint64_t seed = 0;

  struct Sub {
    CLI::App* app;
    CLI::Option* filter = nullptr;
    CLI::Option* seed = nullptr;
  };
  std::vector<Sub> subs;
  for (const auto c : {Command::identities, Command::convergence, Command::solve, Command::demo_damped}) {
    auto* sub = app.add_subcommand(std::string(command_name(c)));
    sub->add_option("--config", config, "key = value config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    Sub entry{sub};
    if (c == Command::identities || c == Command::convergence) {
      entry.filter = sub->add_option("--filter", filter, "evaluate one identity only");
    }
    entry.seed = sub->add_option("--seed", seed, "seed for randomized family parameters");
    subs.push_back(entry);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (const auto& sub : subs) {
    if (!sub.app->parsed()) continue;
    opt.command = *command_from_name(sub.app->get_name());
    if (sub.filter && sub.filter->count()) opt.filter = filter;
    if (sub.seed->count()) opt.seed = seed;
  }
  opt.config_path = config;
  opt.out_dir = out_dir;
  return run(opt, std::cout, std::cerr);
}

}  // namespace fracvar::cli
