#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ibpf/approx.hpp"
#include "ibpf/errors.hpp"
#include "ibpf/paths.hpp"
#include "ibpf/report.hpp"
#include "ibpf/selftest.hpp"
#include "ibpf/verify.hpp"

namespace ibpf::cli {

namespace {

using nlohmann::json;

struct Parsed {
  RunConfig cfg;
  bool seed_given = false;
};

void common(CLI::App* s, RunConfig& c) {
  s->add_option("--config", "key=value configuration file (flags take precedence)");
  s->add_option("--seed", c.seed, "random seed (default from IBPF_SEED, else 1)");
  s->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  s->add_option("--out", c.out, "output file (written atomically); stdout if omitted");
}

void numerics(CLI::App* s, RunConfig& c) {
  s->add_option("--delta", c.deltas, "dimension, or a comma-separated list")->delimiter(',');
  s->add_option("--functional", c.functional, "exp:lambda=1.0 | expcos:lambda=0.5 | piecewise:0,0.5,1;levels=1,2");
  s->add_option("--direction", c.direction, "default (sin^3(pi r)) | sin4");
  s->add_option("--method", c.method, "closedform | mc");
  s->add_option("--paths", c.paths, "Monte Carlo paths");
  s->add_option("--grid", c.grid, "grid points, a power of two plus one");
  s->add_option("--rel-tol", c.rel_tol, "quadrature relative tolerance");
  s->add_option("--abs-tol", c.abs_tol, "quadrature absolute tolerance");
  s->add_option("--format", c.format, "json | csv");
}

std::unique_ptr<CLI::App> make_app(RunConfig& c) {
  auto app = std::make_unique<CLI::App>("Integration by parts for Bessel bridges: verification toolkit", "ibpf");
  app->require_subcommand(1);
  auto* v = app->add_subcommand("verify", "check the integration-by-parts identity");
  common(v, c);
  numerics(v, c);
  auto* s = app->add_subcommand("sample", "write sampled squared Bessel bridge paths as CSV");
  common(s, c);
  numerics(s, c);
  s->add_option("--r", c.r, "pin time in (0,1); unpinned if omitted");
  s->add_option("--x", c.x, "pinned value of the squared path at r");
  auto* b = app->add_subcommand("bounds", "certify the Taylor-remainder estimates");
  common(b, c);
  numerics(b, c);
  auto* a = app->add_subcommand("approx", "appendix domination suite for exponential-sum approximations");
  common(a, c);
  a->add_option("--n", c.n, "support [0,n] of the test function")->check(CLI::PositiveNumber);
  a->add_option("--k", c.k_list, "Bernstein degrees")->delimiter(',');
  a->add_option("--points", c.points, "evaluation grid size");
  auto* t = app->add_subcommand("selftest", "run the acceptance suite");
  common(t, c);
  t->add_option("--only", c.only, "criteria to run, e.g. 1,3")->delimiter(',');
  t->add_option("--delta", c.deltas, "restrict the Monte Carlo identity criterion to these deltas")->delimiter(',');
  return app;
}

void parse_into(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  app.parse(args);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// key = value lines; '#' starts a comment
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int no = 0;
  while (std::getline(f, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    kv.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

CLI::App* active(CLI::App& app) {
  auto subs = app.get_subcommands();
  return subs.empty() ? nullptr : subs.front();
}

bool power_of_two_plus_one(std::size_t n) { return n >= 3 && ((n - 1) & (n - 2)) == 0; }

void validate(const RunConfig& c) {
  const bool identity = c.command == "verify" || c.command == "bounds";
  if (identity || c.command == "sample") {
    if (c.deltas.empty()) throw UsageError("--delta: at least one value required");
    for (double d : c.deltas) {
      if (identity && !(d > 0.0 && d < 3.0)) {
        std::ostringstream os;
        os << "--delta " << d << ": delta must lie in the open interval (0,3) for " << c.command;
        throw UsageError(os.str());
      }
      if (!(d >= 0.0)) throw UsageError("--delta must be >= 0 for sample");
    }
    if (c.method != "closedform" && c.method != "mc") throw UsageError("--method must be closedform or mc");
    if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");
    if (!power_of_two_plus_one(c.grid))
      throw UsageError("--grid " + std::to_string(c.grid) + ": must be a power of two plus one (e.g. 257)");
    if (c.method == "mc" && c.paths < 1000) throw UsageError("--paths must be >= 1000 in mc mode");
    if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0)) throw UsageError("--rel-tol and --abs-tol must be positive");
    (void)parse_functional(c.functional);
    if (c.direction != "default" && c.direction != "sin3" && c.direction != "sin4")
      throw UsageError("--direction must be default, sin3 or sin4");
  }
  if (c.command == "sample") {
    if (c.paths < 1) throw UsageError("--paths must be >= 1");
    if (c.r != -1.0 && !(c.r > 0.0 && c.r < 1.0)) throw UsageError("--r must lie in (0,1)");
    if (!(c.x >= 0.0)) throw UsageError("--x must be >= 0");
    if (c.out.empty()) throw UsageError("sample: --out is required");
  }
  if (c.command == "approx") {
    if (c.k_list.empty()) throw UsageError("--k: at least one degree required");
    for (int k : c.k_list)
      if (k < 1) throw UsageError("--k: degrees must be >= 1");
    if (c.points < 2) throw UsageError("--points must be >= 2");
  }
  if (c.command == "selftest")
    for (int i : c.only)
      if (i < 1 || i > selftest::kCriteria) throw UsageError("--only: criteria are numbered 1..9");
}

Parsed parse_impl(const std::vector<std::string>& args) {
  Parsed p;
  std::string config_path;
  {
    RunConfig probe;
    auto app = make_app(probe);
    parse_into(*app, args);
    if (auto* s = active(*app); s && s->count("--config")) config_path = s->get_option("--config")->as<std::string>();
  }
  std::vector<std::string> full = args;
  if (!config_path.empty()) {
    RunConfig probe;
    auto app = make_app(probe);
    parse_into(*app, args);
    CLI::App* s = active(*app);
    for (const auto& [key, value] : read_config(config_path)) {
      if (key == "command" || key == "config") continue;
      CLI::Option* opt = s->get_option_no_throw("--" + key);
      if (!opt) throw UsageError("config: unknown key '" + key + "' for " + s->get_name());
      if (opt->count() == 0) {
        full.push_back("--" + key);
        full.push_back(value);
      }
    }
  }
  auto app = make_app(p.cfg);
  parse_into(*app, full);
  CLI::App* s = active(*app);
  p.cfg.command = s->get_name();
  p.seed_given = s->count("--seed") > 0;
  if (!p.seed_given) {
    if (const char* env = std::getenv("IBPF_SEED"); env && *env) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (!end || *end != '\0') throw UsageError(std::string("IBPF_SEED is not an unsigned integer: ") + env);
      p.cfg.seed = v;
      p.seed_given = true;
    }
  }
  validate(p.cfg);
  return p;
}

Direction direction_of(const std::string& name) {
  if (name == "sin4") {
    const double pi = std::numbers::pi;
    Direction h;
    h.eval = [pi](double r) { return std::pow(std::sin(pi * r), 4); };
    h.second_derivative = [pi](double r) {
      const double s = std::sin(pi * r), c = std::cos(pi * r);
      return 4.0 * pi * pi * s * s * (3.0 * c * c - s * s);
    };
    h.endpoint_order = 4;
    h.sup_h = 1.0;
    h.sup_h2 = 4.0 * pi * pi;
    h.description = "sin^4(pi r)";
    return h;
  }
  return default_direction();
}

verify::Method method_of(const RunConfig& c) {
  if (c.method == "closedform") {
    verify::ClosedFormMethod m;
    m.spec.rel_tol = c.rel_tol;
    m.spec.abs_tol = c.abs_tol;
    return m;
  }
  verify::MonteCarloMethod m;
  m.paths = c.paths;
  m.grid_points = c.grid;
  m.seed = c.seed;
  m.threads = c.threads;
  return m;
}

void emit(const RunConfig& c, const std::string& content, std::ostream& out) {
  if (c.out.empty())
    out << content;
  else
    report::write(c.out, content);
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const auto phi = parse_functional(c.functional);
  const auto h = direction_of(c.direction);
  const auto m = method_of(c);
  std::vector<verify::IbPFReport> reps;
  for (double d : c.deltas) reps.push_back(verify::verify_identity(phi, h, verify::Regime::from_delta(d), m));
  std::string content;
  if (c.format == "csv") {
    content = report::csv(reps);
  } else if (reps.size() == 1) {
    content = report::dump(report::to_json(reps.front()));
  } else {
    json a = json::array();
    for (const auto& r : reps) a.push_back(report::to_json(r));
    content = report::dump({{"reports", a}});
  }
  emit(c, content, out);
  bool all = true;
  for (const auto& r : reps) {
    all = all && r.pass;
    if (!c.out.empty())
      out << "delta=" << r.regime.delta << " gap=" << r.gap << " budget=" << r.budget
          << (r.pass ? " PASS" : " FAIL") << "\n";
  }
  return all ? kPass : kToleranceFailure;
}

int cmd_sample(const RunConfig& c, std::ostream& out) {
  const double delta = c.deltas.front();
  RngStream rng(c.seed, {0x73616d70});
  std::vector<SquaredBridgePath> paths;
  if (c.r == -1.0) {
    auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform(c.grid));
    for (std::size_t i = 0; i < c.paths; ++i) paths.push_back(sample_besq_bridge(delta, grid, rng));
  } else {
    auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform_with_pin(c.grid, c.r));
    for (std::size_t i = 0; i < c.paths; ++i) paths.push_back(sample_pinned_bridge(delta, c.r, c.x, grid, rng));
  }
  write_paths_csv(c.out, paths, c.seed);
  out << "wrote " << paths.size() << " paths to " << c.out << "\n";
  return kPass;
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
  const auto phi = parse_functional(c.functional);
  const auto m = method_of(c);
  const std::vector<double> r_grid{0.05, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95};
  std::vector<double> b_grid{0.0};
  for (int e = 12; e >= 0; --e) b_grid.push_back(std::ldexp(1.0, -e));
  for (double b : {2.0, 4.0}) b_grid.push_back(b);
  json a = json::array();
  bool all = true;
  for (double d : c.deltas) {
    const auto rep = verify::bounds_suite(phi, verify::Regime::from_delta(d), r_grid, b_grid, m);
    json j = report::to_json(rep);
    j["meta"] = {{"delta", d}, {"functional", phi.description}, {"method", c.method}};
    a.push_back(j);
    all = all && rep.pass;
  }
  emit(c, report::dump(a.size() == 1 ? a[0] : json{{"reports", a}}), out);
  return all ? kPass : kToleranceFailure;
}

int cmd_approx(const RunConfig& c, std::ostream& out) {
  const double n = c.n, pi = std::numbers::pi;
  // sin^2 bump on [0,n]: C^1 with Lipschitz derivative
  auto h = [=](double x) { return x >= 0.0 && x <= n ? std::pow(std::sin(pi * x / n), 2) : 0.0; };
  auto dh = [=](double x) { return x >= 0.0 && x <= n ? pi / n * std::sin(2.0 * pi * x / n) : 0.0; };
  std::vector<double> grid;
  for (std::size_t i = 0; i < c.points; ++i) grid.push_back(3.0 * n * static_cast<double>(i) / (c.points - 1));
  const auto rep = approx::domination_suite(h, dh, 2.0 * pi * pi / (n * n), c.n, c.k_list, grid);
  emit(c, report::approx_csv(rep.rows), out);
  return rep.pass() ? kPass : kToleranceFailure;
}

int cmd_selftest(const Parsed& p, std::ostream& out) {
  selftest::Options o;
  if (p.seed_given) o.seed = p.cfg.seed;
  o.threads = p.cfg.threads;
  std::vector<selftest::CriterionResult> results;
  const bool restrict_delta = p.cfg.deltas != RunConfig{}.deltas;
  for (int id : p.cfg.only.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9} : p.cfg.only) {
    if (id == 4 && restrict_delta) {
      for (double d : p.cfg.deltas) {
        o.delta = d;
        results.push_back(selftest::run_all(o, {4}).front());
      }
      o.delta.reset();
    } else {
      results.push_back(selftest::run_all(o, {id}).front());
    }
    out << selftest::summary_line(results.back()) << "\n";
    for (const auto& d : results.back().details) out << "    " << d << "\n";
    out.flush();
  }
  if (!p.cfg.out.empty()) report::write(p.cfg.out, report::dump(selftest::to_json(results)));
  const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  return all ? kPass : kToleranceFailure;
}

}  // namespace

RunConfig parse(const std::vector<std::string>& args) {
  try {
    return parse_impl(args).cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Parsed p;
  try {
    p = parse_impl(args);
  } catch (const CLI::CallForHelp&) {
    RunConfig c;
    out << make_app(c)->help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    RunConfig c;
    out << make_app(c)->help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  try {
    const auto& c = p.cfg;
    if (c.command == "verify") return cmd_verify(c, out);
    if (c.command == "sample") return cmd_sample(c, out);
    if (c.command == "bounds") return cmd_bounds(c, out);
    if (c.command == "approx") return cmd_approx(c, out);
    return cmd_selftest(p, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace ibpf::cli
