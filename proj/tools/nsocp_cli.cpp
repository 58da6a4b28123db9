#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nsocp/corpus.hpp"
#include "nsocp/errors.hpp"
#include "nsocp/kernels.hpp"
#include "nsocp/problem_io.hpp"
#include "nsocp/rng.hpp"

using namespace nsocp;

namespace {

struct Record {
  std::ostringstream buf;
  void line(const json& j) { buf << dump_json(j) << '\n'; }
  // write whole file at once so a crashed run leaves no partial log
  void save(const std::string& path) const {
    if (path.empty()) return;
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp);
      out << buf.str();
    }
    std::filesystem::rename(tmp, path);
  }
};

json header(const std::string& command, std::uint64_t seed, const json& config) {
  return {{"type", "header"},
          {"tool", "nsocp"},
          {"version", kToolVersion},
          {"command", command},
          {"seed", seed},
          {"simd", kernels::isa_name(kernels::active_isa())},
          {"config", config}};
}

int report_error(const Error& e) {
  std::cerr << "error [" << error_kind_name(e.kind()) << "]: " << e.what();
  if (e.position >= 0) std::cerr << " (position " << e.position << ")";
  if (e.kind() == ErrorKind::InfeasiblePoint && e.block >= 0)
    std::cerr << " (constraint " << e.block + 1 << ", lambda1 = " << e.value << ")";
  std::cerr << '\n';
  return 1;
}

ProblemSpec load(const std::string& file, const std::string& fixture) {
  if (!fixture.empty()) return load_fixture(fixture);
  if (file.empty()) throw Error(ErrorKind::InvalidProblem, "one of --problem or --fixture is required");
  return load_problem_file(file);
}

Vec point_or_default(const ProblemSpec& p, const std::string& csv, bool use_poi) {
  if (!csv.empty()) {
    Vec x = parse_csv_vector(csv);
    if (x.size() != p.n)
      throw Error(ErrorKind::DimensionMismatch,
                  "point has " + std::to_string(x.size()) + " entries, problem has n = " + std::to_string(p.n));
    return x;
  }
  if (use_poi && !p.points_of_interest.empty()) return p.points_of_interest.front();
  return Vec::Zero(p.n);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

int cmd_solve(const std::string& file, const std::string& fixture, const std::string& method, const std::string& x0s,
              const std::string& out, const std::vector<std::string>& overrides, bool literal) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec p = load(file, fixture);
  SolverConfig cfg;
  cfg.method = parse_method(method);
  cfg.paper_literal = literal;
  for (const auto& o : overrides) apply_override(cfg, o);
  const Vec x0 = point_or_default(p, x0s, false);

  Record rec;
  rec.line(header("solve", 0, to_json(cfg)));
  SolveResult r;
  try {
    r = solve(p, x0, cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DomainError || e.kind() == ErrorKind::LineSearchStalled) {
      rec.line({{"type", "footer"}, {"status", "error"}, {"error", e.what()}});
      rec.save(out);
      return report_error(e);
    }
    throw;
  }
  for (const auto& it : r.log) {
    json j = to_json(it);
    j["type"] = "iterate";
    rec.line(j);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json footer{{"type", "footer"}, {"status", solve_status_name(r.status)}, {"wall_time", wall}};
  if (!r.log.empty()) {
    footer["residuals"] = to_json(r.log.back().residuals);
    footer["x"] = vec_to_json(r.x);
    footer["max_multiplier_norm"] = max_block_norm(r.mu);
    if (r.log.size() >= 2) {
      const double first = max_block_norm(r.log.front().mu);
      const double last = max_block_norm(r.log.back().mu);
      if (r.status != SolveStatus::Converged && first > 0 && last > 10.0 * first)
        footer["note"] = "multiplier norms diverging (" + std::to_string(first) + " -> " + std::to_string(last) +
                         "); no KKT point, constraint qualifications likely fail at the limit";
    }
  }
  if (!r.note.empty() && !footer.contains("note")) footer["note"] = r.note;
  rec.line(footer);
  rec.save(out);
  std::cout << dump_json(footer) << '\n';
  return exit_code(r.status);
}

int cmd_cq(const std::string& file, const std::string& fixture, const std::string& at, const std::string& which,
           std::uint64_t seed, int budget, const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec p = load(file, fixture);
  const Vec x = point_or_default(p, at, true);
  CqOptions opt;
  opt.seed = resolve_seed(seed);
  if (budget > 0) opt.random_directions = budget;
  std::vector<std::string> names = which.empty() ? std::vector<std::string>{} : split(which);
  if (names.empty()) {
    for (const auto& [k, v] : p.expected) names.push_back(k);
    if (names.empty()) names = cq_names();
  }
  for (const auto& n : names) {
    if (std::find(cq_names().begin(), cq_names().end(), n) == cq_names().end())
      throw Error(ErrorKind::InvalidProblem, "unknown condition '" + n + "'");
  }
  classify_indices(p, x, opt.index_tol);  // feasibility check up front

  Record rec;
  rec.line(header("cq", opt.seed,
                  {{"which", names}, {"budget", opt.random_directions}, {"at", vec_to_json(x)}, {"problem", p.name}}));
  int mismatches = 0;
  for (const auto& n : names) {
    const CqVerdict v = run_cq(p, x, n, opt);
    json j = to_json(v);
    j["type"] = "verdict";
    const auto e = p.expected.find(n);
    if (e != p.expected.end()) {
      j["expected"] = e->second ? "HOLDS" : "VIOLATED";
      if (!verdict_matches(v.status, e->second)) {
        ++mismatches;
        j["mismatch"] = true;
      }
    }
    rec.line(j);
    std::cout << dump_json(j) << '\n';
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.line({{"type", "footer"}, {"status", mismatches ? "mismatch" : "ok"}, {"mismatches", mismatches}, {"wall_time", wall}});
  rec.save(out);
  return mismatches ? 4 : 0;
}

int cmd_corpus_list() {
  for (const auto& f : corpus()) {
    const ProblemSpec p = load_fixture(f);
    std::cout << f.name << "  n=" << p.n << " q=" << p.q() << "  expected:";
    for (const auto& [k, v] : p.expected) std::cout << ' ' << k << '=' << (v ? "HOLDS" : "VIOLATED");
    std::cout << '\n';
  }
  return 0;
}

int cmd_corpus_run(const std::string& filter, std::uint64_t seed) {
  CqOptions opt;
  opt.seed = resolve_seed(seed);
  int mismatches = 0, ran = 0;
  std::printf("%-14s %-14s %-10s %-10s %s\n", "fixture", "check", "expected", "got", "");
  for (const auto& f : corpus()) {
    if (!filter.empty() && f.name != filter) continue;
    ++ran;
    const ProblemSpec p = load_fixture(f);
    for (const Vec& x : p.points_of_interest) {
      for (const auto& c : check_expected(p, x, opt)) {
        std::printf("%-14s %-14s %-10s %-10s %s\n", f.name.c_str(), c.cq.c_str(), c.expected ? "HOLDS" : "VIOLATED",
                    status_name(c.verdict.status), c.match ? "ok" : "MISMATCH");
        if (!c.match) ++mismatches;
      }
      const NdgCrosscheck cc = crosscheck_ndg_decomposition(p, x, opt);
      std::printf("%-14s %-14s %-10s %-10s %s\n", f.name.c_str(), "ndg-split", "agree", cc.consistent ? "agree" : "disagree",
                  cc.consistent ? "ok" : "MISMATCH");
      if (!cc.consistent) ++mismatches;
    }
    for (const auto& s : smoke_test(f)) {
      std::printf("%-14s %-14s %-10s %-10s %s  %s\n", f.name.c_str(), (std::string("solve-") + method_name(s.method)).c_str(),
                  f.expect_kkt ? "kkt" : "no-kkt", solve_status_name(s.status), s.pass ? "ok" : "MISMATCH",
                  s.detail.c_str());
      if (!s.pass) ++mismatches;
    }
  }
  if (ran == 0) {
    std::cerr << "no fixture matches '" << filter << "'\n";
    return 1;
  }
  std::printf("%d fixture(s), %d mismatch(es)\n", ran, mismatches);
  return mismatches ? 4 : 0;
}

int cmd_corpus_export(const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : corpus()) {
    const std::string path = (std::filesystem::path(dir) / (f.name + ".json")).string();
    std::ofstream out(path);
    out << problem_to_json(load_fixture(f)).dump(2) << '\n';
    std::cout << path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear second-order cone programming: solvers and constraint-qualification checks"};
  app.require_subcommand(1);

  std::string problem, fixture, method = "auglag", x0, out, at, which, filter, dir = "corpus";
  std::vector<std::string> overrides;
  bool literal = false;
  std::uint64_t seed = 0;
  int budget = 0;

  auto* solve_cmd = app.add_subcommand("solve", "run a solver and write a JSONL iterate log");
  solve_cmd->add_option("--problem", problem, "problem JSON file");
  solve_cmd->add_option("--fixture", fixture, "built-in corpus problem");
  solve_cmd->add_option("--method", method, "penalty | auglag | sqp")->check(CLI::IsMember({"penalty", "auglag", "sqp"}));
  solve_cmd->add_option("--x0", x0, "start point as CSV (default 0)");
  solve_cmd->add_option("--out", out, "JSONL run record");
  solve_cmd->add_option("--config", overrides, "key=value overrides (repeatable)");
  solve_cmd->add_flag("--paper-literal", literal, "alternate AL sign, [-λ2]+ violation measure and reversed SQP step test");

  auto* cq_cmd = app.add_subcommand("cq", "check constraint qualifications at a point");
  cq_cmd->add_option("--problem", problem, "problem JSON file");
  cq_cmd->add_option("--fixture", fixture, "built-in corpus problem");
  cq_cmd->add_option("--at", at, "point as CSV (default: first point of interest)");
  cq_cmd->add_option("--which", which, "comma-separated list (default: expected table)");
  cq_cmd->add_option("--seed", seed, "random seed (NSOCP_SEED overrides)");
  cq_cmd->add_option("--budget", budget, "random probe directions");
  cq_cmd->add_option("--out", out, "JSONL run record");

  auto* corpus_cmd = app.add_subcommand("corpus", "built-in fixture corpus");
  corpus_cmd->require_subcommand(1);
  auto* list_cmd = corpus_cmd->add_subcommand("list", "list fixtures");
  auto* run_cmd = corpus_cmd->add_subcommand("run", "check every fixture's expected table");
  run_cmd->add_option("--filter", filter, "fixture name");
  run_cmd->add_option("--seed", seed, "random seed (NSOCP_SEED overrides)");
  auto* export_cmd = corpus_cmd->add_subcommand("export", "write fixtures as problem JSON files");
  export_cmd->add_option("dir", dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(problem, fixture, method, x0, out, overrides, literal);
    if (*cq_cmd) return cmd_cq(problem, fixture, at, which, seed, budget, out);
    if (*list_cmd) return cmd_corpus_list();
    if (*run_cmd) return cmd_corpus_run(filter, seed);
    if (*export_cmd) return cmd_corpus_export(dir);
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
