#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rcd/bench.hpp"
#include "rcd/error.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;

struct SolveOptions {
  rcd::ProblemSpec problem;
  std::string algo = "rcd";
  std::string x0;
  double alpha = 0.0;
  double eps = 1e-5;
  std::uint64_t seed = 0;
  double max_full_iters = 1000;
  int window = -1;
  double trace_every = 1.0;
  std::string out = ".";
};

int run_solve(const SolveOptions& options) {
  rcd::ProblemSpec spec = options.problem;
  rcd::SolverConfig config;
  try {
    if (!options.x0.empty()) spec.x0 = rcd::start_point_from_string(options.x0);
    config.algorithm = rcd::algorithm_from_string(options.algo);
    config.alpha = options.alpha;
    config.epsilon = options.eps;
    config.seed = options.seed;
    config.max_full_iterations = options.max_full_iters;
    config.trace_every = options.trace_every;
    const bool randomized = config.algorithm == rcd::Algorithm::kRcd || config.algorithm == rcd::Algorithm::kRcdN;
    config.stop_rule = rcd::PlateauWindow{options.window >= 0 ? options.window : (randomized ? 10 : 0)};
    config.validate();
  } catch (const rcd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }

  const rcd::BuiltProblem built = rcd::build_problem(spec);
  const rcd::SolveResult result = rcd::solve(built.problem, built.x0, config);

  std::filesystem::create_directories(options.out);
  const std::filesystem::path dir(options.out);
  std::ofstream trace(dir / "trace.csv");
  rcd::write_trace_csv(trace, result.trace);
  rcd::CellResult cell;
  cell.label = options.algo;
  cell.seed = options.seed;
  cell.status = rcd::to_string(result.reason);
  cell.result = result;
  std::ofstream summary(dir / "summary.csv");
  rcd::write_summary_csv(summary, {cell});

  const rcd::TraceRow& last = result.trace.last();
  std::cout << "objective " << rcd::format_double(last.objective) << '\n'
            << "feasibility " << rcd::format_double(last.feasibility_defect) << '\n'
            << "full_iterations " << rcd::format_double(last.full_iteration) << '\n'
            << "stop " << rcd::to_string(result.reason) << '\n';
  return 0;
}

int run_bench(const std::string& manifest_path, int jobs) {
  rcd::ExperimentManifest manifest = rcd::parse_manifest(manifest_path);
  if (jobs > 0) manifest.jobs = jobs;
  const rcd::ExperimentOutcome outcome = rcd::run_experiment(manifest);
  for (const rcd::CellResult& cell : outcome.cells) {
    std::cout << cell.label << " seed " << cell.seed << ": " << cell.status;
    if (cell.result) std::cout << " objective " << rcd::format_double(cell.result->trace.last().objective);
    std::cout << '\n';
  }
  return outcome.all_ok() ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized coordinate descent for linearly coupled composite problems"};
  app.require_subcommand(1);

  SolveOptions solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one problem and write trace.csv / summary.csv");
  solve_cmd->add_option("--family", solve.problem.family, "svm, chebyshev, l1 or custom")
      ->check(CLI::IsMember({"svm", "chebyshev", "l1", "custom"}));
  solve_cmd->add_option("--data", solve.problem.data, "svmlight dataset (svm, custom)");
  solve_cmd->add_option("--algo", solve.algo, "rcd, rcdn, cgd or gm")
      ->check(CLI::IsMember({"rcd", "rcdn", "cgd", "gm"}));
  solve_cmd->add_option("--alpha", solve.alpha, "norm parameter in [0, 1]")->check(CLI::Range(0.0, 1.0));
  solve_cmd->add_option("--eps", solve.eps, "plateau tolerance");
  solve_cmd->add_option("--seed", solve.seed, "sampling seed");
  solve_cmd->add_option("--max-full-iters", solve.max_full_iters, "iteration cap in full iterations");
  solve_cmd->add_option("--x0", solve.x0, "zero, e1 or uniform")->check(CLI::IsMember({"zero", "e1", "uniform"}));
  solve_cmd->add_option("--out", solve.out, "output directory");
  solve_cmd->add_option("--n", solve.problem.n, "generated problem size");
  solve_cmd->add_option("--dim", solve.problem.dim, "rows of Z for generated problems");
  solve_cmd->add_option("--density", solve.problem.density, "nonzeros per column (random svm)");
  solve_cmd->add_option("--lambda", solve.problem.lambda, "l1 weight");
  solve_cmd->add_option("--C", solve.problem.C, "svm box bound");
  solve_cmd->add_option("--gen-seed", solve.problem.gen_seed, "generator seed");
  solve_cmd->add_option("--window", solve.window, "plateau window (default 10 for rcd/rcdn, 0 otherwise)");
  solve_cmd->add_option("--trace-every", solve.trace_every, "trace stride in full iterations");

  std::string manifest;
  int jobs = 0;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run an experiment manifest");
  bench_cmd->add_option("--manifest", manifest, "key = value manifest")->required();
  bench_cmd->add_option("--jobs", jobs, "concurrent cells (overrides the manifest)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    return run_bench(manifest, jobs);
  } catch (const rcd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == rcd::Error::Kind::kParse ? kExitParse : kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}
