#include "rcd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "rcd/error.hpp"

namespace rcd {

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

double to_double(const std::string& text, std::size_t line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw ParseError(line, "'" + key + "' expects a number, got '" + text + "'");
}

std::int64_t to_integer(const std::string& text, std::size_t line, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long value = std::stoll(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw ParseError(line, "'" + key + "' expects an integer, got '" + text + "'");
}

std::uint64_t to_unsigned(const std::string& text, std::size_t line, const std::string& key) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] != '-') {
      const unsigned long long value = std::stoull(text, &used);
      if (used == text.size()) return value;
    }
  } catch (const std::exception&) {
  }
  throw ParseError(line, "'" + key + "' expects an unsigned integer, got '" + text + "'");
}

bool valid_label(const std::string& label) {
  return !label.empty() && std::all_of(label.begin(), label.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

int default_window(Algorithm algorithm) {
  return algorithm == Algorithm::kRcd || algorithm == Algorithm::kRcdN ? 10 : 0;
}

SolverEntry parse_solver(const std::string& value, std::size_t line) {
  std::istringstream words(value);
  std::string name;
  words >> name;
  SolverEntry entry;
  try {
    entry.config.algorithm = algorithm_from_string(name);
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }
  entry.label = name;
  int window = default_window(entry.config.algorithm);
  std::string option;
  while (words >> option) {
    const auto eq = option.find('=');
    if (eq == std::string::npos) throw ParseError(line, "solver option '" + option + "' lacks '='");
    const std::string key = option.substr(0, eq);
    const std::string text = option.substr(eq + 1);
    if (key == "alpha") {
      entry.config.alpha = to_double(text, line, key);
    } else if (key == "eps") {
      entry.config.epsilon = to_double(text, line, key);
    } else if (key == "max_full_iters") {
      entry.config.max_full_iterations = to_double(text, line, key);
    } else if (key == "window") {
      window = static_cast<int>(to_integer(text, line, key));
    } else if (key == "trace_every") {
      entry.config.trace_every = to_double(text, line, key);
    } else if (key == "label") {
      entry.label = text;
    } else {
      throw ParseError(line, "unknown solver option '" + key + "'");
    }
  }
  entry.config.stop_rule = PlateauWindow{window};
  try {
    entry.config.validate();
  } catch (const Error& e) {
    throw ParseError(line, e.what());
  }
  if (!valid_label(entry.label)) throw ParseError(line, "solver label '" + entry.label + "' is not a plain word");
  return entry;
}

std::string csv_safe(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return text;
}

}  // namespace

BuiltProblem build_problem(const ProblemSpec& spec) {
  if (spec.family == "svm") {
    SvmInstance instance = spec.data.empty()
                               ? random_svm(spec.n, spec.dim, spec.density, spec.gen_seed, spec.C)
                               : parse_sparse_dataset(spec.data);
    instance.C = spec.C;
    const Index n = instance.num_examples();
    return {build_svm(instance), start_point(spec.x0.value_or(StartPoint::kZero), n)};
  }
  if (spec.family == "chebyshev") {
    const ChebyshevInstance instance = random_points(spec.n, spec.dim, spec.gen_seed);
    return {build_chebyshev(instance), start_point(spec.x0.value_or(StartPoint::kUniform), spec.n)};
  }
  if (spec.family == "l1") {
    return {build_l1_random(spec.n, spec.dim, spec.lambda, spec.gen_seed),
            start_point(spec.x0.value_or(StartPoint::kUniform), spec.n)};
  }
  if (spec.family == "custom") {
    ParseOptions options;
    options.normalize_labels = false;
    const SvmInstance data = parse_sparse_dataset(spec.data, options);
    const Index n = data.num_examples();
    CompositeProblem problem(StructuredSmooth{data.Z, data.labels},
                             SeparableTerm::l1_box(n, spec.lambda, spec.lower, spec.upper),
                             Coupling::single(Vector::Ones(n), spec.b), BlockPartition::scalar(n));
    return {std::move(problem), start_point(spec.x0.value_or(StartPoint::kUniform), n)};
  }
  throw Error(Error::Kind::kInvalidArgument, "unknown problem family '" + spec.family + "'");
}

ExperimentManifest parse_manifest(std::istream& in) {
  ExperimentManifest manifest;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    ProblemSpec& p = manifest.problem;
    if (key == "family") {
      if (value != "svm" && value != "chebyshev" && value != "l1" && value != "custom") {
        throw ParseError(line, "unknown family '" + value + "'");
      }
      p.family = value;
    } else if (key == "data") {
      p.data = value;
    } else if (key == "n") {
      p.n = to_integer(value, line, key);
    } else if (key == "dim") {
      p.dim = to_integer(value, line, key);
    } else if (key == "density") {
      p.density = to_integer(value, line, key);
    } else if (key == "lambda") {
      p.lambda = to_double(value, line, key);
    } else if (key == "C") {
      p.C = to_double(value, line, key);
    } else if (key == "lower") {
      p.lower = to_double(value, line, key);
    } else if (key == "upper") {
      p.upper = to_double(value, line, key);
    } else if (key == "b") {
      p.b = to_double(value, line, key);
    } else if (key == "gen_seed") {
      p.gen_seed = to_unsigned(value, line, key);
    } else if (key == "x0") {
      try {
        p.x0 = start_point_from_string(value);
      } catch (const Error& e) {
        throw ParseError(line, e.what());
      }
    } else if (key == "seeds") {
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) manifest.seeds.push_back(to_unsigned(trim(item), line, key));
    } else if (key == "output") {
      manifest.output_dir = value;
    } else if (key == "jobs") {
      manifest.jobs = static_cast<int>(to_integer(value, line, key));
      if (manifest.jobs < 1) throw ParseError(line, "jobs must be at least 1");
    } else if (key == "solver") {
      manifest.solvers.push_back(parse_solver(value, line));
    } else {
      throw ParseError(line, "unknown key '" + key + "'");
    }
  }

  if (manifest.solvers.empty()) throw ParseError(line, "manifest lists no solver");
  if (manifest.seeds.empty()) throw ParseError(line, "manifest lists no seeds");
  std::set<std::string> labels;
  for (const SolverEntry& entry : manifest.solvers) {
    if (!labels.insert(entry.label).second) {
      throw ParseError(line, "duplicate solver label '" + entry.label + "'; set label=...");
    }
  }
  const std::set<std::uint64_t> distinct(manifest.seeds.begin(), manifest.seeds.end());
  if (distinct.size() != manifest.seeds.size()) throw ParseError(line, "duplicate seed");
  const ProblemSpec& p = manifest.problem;
  const bool needs_file = p.family == "custom" || (p.family == "svm" && !p.data.empty());
  if (needs_file && !std::filesystem::exists(p.data)) {
    throw ParseError(line, "dataset '" + p.data + "' does not exist");
  }
  if (!needs_file && (p.n < 2 || p.dim < 1)) throw ParseError(line, "generator families need n >= 2 and dim >= 1");
  return manifest;
}

ExperimentManifest parse_manifest(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(Error::Kind::kParse, "cannot open manifest '" + path + "'");
  return parse_manifest(file);
}

bool ExperimentOutcome::all_ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.result.has_value(); });
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRow& row : trace.rows) {
    out << format_double(row.full_iteration) << ',' << row.raw_iterations << ','
        << format_double(row.objective) << ',' << format_double(row.feasibility_defect) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << kSummaryHeader << '\n';
  for (const CellResult& cell : cells) {
    out << cell.label << ',' << cell.seed << ',';
    if (cell.result) {
      const TraceRow& last = cell.result->trace.last();
      out << format_double(last.full_iteration) << ',' << last.raw_iterations << ','
          << format_double(last.objective) << ',' << format_double(last.feasibility_defect) << ','
          << format_double(last.elapsed_seconds) << ',';
    } else {
      out << ",,,,,";
    }
    out << csv_safe(cell.status) << '\n';
  }
}

std::vector<AggregateRow> aggregate_traces(const std::vector<const ConvergenceTrace*>& traces) {
  std::size_t longest = 0;
  const ConvergenceTrace* schedule = nullptr;
  for (const ConvergenceTrace* trace : traces) {
    if (trace->rows.size() > longest) {
      longest = trace->rows.size();
      schedule = trace;
    }
  }
  std::vector<AggregateRow> rows(longest);
  for (std::size_t r = 0; r < longest; ++r) {
    AggregateRow& row = rows[r];
    row.full_iteration = schedule->rows[r].full_iteration;
    row.min = std::numeric_limits<double>::infinity();
    row.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const ConvergenceTrace* trace : traces) {
      const double value = trace->rows[std::min(r, trace->rows.size() - 1)].objective;
      sum += value;
      row.min = std::min(row.min, value);
      row.max = std::max(row.max, value);
    }
    // Clamp keeps min <= mean <= max under round-off in the sum.
    row.mean = std::clamp(sum / static_cast<double>(traces.size()), row.min, row.max);
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const AggregateRow& row : rows) {
    out << format_double(row.full_iteration) << ',' << format_double(row.mean) << ','
        << format_double(row.min) << ',' << format_double(row.max) << '\n';
  }
}

ExperimentOutcome run_experiment(const ExperimentManifest& manifest) {
  const BuiltProblem built = build_problem(manifest.problem);
  const std::filesystem::path dir(manifest.output_dir);
  std::filesystem::create_directories(dir);

  ExperimentOutcome outcome;
  for (const SolverEntry& entry : manifest.solvers) {
    for (std::uint64_t seed : manifest.seeds) {
      CellResult cell;
      cell.label = entry.label;
      cell.seed = seed;
      outcome.cells.push_back(std::move(cell));
    }
  }

  const std::size_t seeds = manifest.seeds.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < outcome.cells.size(); c = next++) {
      CellResult& cell = outcome.cells[c];
      SolverConfig config = manifest.solvers[c / seeds].config;
      config.seed = cell.seed;
      try {
        cell.result = solve(built.problem, built.x0, config);
        cell.status = to_string(cell.result->reason);
        std::ofstream trace_file(dir / ("trace_" + cell.label + "_seed" + std::to_string(cell.seed) + ".csv"));
        write_trace_csv(trace_file, cell.result->trace);
      } catch (const std::exception& e) {
        cell.result.reset();
        cell.status = std::string("error: ") + e.what();
      }
    }
  };
  const int jobs = std::clamp<int>(manifest.jobs, 1, static_cast<int>(outcome.cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& thread : pool) thread.join();

  std::ofstream summary(dir / "summary.csv");
  write_summary_csv(summary, outcome.cells);

  if (seeds >= 2) {
    for (std::size_t s = 0; s < manifest.solvers.size(); ++s) {
      std::vector<const ConvergenceTrace*> traces;
      for (std::size_t k = 0; k < seeds; ++k) {
        const CellResult& cell = outcome.cells[s * seeds + k];
        if (cell.result) traces.push_back(&cell.result->trace);
      }
      if (traces.empty()) continue;
      std::ofstream aggregate(dir / ("aggregate_" + manifest.solvers[s].label + ".csv"));
      write_aggregate_csv(aggregate, aggregate_traces(traces));
    }
  }
  return outcome;
}

RateFit fit_rate(std::span<const double> k, std::span<const double> gap) {
  if (k.size() != gap.size()) throw Error(Error::Kind::kDimension, "fit_rate: k and gap differ in length");
  if (k.size() < 2) throw Error(Error::Kind::kInvalidArgument, "fit_rate needs at least two points");
  const auto n = static_cast<Index>(k.size());
  Vector log_k(n);
  Vector lin_k(n);
  Vector log_gap(n);
  for (Index i = 0; i < n; ++i) {
    if (!(gap[i] > 0.0)) {
      throw Error(Error::Kind::kInvalidArgument,
                  "fit_rate: nonpositive gap; the F* reference is not below the iterates");
    }
    if (!(k[i] > 0.0)) throw Error(Error::Kind::kInvalidArgument, "fit_rate: k must be positive");
    log_k[i] = std::log(k[i]);
    lin_k[i] = k[i];
    log_gap[i] = std::log(gap[i]);
  }
  auto slope_and_r2 = [&](const Vector& x) {
    const Vector xc = x.array() - x.mean();
    const Vector yc = log_gap.array() - log_gap.mean();
    const double sxx = xc.squaredNorm();
    const double syy = yc.squaredNorm();
    if (sxx == 0.0) throw Error(Error::Kind::kInvalidArgument, "fit_rate: all k are equal");
    const double slope = xc.dot(yc) / sxx;
    const double r2 = syy == 0.0 ? 1.0 : 1.0 - (yc - slope * xc).squaredNorm() / syy;
    return std::pair{slope, r2};
  };
  RateFit fit;
  fit.loglog_slope = slope_and_r2(log_k).first;
  std::tie(fit.linear_slope, fit.linear_r2) = slope_and_r2(lin_k);
  return fit;
}

RateFit fit_rate(const std::vector<AggregateRow>& rows, double f_star, double k_from, double k_to) {
  std::vector<double> k;
  std::vector<double> gap;
  for (const AggregateRow& row : rows) {
    if (row.full_iteration < k_from || row.full_iteration > k_to) continue;
    k.push_back(row.full_iteration);
    gap.push_back(row.mean - f_star);
  }
  return fit_rate(k, gap);
}

}  // namespace rcd
