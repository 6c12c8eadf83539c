#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blgeo/json_io.hpp"
#include "blgeo/opscale.hpp"
#include "blgeo/solvers.hpp"
#include "blgeo/verify.hpp"

namespace {

// Exit codes shared across subcommands.
constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitDimensionCap = 5;
constexpr int kExitViolations = 6;

void emit(const nlohmann::json& j, const std::string& output_path) {
  const std::string text = j.dump(2) + "\n";
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output_path);
  if (!out) throw blgeo::Error("cannot open output file: " + output_path);
  out << text;
}

long long dimension_cap_from_env() {
  const char* raw = std::getenv("BLGEO_DIM_CAP");
  if (raw == nullptr || *raw == '\0') return 4096;
  char* end = nullptr;
  const long long cap = std::strtoll(raw, &end, 10);
  if (end == raw || *end != '\0' || cap <= 0)
    throw blgeo::Error(std::string("BLGEO_DIM_CAP is not a positive "
                                   "integer: \"") +
                       raw + "\"");
  return cap;
}

int run_validate(const std::string& path, int samples, std::uint64_t seed,
                 const std::string& output) {
  const blgeo::BLDatum d = blgeo::load_datum(path);
  blgeo::ScreenConfig cfg;
  cfg.random_subspaces = samples;
  cfg.seed = seed;
  const blgeo::FeasibilityReport rep = blgeo::feasibility_screen(d, cfg);
  emit(blgeo::to_json(rep), output);
  switch (rep.verdict) {
    case blgeo::FeasibilityVerdict::ConsistentWithFeasible:
      return kExitOk;
    case blgeo::FeasibilityVerdict::InfeasibleWitness:
    case blgeo::FeasibilityVerdict::ScalingViolation:
      // Either way the constant is not finite: one is a witnessed subspace,
      // the other a failure of the exact scaling identity.
      return kExitInfeasible;
    default:
      return kExitInputError;
  }
}

Eigen::MatrixXd load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw blgeo::Error("cannot open matrix file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw blgeo::Error(path + ": " + e.what());
  }
  if (!j.is_array() || j.empty())
    throw blgeo::Error(path + ": expected a JSON array of matrix rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw blgeo::Error(path + ": rows must be non-empty arrays");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw blgeo::Error(path + ": ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

std::optional<blgeo::SpdMatrix> initial_point(const blgeo::BLDatum& d,
                                              const std::string& x0_path,
                                              bool seed_set,
                                              std::uint64_t seed) {
  if (!x0_path.empty()) return blgeo::SpdMatrix(load_matrix(x0_path));
  if (seed_set) return blgeo::SpdSampler(d.n(), seed).sample(0);
  return std::nullopt;
}

int run_solve(const std::string& path, const std::string& method, double tol,
              int max_iter, bool tol_set, bool max_iter_set,
              const std::string& x0_path, bool seed_set, std::uint64_t seed,
              const std::string& output) {
  const blgeo::BLDatum d = blgeo::validate_datum(blgeo::load_datum(path));

  if (method == "capacity") {
    const blgeo::KrausSet k =
        blgeo::build_scaling_operator(d, dimension_cap_from_env());
    blgeo::CapacityConfig cfg;
    if (tol_set) cfg.tol = tol;
    if (max_iter_set) cfg.max_iter = max_iter;
    const blgeo::CapacityResult res = blgeo::capacity(k, cfg);
    emit(blgeo::to_json(res), output);
    return res.converged ? kExitOk : kExitNotConverged;
  }

  blgeo::SolverConfig cfg;
  if (tol_set) cfg.tol = tol;
  if (max_iter_set) cfg.max_iter = max_iter;
  cfg.seed = seed;
  const std::optional<blgeo::SpdMatrix> x0 =
      initial_point(d, x0_path, seed_set, seed);
  const blgeo::SolveResult res =
      (method == "geodesic" || method == "geodesic_ascent")
          ? blgeo::solve_geodesic_ascent(d, cfg, x0)
          : blgeo::solve_fixed_point(d, cfg, x0);
  emit(blgeo::to_json(res), output);
  if (res.diverged) return kExitDiverged;
  return res.converged ? kExitOk : kExitNotConverged;
}

int run_compare(const std::string& path, double agree_tol,
                const std::string& output) {
  const blgeo::BLDatum d = blgeo::validate_datum(blgeo::load_datum(path));

  nlohmann::json j;
  std::vector<double> values;
  bool all_ok = true;

  // Each method gets its own cell; a failure (divergence, stall, singular
  // operator, dimension cap) marks the cell instead of aborting the rest.
  const auto cell = [&](const char* name, auto&& run) {
    try {
      run();
    } catch (const blgeo::Error& e) {
      j[name] = {{"failed", true}, {"error", e.what()}};
      all_ok = false;
    }
  };
  cell("fixed_point", [&] {
    const blgeo::SolveResult r = blgeo::solve_fixed_point(d);
    j["fixed_point"] = blgeo::to_json(r);
    if (r.converged)
      values.push_back(r.log_bl);
    else
      all_ok = false;
  });
  cell("geodesic_ascent", [&] {
    const blgeo::SolveResult r = blgeo::solve_geodesic_ascent(d);
    j["geodesic_ascent"] = blgeo::to_json(r);
    if (r.converged)
      values.push_back(r.log_bl);
    else
      all_ok = false;
  });
  cell("capacity", [&] {
    const blgeo::KrausSet k =
        blgeo::build_scaling_operator(d, dimension_cap_from_env());
    const blgeo::CapacityResult r = blgeo::capacity(k);
    j["capacity"] = blgeo::to_json(r);
    if (r.converged)
      values.push_back(blgeo::log_bl_from_capacity(r));
    else
      all_ok = false;
  });

  double max_gap = std::numeric_limits<double>::quiet_NaN();
  if (all_ok && values.size() == 3) {
    max_gap = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a)
      for (std::size_t b = a + 1; b < values.size(); ++b)
        max_gap = std::max(max_gap, std::abs(values[a] - values[b]));
  }
  const bool agree = all_ok && values.size() == 3 && max_gap <= agree_tol;
  j["max_gap"] = max_gap;
  j["agree_tol"] = agree_tol;
  j["agree"] = agree;
  emit(j, output);
  return agree ? kExitOk : kExitNotConverged;
}

int run_properties(const std::string& path, int samples, std::uint64_t seed,
                   double tol, const std::string& output) {
  std::optional<blgeo::BLDatum> d;
  if (!path.empty()) d = blgeo::load_datum(path);
  const std::vector<blgeo::PropertyReport> reports =
      blgeo::run_property_suite(d, samples, seed, tol);
  nlohmann::json j = nlohmann::json::array();
  int violations = 0;
  for (const auto& rep : reports) {
    violations += rep.violations;
    j.push_back(blgeo::to_json(rep));
  }
  emit(j, output);
  return violations == 0 ? kExitOk : kExitViolations;
}

int run_reduce(const std::string& path, const std::string& output) {
  const blgeo::BLDatum d = blgeo::validate_datum(blgeo::load_datum(path));
  const blgeo::KrausSet k =
      blgeo::build_scaling_operator(d, dimension_cap_from_env());
  emit(blgeo::to_json(k), output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brascamp-Lieb constants by geodesic optimization over SPD "
               "matrices"};
  app.require_subcommand(1);

  std::string datum_path;
  std::string output;
  std::string method = "fixed-point";
  std::string x0_path;
  double tol = 0.0;
  int max_iter = 0;
  std::uint64_t solve_seed = 0;
  int screen_samples = 50;
  std::uint64_t screen_seed = 0;
  int prop_samples = 1000;
  std::uint64_t prop_seed = 42;
  double agree_tol = 1e-4;
  double prop_tol = 1e-9;

  auto* validate = app.add_subcommand(
      "validate", "Screen a datum for feasibility of a finite BL constant");
  validate->add_option("datum", datum_path, "datum JSON file")->required();
  validate->add_option("--samples", screen_samples,
                       "random subspaces per dimension");
  validate->add_option("--seed", screen_seed, "RNG seed");
  validate->add_option("--output", output, "write the report here");

  auto* solve = app.add_subcommand(
      "solve", "Compute the BL constant with one solver");
  solve->add_option("datum", datum_path, "datum JSON file")->required();
  solve->add_option("--method", method, "solver to use")
      ->check(CLI::IsMember({"fixed-point", "fixed_point", "geodesic",
                             "geodesic_ascent", "capacity"}));
  auto* tol_opt = solve->add_option(
      "--tol", tol,
      "stopping tolerance (default 1e-10; capacity stops on a "
      "doubly-stochastic residual of 1e-8)");
  auto* iter_opt = solve->add_option(
      "--max-iter", max_iter, "iteration budget (default 10000; capacity "
      "100000)");
  solve->add_option("--x0", x0_path,
                    "JSON file with an SPD matrix to start from");
  auto* seed_opt = solve->add_option(
      "--seed", solve_seed, "seed for a random SPD start (ignored with --x0)");
  solve->add_option("--output", output, "write the result here");

  auto* compare = app.add_subcommand(
      "compare", "Run all three solvers and check they agree");
  compare->add_option("datum", datum_path, "datum JSON file")->required();
  compare->add_option("--agree-tol", agree_tol,
                      "largest allowed pairwise gap in log BL");
  compare->add_option("--output", output, "write the comparison here");

  auto* properties = app.add_subcommand(
      "properties", "Randomized checks of the geometry the solvers rely on");
  properties->add_option("datum", datum_path,
                         "datum JSON file (optional; datum-bound properties "
                         "are skipped without one)");
  properties->add_option("--samples", prop_samples, "samples per property");
  properties->add_option("--seed", prop_seed, "RNG seed");
  properties->add_option("--tol", prop_tol, "violation tolerance");
  properties->add_option("--output", output, "write the reports here");

  auto* reduce = app.add_subcommand(
      "reduce", "Emit the operator-scaling form of a datum");
  reduce->add_option("datum", datum_path, "datum JSON file")->required();
  reduce->add_option("--output", output, "write the operator here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate))
      return run_validate(datum_path, screen_samples, screen_seed, output);
    if (app.got_subcommand(solve))
      return run_solve(datum_path, method, tol, max_iter,
                       tol_opt->count() > 0, iter_opt->count() > 0, x0_path,
                       seed_opt->count() > 0, solve_seed, output);
    if (app.got_subcommand(compare))
      return run_compare(datum_path, agree_tol, output);
    if (app.got_subcommand(properties))
      return run_properties(datum_path, prop_samples, prop_seed, prop_tol,
                            output);
    if (app.got_subcommand(reduce)) return run_reduce(datum_path, output);
  } catch (const blgeo::DimensionCapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDimensionCap;
  } catch (const blgeo::NotConvergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const blgeo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
