#include "blgeo/json_io.hpp"

#include <fstream>

namespace blgeo {

namespace {

using nlohmann::json;

long long require_integer(const json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<long long>();
  throw Error(where +
              " must be an integer; exponents are exact fractions whose "
              "numerators become integer copy counts in the operator-scaling "
              "reduction, so floating-point values are not accepted");
}

}  // namespace

BLDatum datum_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("datum: top level must be an object");
  for (const auto& key : {"n", "maps", "p"})
    if (!j.contains(key))
      throw Error(std::string("datum: missing required key \"") + key + "\"");

  const long long n = require_integer(j.at("n"), "datum: \"n\"");
  if (n <= 0) throw Error("datum: \"n\" must be positive");

  const json& jmaps = j.at("maps");
  const json& jp = j.at("p");
  if (!jmaps.is_array() || jmaps.empty())
    throw Error("datum: \"maps\" must be a non-empty array of matrices");
  if (!jp.is_array() || jp.size() != jmaps.size())
    throw Error("datum: \"p\" must be an array with one exponent per map");

  std::vector<Eigen::MatrixXd> maps;
  maps.reserve(jmaps.size());
  for (std::size_t idx = 0; idx < jmaps.size(); ++idx) {
    const json& jm = jmaps[idx];
    const std::string where = "datum: maps[" + std::to_string(idx) + "]";
    if (!jm.is_array() || jm.empty())
      throw Error(where + " must be a non-empty array of rows");
    const std::size_t rows = jm.size();
    std::size_t cols = 0;
    Eigen::MatrixXd b;
    for (std::size_t r = 0; r < rows; ++r) {
      const json& jrow = jm[r];
      if (!jrow.is_array() || jrow.empty())
        throw Error(where + "[" + std::to_string(r) +
                    "] must be a non-empty array of numbers");
      if (r == 0) {
        cols = jrow.size();
        b.resize(rows, cols);
      } else if (jrow.size() != cols) {
        throw Error(where + " has ragged rows (row " + std::to_string(r) +
                    " has " + std::to_string(jrow.size()) + " entries, row 0 "
                    "has " + std::to_string(cols) + ")");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        if (!jrow[c].is_number())
          throw Error(where + "[" + std::to_string(r) + "][" +
                      std::to_string(c) + "] must be a number");
        b(r, c) = jrow[c].get<double>();
      }
    }
    maps.push_back(std::move(b));
  }

  std::vector<Rational> exponents;
  exponents.reserve(jp.size());
  for (std::size_t idx = 0; idx < jp.size(); ++idx) {
    const json& je = jp[idx];
    const std::string where = "datum: p[" + std::to_string(idx) + "]";
    if (!je.is_object() || !je.contains("num") || !je.contains("den"))
      throw Error(where + " must be an object {\"num\": int, \"den\": int}");
    const long long num = require_integer(je.at("num"), where + ".num");
    const long long den = require_integer(je.at("den"), where + ".den");
    if (den <= 0) throw Error(where + ".den must be positive");
    exponents.emplace_back(num, den);
  }

  return BLDatum(static_cast<int>(n), std::move(maps), exponents);
}

BLDatum load_datum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open datum file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
  try {
    return datum_from_json(j);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string verdict_name(FeasibilityVerdict v) {
  switch (v) {
    case FeasibilityVerdict::ConsistentWithFeasible:
      return "consistent_with_feasible";
    case FeasibilityVerdict::InfeasibleWitness:
      return "infeasible_witness";
    case FeasibilityVerdict::ScalingViolation:
      return "scaling_violation";
    case FeasibilityVerdict::RankDeficient:
      return "rank_deficient";
  }
  return "unknown";
}

nlohmann::json to_json(const FeasibilityReport& rep) {
  json j;
  j["verdict"] = verdict_name(rep.verdict);
  j["witness"] = rep.witness ? matrix_to_json(*rep.witness) : json(nullptr);
  j["checked_subspaces"] = rep.checked_subspaces;
  j["seed"] = rep.seed;
  return j;
}

nlohmann::json to_json(const SolveResult& res) {
  json j;
  j["method"] = res.method;
  j["log_bl"] = res.log_bl;
  j["optimizer_x"] =
      res.optimizer_x ? matrix_to_json(res.optimizer_x->mat()) : json(nullptr);
  json blocks = json::array();
  for (const auto& a : res.maximizer_a) blocks.push_back(matrix_to_json(a.mat()));
  j["maximizer_a"] = std::move(blocks);
  j["residual"] = res.residual;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["diverged"] = res.diverged;
  json trace = json::array();
  for (const auto& pt : res.trace)
    trace.push_back({{"iteration", pt.iteration},
                     {"objective", pt.objective},
                     {"residual", pt.residual}});
  j["trace"] = std::move(trace);
  return j;
}

nlohmann::json to_json(const CapacityResult& res) {
  json j;
  j["method"] = "capacity";
  j["log_cap"] = res.log_cap;
  j["log_bl"] = res.converged ? json(-0.5 * res.log_cap) : json(nullptr);
  j["ds_residual"] = res.ds_residual;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["left_scaling"] = matrix_to_json(res.left_scaling);
  j["right_scaling"] = matrix_to_json(res.right_scaling);
  return j;
}

nlohmann::json to_json(const PropertyReport& rep) {
  json j;
  j["property"] = rep.property;
  j["samples"] = rep.samples;
  j["violations"] = rep.violations;
  j["worst_margin"] = rep.worst_margin;
  j["seed"] = rep.seed;
  j["tolerance"] = rep.tolerance;
  return j;
}

nlohmann::json to_json(const KrausSet& k) {
  json j;
  j["input_dim"] = k.input_dim;
  j["output_dim"] = k.output_dim;
  j["c"] = k.c;
  j["m_prime"] = k.size();
  j["copy_map"] = k.copy_map;
  json mats = json::array();
  for (const auto& t : k.kraus) mats.push_back(matrix_to_json(t));
  j["kraus"] = std::move(mats);
  return j;
}

}  // namespace blgeo
