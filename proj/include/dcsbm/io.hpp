#pragma once

// JSON and CSV formats. Every index in these formats is 1-based.
//
//   ParameterSystem  {"n": int, "K": int, "z": [int], "theta": [float], "B": [[float]]}
//   Partition        {"n": int, "blocks": [[int]]}
//   GaugeTransform   {"perm": [int], "scale": [float]}
//   RecoveryReport   system fields + {"residual", "witness_counts", "theta_spread", "flags"}
//   Matrix CSV       n lines of n comma-separated numbers, written with %.17g

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dcsbm/counterexamples.hpp"
#include "dcsbm/equivalence.hpp"
#include "dcsbm/error.hpp"
#include "dcsbm/model.hpp"
#include "dcsbm/partitions.hpp"
#include "dcsbm/recovery.hpp"

namespace dcsbm::io {

using nlohmann::json;

namespace detail {

template <typename T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParseError, std::string("missing field \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("field \"") + key + "\": " + e.what());
  }
}

inline json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

inline json to_json(const ParameterSystem& sys) {
  json z = json::array();
  for (int label : sys.z.labels) z.push_back(label + 1);
  return {{"n", sys.n()},
          {"K", sys.K()},
          {"z", std::move(z)},
          {"theta", detail::vector_json(sys.theta)},
          {"B", detail::matrix_json(sys.b)}};
}

/// Parses and validates; failures raise kParseError or kInvalidSystem.
inline ParameterSystem system_from_json(const json& j, double rank_tol = kDefaultRankTol) {
  const int n = detail::get<int>(j, "n");
  const int K = detail::get<int>(j, "K");
  const auto z = detail::get<std::vector<int>>(j, "z");
  const auto theta = detail::get<std::vector<double>>(j, "theta");
  const auto b = detail::get<std::vector<std::vector<double>>>(j, "B");

  if (n < 1 || K < 1) throw Error(ErrorCode::kInvalidSystem, "n and K must be positive");
  if (static_cast<int>(z.size()) != n) throw Error(ErrorCode::kInvalidSystem, "z length != n");
  if (static_cast<int>(theta.size()) != n) throw Error(ErrorCode::kInvalidSystem, "theta length != n");
  if (static_cast<int>(b.size()) != K) throw Error(ErrorCode::kInvalidSystem, "B must have K rows");

  ParameterSystem sys;
  sys.z.K = K;
  for (int label : z) {
    if (label < 1 || label > K) throw Error(ErrorCode::kInvalidSystem, "labels must lie in 1..K");
    sys.z.labels.push_back(label - 1);
  }
  sys.theta = Eigen::Map<const Vector>(theta.data(), n);
  sys.b.resize(K, K);
  for (int k = 0; k < K; ++k) {
    if (static_cast<int>(b[k].size()) != K) throw Error(ErrorCode::kInvalidSystem, "B must be K x K");
    for (int l = 0; l < K; ++l) sys.b(k, l) = b[k][l];
  }
  require_valid(sys, rank_tol);
  return sys;
}

inline json to_json(const Partition& p) {
  json blocks = json::array();
  for (const auto& block : p.blocks()) {
    json b = json::array();
    for (int i : block) b.push_back(i + 1);
    blocks.push_back(std::move(b));
  }
  return {{"n", p.n()}, {"blocks", std::move(blocks)}};
}

inline Partition partition_from_json(const json& j) {
  const int n = detail::get<int>(j, "n");
  auto blocks = detail::get<std::vector<std::vector<int>>>(j, "blocks");
  for (auto& block : blocks) {
    for (int& i : block) --i;
  }
  try {
    return Partition(n, std::move(blocks));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.detail());
  }
}

inline json to_json(const GaugeTransform& g) {
  json perm = json::array();
  for (int image : g.perm) perm.push_back(image + 1);
  return {{"perm", std::move(perm)}, {"scale", g.scale}};
}

inline GaugeTransform transform_from_json(const json& j) {
  GaugeTransform g;
  g.perm = detail::get<std::vector<int>>(j, "perm");
  for (int& image : g.perm) --image;
  g.scale = detail::get<std::vector<double>>(j, "scale");
  validate_transform(g);
  return g;
}

inline json to_json(const RecoveryReport& r) {
  json out = to_json(r.system);
  out["residual"] = r.residual;
  out["diagonal"] = detail::vector_json(r.diagonal);
  out["witness_counts"] = r.witness_counts;
  out["theta_spread"] = r.theta_spread;
  out["flags"] = r.flags;
  return out;
}

inline json to_json(const CounterexampleVerification& v) {
  json out = {{"systems_valid", v.systems_valid},
              {"same_offdiag", v.same_offdiag},
              {"inequivalent", v.inequivalent},
              {"passed", v.passed()}};
  out["difference"] = v.difference ? json(std::string(to_string(*v.difference))) : json(nullptr);
  if (v.b_differs) out["b_differs"] = *v.b_differs;
  return out;
}

inline json to_json(const CounterexamplePair& pair) {
  return {{"kind", std::string(to_string(pair.kind))},
          {"system1", to_json(pair.sys1)},
          {"system2", to_json(pair.sys2)}};
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << format_double(m(r, c));
    }
    os << '\n';
  }
}

inline void write_csv(const std::string& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kParseError, "cannot open " + path + " for writing");
  write_csv(os, m);
  if (!os) throw Error(ErrorCode::kParseError, "failed writing " + path);
}

/// Reads a square matrix; blank lines are skipped.
inline Matrix read_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError, "bad number \"" + cell + "\" in row " +
                                                std::to_string(rows.size() + 1));
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw Error(ErrorCode::kParseError, "bad number \"" + cell + "\"");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw Error(ErrorCode::kParseError, "empty matrix");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[r].size()) != n) {
      throw Error(ErrorCode::kParseError, "matrix is not square (row " + std::to_string(r + 1) + ")");
    }
    for (int c = 0; c < n; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

inline Matrix read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kParseError, "cannot open " + path);
  return read_csv(is);
}

inline json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kParseError, "cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

}  // namespace dcsbm::io
