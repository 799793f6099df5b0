#pragma once

// JSON conversions shared by the serializers (private to the library and
// tools; the public headers do not depend on the JSON library).

#include <string>
#include <vector>

#include <json.hpp>

#include "mqgcs/convex_set.hpp"
#include "mqgcs/quadratic_form.hpp"

namespace mqgcs::json_util {

using Json = nlohmann::json;

inline Json FromVector(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Vector ToVector(const Json& j) {
  if (!j.is_array()) throw std::runtime_error("expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

/// {"shape": [rows, cols], "data": row-major values}
inline Json FromMatrix(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return Json{{"shape", {m.rows(), m.cols()}}, {"data", data}};
}

inline Matrix ToMatrix(const Json& j) {
  const auto& shape = j.at("shape");
  const auto& data = j.at("data");
  const long rows = shape.at(0).get<long>();
  const long cols = shape.at(1).get<long>();
  if (rows < 0 || cols < 0 || static_cast<long>(data.size()) != rows * cols) {
    throw std::runtime_error("matrix data does not match its shape");
  }
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) m(r, c) = data[r * cols + c].get<double>();
  }
  return m;
}

inline Json FromSet(const ConvexSet& set) {
  Json eqs = Json::array(), ineqs = Json::array(), quads = Json::array();
  for (const auto& c : set.equalities()) eqs.push_back({{"a", FromVector(c.a)}, {"b", c.b}});
  for (const auto& c : set.inequalities()) ineqs.push_back({{"a", FromVector(c.a)}, {"b", c.b}});
  for (const auto& g : set.quadratics()) quads.push_back(FromMatrix(g.coeffs()));
  return Json{{"eqs", eqs}, {"ineqs", ineqs}, {"quads", quads}};
}

inline bool IsSymmetric(const Matrix& m, double tol) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// `issues` collects asymmetric quadratic matrices (which are symmetrized).
inline ConvexSet ToSet(const Json& j, int dimension, const std::string& where,
                       std::vector<std::string>& issues) {
  ConvexSet set(dimension);
  auto linear = [&](const Json& c) {
    Vector a = ToVector(c.at("a"));
    if (a.size() != dimension) throw std::runtime_error(where + ": constraint dimension mismatch");
    return std::pair{a, c.at("b").get<double>()};
  };
  if (j.contains("eqs")) {
    for (const auto& c : j["eqs"]) {
      auto [a, b] = linear(c);
      set.AddEquality(a, b);
    }
  }
  if (j.contains("ineqs")) {
    for (const auto& c : j["ineqs"]) {
      auto [a, b] = linear(c);
      set.AddInequality(a, b);
    }
  }
  if (j.contains("quads")) {
    for (const auto& q : j["quads"]) {
      const Matrix m = ToMatrix(q);
      if (m.rows() != dimension + 1 || m.cols() != dimension + 1) {
        throw std::runtime_error(where + ": quadratic constraint dimension mismatch");
      }
      if (!IsSymmetric(m, kSymmetryTol)) {
        issues.push_back("asymmetric matrix in quadratic constraint of " + where);
      }
      try {
        set.AddQuadratic(QuadraticForm(m));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(where + ": " + e.what());
      }
    }
  }
  return set;
}

}  // namespace mqgcs::json_util
