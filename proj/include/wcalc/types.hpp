#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wcalc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Vector field sampled on the atoms of an associated EmpiricalMeasure,
// one column per atom.
using VectorField = Eigen::MatrixXd;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a verified mathematical inequality or identity failed
struct CheckError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw CheckError(msg);
}

}  // namespace wcalc
