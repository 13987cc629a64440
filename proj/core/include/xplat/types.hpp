#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace xplat {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2cd;

/// Largest register the dense simulator accepts.
inline constexpr int kMaxQubits = 12;

/// Tolerance for exact-mode assertions (norms, traces, unitarity).
inline constexpr double kExactTol = 1e-10;

// Error hierarchy. Every failure the library reports derives from Error so
// callers can catch one type at the boundary (the CLI maps them to exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint64_t dim_of(int n) { return std::uint64_t{1} << n; }

}  // namespace xplat
