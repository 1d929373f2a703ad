#ifndef MSAMP_COMMON_HPP
#define MSAMP_COMMON_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace msamp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: I/O failure, malformed file, dimension mismatch, violated precondition.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: rank collapse, eigen-solver failure, divergence.
class NumericError : public Error {
public:
    using Error::Error;
};

inline bool all_finite(const Eigen::Ref<const Matrix>& m) {
    return m.allFinite();
}

} // namespace msamp

#endif
