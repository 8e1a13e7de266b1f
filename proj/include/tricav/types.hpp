#ifndef TRICAV_TYPES_HPP
#define TRICAV_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tricav {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix8c = Eigen::Matrix<std::complex<Scalar>, 8, 8>;
template <typename Scalar>
using Vector8c = Eigen::Matrix<std::complex<Scalar>, 8, 1>;

using Mat8c = Matrix8c<double>;
using Vec8c = Vector8c<double>;
using Mat8d = Eigen::Matrix<double, 8, 8>;
using Mat6d = Eigen::Matrix<double, 6, 6>;
using Vec6d = Eigen::Matrix<double, 6, 1>;

/// Positions of the fluctuation variables in every 8-component vector and
/// matrix of the library: (a1, a1+, a2, a2+, a3, a3+, b, b+).
namespace idx {
inline constexpr int a1 = 0;
inline constexpr int a1p = 1;
inline constexpr int a2 = 2;
inline constexpr int a2p = 3;
inline constexpr int a3 = 4;
inline constexpr int a3p = 5;
inline constexpr int b = 6;
inline constexpr int bp = 7;
}  // namespace idx

/// Positions in the quadrature basis (X1, Y1, X2, Y2, X3, Y3, X0, Y0).
/// The first six entries are the signal quadratures used by the witnesses.
namespace quad {
inline constexpr int X1 = 0;
inline constexpr int Y1 = 1;
inline constexpr int X2 = 2;
inline constexpr int Y2 = 3;
inline constexpr int X3 = 4;
inline constexpr int Y3 = 5;
inline constexpr int X0 = 6;
inline constexpr int Y0 = 7;
}  // namespace quad

/// Bad input: parameters, configuration, or a request the model cannot serve.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: singular resolvents, marginal states, solver
/// non-convergence, divergent ensembles.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tricav

#endif  // TRICAV_TYPES_HPP
