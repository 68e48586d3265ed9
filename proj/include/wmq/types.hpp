#pragma once

#include <Eigen/Dense>
#include <complex>

namespace wmq {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;
using Complex = std::complex<double>;
using IntMatrix = Matrix<int>;
using CMatrix = Matrix<Complex>;
using CVector = Vector<Complex>;

}  // namespace wmq
