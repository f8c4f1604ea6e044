#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qfilt {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

}  // namespace qfilt
