#pragma once

#include <complex>

#include <Eigen/Dense>

namespace hsieve {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// max |P^2 - P|
inline double idempotence_residual(const Eigen::MatrixXcd& p) { return (p * p - p).cwiseAbs().maxCoeff(); }

// max |P - P^dagger|
inline double hermiticity_residual(const Eigen::MatrixXcd& p) { return (p - p.adjoint()).cwiseAbs().maxCoeff(); }

// max |U U^dagger - 1|
inline double unitarity_residual(const Eigen::MatrixXcd& u) {
  return (u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

// tr(A B) without forming the product.
inline std::complex<double> trace_of_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a.transpose().cwiseProduct(b).sum();
}

}  // namespace hsieve
