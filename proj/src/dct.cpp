#include "pcs/dct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pcs {

Eigen::VectorXd vectorize(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), m.rows(), m.cols()) = m;
  return v;
}

Eigen::MatrixXd devectorize(const Eigen::VectorXd& v, std::size_t block_size) {
  const auto b = static_cast<Eigen::Index>(block_size);
  if (v.size() != b * b) {
    throw std::invalid_argument("devectorize: length " + std::to_string(v.size()) +
                                " does not match block size " + std::to_string(block_size));
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), b, b);
}

Eigen::MatrixXd dct_matrix(std::size_t block_size) {
  if (block_size == 0) throw std::invalid_argument("dct_matrix: empty block");
  const auto b = static_cast<Eigen::Index>(block_size);
  const double n = static_cast<double>(block_size);
  Eigen::MatrixXd c(b, b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (Eigen::Index i = 0; i < b; ++i) {
      c(k, i) = scale * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
    }
  }
  return c;
}

Eigen::MatrixXd dct2_forward(const Eigen::MatrixXd& block) {
  if (block.rows() != block.cols()) throw std::invalid_argument("dct2_forward: block must be square");
  const Eigen::MatrixXd c = dct_matrix(block.rows());
  return c * block * c.transpose();
}

Eigen::MatrixXd dct2_inverse(const Eigen::MatrixXd& coeffs) {
  if (coeffs.rows() != coeffs.cols()) throw std::invalid_argument("dct2_inverse: block must be square");
  const Eigen::MatrixXd c = dct_matrix(coeffs.rows());
  return c.transpose() * coeffs * c;
}

Dct2Basis build_basis(std::size_t block_size) {
  if (block_size < 2) throw std::invalid_argument("build_basis: block size must be >= 2");
  const auto b = static_cast<Eigen::Index>(block_size);
  const Eigen::MatrixXd c = dct_matrix(block_size);

  Dct2Basis basis{block_size, Eigen::MatrixXd(b * b, b * b)};
  // Basis image (i, j) is the outer product of rows i and j of C.
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < b; ++j) {
      const Eigen::MatrixXd image = c.row(i).transpose() * c.row(j);
      basis.matrix.col(i * b + j) = vectorize(image);
    }
  }
  return basis;
}

}  // namespace pcs
