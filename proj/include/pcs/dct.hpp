#ifndef PCS_DCT_HPP
#define PCS_DCT_HPP

#include <cstddef>

#include <Eigen/Dense>

namespace pcs {

// Vectorization is row-major everywhere in this library: v[i * B + j] = m(i, j).
// The sparsifying basis, the CSF weight vector and the solver domain all
// share this ordering.

Eigen::VectorXd vectorize(const Eigen::MatrixXd& m);
Eigen::MatrixXd devectorize(const Eigen::VectorXd& v, std::size_t block_size);

/// B x B orthonormal DCT-II matrix C with C(k, n) = a(k) cos(pi (2n + 1) k / 2B).
Eigen::MatrixXd dct_matrix(std::size_t block_size);

/// Separable orthonormal 2-D DCT-II. Coefficient (0, 0) is the DC term.
Eigen::MatrixXd dct2_forward(const Eigen::MatrixXd& block);
Eigen::MatrixXd dct2_inverse(const Eigen::MatrixXd& coeffs);

/// The sparsifying basis Psi as an explicit N x N matrix (N = B^2).
/// Column i * B + j is the vectorized basis image of frequency (i, j), so
/// vectorize(x) == matrix * vectorize(dct2_forward(x)).
struct Dct2Basis {
  std::size_t block_size = 0;
  Eigen::MatrixXd matrix;

  std::size_t dimension() const { return block_size * block_size; }
};

Dct2Basis build_basis(std::size_t block_size);

}  // namespace pcs

#endif  // PCS_DCT_HPP
