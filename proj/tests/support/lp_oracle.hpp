// Dense two-phase simplex with Bland's rule. Slow but simple enough to trust;
// used only to check the interior-point solver on small problems.
#ifndef PCS_TESTS_LP_ORACLE_HPP
#define PCS_TESTS_LP_ORACLE_HPP

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace pcs::testing {

struct LpResult {
  bool feasible = false;
  bool bounded = true;
  double objective = 0.0;
  Eigen::VectorXd x;
};

namespace detail {

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
      : m_(a.rows()), n_(a.cols()), t_(Eigen::MatrixXd::Zero(a.rows() + 1, a.cols() + a.rows() + 1)),
        basis_(a.rows()) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * a.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[i] = n_ + i;
    }
  }

  Eigen::Index rhs() const { return n_ + m_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  // Objective row = reduced costs of `cost` given the current basis.
  void set_cost(const Eigen::VectorXd& cost) {
    t_.row(m_).setZero();
    t_.row(m_).head(cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index j = basis_[i];
      const double cj = j < cost.size() ? cost(j) : 0.0;
      if (cj != 0.0) t_.row(m_) -= cj * t_.row(i);
    }
  }

  // Returns false when unbounded. Only the first `ncols` columns may enter.
  bool optimize(Eigen::Index ncols) {
    constexpr double kTol = 1e-11;
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < ncols; ++j) {
        if (t_(m_, j) < -kTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (t_(i, enter) <= kTol) continue;
        const double ratio = t_(i, rhs()) / t_(i, enter);
        if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  // Moves artificial variables out of the basis where possible.
  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective() const { return -t_(m_, rhs()); }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x(basis_[i]) = t_(i, rhs());
    }
    return x;
  }

 private:
  Eigen::Index m_, n_;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

// min c'x  s.t.  A x = b, x >= 0.
inline LpResult simplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  detail::Tableau tab(a, b);
  const Eigen::Index n = a.cols();

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + a.rows());
  phase1.tail(a.rows()).setOnes();
  tab.set_cost(phase1);
  tab.optimize(n + a.rows());

  LpResult out;
  out.feasible = tab.objective() <= 1e-9 * std::max(1.0, b.cwiseAbs().sum());
  if (!out.feasible) return out;

  tab.drive_out_artificials();
  tab.set_cost(c);
  out.bounded = tab.optimize(n);
  out.x = tab.solution();
  out.objective = c.dot(out.x);
  return out;
}

// Weighted basis pursuit min sum w_i |s_i| s.t. theta s = y through the split
// s = u - v with u, v >= 0.
inline LpResult weighted_basis_pursuit(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& w) {
  const Eigen::Index n = theta.cols();
  Eigen::MatrixXd a(theta.rows(), 2 * n);
  a << theta, -theta;
  Eigen::VectorXd c(2 * n);
  c << w, w;
  LpResult r = simplex(a, y, c);
  if (r.feasible && r.bounded) r.x = (r.x.head(n) - r.x.tail(n)).eval();
  return r;
}

inline LpResult basis_pursuit(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y) {
  return weighted_basis_pursuit(theta, y, Eigen::VectorXd::Ones(theta.cols()));
}

}  // namespace pcs::testing

#endif  // PCS_TESTS_LP_ORACLE_HPP
