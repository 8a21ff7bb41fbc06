#ifndef PCS_SOLVERS_HPP
#define PCS_SOLVERS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pcs {

enum class Method { l1, weighted_l1, rwl1, omp };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

struct SolverConfig {
  Method method = Method::l1;
  /// Stability offset in the reweighting rule w = 1 / (|s| + epsilon). The
  /// problem is scaled so that ||y||_2 = 1 before reweighting.
  double epsilon = 0.1;
  /// Total number of l1 solves in a reweighted run, the unweighted one included.
  int rwl1_iterations = 4;
  /// Largest accepted ||y - theta s||_2 / ||y||_2.
  double feasibility_tol = 1e-6;
  /// OMP stops after this many atoms; unset means min(M, N).
  std::optional<int> omp_sparsity;
  /// Interior-point iteration budget per l1 solve.
  int max_inner_iterations = 100;

  void validate() const;
};

struct SolveReport {
  Eigen::VectorXd coefficients;
  double residual_norm = 0.0;
  int iterations_used = 0;
  /// l1 norm of the solution, or the weighted l1 norm for weighted solves.
  double objective = 0.0;
  /// Primal objective minus the dual bound, in the same units as `objective`.
  double duality_gap = 0.0;
  bool converged = false;
  /// Solution after each reweighting round (reweighted solver only).
  std::vector<Eigen::VectorXd> iterates;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, std::optional<SolveReport> partial = std::nullopt)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  /// Best iterate available when the failure was detected, if any.
  const std::optional<SolveReport>& partial() const { return partial_; }

 private:
  std::optional<SolveReport> partial_;
};

/// Basis pursuit: min ||s||_1 subject to theta s = y.
///
/// Solved as a linear program over the split s = u - v with a
/// Mehrotra predictor-corrector interior-point method, followed by an
/// exact least-squares refit on the identified support. A square theta is
/// solved directly since its feasible set is a single point.
SolveReport solve_l1(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const SolverConfig& cfg);

/// min sum_i |s_i| / w_inv[i] subject to theta s = y, computed as plain l1
/// over z with the scaled system (theta Diag(w_inv)) z = y, then s = w_inv .* z.
SolveReport solve_weighted_l1(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w_inv, const SolverConfig& cfg);

/// Iteratively reweighted l1. Round 0 is unweighted; each later round sets
/// w_inv = |s| + epsilon from the previous solution.
SolveReport solve_rwl1(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const SolverConfig& cfg);

/// Orthogonal matching pursuit with a least-squares refit on every step.
SolveReport solve_omp(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const SolverConfig& cfg);

/// Dispatches on cfg.method. `w_inv` is required for weighted_l1.
SolveReport solve(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const SolverConfig& cfg,
                  const Eigen::VectorXd* w_inv = nullptr);

}  // namespace pcs

#endif  // PCS_SOLVERS_HPP
