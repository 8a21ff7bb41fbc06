#include "pcs/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcs {

namespace {

constexpr double kIpmTolerance = 1e-9;
// A stalled path is still accepted at this merit; the objective is then
// accurate far beyond the 1e-6 relative contract.
constexpr double kIpmAcceptable = 1e-7;
// Iterations without a better merit before the path is considered stalled.
constexpr int kStallLimit = 5;
constexpr double kStepFraction = 0.995;
constexpr double kRwl1StopDistance = 1e-8;

void check_shapes(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y) {
  if (y.size() == 0) throw std::invalid_argument("empty measurement vector");
  if (theta.rows() != y.size()) {
    throw std::invalid_argument("theta has " + std::to_string(theta.rows()) + " rows but y has " +
                                std::to_string(y.size()) + " entries");
  }
  if (theta.rows() > theta.cols()) throw std::invalid_argument("theta must have M <= N");
  if (!theta.allFinite() || !y.allFinite()) throw std::invalid_argument("non-finite input");
}

// Largest step in [0, 1] keeping x + a dx >= 0.
double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
  double step = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dx[i] < 0.0) step = std::min(step, -x[i] / dx[i]);
  }
  return step;
}

// Scaled solution of min 1'(u + v) s.t. theta (u - v) = b, u, v >= 0, with
// ||b|| = 1. `lambda` is the dual estimate scaled to be exactly feasible.
struct SplitLpResult {
  Eigen::VectorXd s;
  Eigen::VectorXd lambda;
  int iterations = 0;
  bool converged = false;
};

class NormalEquations {
 public:
  explicit NormalEquations(Eigen::Index m) : k_(m, m) {}

  // Factorizes theta diag(d) theta'. Falls back to a lightly regularized
  // LDL' when the late interior-point iterates make the matrix ill-conditioned.
  void factorize(const Eigen::MatrixXd& theta, const Eigen::VectorXd& d) {
    scaled_ = theta * d.cwiseSqrt().asDiagonal();
    k_.setZero();
    k_.selfadjointView<Eigen::Lower>().rankUpdate(scaled_);
    llt_.compute(k_);
    use_ldlt_ = llt_.info() != Eigen::Success;
    if (use_ldlt_) {
      const double shift = 1e-14 * std::max(1.0, k_.diagonal().maxCoeff());
      k_.diagonal().array() += shift;
      ldlt_.compute(k_);
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    return use_ldlt_ ? Eigen::VectorXd(ldlt_.solve(rhs)) : Eigen::VectorXd(llt_.solve(rhs));
  }

 private:
  Eigen::MatrixXd k_;
  Eigen::MatrixXd scaled_;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt_;
  Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower> ldlt_;
  bool use_ldlt_ = false;
};

// Exact refit on the support identified by the interior-point iterate. An
// optimal vertex has at most M nonzeros; solving theta_S s_S = b there
// removes the O(mu) error of the central path.
bool polish(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b, const Eigen::VectorXd& u,
            const Eigen::VectorXd& v, const Eigen::VectorXd& zu, const Eigen::VectorXd& zv,
            Eigen::VectorXd& s) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] > zu[i] || v[i] > zv[i]) support.push_back(i);
  }
  if (support.empty() || static_cast<Eigen::Index>(support.size()) > theta.rows()) return false;

  Eigen::MatrixXd sub(theta.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = theta.col(support[k]);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  if (qr.rank() < sub.cols()) return false;
  const Eigen::VectorXd coef = qr.solve(b);

  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(s.size());
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double value = coef[static_cast<Eigen::Index>(k)];
    const double reference = s[support[k]];
    if (value * reference <= 0.0) return false;  // sign pattern must survive
    candidate[support[k]] = value;
  }
  const double old_residual = (theta * s - b).norm();
  const double new_residual = (theta * candidate - b).norm();
  if (new_residual > std::max(old_residual, 1e-13)) return false;
  const double old_obj = s.lpNorm<1>();
  if (candidate.lpNorm<1>() > old_obj + 1e-9 * (1.0 + old_obj)) return false;
  s = std::move(candidate);
  return true;
}

SplitLpResult solve_split_lp(const Eigen::MatrixXd& theta, const Eigen::VectorXd& b, int max_iterations) {
  const Eigen::Index m = theta.rows();
  const Eigen::Index n = theta.cols();

  // theta must have full row rank for the equality constraints to be usable.
  const Eigen::MatrixXd gram = theta * theta.transpose();
  const Eigen::LLT<Eigen::MatrixXd> gram_llt(gram);
  if (gram_llt.info() != Eigen::Success || gram_llt.rcond() < 1e-13) {
    throw SolverError("theta is rank deficient");
  }

  // Mehrotra starting point. For the split problem A = [theta, -theta] and
  // c = 1, so the least-norm primal point is [g, -g] and the dual is zero.
  const Eigen::VectorXd g = theta.transpose() * gram_llt.solve(b) / 2.0;
  Eigen::VectorXd u = g;
  Eigen::VectorXd v = -g;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd zu = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd zv = Eigen::VectorXd::Ones(n);
  {
    const double shift_x = std::max(-1.5 * std::min(u.minCoeff(), v.minCoeff()), 0.0);
    u.array() += shift_x;
    v.array() += shift_x;
    const double xz = u.dot(zu) + v.dot(zv);
    const double dx = 0.5 * xz / (zu.sum() + zv.sum());
    const double dz = 0.5 * xz / (u.sum() + v.sum());
    u.array() += dx;
    v.array() += dx;
    zu.array() += dz;
    zv.array() += dz;
  }

  NormalEquations normal(m);
  SplitLpResult result;
  const double dual_scale = 1.0 + std::sqrt(2.0 * static_cast<double>(n));

  // Late iterates can lose primal accuracy once the normal equations become
  // badly conditioned, so the best iterate seen is what gets returned.
  struct Iterate {
    Eigen::VectorXd u, v, lambda, zu, zv;
  } best;
  double best_merit = std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  for (int iter = 0; iter <= max_iterations; ++iter) {
    const Eigen::VectorXd t_lambda = theta.transpose() * lambda;
    const Eigen::VectorXd rb = theta * (u - v) - b;
    const Eigen::VectorXd ru = (t_lambda + zu).array() - 1.0;
    const Eigen::VectorXd rv = (zv - t_lambda).array() - 1.0;
    const double primal_obj = u.sum() + v.sum();
    const double dual_obj = b.dot(lambda);
    const double mu = (u.dot(zu) + v.dot(zv)) / (2.0 * static_cast<double>(n));

    const double merit = std::max({rb.norm() / 2.0,
                                   std::sqrt(ru.squaredNorm() + rv.squaredNorm()) / dual_scale,
                                   std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj))});
    result.iterations = iter;
    if (merit < best_merit) {
      best_merit = merit;
      best = {u, v, lambda, zu, zv};
      since_improvement = 0;
    } else if (++since_improvement >= kStallLimit) {
      break;
    }
    if (merit <= kIpmTolerance) {
      result.converged = true;
      break;
    }
    if (iter == max_iterations) break;

    const Eigen::VectorXd du_scale = u.cwiseQuotient(zu);
    const Eigen::VectorXd dv_scale = v.cwiseQuotient(zv);
    normal.factorize(theta, du_scale + dv_scale);

    // Solves the Newton system for complementarity targets (cu, cv).
    auto newton = [&](const Eigen::VectorXd& cu, const Eigen::VectorXd& cv, Eigen::VectorXd& du,
                      Eigen::VectorXd& dv, Eigen::VectorXd& dl, Eigen::VectorXd& dzu, Eigen::VectorXd& dzv) {
      const Eigen::VectorXd pu = (cu + u.cwiseProduct(ru)).cwiseQuotient(zu);
      const Eigen::VectorXd pv = (cv + v.cwiseProduct(rv)).cwiseQuotient(zv);
      dl = normal.solve(-rb - theta * (pu - pv));
      const Eigen::VectorXd t_dl = theta.transpose() * dl;
      du = pu + du_scale.cwiseProduct(t_dl);
      dv = pv - dv_scale.cwiseProduct(t_dl);
      dzu = -ru - t_dl;
      dzv = -rv + t_dl;
    };

    Eigen::VectorXd du, dv, dl, dzu, dzv;
    newton(-u.cwiseProduct(zu), -v.cwiseProduct(zv), du, dv, dl, dzu, dzv);
    const double ap_aff = std::min(max_step(u, du), max_step(v, dv));
    const double ad_aff = std::min(max_step(zu, dzu), max_step(zv, dzv));
    const double mu_aff = ((u + ap_aff * du).dot(zu + ad_aff * dzu) + (v + ap_aff * dv).dot(zv + ad_aff * dzv)) /
                          (2.0 * static_cast<double>(n));
    const double sigma = std::pow(mu_aff / mu, 3.0);

    const Eigen::VectorXd cu = (sigma * mu - u.array() * zu.array() - du.array() * dzu.array()).matrix();
    const Eigen::VectorXd cv = (sigma * mu - v.array() * zv.array() - dv.array() * dzv.array()).matrix();
    newton(cu, cv, du, dv, dl, dzu, dzv);

    const double ap = std::min(1.0, kStepFraction * std::min(max_step(u, du), max_step(v, dv)));
    const double ad = std::min(1.0, kStepFraction * std::min(max_step(zu, dzu), max_step(zv, dzv)));
    if (ap < 1e-12 && ad < 1e-12) break;  // stalled
    u += ap * du;
    v += ap * dv;
    lambda += ad * dl;
    zu += ad * dzu;
    zv += ad * dzv;
  }

  if (!result.converged && best_merit <= kIpmAcceptable) result.converged = true;
  u = std::move(best.u);
  v = std::move(best.v);
  lambda = std::move(best.lambda);
  result.s = u - v;
  const bool polished = polish(theta, b, u, v, best.zu, best.zv, result.s);

  // Scale the dual into exact feasibility so b'lambda is a true lower bound.
  const double dual_inf = (theta.transpose() * lambda).lpNorm<Eigen::Infinity>();
  result.lambda = dual_inf > 1.0 ? Eigen::VectorXd(lambda / dual_inf) : lambda;
  if (!result.converged && polished) {
    const double obj = result.s.lpNorm<1>();
    result.converged = obj - b.dot(result.lambda) <= 1e-9 * (1.0 + obj);
  }
  return result;
}

SolveReport finish_report(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, Eigen::VectorXd s,
                          double objective, double dual_bound, int iterations, bool solver_ok,
                          const SolverConfig& cfg) {
  SolveReport report;
  report.residual_norm = (y - theta * s).norm();
  report.coefficients = std::move(s);
  report.objective = objective;
  report.duality_gap = objective - dual_bound;
  report.iterations_used = iterations;
  report.converged = solver_ok && report.residual_norm <= cfg.feasibility_tol * y.norm();
  return report;
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::l1: return "l1";
    case Method::weighted_l1: return "weighted_l1";
    case Method::rwl1: return "rwl1";
    case Method::omp: return "omp";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::l1, Method::weighted_l1, Method::rwl1, Method::omp}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method: " + std::string(name));
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (rwl1_iterations < 1) throw std::invalid_argument("rwl1_iterations must be >= 1");
  if (!(feasibility_tol > 0.0)) throw std::invalid_argument("feasibility_tol must be positive");
  if (max_inner_iterations < 1) throw std::invalid_argument("max_inner_iterations must be >= 1");
  if (omp_sparsity && *omp_sparsity < 1) throw std::invalid_argument("omp_sparsity must be >= 1");
}

SolveReport solve_l1(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const SolverConfig& cfg) {
  cfg.validate();
  check_shapes(theta, y);
  const double y_norm = y.norm();
  if (y_norm == 0.0) {
    return finish_report(theta, y, Eigen::VectorXd::Zero(theta.cols()), 0.0, 0.0, 0, true, cfg);
  }

  if (theta.rows() == theta.cols()) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(theta);
    if (!lu.isInvertible()) throw SolverError("theta is rank deficient");
    Eigen::VectorXd s = lu.solve(y);
    const double obj = s.lpNorm<1>();
    return finish_report(theta, y, std::move(s), obj, obj, 1, true, cfg);
  }

  // The problem is positively homogeneous in y, so solve at unit scale.
  const SplitLpResult lp = solve_split_lp(theta, y / y_norm, cfg.max_inner_iterations);
  const Eigen::VectorXd s = lp.s * y_norm;
  const double obj = s.lpNorm<1>();
  const double bound = y.dot(lp.lambda);
  return finish_report(theta, y, s, obj, bound, lp.iterations, lp.converged, cfg);
}

SolveReport solve_weighted_l1(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w_inv, const SolverConfig& cfg) {
  check_shapes(theta, y);
  if (w_inv.size() != theta.cols()) throw std::invalid_argument("weight vector length must equal N");
  if (!w_inv.allFinite() || (w_inv.array() <= 0.0).any()) {
    throw std::invalid_argument("inverse weights must be finite and strictly positive");
  }

  const Eigen::MatrixXd scaled = theta * w_inv.asDiagonal();
  SolveReport z = solve_l1(scaled, y, cfg);
  // Map back from z = W s.
  Eigen::VectorXd s = w_inv.cwiseProduct(z.coefficients);
  SolveReport report = finish_report(theta, y, std::move(s), z.objective, z.objective - z.duality_gap,
                                     z.iterations_used, z.converged, cfg);
  return report;
}

SolveReport solve_rwl1(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const SolverConfig& cfg) {
  cfg.validate();
  check_shapes(theta, y);
  const double y_norm = y.norm();
  if (y_norm == 0.0) {
    SolveReport zero = finish_report(theta, y, Eigen::VectorXd::Zero(theta.cols()), 0.0, 0.0, 0, true, cfg);
    zero.iterates.push_back(zero.coefficients);
    return zero;
  }

  const Eigen::VectorXd b = y / y_norm;
  SolveReport current = solve_l1(theta, b, cfg);
  std::vector<Eigen::VectorXd> iterates{current.coefficients * y_norm};
  int rounds = 1;
  for (; rounds < cfg.rwl1_iterations; ++rounds) {
    const Eigen::VectorXd w_inv = current.coefficients.cwiseAbs().array() + cfg.epsilon;
    SolveReport next = solve_weighted_l1(theta, b, w_inv, cfg);
    const double change = (next.coefficients - current.coefficients).lpNorm<Eigen::Infinity>();
    current = std::move(next);
    iterates.push_back(current.coefficients * y_norm);
    if (change < kRwl1StopDistance) {
      ++rounds;
      break;
    }
  }

  Eigen::VectorXd s = current.coefficients * y_norm;
  const double obj = s.lpNorm<1>();
  SolveReport report = finish_report(theta, y, std::move(s), obj, obj, rounds, current.converged, cfg);
  report.duality_gap = current.duality_gap * y_norm;
  report.iterates = std::move(iterates);
  return report;
}

SolveReport solve_omp(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const SolverConfig& cfg) {
  cfg.validate();
  check_shapes(theta, y);
  const Eigen::Index m = theta.rows();
  const Eigen::Index n = theta.cols();
  const Eigen::VectorXd col_norms = theta.colwise().norm().transpose();
  if ((col_norms.array() == 0.0).any()) throw std::invalid_argument("theta has a zero column");

  const Eigen::Index max_atoms =
      std::min<Eigen::Index>(cfg.omp_sparsity ? *cfg.omp_sparsity : std::min(m, n), std::min(m, n));
  const double target = cfg.feasibility_tol * y.norm();

  std::vector<Eigen::Index> active;
  std::vector<bool> in_active(static_cast<std::size_t>(n), false);
  Eigen::VectorXd coef;
  Eigen::VectorXd residual = y;

  auto snapshot = [&] {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < active.size(); ++k) s[active[k]] = coef[static_cast<Eigen::Index>(k)];
    return s;
  };

  while (static_cast<Eigen::Index>(active.size()) < max_atoms && residual.norm() > target) {
    const Eigen::VectorXd corr = (theta.transpose() * residual).cwiseAbs().cwiseQuotient(col_norms);
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < n; ++j) {
      if (corr[j] > corr[best]) best = j;  // strict: lowest index wins ties
    }
    if (in_active[static_cast<std::size_t>(best)]) {
      Eigen::VectorXd s = snapshot();
      const double obj = s.lpNorm<1>();
      throw SolverError("omp selected atom " + std::to_string(best) + " twice",
                        finish_report(theta, y, std::move(s), obj, obj,
                                      static_cast<int>(active.size()), false, cfg));
    }
    active.push_back(best);
    in_active[static_cast<std::size_t>(best)] = true;

    Eigen::MatrixXd sub(m, static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = theta.col(active[k]);
    coef = sub.householderQr().solve(y);
    residual = y - sub * coef;
  }

  Eigen::VectorXd s = active.empty() ? Eigen::VectorXd::Zero(n) : snapshot();
  const double obj = s.lpNorm<1>();
  return finish_report(theta, y, std::move(s), obj, obj, static_cast<int>(active.size()), true, cfg);
}

SolveReport solve(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const SolverConfig& cfg,
                  const Eigen::VectorXd* w_inv) {
  switch (cfg.method) {
    case Method::l1: return solve_l1(theta, y, cfg);
    case Method::weighted_l1:
      if (!w_inv) throw std::invalid_argument("weighted_l1 requires inverse weights");
      return solve_weighted_l1(theta, y, *w_inv, cfg);
    case Method::rwl1: return solve_rwl1(theta, y, cfg);
    case Method::omp: return solve_omp(theta, y, cfg);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace pcs
