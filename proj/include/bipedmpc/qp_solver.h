#pragma once

#include <optional>
#include <vector>

#include "bipedmpc/rigidmath.h"

namespace bipedmpc {

/// minimize ½ uᵀ h u + fᵀ u
/// s.t.     c_lower <= C u <= c_upper   (entries may be ±infinity)
///          A_eq u = b_eq
struct QpProblem {
  MatX h;
  VecX f;
  MatX c;
  VecX c_lower;
  VecX c_upper;
  MatX a_eq;
  VecX b_eq;

  int num_variables() const { return static_cast<int>(f.size()); }
  /// Throws std::invalid_argument if shapes or bound ordering are wrong.
  void validate() const;
  double objective(const VecX& u) const { return 0.5 * u.dot(h * u) + f.dot(u); }
};

enum class QpStatus { kOptimal, kMaxIterations, kInfeasible };
const char* to_string(QpStatus status);

struct QpSolution {
  VecX u;
  QpStatus status = QpStatus::kMaxIterations;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  double objective = 0.0;
  double wall_time = 0.0;  // seconds
  bool polished = false;

  // Multipliers: `lower_dual`/`upper_dual` are >= 0 and attach to the
  // c_lower / c_upper sides of each row; `eq_dual` to the equality rows.
  VecX lower_dual;
  VecX upper_dual;
  VecX eq_dual;

  /// Scaled infeasibility after each interior-point iteration. The Newton
  /// step shrinks the linear residuals by exactly (1 - step), so this is
  /// non-increasing.
  std::vector<double> residual_history;

  // Internal primal-dual iterate, used to warm start the next solve.
  VecX slack;
  VecX ineq_dual;
};

struct QpSettings {
  double tolerance = 1e-6;
  int max_iterations = 50;
  bool polish = true;
};

/// Dense primal-dual interior-point solver (Mehrotra predictor-corrector)
/// followed by an optional active-set polish. Owns its scratch memory; one
/// solve at a time per instance.
class QpSolver {
 public:
  explicit QpSolver(QpSettings settings = {}) : settings_(settings) {}

  QpSolution solve(const QpProblem& problem,
                   const QpSolution* warm_start = nullptr);

  const QpSettings& settings() const { return settings_; }

 private:
  QpSettings settings_;
};

/// Convenience wrapper around a default solver.
QpSolution solve_qp(const QpProblem& problem,
                    const QpSolution* warm_start = nullptr,
                    double tolerance = 1e-6, int max_iterations = 50);

}  // namespace bipedmpc
