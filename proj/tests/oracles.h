#pragma once

#include <functional>
#include <optional>
#include <random>

#include "bipedmpc/qp_solver.h"
#include "bipedmpc/rigidmath.h"

namespace bipedmpc::testing {

/// exp(m) by scaling and squaring of a truncated Taylor series, written
/// independently of the library's discretization.
MatX expm_taylor(const MatX& m, int terms = 30);

/// Central differences of f at x, one column per entry of x.
MatX numeric_jacobian(const std::function<VecX(const VecX&)>& f, const VecX& x,
                      double h = 1e-6);

/// Exhaustive active-set enumeration for a strictly convex QP. Two-sided
/// rows are split into their finite one-sided halves. Every subset of at
/// most `max_active` inequalities is tried; the KKT point with feasible
/// primal, nonnegative multipliers and lowest objective wins.
std::optional<VecX> enumerate_qp(const QpProblem& problem, int max_active);

VecX random_vector(std::mt19937_64& rng, int n, double scale = 1.0);
MatX random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0);
/// Symmetric positive definite with eigenvalues in [lo, hi].
MatX random_spd(std::mt19937_64& rng, int n, double lo = 0.5, double hi = 5.0);

}  // namespace bipedmpc::testing
