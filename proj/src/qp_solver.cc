#include "bipedmpc/qp_solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bipedmpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const VecX& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

// One row of the one-sided system G x <= g, stored sparsely.
struct SparseRow {
  std::vector<int> idx;
  std::vector<double> val;

  double dot(const VecX& x) const {
    double s = 0.0;
    for (size_t k = 0; k < idx.size(); ++k) s += val[k] * x(idx[k]);
    return s;
  }
  void axpy(double alpha, VecX* y) const {
    for (size_t k = 0; k < idx.size(); ++k) (*y)(idx[k]) += alpha * val[k];
  }
};

// Origin of a one-sided row: constraint row and which side (+1 upper,
// -1 lower).
struct RowOrigin {
  int row;
  int side;
};

// Problem after fixing single-variable equalities and expanding two-sided
// bounds.
struct Reduced {
  std::vector<int> free_vars;
  VecX fixed_values;              // full-length, meaningful for fixed vars
  std::vector<bool> is_fixed;
  std::vector<int> fixed_row;     // equality row that fixed each var, or -1
  std::vector<int> general_rows;  // kept equality rows with >1 free entry
  MatX h;
  VecX f;
  MatX a;
  VecX b;
  std::vector<SparseRow> g_rows;
  MatX g_dense;  // same rows, dense; used when the rows are mostly full
  bool use_dense = false;
  VecX g;
  std::vector<RowOrigin> origin;
  bool infeasible = false;
};

// Solves [Phi A'; A 0] [dx; dy] = [r1; r2]. Uses a Cholesky factorization of
// Phi and the Schur complement when Phi is positive definite; otherwise an
// LU factorization of the full KKT matrix.
class KktSolver {
 public:
  bool factor(const MatX& phi, const MatX& a) {
    n_ = static_cast<int>(phi.rows());
    p_ = static_cast<int>(a.rows());
    a_ = &a;
    llt_.compute(phi);
    use_llt_ = llt_.info() == Eigen::Success;
    if (use_llt_) {
      if (p_ > 0) {
        phi_inv_at_ = llt_.solve(a.transpose());
        schur_.compute(a * phi_inv_at_);
        if (schur_.info() != Eigen::Success) use_llt_ = false;
      }
    }
    if (!use_llt_) {
      MatX kkt = MatX::Zero(n_ + p_, n_ + p_);
      kkt.topLeftCorner(n_, n_) = phi;
      if (p_ > 0) {
        kkt.topRightCorner(n_, p_) = a.transpose();
        kkt.bottomLeftCorner(p_, n_) = a;
      }
      lu_.compute(kkt);
      // Reject numerically singular systems.
      const double rcond = lu_.rcond();
      if (!(rcond > 1e-14)) return false;
    }
    return true;
  }

  void solve(const VecX& r1, const VecX& r2, VecX* dx, VecX* dy) const {
    if (use_llt_) {
      const VecX phi_inv_r1 = llt_.solve(r1);
      if (p_ > 0) {
        *dy = schur_.solve((*a_) * phi_inv_r1 - r2);
        *dx = phi_inv_r1 - phi_inv_at_ * (*dy);
      } else {
        *dx = phi_inv_r1;
        dy->resize(0);
      }
      return;
    }
    VecX rhs(n_ + p_);
    rhs << r1, r2;
    const VecX sol = lu_.solve(rhs);
    *dx = sol.head(n_);
    *dy = sol.tail(p_);
  }

 private:
  int n_ = 0;
  int p_ = 0;
  const MatX* a_ = nullptr;
  bool use_llt_ = true;
  Eigen::LLT<MatX> llt_;
  Eigen::LLT<MatX> schur_;
  MatX phi_inv_at_;
  Eigen::PartialPivLU<MatX> lu_;
};

Reduced presolve(const QpProblem& qp, double tol) {
  const int n = qp.num_variables();
  Reduced r;
  r.is_fixed.assign(n, false);
  r.fixed_row.assign(n, -1);
  r.fixed_values = VecX::Zero(n);

  // Single-entry equality rows pin a variable.
  std::vector<int> multi_rows;
  for (int i = 0; i < qp.a_eq.rows(); ++i) {
    int nnz = 0, col = -1;
    for (int j = 0; j < n; ++j) {
      if (qp.a_eq(i, j) != 0.0) {
        ++nnz;
        col = j;
      }
    }
    if (nnz == 0) {
      if (std::abs(qp.b_eq(i)) > tol * (1.0 + std::abs(qp.b_eq(i)))) {
        r.infeasible = true;
      }
      continue;
    }
    if (nnz > 1) {
      multi_rows.push_back(i);
      continue;
    }
    const double value = qp.b_eq(i) / qp.a_eq(i, col);
    if (r.is_fixed[col]) {
      if (std::abs(r.fixed_values(col) - value) >
          tol * (1.0 + std::abs(value))) {
        r.infeasible = true;
      }
      continue;
    }
    r.is_fixed[col] = true;
    r.fixed_row[col] = i;
    r.fixed_values(col) = value;
  }

  for (int j = 0; j < n; ++j) {
    if (!r.is_fixed[j]) r.free_vars.push_back(j);
  }
  const int nf = static_cast<int>(r.free_vars.size());

  auto free_part = [&](const MatX& m) {
    MatX out(m.rows(), nf);
    for (int k = 0; k < nf; ++k) out.col(k) = m.col(r.free_vars[k]);
    return out;
  };
  VecX x_fixed = r.fixed_values;

  r.f.resize(nf);
  r.h.resize(nf, nf);
  const VecX h_fixed = qp.h * x_fixed;
  for (int a = 0; a < nf; ++a) {
    r.f(a) = qp.f(r.free_vars[a]) + h_fixed(r.free_vars[a]);
    for (int b = 0; b < nf; ++b) {
      r.h(a, b) = qp.h(r.free_vars[a], r.free_vars[b]);
    }
  }

  // Remaining equality rows: drop dependent ones, reject inconsistent ones.
  if (!multi_rows.empty()) {
    MatX a_rows(multi_rows.size(), n);
    VecX b_rows(multi_rows.size());
    for (size_t k = 0; k < multi_rows.size(); ++k) {
      a_rows.row(k) = qp.a_eq.row(multi_rows[k]);
      b_rows(k) = qp.b_eq(multi_rows[k]);
    }
    const MatX a_free = free_part(a_rows);
    const VecX b_free = b_rows - a_rows * x_fixed;
    if (nf == 0) {
      if (inf_norm(b_free) > tol * (1.0 + inf_norm(b_rows))) {
        r.infeasible = true;
      }
    } else {
      Eigen::ColPivHouseholderQR<MatX> qr_t(a_free.transpose());
      qr_t.setThreshold(1e-12);
      const int rank = static_cast<int>(qr_t.rank());
      std::vector<int> keep;
      for (int k = 0; k < rank; ++k) {
        keep.push_back(qr_t.colsPermutation().indices()(k));
      }
      std::sort(keep.begin(), keep.end());
      Eigen::ColPivHouseholderQR<MatX> qr(a_free);
      const VecX x_ls = qr.solve(b_free);
      if (inf_norm(a_free * x_ls - b_free) >
          tol * (1.0 + inf_norm(b_free))) {
        r.infeasible = true;
      }
      r.a.resize(keep.size(), nf);
      r.b.resize(keep.size());
      for (size_t k = 0; k < keep.size(); ++k) {
        r.a.row(k) = a_free.row(keep[k]);
        r.b(k) = b_free(keep[k]);
        r.general_rows.push_back(multi_rows[keep[k]]);
      }
    }
  }
  if (r.a.size() == 0) {
    r.a.resize(0, nf);
    r.b.resize(0);
  }

  // Inequalities as one-sided sparse rows over the free variables.
  std::vector<int> col_of(n, -1);
  for (int k = 0; k < nf; ++k) col_of[r.free_vars[k]] = k;
  std::vector<double> g_vals;
  for (int i = 0; i < qp.c.rows(); ++i) {
    SparseRow row;
    double shift = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = qp.c(i, j);
      if (v == 0.0) continue;
      if (r.is_fixed[j]) {
        shift += v * x_fixed(j);
      } else {
        row.idx.push_back(col_of[j]);
        row.val.push_back(v);
      }
    }
    const double lo = qp.c_lower(i) - shift;
    const double hi = qp.c_upper(i) - shift;
    if (row.idx.empty()) {
      if (lo > tol * (1.0 + std::abs(lo)) || hi < -tol * (1.0 + std::abs(hi))) {
        r.infeasible = true;
      }
      continue;
    }
    if (std::isfinite(hi)) {
      r.g_rows.push_back(row);
      g_vals.push_back(hi);
      r.origin.push_back({i, +1});
    }
    if (std::isfinite(lo)) {
      SparseRow neg = row;
      for (double& v : neg.val) v = -v;
      r.g_rows.push_back(std::move(neg));
      g_vals.push_back(-lo);
      r.origin.push_back({i, -1});
    }
  }
  r.g = Eigen::Map<VecX>(g_vals.data(), static_cast<Eigen::Index>(g_vals.size()));
  size_t nnz = 0;
  for (const SparseRow& row : r.g_rows) nnz += row.idx.size();
  r.use_dense = 8 * nnz > r.g_rows.size() * static_cast<size_t>(nf);
  if (r.use_dense) {
    r.g_dense = MatX::Zero(r.g_rows.size(), nf);
    for (size_t i = 0; i < r.g_rows.size(); ++i) {
      const SparseRow& row = r.g_rows[i];
      for (size_t k = 0; k < row.idx.size(); ++k) {
        r.g_dense(i, row.idx[k]) = row.val[k];
      }
    }
  }
  return r;
}

struct Iterate {
  VecX x, y, z, s;
};

class InteriorPoint {
 public:
  InteriorPoint(const Reduced& r, const QpSettings& settings)
      : r_(r), settings_(settings), n_(static_cast<int>(r.f.size())),
        p_(static_cast<int>(r.b.size())), m_(static_cast<int>(r.g.size())) {
    f_scale_ = 1.0 + inf_norm(r.f);
    b_scale_ = 1.0 + inf_norm(r.b);
    g_scale_ = 1.0 + inf_norm(r.g);
  }

  VecX g_times(const VecX& x) const {
    if (r_.use_dense) return r_.g_dense * x;
    VecX out(m_);
    for (int i = 0; i < m_; ++i) out(i) = r_.g_rows[i].dot(x);
    return out;
  }
  VecX gt_times(const VecX& v) const {
    if (r_.use_dense) return r_.g_dense.transpose() * v;
    VecX out = VecX::Zero(n_);
    for (int i = 0; i < m_; ++i) r_.g_rows[i].axpy(v(i), &out);
    return out;
  }

  MatX phi(const VecX& w) const {
    MatX out = r_.h;
    if (r_.use_dense) {
      const MatX wg = w.asDiagonal() * r_.g_dense;
      out.noalias() += r_.g_dense.transpose() * wg;
      return out;
    }
    for (int i = 0; i < m_; ++i) {
      const SparseRow& row = r_.g_rows[i];
      for (size_t a = 0; a < row.idx.size(); ++a) {
        for (size_t b = 0; b < row.idx.size(); ++b) {
          out(row.idx[a], row.idx[b]) += w(i) * row.val[a] * row.val[b];
        }
      }
    }
    return out;
  }

  struct Residuals {
    VecX dual, eq, ineq;
    double gap = 0.0;
    double objective = 0.0;
    double scaled_infeasibility = 0.0;
    bool converged = false;
  };

  Residuals residuals(const Iterate& it) const {
    Residuals res;
    res.dual = r_.h * it.x + r_.f + gt_times(it.z);
    if (p_ > 0) res.dual += r_.a.transpose() * it.y;
    res.eq = p_ > 0 ? VecX(r_.a * it.x - r_.b) : VecX(0);
    res.ineq = m_ > 0 ? VecX(g_times(it.x) + it.s - r_.g) : VecX(0);
    res.gap = m_ > 0 ? it.s.dot(it.z) : 0.0;
    res.objective = 0.5 * it.x.dot(r_.h * it.x) + r_.f.dot(it.x);
    const double d = inf_norm(res.dual) / f_scale_;
    const double e = inf_norm(res.eq) / b_scale_;
    const double i = inf_norm(res.ineq) / g_scale_;
    res.scaled_infeasibility = std::max({d, e, i});
    const double tol = settings_.tolerance;
    res.converged = d <= tol && e <= tol && i <= tol &&
                    res.gap <= tol * (1.0 + std::abs(res.objective));
    return res;
  }

  bool initialize(Iterate* it) {
    KktSolver kkt;
    const VecX w = VecX::Ones(m_);
    if (!kkt.factor(phi(w), r_.a)) return false;
    VecX dx, dy;
    kkt.solve(-r_.f + gt_times(r_.g), r_.b, &dx, &dy);
    it->x = dx;
    it->y = dy;
    const VecX s_tilde = r_.g - g_times(dx);
    it->s = shift_positive(s_tilde);
    it->z = shift_positive(-s_tilde);
    return true;
  }

  static VecX shift_positive(const VecX& v) {
    if (v.size() == 0) return v;
    const double alpha = -v.minCoeff();
    if (alpha < 0.0) return v;
    return (v.array() + 1.0 + alpha).matrix();
  }

  static double max_step(const VecX& v, const VecX& dv) {
    double alpha = 1.0;
    for (int i = 0; i < v.size(); ++i) {
      if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
    }
    return alpha;
  }

  // Runs the predictor-corrector loop from `it`. Returns the status.
  QpStatus run(Iterate* it, QpSolution* out) {
    KktSolver kkt;
    int stalled = 0;
    for (int iter = 0;; ++iter) {
      const Residuals res = residuals(*it);
      if (res.converged) {
        out->iterations = iter;
        return QpStatus::kOptimal;
      }
      if (iter >= settings_.max_iterations) {
        out->iterations = iter;
        return QpStatus::kMaxIterations;
      }
      if (m_ > 0 && inf_norm(it->z) > 1e12 * (1.0 + f_scale_)) {
        out->iterations = iter;
        return QpStatus::kInfeasible;
      }

      const VecX w = m_ > 0 ? VecX(it->z.cwiseQuotient(it->s)) : VecX(0);
      if (!kkt.factor(phi(w), r_.a)) {
        out->iterations = iter;
        return QpStatus::kInfeasible;
      }
      const double mu = m_ > 0 ? res.gap / m_ : 0.0;

      auto newton = [&](const VecX& rc, VecX* dx, VecX* dy, VecX* dz,
                        VecX* ds) {
        VecX rhs1 = -res.dual;
        if (m_ > 0) {
          const VecX t = (it->z.cwiseProduct(res.ineq) - rc)
                             .cwiseQuotient(it->s);
          rhs1 -= gt_times(t);
        }
        kkt.solve(rhs1, -res.eq, dx, dy);
        if (m_ > 0) {
          const VecX gdx = g_times(*dx);
          *dz = (it->z.cwiseProduct(gdx + res.ineq) - rc).cwiseQuotient(it->s);
          *ds = -res.ineq - gdx;
        } else {
          dz->resize(0);
          ds->resize(0);
        }
      };

      VecX dx, dy, dz, ds;
      const VecX sz = m_ > 0 ? VecX(it->s.cwiseProduct(it->z)) : VecX(0);
      newton(sz, &dx, &dy, &dz, &ds);
      double alpha = 1.0;
      if (m_ > 0) {
        const double alpha_aff =
            std::min(max_step(it->s, ds), max_step(it->z, dz));
        const double mu_aff =
            (it->s + alpha_aff * ds).dot(it->z + alpha_aff * dz) / m_;
        const double sigma = std::pow(mu_aff / mu, 3);
        const VecX rc = (sz + ds.cwiseProduct(dz)).array() - sigma * mu;
        newton(rc, &dx, &dy, &dz, &ds);
        alpha = std::min(1.0, 0.99 * std::min(max_step(it->s, ds),
                                              max_step(it->z, dz)));
      }
      it->x += alpha * dx;
      if (p_ > 0) it->y += alpha * dy;
      if (m_ > 0) {
        it->z += alpha * dz;
        it->s += alpha * ds;
      }
      out->residual_history.push_back(residuals(*it).scaled_infeasibility);

      stalled = alpha < 1e-8 ? stalled + 1 : 0;
      if (stalled >= 3) {
        out->iterations = iter + 1;
        return QpStatus::kInfeasible;
      }
    }
  }

  // Solves the equality-constrained problem on the guessed active set and
  // accepts it if it satisfies every KKT condition.
  bool polish(Iterate* it) const {
    std::vector<int> active;
    for (int i = 0; i < m_; ++i) {
      if (it->z(i) > it->s(i)) active.push_back(i);
    }
    const int na = static_cast<int>(active.size());
    if (p_ + na > n_) return false;
    MatX e(p_ + na, n_);
    VecX rhs(p_ + na);
    if (p_ > 0) {
      e.topRows(p_) = r_.a;
      rhs.head(p_) = r_.b;
    }
    for (int k = 0; k < na; ++k) {
      e.row(p_ + k).setZero();
      const SparseRow& row = r_.g_rows[active[k]];
      for (size_t j = 0; j < row.idx.size(); ++j) {
        e(p_ + k, row.idx[j]) = row.val[j];
      }
      rhs(p_ + k) = r_.g(active[k]);
    }
    KktSolver kkt;
    if (!kkt.factor(r_.h, e)) return false;
    VecX x, mult;
    kkt.solve(-r_.f, rhs, &x, &mult);
    if (!x.allFinite() || !mult.allFinite()) return false;

    Iterate cand;
    cand.x = x;
    cand.y = mult.head(p_);
    cand.z = VecX::Zero(m_);
    for (int k = 0; k < na; ++k) cand.z(active[k]) = mult(p_ + k);
    const double tol = settings_.tolerance;
    if (m_ > 0 && cand.z.minCoeff() < -tol * f_scale_) return false;
    cand.z = cand.z.cwiseMax(0.0);
    const VecX gx = g_times(x);
    cand.s = (r_.g - gx).cwiseMax(0.0);
    if (m_ > 0 && (gx - r_.g).maxCoeff() > tol * g_scale_) return false;

    const Residuals before = residuals(*it);
    const Residuals after = residuals(cand);
    if (!after.converged) return false;
    if (after.objective > before.objective + tol * (1.0 + std::abs(before.objective))) {
      return false;
    }
    *it = std::move(cand);
    return true;
  }

  int m() const { return m_; }
  int p() const { return p_; }
  int n() const { return n_; }

 private:
  const Reduced& r_;
  QpSettings settings_;
  int n_, p_, m_;
  double f_scale_ = 1.0, b_scale_ = 1.0, g_scale_ = 1.0;
};

void fill_full_solution(const QpProblem& qp, const Reduced& r,
                        const Iterate& it, QpSolution* out) {
  const int n = qp.num_variables();
  out->u = r.fixed_values;
  for (size_t k = 0; k < r.free_vars.size(); ++k) {
    out->u(r.free_vars[k]) = it.x(k);
  }
  const int rows = static_cast<int>(qp.c.rows());
  out->lower_dual = VecX::Zero(rows);
  out->upper_dual = VecX::Zero(rows);
  for (size_t i = 0; i < r.origin.size(); ++i) {
    const RowOrigin& o = r.origin[i];
    (o.side > 0 ? out->upper_dual : out->lower_dual)(o.row) += it.z(i);
  }
  out->eq_dual = VecX::Zero(qp.a_eq.rows());
  for (size_t k = 0; k < r.general_rows.size(); ++k) {
    out->eq_dual(r.general_rows[k]) = it.y(k);
  }
  // Multipliers of pinned variables follow from stationarity.
  VecX grad = qp.h * out->u + qp.f;
  if (rows > 0) grad += qp.c.transpose() * (out->upper_dual - out->lower_dual);
  if (qp.a_eq.rows() > 0) grad += qp.a_eq.transpose() * out->eq_dual;
  for (int j = 0; j < n; ++j) {
    if (r.fixed_row[j] >= 0) {
      out->eq_dual(r.fixed_row[j]) = -grad(j) / qp.a_eq(r.fixed_row[j], j);
    }
  }
  out->slack = it.s;
  out->ineq_dual = it.z;
}

void fill_residuals(const QpProblem& qp, QpSolution* out) {
  const VecX& u = out->u;
  VecX grad = qp.h * u + qp.f;
  double primal = 0.0, gap = 0.0;
  if (qp.c.rows() > 0) {
    grad += qp.c.transpose() * (out->upper_dual - out->lower_dual);
    const VecX cu = qp.c * u;
    for (int i = 0; i < cu.size(); ++i) {
      primal = std::max(primal, qp.c_lower(i) - cu(i));
      primal = std::max(primal, cu(i) - qp.c_upper(i));
      if (std::isfinite(qp.c_upper(i))) {
        gap += out->upper_dual(i) * std::abs(qp.c_upper(i) - cu(i));
      }
      if (std::isfinite(qp.c_lower(i))) {
        gap += out->lower_dual(i) * std::abs(cu(i) - qp.c_lower(i));
      }
    }
  }
  if (qp.a_eq.rows() > 0) {
    grad += qp.a_eq.transpose() * out->eq_dual;
    primal = std::max(primal, inf_norm(qp.a_eq * u - qp.b_eq));
  }
  out->dual_residual = inf_norm(grad);
  out->primal_residual = primal;
  out->duality_gap = gap;
  out->objective = qp.objective(u);
}

}  // namespace

void QpProblem::validate() const {
  const auto n = f.size();
  if (h.rows() != n || h.cols() != n) {
    throw std::invalid_argument("QpProblem: h must be n x n");
  }
  if (c.cols() != n && c.rows() > 0) {
    throw std::invalid_argument("QpProblem: C must have n columns");
  }
  if (c_lower.size() != c.rows() || c_upper.size() != c.rows()) {
    throw std::invalid_argument("QpProblem: bound sizes must match C rows");
  }
  if (a_eq.rows() > 0 && a_eq.cols() != n) {
    throw std::invalid_argument("QpProblem: A_eq must have n columns");
  }
  if (b_eq.size() != a_eq.rows()) {
    throw std::invalid_argument("QpProblem: b_eq size must match A_eq rows");
  }
  if (a_eq.rows() > n) {
    throw std::invalid_argument("QpProblem: more equality rows than variables");
  }
  if ((h - h.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + h.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("QpProblem: h must be symmetric");
  }
  for (int i = 0; i < c_lower.size(); ++i) {
    if (c_lower(i) > c_upper(i)) {
      throw std::invalid_argument("QpProblem: c_lower exceeds c_upper");
    }
  }
}

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kMaxIterations: return "max_iterations";
    case QpStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

QpSolution QpSolver::solve(const QpProblem& qp, const QpSolution* warm) {
  const auto start = std::chrono::steady_clock::now();
  qp.validate();
  QpSolution out;
  const Reduced r = presolve(qp, settings_.tolerance);
  InteriorPoint ipm(r, settings_);

  Iterate it;
  bool ready = false;
  if (r.infeasible) {
    out.status = QpStatus::kInfeasible;
    it.x = VecX::Zero(ipm.n());
    it.y = VecX::Zero(ipm.p());
    it.z = VecX::Zero(ipm.m());
    it.s = VecX::Zero(ipm.m());
  } else {
    if (warm != nullptr && warm->u.size() == qp.num_variables() &&
        warm->slack.size() == ipm.m() && warm->ineq_dual.size() == ipm.m()) {
      it.x.resize(ipm.n());
      for (int k = 0; k < ipm.n(); ++k) it.x(k) = warm->u(r.free_vars[k]);
      it.y = VecX::Zero(ipm.p());
      if (warm->eq_dual.size() == qp.a_eq.rows()) {
        for (int k = 0; k < ipm.p(); ++k) {
          it.y(k) = warm->eq_dual(r.general_rows[k]);
        }
      }
      it.s = warm->slack;
      it.z = warm->ineq_dual;
      if (!ipm.residuals(it).converged) {
        // Move a boundary point back into the interior.
        it.s = it.s.cwiseMax(1e-3);
        it.z = it.z.cwiseMax(1e-3);
      }
      ready = true;
    } else {
      ready = ipm.initialize(&it);
    }
    if (!ready) {
      out.status = QpStatus::kInfeasible;
    } else {
      out.status = ipm.run(&it, &out);
      if (settings_.polish && out.status == QpStatus::kOptimal &&
          out.iterations > 0) {
        out.polished = ipm.polish(&it);
      }
    }
  }
  if (it.x.size() != ipm.n()) it.x = VecX::Zero(ipm.n());
  if (it.y.size() != ipm.p()) it.y = VecX::Zero(ipm.p());
  if (it.z.size() != ipm.m()) it.z = VecX::Zero(ipm.m());
  if (it.s.size() != ipm.m()) it.s = VecX::Zero(ipm.m());
  fill_full_solution(qp, r, it, &out);
  fill_residuals(qp, &out);
  out.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return out;
}

QpSolution solve_qp(const QpProblem& problem, const QpSolution* warm_start,
                    double tolerance, int max_iterations) {
  QpSolver solver({tolerance, max_iterations, true});
  return solver.solve(problem, warm_start);
}

}  // namespace bipedmpc
