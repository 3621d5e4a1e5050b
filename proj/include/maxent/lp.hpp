#pragma once

// Dense two-phase simplex for small standard-form linear programs
//   minimize c.z  subject to  M z = b,  z >= 0
// with few rows and possibly many columns. Bland's rule throughout.
// Row duals are recovered from the artificial columns of the final tableau.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace maxent::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  Eigen::VectorXd z;     // primal solution (Optimal only)
  double objective = 0;  // c.z at the optimum; phase-1 infeasibility when Infeasible
  Eigen::VectorXd dual;  // y with c - M^T y >= 0 at the optimum (phase-1 duals when Infeasible)
};

namespace detail {

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& m, const Eigen::VectorXd& b)
      : rows_(m.rows()), cols_(m.cols()), t_(m.rows() + 1, m.cols() + m.rows() + 1),
        sign_(m.rows()), basis_(std::size_t(m.rows())) {
    t_.setZero();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      sign_(i) = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(cols_) = sign_(i) * m.row(i);
      t_(i, cols_ + i) = 1.0;
      t_(i, rhs()) = sign_(i) * b(i);
      basis_[std::size_t(i)] = cols_ + i;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    eps_ = 1e-11 * scale;
  }

  Eigen::Index rhs() const { return cols_ + rows_; }
  bool is_artificial(Eigen::Index j) const { return j >= cols_ && j < cols_ + rows_; }

  /// Optimizes cost over the columns allowed by `allow_artificial`.
  /// Returns false on unboundedness.
  bool optimize(const Eigen::VectorXd& cost, bool allow_artificial) {
    cost_ = cost;
    const Eigen::Index obj = rows_;
    for (int iter = 0; iter < 100000; ++iter) {
      // Reduced costs r_j = c_j - c_B B^-1 A_j.
      price();
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < rhs(); ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (t_(obj, j) < -eps_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double a = t_(i, enter);
        if (a <= eps_) continue;
        const double ratio = t_(i, rhs()) / a;
        if (ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && basis_[std::size_t(i)] < basis_[std::size_t(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  }

  /// Pivot zero-level artificials out of the basis where possible.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[std::size_t(i)])) continue;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (std::abs(t_(i, j)) > eps_) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double value() const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) v += cost_(basis_[std::size_t(i)]) * t_(i, rhs());
    return v;
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(cols_);
    for (Eigen::Index i = 0; i < rows_; ++i)
      if (basis_[std::size_t(i)] < cols_) z(basis_[std::size_t(i)]) = std::max(0.0, t_(i, rhs()));
    return z;
  }

  /// y^T = c_B^T B^-1 in the caller's (unflipped) row orientation.
  Eigen::VectorXd dual() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) s += cost_(basis_[std::size_t(i)]) * t_(i, cols_ + r);
      y(r) = s * sign_(r);
    }
    return y;
  }

 private:
  void price() {
    const Eigen::Index obj = rows_;
    for (Eigen::Index j = 0; j <= rhs(); ++j) {
      double s = j < rhs() ? cost_(j) : 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) s -= cost_(basis_[std::size_t(i)]) * t_(i, j);
      t_(obj, j) = s;
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[std::size_t(r)] = c;
  }

  Eigen::Index rows_, cols_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd sign_;
  std::vector<Eigen::Index> basis_;
  Eigen::VectorXd cost_;
  double eps_ = 1e-11;
};

}  // namespace detail

/// Solves min c.z s.t. M z = b, z >= 0. `feas_tol` bounds the phase-1
/// residual accepted as feasible.
inline Result solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                    double feas_tol = 1e-9) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  detail::Tableau tab(m, b);
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols + rows);
  phase1.tail(rows).setOnes();
  tab.optimize(phase1, /*allow_artificial=*/true);
  Result res;
  const double infeas = tab.value();
  if (infeas > feas_tol) {
    res.status = Status::Infeasible;
    res.objective = infeas;
    res.dual = tab.dual();
    return res;
  }
  tab.expel_artificials();
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols + rows);
  phase2.head(cols) = c;
  if (!tab.optimize(phase2, /*allow_artificial=*/false)) {
    res.status = Status::Unbounded;
    return res;
  }
  res.status = Status::Optimal;
  res.z = tab.primal();
  res.objective = tab.value();
  res.dual = tab.dual();
  return res;
}

}  // namespace maxent::lp
