#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace gemreason {

/// maximise objective . v  subject to  constraints * v = rhs,  lower <= v <= upper.
/// Bounds may be infinite.
template <typename Scalar>
struct LinearProgram {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;

  std::vector<std::string> variable_names;
  std::vector<std::string> row_names;
  Matrix constraints;
  Vector rhs;
  Vector lower;
  Vector upper;
  Vector objective;

  Eigen::Index num_variables() const { return constraints.cols(); }
  Eigen::Index num_rows() const { return constraints.rows(); }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

inline const char* to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::Optimal:
      return "OPTIMAL";
    case SolveStatus::Infeasible:
      return "INFEASIBLE";
    case SolveStatus::Unbounded:
      return "UNBOUNDED";
    case SolveStatus::NumericalFailure:
      return "NUMERICAL_FAILURE";
  }
  return "?";
}

template <typename Scalar>
struct FluxSolution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SolveStatus status = SolveStatus::NumericalFailure;
  Scalar objective_value = 0;
  Vector flux;
  /// max(|constraints * flux - rhs|_inf, largest bound violation).
  Scalar residual = 0;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  /// Degenerate pivots in a row before switching to Bland's rule.
  std::size_t degenerate_streak = 50;
  std::size_t max_iterations = 0;  // 0: 50 * (rows + columns) + 1000
};

namespace detail {

/// Bounded-variable revised primal simplex with artificial-variable phase 1.
/// The basis is refactorised every iteration, so basic values are always
/// recomputed from the nonbasic ones and errors do not accumulate.
template <typename Scalar>
class BoundedSimplex {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;

  BoundedSimplex(const LinearProgram<Scalar>& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), m_(lp.num_rows()), n_(lp.num_variables()) {
    const Eigen::Index total = n_ + m_;
    lower_.resize(total);
    upper_.resize(total);
    x_.setZero(total);
    is_basic_.assign(static_cast<std::size_t>(total), false);
    sign_.assign(static_cast<std::size_t>(m_), Scalar(1));
    max_iterations_ = opt_.max_iterations ? opt_.max_iterations
                                          : static_cast<std::size_t>(50 * (m_ + n_) + 1000);
  }

  FluxSolution<Scalar> solve() {
    FluxSolution<Scalar> out;
    for (Eigen::Index j = 0; j < n_; ++j) {
      lower_[j] = lp_.lower[j];
      upper_[j] = lp_.upper[j];
      if (lower_[j] > upper_[j]) {
        out.status = SolveStatus::Infeasible;
        return out;
      }
      x_[j] = std::isfinite(lower_[j]) ? lower_[j] : std::isfinite(upper_[j]) ? upper_[j] : Scalar(0);
    }
    Vector r = lp_.rhs - lp_.constraints * x_.head(n_);
    basis_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index a = n_ + i;
      sign_[i] = r[i] >= 0 ? Scalar(1) : Scalar(-1);
      lower_[a] = 0;
      upper_[a] = std::numeric_limits<Scalar>::infinity();
      x_[a] = std::abs(r[i]);
      basis_[i] = a;
      is_basic_[a] = true;
    }

    // Phase 1: minimise the sum of artificials.
    Vector cost = Vector::Zero(n_ + m_);
    cost.tail(m_).setOnes();
    SolveStatus st = iterate(cost, out.iterations);
    if (st != SolveStatus::Optimal) {
      out.status = st == SolveStatus::Unbounded ? SolveStatus::NumericalFailure : st;
      return out;
    }
    const Scalar scale = Scalar(1) + r.template lpNorm<Eigen::Infinity>();
    if (x_.tail(m_).sum() > Scalar(opt_.feasibility_tolerance) * scale) {
      out.status = SolveStatus::Infeasible;
      return out;
    }

    // Phase 2: artificials pinned at zero, maximise the objective.
    for (Eigen::Index i = 0; i < m_; ++i) upper_[n_ + i] = 0;
    cost.setZero();
    cost.head(n_) = -lp_.objective;
    st = iterate(cost, out.iterations);
    if (st != SolveStatus::Optimal) {
      out.status = st;
      return out;
    }

    out.flux = x_.head(n_);
    out.objective_value = lp_.objective.dot(out.flux);
    Scalar residual = (lp_.constraints * out.flux - lp_.rhs).template lpNorm<Eigen::Infinity>();
    for (Eigen::Index j = 0; j < n_; ++j)
      residual = std::max({residual, lower_[j] - out.flux[j], out.flux[j] - upper_[j]});
    out.residual = residual;
    out.status = residual <= Scalar(opt_.feasibility_tolerance) ? SolveStatus::Optimal
                                                                 : SolveStatus::NumericalFailure;
    return out;
  }

 private:
  void column(Eigen::Index j, Vector& out) const {
    out.setZero(m_);
    if (j < n_) {
      for (typename Sparse::InnerIterator it(lp_.constraints, j); it; ++it) out[it.row()] = it.value();
    } else {
      out[j - n_] = sign_[j - n_];
    }
  }

  Scalar dot_column(Eigen::Index j, const Vector& y) const {
    if (j >= n_) return sign_[j - n_] * y[j - n_];
    Scalar s = 0;
    for (typename Sparse::InnerIterator it(lp_.constraints, j); it; ++it) s += it.value() * y[it.row()];
    return s;
  }

  bool factorize() {
    std::vector<Eigen::Triplet<Scalar>> triplets;
    for (Eigen::Index k = 0; k < m_; ++k) {
      const Eigen::Index j = basis_[k];
      if (j < n_) {
        for (typename Sparse::InnerIterator it(lp_.constraints, j); it; ++it)
          triplets.emplace_back(it.row(), k, it.value());
      } else {
        triplets.emplace_back(j - n_, k, sign_[j - n_]);
      }
    }
    Sparse basis_matrix(m_, m_);
    basis_matrix.setFromTriplets(triplets.begin(), triplets.end());
    lu_.compute(basis_matrix);
    return lu_.info() == Eigen::Success;
  }

  SolveStatus iterate(const Vector& cost, std::size_t& iterations) {
    if (m_ == 0) return iterate_unconstrained(cost);
    bool bland = false;
    std::size_t degenerate = 0;
    Vector w(m_), col(m_), cb(m_);
    while (true) {
      if (iterations++ > max_iterations_) return SolveStatus::NumericalFailure;
      if (!factorize()) return SolveStatus::NumericalFailure;

      Vector rhs = lp_.rhs;
      for (Eigen::Index j = 0; j < n_; ++j)
        if (!is_basic_[j] && x_[j] != Scalar(0))
          for (typename Sparse::InnerIterator it(lp_.constraints, j); it; ++it) rhs[it.row()] -= it.value() * x_[j];
      for (Eigen::Index i = 0; i < m_; ++i)
        if (!is_basic_[n_ + i]) rhs[i] -= sign_[i] * x_[n_ + i];
      const Vector xb = lu_.solve(rhs);
      for (Eigen::Index k = 0; k < m_; ++k) {
        x_[basis_[k]] = xb[k];
        cb[k] = cost[basis_[k]];
      }
      const Vector y = lu_.transpose().solve(cb);

      // Pricing.
      Eigen::Index enter = -1;
      Scalar best = 0;
      for (Eigen::Index j = 0; j < n_ + m_; ++j) {
        if (is_basic_[j]) continue;
        const Scalar d = cost[j] - dot_column(j, y);
        const bool up = d < -Scalar(opt_.optimality_tolerance) && x_[j] < upper_[j];
        const bool down = d > Scalar(opt_.optimality_tolerance) && x_[j] > lower_[j];
        if (!up && !down) continue;
        if (bland) {
          enter = j;
          best = d;
          break;
        }
        if (std::abs(d) > std::abs(best)) {
          enter = j;
          best = d;
        }
      }
      if (enter < 0) return SolveStatus::Optimal;

      const Scalar dir = best < 0 ? Scalar(1) : Scalar(-1);
      column(enter, col);
      w = lu_.solve(col);

      // Ratio test: the entering variable may also just flip to its other bound.
      Scalar step = upper_[enter] - lower_[enter];
      if (!std::isfinite(step)) step = std::numeric_limits<Scalar>::infinity();
      Eigen::Index leave = -1;
      Scalar leave_rate = 0;
      for (Eigen::Index k = 0; k < m_; ++k) {
        const Scalar rate = -dir * w[k];
        if (std::abs(rate) <= Scalar(opt_.pivot_tolerance)) continue;
        const Eigen::Index j = basis_[k];
        Scalar limit;
        if (rate < 0) {
          if (!std::isfinite(lower_[j])) continue;
          limit = (x_[j] - lower_[j]) / -rate;
        } else {
          if (!std::isfinite(upper_[j])) continue;
          limit = (upper_[j] - x_[j]) / rate;
        }
        limit = std::max(limit, Scalar(0));
        const Scalar tie = Scalar(1e-12) * (Scalar(1) + (std::isfinite(step) ? std::abs(step) : Scalar(0)));
        bool take = limit < step - tie;
        if (!take && limit <= step + tie && leave >= 0) {
          take = bland ? basis_[k] < basis_[leave] : std::abs(rate) > std::abs(leave_rate);
        }
        if (take) {
          step = limit;
          leave = k;
          leave_rate = rate;
        }
      }
      if (!std::isfinite(step)) return SolveStatus::Unbounded;

      if (step <= Scalar(1e-12)) {
        if (++degenerate >= opt_.degenerate_streak) bland = true;
      } else {
        degenerate = 0;
      }

      if (leave < 0) {
        x_[enter] = dir > 0 ? upper_[enter] : lower_[enter];
        continue;
      }
      const Eigen::Index out_var = basis_[leave];
      x_[out_var] = leave_rate < 0 ? lower_[out_var] : upper_[out_var];
      is_basic_[out_var] = false;
      is_basic_[enter] = true;
      basis_[leave] = enter;
      x_[enter] += dir * step;
    }
  }

  /// No rows: every variable independently goes to its best bound.
  SolveStatus iterate_unconstrained(const Vector& cost) {
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (cost[j] < 0) {
        if (!std::isfinite(upper_[j])) return SolveStatus::Unbounded;
        x_[j] = upper_[j];
      } else if (cost[j] > 0) {
        if (!std::isfinite(lower_[j])) return SolveStatus::Unbounded;
        x_[j] = lower_[j];
      }
    }
    return SolveStatus::Optimal;
  }

  const LinearProgram<Scalar>& lp_;
  SimplexOptions opt_;
  Eigen::Index m_, n_;
  Vector lower_, upper_, x_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> is_basic_;
  std::vector<Scalar> sign_;
  std::size_t max_iterations_;
  Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>> lu_;
};

}  // namespace detail

/// Solves an LP exactly up to floating-point tolerances. An OPTIMAL status
/// guarantees the residual is within the feasibility tolerance.
template <typename Scalar>
FluxSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp, const SimplexOptions& options = {}) {
  return detail::BoundedSimplex<Scalar>(lp, options).solve();
}

/// CPLEX-style LP text: Maximize / Subject To / Bounds / End.
template <typename Scalar>
void write_lp_text(std::ostream& os, const LinearProgram<Scalar>& lp) {
  auto num = [](Scalar v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  auto bound = [&](Scalar v) {
    if (std::isinf(v)) return std::string(v > 0 ? "+inf" : "-inf");
    return num(v);
  };
  os << "Maximize\n obj:";
  bool any = false;
  for (Eigen::Index j = 0; j < lp.num_variables(); ++j) {
    if (lp.objective[j] == Scalar(0)) continue;
    os << (lp.objective[j] < 0 ? " - " : " + ") << num(std::abs(lp.objective[j])) << ' ' << lp.variable_names[j];
    any = true;
  }
  if (!any) os << " 0 " << (lp.num_variables() ? lp.variable_names[0] : std::string("x"));
  os << "\nSubject To\n";
  const Eigen::SparseMatrix<Scalar, Eigen::RowMajor> rows = lp.constraints;
  for (Eigen::Index i = 0; i < lp.num_rows(); ++i) {
    os << ' ' << lp.row_names[i] << ':';
    bool empty = true;
    for (typename Eigen::SparseMatrix<Scalar, Eigen::RowMajor>::InnerIterator it(rows, i); it; ++it) {
      if (it.value() == Scalar(0)) continue;
      os << (it.value() < 0 ? " - " : " + ") << num(std::abs(it.value())) << ' ' << lp.variable_names[it.col()];
      empty = false;
    }
    if (empty) os << " 0 " << (lp.num_variables() ? lp.variable_names[0] : std::string("x"));
    os << " = " << num(lp.rhs[i]) << '\n';
  }
  os << "Bounds\n";
  for (Eigen::Index j = 0; j < lp.num_variables(); ++j) {
    const Scalar lo = lp.lower[j], hi = lp.upper[j];
    if (std::isinf(lo) && std::isinf(hi) && lo < 0 && hi > 0)
      os << ' ' << lp.variable_names[j] << " free\n";
    else
      os << ' ' << bound(lo) << " <= " << lp.variable_names[j] << " <= " << bound(hi) << '\n';
  }
  os << "End\n";
}

}  // namespace gemreason
