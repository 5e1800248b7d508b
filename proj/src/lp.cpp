#include "cmg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <Eigen/Dense>

#include "cmg/errors.hpp"

namespace cmg {

int LinearProgram::add_variable(VariableKey key, double objective_coefficient) {
  objective.push_back(objective_coefficient);
  variable_index.push_back(key);
  for (auto& row : eq_rows) row.coefficients.push_back(0.0);
  for (auto& row : ge_rows) row.coefficients.push_back(0.0);
  return variable_count() - 1;
}

void LinearProgram::check_shape() const {
  const auto n = objective.size();
  if (variable_index.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "LP variable index size mismatch");
  }
  for (const auto* rows : {&eq_rows, &ge_rows}) {
    for (const auto& row : *rows) {
      if (row.coefficients.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "LP row length mismatch");
      }
    }
  }
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

/// Standard-form tableau data: max c.x, A x = b, x >= 0, b >= 0, with the
/// last m columns artificial.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& options)
      : options_(options),
        n_(lp.variable_count()),
        m_eq_(static_cast<int>(lp.eq_rows.size())),
        m_ge_(static_cast<int>(lp.ge_rows.size())),
        m_(m_eq_ + m_ge_),
        cols_(n_ + m_ge_ + m_),
        A_(Eigen::MatrixXd::Zero(m_, cols_)),
        b_(m_),
        sign_(m_, 1.0) {
    for (int r = 0; r < m_; ++r) {
      const auto& row = r < m_eq_ ? lp.eq_rows[r] : lp.ge_rows[r - m_eq_];
      for (int j = 0; j < n_; ++j) A_(r, j) = row.coefficients[j];
      if (r >= m_eq_) A_(r, n_ + (r - m_eq_)) = -1.0;  // surplus
      b_(r) = row.rhs;
      if (b_(r) < 0.0) {
        A_.row(r) *= -1.0;
        b_(r) = -b_(r);
        sign_[r] = -1.0;
      }
      A_(r, artificial(r)) = 1.0;
    }
    basis_.resize(m_);
    for (int r = 0; r < m_; ++r) basis_[r] = artificial(r);
    is_basic_.assign(cols_, false);
    for (int r = 0; r < m_; ++r) is_basic_[basis_[r]] = true;
    max_iterations_ = 200 * (m_ + cols_) + 1000;
  }

  LinearProgramSolution run(const std::vector<double>& objective) {
    LinearProgramSolution out;
    if (m_ == 0) {
      // Only sign constraints: optimal at zero unless some c_j > 0.
      for (int j = 0; j < n_; ++j) {
        if (objective[j] > options_.optimality_tol) {
          out.status = LpStatus::unbounded;
          return out;
        }
      }
      out.status = LpStatus::optimal;
      out.primal.assign(n_, 0.0);
      return out;
    }

    // Phase I: maximize -(sum of artificials).
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols_);
    for (int r = 0; r < m_; ++r) phase1(artificial(r)) = -1.0;
    auto status = iterate(phase1, /*allow_artificial=*/true);
    out.iterations = iterations_;
    if (status != LpStatus::optimal) {
      out.status = status == LpStatus::unbounded ? LpStatus::numerical_failure
                                                 : status;
      return out;
    }
    const double scale = std::max(1.0, b_.lpNorm<Eigen::Infinity>());
    double infeasibility = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] >= first_artificial()) infeasibility += std::max(0.0, xb_(r));
    }
    if (infeasibility > options_.feasibility_tol * scale) {
      out.status = LpStatus::infeasible;
      return out;
    }
    drive_out_artificials();

    // Phase II.
    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols_);
    for (int j = 0; j < n_; ++j) phase2(j) = objective[j];
    status = iterate(phase2, /*allow_artificial=*/false);
    out.iterations = iterations_;
    if (status != LpStatus::optimal) {
      out.status = status;
      return out;
    }

    out.primal.assign(n_, 0.0);
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < n_) out.primal[basis_[r]] = std::max(0.0, xb_(r));
    }
    out.value = 0.0;
    for (int j = 0; j < n_; ++j) out.value += objective[j] * out.primal[j];
    out.eq_duals.resize(m_eq_);
    out.ge_duals.resize(m_ge_);
    for (int r = 0; r < m_; ++r) {
      const double y = duals_(r) * sign_[r];
      if (r < m_eq_) {
        out.eq_duals[r] = y;
      } else {
        out.ge_duals[r - m_eq_] = y;
      }
    }
    out.status = LpStatus::optimal;
    return out;
  }

 private:
  int first_artificial() const { return n_ + m_ge_; }
  int artificial(int r) const { return first_artificial() + r; }

  bool factorize() {
    Eigen::MatrixXd B(m_, m_);
    for (int r = 0; r < m_; ++r) B.col(r) = A_.col(basis_[r]);
    lu_.compute(B);
    const auto diag = lu_.matrixLU().diagonal().cwiseAbs();
    return diag.minCoeff() > 1e-12 * std::max(1.0, diag.maxCoeff());
  }

  LpStatus iterate(const Eigen::VectorXd& cost, bool allow_artificial) {
    while (true) {
      if (iterations_ >= max_iterations_) return LpStatus::numerical_failure;
      if (!factorize()) return LpStatus::numerical_failure;
      xb_ = lu_.solve(b_);
      Eigen::VectorXd cb(m_);
      for (int r = 0; r < m_; ++r) cb(r) = cost(basis_[r]);
      duals_ = lu_.transpose().solve(cb);

      // Bland: lowest-index improving column.
      int entering = -1;
      for (int j = 0; j < cols_; ++j) {
        if (is_basic_[j]) continue;
        if (!allow_artificial && j >= first_artificial()) continue;
        const double reduced = cost(j) - duals_.dot(A_.col(j));
        if (reduced > options_.optimality_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return LpStatus::optimal;

      const Eigen::VectorXd direction = lu_.solve(A_.col(entering));
      int leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        if (direction(r) <= options_.pivot_tol) continue;
        const double ratio = std::max(0.0, xb_(r)) / direction(r);
        if (ratio < best_ratio - 1e-12) {
          best_ratio = ratio;
          leaving = r;
        } else if (ratio <= best_ratio + 1e-12 && basis_[r] < basis_[leaving]) {
          leaving = r;
        }
      }
      if (leaving < 0) return LpStatus::unbounded;
      is_basic_[basis_[leaving]] = false;
      basis_[leaving] = entering;
      is_basic_[entering] = true;
      ++iterations_;
    }
  }

  // After phase I, pivot zero-valued artificials out of the basis wherever a
  // structural column can replace them. Rows where none can are redundant and
  // keep their artificial at zero.
  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < first_artificial()) continue;
      if (!factorize()) return;
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(m_);
      unit(r) = 1.0;
      const Eigen::VectorXd row = lu_.transpose().solve(unit);
      for (int j = 0; j < first_artificial(); ++j) {
        if (is_basic_[j]) continue;
        if (std::abs(row.dot(A_.col(j))) > options_.pivot_tol) {
          is_basic_[basis_[r]] = false;
          basis_[r] = j;
          is_basic_[j] = true;
          break;
        }
      }
    }
    factorize();
    xb_ = lu_.solve(b_);
  }

  SimplexOptions options_;
  int n_, m_eq_, m_ge_, m_, cols_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  std::vector<double> sign_;
  std::vector<int> basis_;
  std::vector<bool> is_basic_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd xb_;
  Eigen::VectorXd duals_;
  int iterations_ = 0;
  int max_iterations_ = 0;
};

}  // namespace

LinearProgramSolution solve_lp(const LinearProgram& lp,
                               const SimplexOptions& options) {
  lp.check_shape();
  Simplex simplex(lp, options);
  auto solution = simplex.run(lp.objective);
  if (solution.status == LpStatus::optimal &&
      max_violation(lp, solution.primal) > options.verify_tol) {
    solution.status = LpStatus::numerical_failure;
  }
  return solution;
}

double max_violation(const LinearProgram& lp, const std::vector<double>& z) {
  double worst = 0.0;
  for (double v : z) worst = std::max(worst, -v);
  auto activity = [&](const LinearProgram::Row& row) {
    double total = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) total += row.coefficients[j] * z[j];
    return total;
  };
  for (const auto& row : lp.eq_rows) {
    worst = std::max(worst, std::abs(activity(row) - row.rhs));
  }
  for (const auto& row : lp.ge_rows) {
    worst = std::max(worst, row.rhs - activity(row));
  }
  return worst;
}

void write_lp(std::ostream& out, const LinearProgram& lp) {
  const auto precision = out.precision(17);
  out << "lp variables " << lp.variable_count() << " eq " << lp.eq_rows.size()
      << " ge " << lp.ge_rows.size() << "\n";
  for (int j = 0; j < lp.variable_count(); ++j) {
    out << "var " << j << " " << lp.variable_index[j].state << " "
        << lp.variable_index[j].action << "\n";
  }
  out << "max";
  for (double c : lp.objective) out << " " << c;
  out << "\n";
  for (const auto& row : lp.eq_rows) {
    out << "eq";
    for (double a : row.coefficients) out << " " << a;
    out << " = " << row.rhs << "\n";
  }
  for (const auto& row : lp.ge_rows) {
    out << "ge";
    for (double a : row.coefficients) out << " " << a;
    out << " >= " << row.rhs << "\n";
  }
  out.precision(precision);
}

}  // namespace cmg
