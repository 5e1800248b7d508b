#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

namespace cmg {

/// Identifies what an LP variable stands for. Occupation variables carry the
/// state and the position of the action in that state's action list;
/// auxiliary variables (slack splits, etc.) use state == -1.
struct VariableKey {
  int state = -1;
  int action = -1;
  friend bool operator==(const VariableKey&, const VariableKey&) = default;
};

/// max objective.z  s.t.  eq_rows: a.z == rhs,  ge_rows: a.z >= rhs,  z >= 0.
struct LinearProgram {
  struct Row {
    std::vector<double> coefficients;
    double rhs = 0.0;
  };

  std::vector<double> objective;
  std::vector<Row> eq_rows;
  std::vector<Row> ge_rows;
  std::vector<VariableKey> variable_index;

  int variable_count() const { return static_cast<int>(objective.size()); }
  /// Adds a variable with zero coefficients everywhere; returns its index.
  int add_variable(VariableKey key, double objective_coefficient = 0.0);
  /// Throws InvalidArgument when row lengths disagree with the variable count.
  void check_shape() const;
};

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure };

std::string_view to_string(LpStatus status);

struct LinearProgramSolution {
  LpStatus status = LpStatus::numerical_failure;
  double value = 0.0;
  std::vector<double> primal;
  /// Multipliers of the eq and ge rows at the optimum (only when optimal).
  std::vector<double> eq_duals;
  std::vector<double> ge_duals;
  int iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// Post-solve check on the returned primal; a violation turns an "optimal"
  /// answer into numerical_failure.
  double verify_tol = 1e-8;
};

/// Dense two-phase revised simplex with Bland's rule. Returns a basic
/// (vertex) solution when optimal.
LinearProgramSolution solve_lp(const LinearProgram& lp,
                               const SimplexOptions& options = {});

/// Largest violation of any row or sign constraint by `z`.
double max_violation(const LinearProgram& lp, const std::vector<double>& z);

/// Plain-text tabular dump: a header line, one "var" line per variable, the
/// objective row, then one line per constraint row.
void write_lp(std::ostream& out, const LinearProgram& lp);

}  // namespace cmg
