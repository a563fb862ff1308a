#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace riscf::conic {

using Index = Eigen::Index;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class ConeKind {
  Nonnegative,         ///< every row >= 0
  SecondOrder,         ///< (t, x): t >= ||x||, size >= 2
  RotatedSecondOrder,  ///< (u, v, x): 2 u v >= ||x||^2, u, v >= 0, size >= 3
};

const char* to_string(ConeKind kind);

/// One cone block: `map * x + offset` must lie in the cone.
struct ConeConstraint {
  ConeKind kind = ConeKind::Nonnegative;
  SparseRowMatrix map;
  Eigen::VectorXd offset;
  std::string label;

  Index size() const { return offset.size(); }
};

/// Maximize `objective . x` subject to `eq_matrix x = eq_rhs` and the cone
/// blocks. The reported value in problem units is
/// `objective_scale * (objective . x + objective_offset)`.
struct ConeProgram {
  Eigen::VectorXd objective;
  double objective_offset = 0.0;
  double objective_scale = 1.0;

  SparseRowMatrix eq_matrix;
  Eigen::VectorXd eq_rhs;

  std::vector<ConeConstraint> cones;
  std::vector<std::string> variable_names;

  Index num_variables() const { return objective.size(); }
  Index num_cone_rows() const;
  double natural_objective(const Eigen::VectorXd& x) const {
    return objective_scale * (objective.dot(x) + objective_offset);
  }
};

/// Accumulates sparse affine rows before they are frozen into a cone block.
class AffineRows {
 public:
  explicit AffineRows(Index num_variables) : num_variables_(num_variables) {}

  Index add_row(double constant = 0.0);
  void add(Index row, Index col, double coeff);
  Index rows() const { return static_cast<Index>(offset_.size()); }

  ConeConstraint finish(ConeKind kind, std::string label) &&;

 private:
  Index num_variables_;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<double> offset_;
};

/// Structural defects of a program; empty iff the program is well formed.
std::vector<std::string> validate(const ConeProgram& prog);

/// Largest violation of any cone block at `x`, in the block's own units
/// (rotated blocks measured after the orthogonal map to a standard cone).
double max_cone_violation(const ConeProgram& prog, const Eigen::VectorXd& x);
double max_equality_violation(const ConeProgram& prog, const Eigen::VectorXd& x);

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIters, NumericalFailure };

const char* to_string(SolveStatus status);

struct SolverSettings {
  double tol = 1e-7;
  /// When the iteration stalls, the best iterate is still reported as
  /// optimal (with reduced_accuracy set) if it meets this looser tolerance.
  double reduced_tol = 1e-5;
  int max_iters = 200;
  /// Certificates of infeasibility must reach this relative accuracy.
  double infeasibility_tol = 1e-8;
  bool verbose = false;
};

struct SolveReport {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd primal;
  /// Multipliers for the cone blocks, stacked in block order (original
  /// coordinates, so rotated blocks use the rotated-cone dual).
  Eigen::VectorXd cone_dual;
  Eigen::VectorXd eq_dual;
  double objective_value = 0.0;  ///< natural units, see ConeProgram
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;  ///< signed, relative; >= 0 up to rounding
  int iterations = 0;
  bool reduced_accuracy = false;
};

SolveReport solve(const ConeProgram& prog, const SolverSettings& settings = {});

/// Line-oriented text dump, see README "Cone program dump format".
void write_program(std::ostream& os, const ConeProgram& prog);
ConeProgram read_program(std::istream& is);

}  // namespace riscf::conic
