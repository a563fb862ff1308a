#include "riscf/conic.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace riscf::conic {

const char* to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::Nonnegative: return "nonnegative";
    case ConeKind::SecondOrder: return "second_order";
    case ConeKind::RotatedSecondOrder: return "rotated_second_order";
  }
  return "?";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

Index ConeProgram::num_cone_rows() const {
  Index rows = 0;
  for (const auto& cone : cones) rows += cone.size();
  return rows;
}

Index AffineRows::add_row(double constant) {
  offset_.push_back(constant);
  return rows() - 1;
}

void AffineRows::add(Index row, Index col, double coeff) {
  if (row < 0 || row >= rows() || col < 0 || col >= num_variables_)
    throw std::out_of_range("AffineRows::add: index out of range");
  if (coeff != 0.0) triplets_.emplace_back(row, col, coeff);
}

ConeConstraint AffineRows::finish(ConeKind kind, std::string label) && {
  ConeConstraint cone;
  cone.kind = kind;
  cone.label = std::move(label);
  cone.map.resize(rows(), num_variables_);
  cone.map.setFromTriplets(triplets_.begin(), triplets_.end());
  cone.offset = Eigen::Map<const Eigen::VectorXd>(offset_.data(), rows());
  return cone;
}

std::vector<std::string> validate(const ConeProgram& prog) {
  std::vector<std::string> defects;
  const Index n = prog.num_variables();
  if (n == 0) defects.emplace_back("program has no variables");
  if (!prog.variable_names.empty() && static_cast<Index>(prog.variable_names.size()) != n)
    defects.emplace_back("variable_names has " + std::to_string(prog.variable_names.size()) +
                         " entries for " + std::to_string(n) + " variables");
  if (!std::isfinite(prog.objective_offset) || !(prog.objective_scale > 0.0))
    defects.emplace_back("objective offset must be finite and scale positive");
  if (!prog.objective.allFinite()) defects.emplace_back("objective has non-finite entries");

  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index j = 0; j < n; ++j)
    if (prog.objective[j] != 0.0) used[static_cast<std::size_t>(j)] = true;
  auto mark = [&](const SparseRowMatrix& m) {
    for (Index r = 0; r < m.outerSize(); ++r)
      for (SparseRowMatrix::InnerIterator it(m, r); it; ++it)
        if (it.value() != 0.0 && it.col() < n) used[static_cast<std::size_t>(it.col())] = true;
  };

  if (prog.eq_matrix.rows() != prog.eq_rhs.size())
    defects.emplace_back("equality matrix rows do not match rhs length");
  if (prog.eq_matrix.rows() > 0 && prog.eq_matrix.cols() != n)
    defects.emplace_back("equality matrix column count differs from variable count");
  mark(prog.eq_matrix);

  for (std::size_t i = 0; i < prog.cones.size(); ++i) {
    const auto& cone = prog.cones[i];
    const std::string tag = "cone " + std::to_string(i) + " (" + cone.label + ")";
    if (cone.map.rows() != cone.offset.size())
      defects.push_back(tag + ": affine map has " + std::to_string(cone.map.rows()) +
                        " rows but offset has " + std::to_string(cone.offset.size()));
    if (cone.map.cols() != n) defects.push_back(tag + ": affine map column count differs from variable count");
    if (cone.kind == ConeKind::Nonnegative && cone.size() < 1) defects.push_back(tag + ": empty nonnegative block");
    if (cone.kind == ConeKind::SecondOrder && cone.size() < 2)
      defects.push_back(tag + ": second-order block needs size >= 2");
    if (cone.kind == ConeKind::RotatedSecondOrder && cone.size() < 3)
      defects.push_back(tag + ": rotated second-order block needs size >= 3");
    if (!cone.offset.allFinite()) defects.push_back(tag + ": non-finite offset");
    mark(cone.map);
  }
  for (Index j = 0; j < n; ++j)
    if (!used[static_cast<std::size_t>(j)])
      defects.push_back("variable " + std::to_string(j) + " appears in no constraint and not in the objective");
  return defects;
}

namespace {

double block_violation(ConeKind kind, const Eigen::VectorXd& u) {
  switch (kind) {
    case ConeKind::Nonnegative: return std::max(0.0, -u.minCoeff());
    case ConeKind::SecondOrder: return std::max(0.0, u.tail(u.size() - 1).norm() - u[0]);
    case ConeKind::RotatedSecondOrder: {
      const double t = (u[0] + u[1]) / std::sqrt(2.0);
      const double d = (u[0] - u[1]) / std::sqrt(2.0);
      const double rest = u.tail(u.size() - 2).squaredNorm();
      return std::max(0.0, std::sqrt(d * d + rest) - t);
    }
  }
  return 0.0;
}

}  // namespace

double max_cone_violation(const ConeProgram& prog, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (const auto& cone : prog.cones) {
    const Eigen::VectorXd u = cone.map * x + cone.offset;
    worst = std::max(worst, block_violation(cone.kind, u));
  }
  return worst;
}

double max_equality_violation(const ConeProgram& prog, const Eigen::VectorXd& x) {
  if (prog.eq_rhs.size() == 0) return 0.0;
  return (prog.eq_matrix * x - prog.eq_rhs).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Text dump

namespace {

void write_sparse(std::ostream& os, const char* tag, const SparseRowMatrix& m) {
  for (Index r = 0; r < m.outerSize(); ++r)
    for (SparseRowMatrix::InnerIterator it(m, r); it; ++it)
      os << tag << ' ' << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

ConeKind parse_kind(const std::string& word) {
  if (word == "nonnegative") return ConeKind::Nonnegative;
  if (word == "second_order") return ConeKind::SecondOrder;
  if (word == "rotated_second_order") return ConeKind::RotatedSecondOrder;
  throw std::runtime_error("read_program: unknown cone kind '" + word + "'");
}

std::string rest_of_line(std::istringstream& in) {
  std::string rest;
  std::getline(in, rest);
  const auto start = rest.find_first_not_of(' ');
  return start == std::string::npos ? std::string{} : rest.substr(start);
}

}  // namespace

void write_program(std::ostream& os, const ConeProgram& prog) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  const Index n = prog.num_variables();
  os << "riscf-cone-program 1\n";
  os << "variables " << n << '\n';
  for (std::size_t j = 0; j < prog.variable_names.size(); ++j)
    os << "name " << j << ' ' << prog.variable_names[j] << '\n';
  os << "objective " << prog.objective_offset << ' ' << prog.objective_scale << '\n';
  for (Index j = 0; j < n; ++j)
    if (prog.objective[j] != 0.0) os << "c " << j << ' ' << prog.objective[j] << '\n';
  os << "equalities " << prog.eq_rhs.size() << '\n';
  write_sparse(os, "a", prog.eq_matrix);
  for (Index i = 0; i < prog.eq_rhs.size(); ++i)
    if (prog.eq_rhs[i] != 0.0) os << "b " << i << ' ' << prog.eq_rhs[i] << '\n';
  for (const auto& cone : prog.cones) {
    os << "cone " << to_string(cone.kind) << ' ' << cone.size() << ' ' << cone.label << '\n';
    write_sparse(os, "f", cone.map);
    for (Index i = 0; i < cone.size(); ++i)
      if (cone.offset[i] != 0.0) os << "g " << i << ' ' << cone.offset[i] << '\n';
  }
  os << "end\n";
  os.precision(old_precision);
}

ConeProgram read_program(std::istream& is) {
  ConeProgram prog;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("read_program: line " + std::to_string(line_no) + ": " + what);
  };

  Index n = -1;
  std::vector<Eigen::Triplet<double>> eq_triplets;
  std::vector<Eigen::Triplet<double>> cone_triplets;
  bool in_cone = false;
  bool header_seen = false;
  bool finished = false;

  auto close_cone = [&]() {
    if (!in_cone) return;
    auto& cone = prog.cones.back();
    cone.map.resize(cone.offset.size(), n);
    cone.map.setFromTriplets(cone_triplets.begin(), cone_triplets.end());
    cone_triplets.clear();
    in_cone = false;
  };

  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string key;
    in >> key;
    if (!header_seen) {
      int version = 0;
      in >> version;
      if (key != "riscf-cone-program" || version != 1) fail("missing header");
      header_seen = true;
      continue;
    }
    if (key == "variables") {
      in >> n;
      if (!in || n < 0) fail("bad variable count");
      prog.objective = Eigen::VectorXd::Zero(n);
    } else if (key == "name") {
      std::size_t j = 0;
      in >> j;
      if (prog.variable_names.size() <= j) prog.variable_names.resize(j + 1);
      prog.variable_names[j] = rest_of_line(in);
    } else if (key == "objective") {
      in >> prog.objective_offset >> prog.objective_scale;
    } else if (key == "c") {
      Index j = 0;
      double v = 0;
      in >> j >> v;
      if (!in || j < 0 || j >= n) fail("bad objective entry");
      prog.objective[j] = v;
    } else if (key == "equalities") {
      Index p = 0;
      in >> p;
      prog.eq_rhs = Eigen::VectorXd::Zero(p);
    } else if (key == "a") {
      Index r = 0, c = 0;
      double v = 0;
      in >> r >> c >> v;
      if (!in || r < 0 || r >= prog.eq_rhs.size() || c < 0 || c >= n) fail("bad equality entry");
      eq_triplets.emplace_back(r, c, v);
    } else if (key == "b") {
      Index r = 0;
      double v = 0;
      in >> r >> v;
      if (!in || r < 0 || r >= prog.eq_rhs.size()) fail("bad equality rhs entry");
      prog.eq_rhs[r] = v;
    } else if (key == "cone") {
      close_cone();
      std::string kind;
      Index size = 0;
      in >> kind >> size;
      if (!in || size < 0) fail("bad cone header");
      ConeConstraint cone;
      cone.kind = parse_kind(kind);
      cone.offset = Eigen::VectorXd::Zero(size);
      cone.label = rest_of_line(in);
      prog.cones.push_back(std::move(cone));
      in_cone = true;
    } else if (key == "f" || key == "g") {
      if (!in_cone) fail("cone entry outside a cone block");
      auto& cone = prog.cones.back();
      Index r = 0;
      in >> r;
      if (key == "f") {
        Index c = 0;
        double v = 0;
        in >> c >> v;
        if (!in || r < 0 || r >= cone.size() || c < 0 || c >= n) fail("bad cone map entry");
        cone_triplets.emplace_back(r, c, v);
      } else {
        double v = 0;
        in >> v;
        if (!in || r < 0 || r >= cone.size()) fail("bad cone offset entry");
        cone.offset[r] = v;
      }
    } else if (key == "end") {
      finished = true;
      break;
    } else {
      fail("unknown record '" + key + "'");
    }
  }
  if (!finished) fail("missing 'end'");
  close_cone();
  prog.eq_matrix.resize(prog.eq_rhs.size(), std::max<Index>(n, 0));
  prog.eq_matrix.setFromTriplets(eq_triplets.begin(), eq_triplets.end());
  return prog;
}

}  // namespace riscf::conic
