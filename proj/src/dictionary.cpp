#include "tensorseries/dictionary.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tensorseries {

namespace {

std::string budget_message(int stage, double residual, double required) {
  std::ostringstream msg;
  msg << "dictionary stage " << stage << ": residual " << residual
      << " cannot be brought below " << required << " within the atom budget";
  return msg.str();
}

Matrix as_row(const Vector& v) { return v.transpose(); }

}  // namespace

ResidualBudgetExceeded::ResidualBudgetExceeded(int stage, double residual, double required)
    : ContractViolation(budget_message(stage, residual, required)),
      stage_(stage), residual_(residual), required_(required) {}

DictionaryProjector::DictionaryProjector(Vector target, std::vector<DictionaryAtom> atoms,
                                         SeminormFamily family, int atom_budget)
    : target_(std::move(target)), atoms_(std::move(atoms)), family_(std::move(family)) {
  if (target_.size() == 0) throw DimensionError("dictionary target is empty");
  if (!target_.allFinite()) throw DomainError("dictionary target has non-finite entries");
  if (family_.finest().rows() != 1 || family_.finest().cols() != target_.size())
    throw DimensionError("seminorm family must act on 1 x G tensors matching the target");
  for (const auto& a : atoms_) {
    if (a.atom.size() != target_.size())
      throw DimensionError("atom " + std::to_string(a.id) + " has the wrong length");
    if (!a.atom.allFinite()) throw DomainError("atom " + std::to_string(a.id) + " is not finite");
    if (a.atom.norm() == 0.0) throw DomainError("atom " + std::to_string(a.id) + " is zero");
  }
  const int available = static_cast<int>(atoms_.size());
  budget_ = atom_budget < 0 ? available : std::min(atom_budget, available);
}

Matrix DictionaryProjector::atom_matrix(int count) const {
  Matrix a(target_.size(), count);
  for (int k = 0; k < count; ++k) a.col(k) = atoms_[static_cast<std::size_t>(k)].atom;
  return a;
}

DictionaryStage DictionaryProjector::candidate(int j, int count) const {
  DictionaryStage s;
  s.stage = j;
  s.atoms_used = count;
  if (count == 0) {
    s.coefficients = Vector(0);
    s.approximant = Vector::Zero(target_.size());
  } else {
    const Matrix a = atom_matrix(count);
    Vector coef = a.householderQr().solve(target_);
    // Least squares leaves rounding-level coefficients on atoms the target
    // does not use; drop them so exact representations stay exact.
    const double floor = 1e-12 * target_.norm();
    for (int k = 0; k < count; ++k)
      if (std::abs(coef(k)) * a.col(k).norm() <= floor) coef(k) = 0.0;
    s.coefficients = coef;
    s.approximant = a * coef;
  }
  const Vector residual = target_ - s.approximant;
  s.residual = family_.at(j)(as_row(residual));
  if (s.residual <= kNegligibleResidual * (1.0 + family_.finest()(as_row(target_))))
    s.residual = 0.0;
  return s;
}

DictionaryStage DictionaryProjector::compute(int j, const DictionaryStage* previous) const {
  const double required = std::ldexp(1.0, -j);
  const double ceiling =
      previous ? std::min(required, previous->residual) : required;
  const Vector prev_residual =
      previous ? Vector(target_ - previous->approximant) : Vector(target_);

  if (atoms_.empty() && target_.norm() > 0.0)
    throw ResidualBudgetExceeded(j, family_.at(j)(as_row(target_)), required);

  const int start = previous ? previous->atoms_used : 0;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int count = start; count <= budget_; ++count) {
    DictionaryStage s = candidate(j, count);
    best_residual = std::min(best_residual, s.residual);
    if (s.residual > ceiling) continue;
    bool monotone = true;
    const Vector residual = target_ - s.approximant;
    for (int i = 1; i < j && monotone; ++i) {
      const double before = family_.at(i)(as_row(prev_residual));
      const double after = family_.at(i)(as_row(residual));
      monotone = after <= before + kNegligibleResidual * (1.0 + before);
    }
    if (monotone) return s;
  }
  throw ResidualBudgetExceeded(j, best_residual, ceiling);
}

const DictionaryStage& DictionaryProjector::stage(int j) const {
  if (j < 1) throw DomainError("dictionary stages are numbered from 1");
  std::lock_guard lock(mutex_);
  while (static_cast<int>(stages_.size()) < j) {
    const DictionaryStage* previous = stages_.empty() ? nullptr : stages_.back().get();
    const int next = static_cast<int>(stages_.size()) + 1;
    stages_.push_back(std::make_unique<DictionaryStage>(compute(next, previous)));
  }
  return *stages_[static_cast<std::size_t>(j - 1)];
}

std::vector<DictionaryAtom> monomial_dictionary(const Vector& grid, int count) {
  std::vector<DictionaryAtom> atoms;
  for (int k = 0; k < count; ++k) {
    Vector a(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) a(i) = std::pow(grid(i), k);
    atoms.push_back({std::move(a), k});
  }
  return atoms;
}

Vector dyadic_grid(int levels) {
  if (levels < 0 || levels > 24) throw DomainError("dyadic grid level out of range");
  const int points = (1 << levels) + 1;
  Vector t(points);
  for (int i = 0; i < points; ++i) t(i) = std::ldexp(static_cast<double>(i), -levels);
  return t;
}

}  // namespace tensorseries
