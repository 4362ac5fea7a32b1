#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "tensorseries/norms.hpp"

namespace tensorseries {

/// Element a of the spanning set A, identified by `id`.
struct DictionaryAtom {
  Vector atom;
  int id = 0;
};

/// The dictionary could not reach a stage's residual target within its atom
/// budget.
class ResidualBudgetExceeded : public ContractViolation {
 public:
  ResidualBudgetExceeded(int stage, double residual, double required);

  int stage() const { return stage_; }
  double residual() const { return residual_; }
  double required() const { return required_; }

 private:
  int stage_;
  double residual_;
  double required_;
};

/// Stage j of a dictionary projection: least squares over the first
/// `atoms_used` atoms with alpha_j residual below 2^-j.
struct DictionaryStage {
  int stage = 0;
  int atoms_used = 0;
  Vector coefficients;  // one per used atom, in dictionary order
  Vector approximant;
  double residual = 0.0;  // alpha_j(target - approximant), 0 when negligible
};

/// Residuals at or below this fraction of (1 + alpha(target)) are reported
/// as exactly zero.
inline constexpr double kNegligibleResidual = 1e-12;

/// Computes the stages of a dictionary approximation of a vector target.
///
/// Vectors of length G are modelled as 1 x G tensors, so the seminorm family
/// must have that shape. Stage j keeps the previous atom count when it
/// already meets the stage's target; otherwise it admits atoms one at a time
/// until alpha_j(residual) <= min(2^-j, previous residual) and no coarser
/// seminorm's residual grows. Stages are memoized; access is synchronized.
class DictionaryProjector {
 public:
  DictionaryProjector(Vector target, std::vector<DictionaryAtom> atoms, SeminormFamily family,
                      int atom_budget = -1);

  const DictionaryStage& stage(int j) const;

  const Vector& target() const { return target_; }
  const std::vector<DictionaryAtom>& atoms() const { return atoms_; }
  const SeminormFamily& family() const { return family_; }
  int atom_budget() const { return budget_; }

  /// Atom vectors as the columns of a G x count matrix.
  Matrix atom_matrix(int count) const;

 private:
  DictionaryStage compute(int j, const DictionaryStage* previous) const;
  DictionaryStage candidate(int j, int count) const;

  Vector target_;
  std::vector<DictionaryAtom> atoms_;
  SeminormFamily family_;
  int budget_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<DictionaryStage>> stages_;
};

/// Samples t^0 .. t^(count-1) on `grid`, ids 0 .. count-1.
std::vector<DictionaryAtom> monomial_dictionary(const Vector& grid, int count);

/// 2^levels + 1 equispaced points on [0, 1].
Vector dyadic_grid(int levels);

}  // namespace tensorseries
