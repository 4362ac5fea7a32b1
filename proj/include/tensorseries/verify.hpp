#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tensorseries/compensated.hpp"
#include "tensorseries/construct.hpp"
#include "tensorseries/norms.hpp"

// Independent re-verification of construction certificates. Nothing here
// reads the values recorded at construction time when measuring; recorded
// values are only compared against.

namespace tensorseries {

/// Above this many terms, partial sums are accumulated with compensated
/// summation.
inline constexpr std::size_t kCompensatedSumThreshold = 10'000;

/// Running partial sums s_1, s_2, ... of a term list, compensated when long.
class PartialSums {
 public:
  PartialSums(int rows, int cols, std::size_t expected_terms);
  void add(const ElementaryTensor& t);
  Matrix value() const;

 private:
  bool compensated_;
  Matrix plain_;
  CompensatedMatrixSum accurate_;
};

struct PrefixReport {
  BoundCertificate certificate;
  double worst_prefix_norm = 0.0;
  bool violation = false;  // worst ratio > c + 1e-9 (never set for zero targets)
};

/// Recomputes every prefix norm of `rep` and compares with c alpha(u).
/// Zero targets are flagged via certificate.zero_target; the ratio is then
/// undefined and reported as 0.
PrefixReport prefix_bound_report(const Representation& rep, const Seminorm& alpha, double c);

struct TraceRow {
  std::size_t m = 0;
  double error = 0.0;
  double certified_bound = 0.0;
  int block = 0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  std::size_t requested = 0;
  bool truncated = false;  // the stream ended before `requested` terms

  /// error <= certified_bound + slack at every row.
  bool holds(double slack = kCertificateSlack) const;
  /// Rows at completed block boundaries.
  std::vector<TraceRow> boundaries(const SeriesStream& stream) const;
};

/// alpha(s_m - u) for m = 1 .. min(max_terms, stream size), next to the
/// stream's certified bound for m.
ConvergenceTrace convergence_trace(const SeriesStream& stream, const CoefficientTensor& target,
                                   const Seminorm& alpha, std::size_t max_terms);

struct BlockAudit {
  int index = 0;
  double recorded_norm = 0.0;
  double measured_norm = 0.0;  // alpha_n of the sum of the block's terms
  double worst_prefix = 0.0;   // alpha_n over prefixes inside the block
  double prefix_bound = 0.0;
  bool ok = true;
};

struct StreamAudit {
  std::vector<BlockAudit> blocks;
  bool ok() const;
};

/// Re-derives each block's norm and within-block prefix bound from the
/// stream's terms alone.
StreamAudit audit_stream(const SeriesStream& stream, const SeminormFamily& family);
StreamAudit audit_stream(const SeriesStream& stream, const NormEvaluator& norm);

/// Exploratory measurements for unconditional convergence. Ratios are
/// alpha(partial) / alpha(u); undefined (NaN) when alpha(u) = 0.
struct StressReport {
  std::size_t trials = 0;
  double worst_prefix_ratio_over_permutations = 0.0;
  double worst_subset_ratio = 0.0;
  std::uint64_t seed = 0;

  std::size_t terms = 0;
  std::size_t permutations_evaluated = 0;
  std::size_t subsets_evaluated = 0;
  bool permutations_exhaustive = false;
  bool subsets_exhaustive = false;
  bool zero_target = false;
  /// min, median, 90th percentile, max of the per-permutation worst ratios.
  std::vector<double> permutation_quantiles;
};

inline constexpr std::size_t kExhaustivePermutationTerms = 5;
inline constexpr std::size_t kExhaustiveSubsetTerms = 16;

/// Worst prefix ratio along `trials` random orders (seed + trial index per
/// trial), or along all N! orders when N <= 5.
StressReport permutation_stress(const Representation& rep, const Seminorm& alpha,
                                std::size_t trials, std::uint64_t seed);

/// Worst alpha(sum over J) / alpha(u) over random subsets J, or over all
/// 2^N subsets when N <= 16. The full set is always included.
StressReport subset_bound_scan(const Representation& rep, const Seminorm& alpha,
                               std::size_t trials, std::uint64_t seed);

/// Both probes, merged into one report.
StressReport stress(const Representation& rep, const Seminorm& alpha, std::size_t trials,
                    std::uint64_t seed);

}  // namespace tensorseries
