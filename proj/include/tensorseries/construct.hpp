#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tensorseries/core.hpp"
#include "tensorseries/dictionary.hpp"
#include "tensorseries/norms.hpp"
#include "tensorseries/scheme.hpp"

namespace tensorseries {

inline constexpr double kDefaultBoundConstant = 2.0;

/// alpha(u) <= kZeroThreshold * (1 + max term norm) counts as alpha(u) = 0.
inline constexpr double kZeroThreshold = 1e-12;

/// Slack allowed on certified inequalities.
inline constexpr double kCertificateSlack = 1e-9;

/// Largest representation the replication trick will materialize.
inline constexpr std::size_t kMaxReplicatedTerms = 20'000'000;

/// Record of the bound alpha(prefix_p) <= c alpha(u) for every prefix p.
struct BoundCertificate {
  double c = kDefaultBoundConstant;
  double worst_prefix_ratio = 0.0;  // max_p alpha(prefix_p) / alpha(u); 0 for zero targets
  std::size_t n_used = 0;           // replication count; 0 for zero targets
  std::size_t m = 0;                // terms in the input representation
  double alpha_u = 0.0;
  double max_term_norm = 0.0;
  bool zero_target = false;

  bool passed() const { return zero_target || worst_prefix_ratio <= c + kCertificateSlack; }
};

/// Smallest n >= 1 with (m / n) * max_term_norm <= (c - 1) * alpha_u.
ReplicationPlan plan_replication(std::size_t m, double alpha_u, double max_term_norm,
                                 double c = kDefaultBoundConstant);

/// n rows of (1/n) e_k (x) f_k, row after row.
Representation replicate(const Representation& rep, std::size_t n);

struct FlattenResult {
  Representation rep;
  BoundCertificate certificate;
};

/// Replicates `rep` so that every prefix satisfies alpha(prefix) <= c alpha(u).
/// A zero target yields the empty representation.
FlattenResult flatten_bounded(const Representation& rep, const Seminorm& alpha,
                              double c = kDefaultBoundConstant);

/// For a target in the null space of `alpha`: replicates so that every
/// prefix has seminorm <= eps. Throws DomainError if alpha(target) > 0.
Representation flatten_seminorm(const Representation& rep, const Seminorm& alpha, double eps);

enum class Expansion { automatic, svd, standard_basis };

std::string_view to_string(Expansion e);
Expansion parse_expansion(std::string_view name);

/// Terms of u: sqrt(sigma_i) u_i (x) sqrt(sigma_i) v_i for the SVD, or
/// u_ij e_i (x) f_j over nonzero entries for the standard basis.
Representation expand(const CoefficientTensor& u, Expansion how);

struct ProjectiveResult {
  Representation rep;
  double absolute_sum = 0.0;  // sum ||x_l|| ||y_l||
  double nuclear = 0.0;       // pi(u)
};

/// SVD representation with sum ||x_l|| ||y_l|| = pi(u). `slack` is the
/// relative tolerance of the check absolute_sum <= (1 + slack) pi(u).
ProjectiveResult projective_absolute(const CoefficientTensor& u, const SpaceSpec& space_x,
                                     const SpaceSpec& space_y, double slack = kCertificateSlack);

/// sum ||x_l|| ||y_l|| under the given vector norms.
double absolute_sum(const Representation& rep, VectorNorm x_norm = VectorNorm::euclidean,
                    VectorNorm y_norm = VectorNorm::euclidean);

struct StopRule {
  std::optional<std::size_t> max_terms;
  std::optional<double> tolerance = 1e-6;
  std::optional<int> max_blocks;
};

enum class StopReason { tolerance, max_terms, max_blocks, scheme_exhausted, stage_limit };

std::string_view to_string(StopReason r);

/// eps_j <= scale * ratio^j; scale defaults to alpha_1(u_1) + 1.
struct Envelope {
  std::optional<double> scale;
  double ratio = 0.5;
};

struct TelescopeOptions {
  double c = kDefaultBoundConstant;
  StopRule stop;
  Envelope envelope;
  /// When set, every stage is checked against alpha_j(u_j - reference) <= eps_j.
  std::optional<CoefficientTensor> reference;
  Expansion expansion = Expansion::automatic;
  int stage_limit = 200;
};

/// Per-block record of a telescoped series. Block n holds the flattened
/// increment v_n = u_n - u_{n-1}.
struct BlockRecord {
  SeriesBlock block;
  double stage_bound = 0.0;   // eps_n >= alpha_n(u_n - u)
  double prefix_bound = 0.0;  // every prefix inside the block has alpha_n <= this
  std::string seminorm;
  bool seminorm_fallback = false;
  bool truncated = false;
  double dropped = 0.0;  // alpha_n of an increment discarded as numerically zero
  BoundCertificate certificate;
};

/// A materialized prefix of the series produced by a Telescope.
class SeriesStream {
 public:
  SeriesStream(int rows, int cols, double c);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double c() const { return c_; }
  const std::vector<ElementaryTensor>& terms() const { return terms_; }
  const std::vector<BlockRecord>& blocks() const { return blocks_; }
  std::size_t size() const { return terms_.size(); }
  StopReason stop_reason() const { return stop_reason_; }

  /// alpha(u) is bounded by this before any term is taken: alpha_1(u_1) + eps_1.
  double initial_bound() const { return initial_bound_; }

  /// Index of the block containing term m (1-based m, 1 <= m <= size()).
  std::size_t block_of(std::size_t m) const;

  /// Certified bound on alpha(s_m - u), m in 0..size().
  double certified_bound(std::size_t m) const;

  /// Last certified bound at a completed block boundary.
  double final_certified_bound() const;

  CoefficientTensor partial_sum(std::size_t m) const;
  Representation as_representation() const;

 private:
  friend class Telescope;

  int rows_;
  int cols_;
  double c_;
  double initial_bound_ = 0.0;
  StopReason stop_reason_ = StopReason::scheme_exhausted;
  std::vector<ElementaryTensor> terms_;
  std::vector<BlockRecord> blocks_;
};

/// Builds the series of a scheme one block at a time: v_1 = u_1,
/// v_j = u_j - u_{j-1}, each increment flattened with alpha_j.
///
/// The scheme must outlive the Telescope.
class Telescope {
 public:
  Telescope(const ApproximationScheme& scheme, SeminormFamily family, TelescopeOptions options);
  Telescope(const ApproximationScheme& scheme, const NormEvaluator& norm, TelescopeOptions options);

  /// Produces the next block. Returns false once the stop rule has fired or
  /// the scheme is exhausted.
  bool advance();

  const SeriesStream& stream() const { return stream_; }
  SeriesStream take() && { return std::move(stream_); }

 private:
  void finish(StopReason reason);
  Representation increment_terms(int j, const CoefficientTensor& increment) const;

  const ApproximationScheme& scheme_;
  SeminormFamily family_;
  TelescopeOptions options_;
  Expansion expansion_;
  SeriesStream stream_;
  std::optional<CoefficientTensor> previous_;
  double previous_bound_ = 0.0;
  double envelope_scale_ = 0.0;
  double reference_norm_ = 0.0;
  int next_stage_ = 1;
  bool single_norm_ = false;
  bool done_ = false;
};

SeriesStream telescope(const ApproximationScheme& scheme, const NormEvaluator& norm,
                       const TelescopeOptions& options = {});
SeriesStream telescope(const ApproximationScheme& scheme, const SeminormFamily& family,
                       const TelescopeOptions& options = {});

struct ScalarSeriesTerm {
  double lambda = 0.0;
  int atom_id = 0;
};

struct SpanBlock {
  int stage = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  int atoms_used = 0;
  double residual = 0.0;      // alpha_j(target - w_j)
  double block_norm = 0.0;    // alpha_j(w_j - w_{j-1})
  double prefix_bound = 0.0;  // bound on alpha_j of every prefix inside the block
  bool seminorm_fallback = false;
};

struct SpanSeries {
  std::vector<ScalarSeriesTerm> terms;
  std::vector<SpanBlock> blocks;
  StopReason stop_reason = StopReason::scheme_exhausted;

  /// sum of the first m terms lambda_l a_(id_l).
  Vector partial_sum(std::size_t m, const std::vector<DictionaryAtom>& atoms) const;
};

/// Scalar series sum lambda_n a_n converging to `target`, built from the
/// telescoped dictionary stages with the replication trick applied per block.
SpanSeries dense_span_series(const DictionaryProjector& projector,
                             double c = kDefaultBoundConstant, const StopRule& stop = {});

SpanSeries dense_span_series(const Vector& target, const std::vector<DictionaryAtom>& dictionary,
                             const SeminormFamily& family, double c = kDefaultBoundConstant,
                             const StopRule& stop = {});

}  // namespace tensorseries
