#include "tensorseries/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "tensorseries/svd.hpp"

namespace tensorseries {

namespace {

void check_constant(double c) {
  if (!std::isfinite(c) || !(c > 1.0)) throw DomainError("bound constant c must be > 1");
}

void check_shape(const Representation& rep, const Seminorm& alpha) {
  if (rep.rows() != alpha.rows() || rep.cols() != alpha.cols())
    throw DimensionError("representation is " + std::to_string(rep.rows()) + "x" +
                         std::to_string(rep.cols()) + " but " + alpha.name() + " acts on " +
                         std::to_string(alpha.rows()) + "x" + std::to_string(alpha.cols()));
}

double max_term_norm(const Representation& rep, const Seminorm& alpha) {
  double best = 0.0;
  for (const auto& t : rep.terms()) {
    const double v = alpha(t);
    if (!std::isfinite(v)) throw DomainError(alpha.name() + " is not finite on a term");
    best = std::max(best, v);
  }
  return best;
}

// Smallest n >= 1 with budget * n >= need, i.e. need / n <= budget.
std::size_t smallest_count(double need, double budget) {
  const double estimate = need / budget;
  if (!std::isfinite(estimate) || estimate > static_cast<double>(kMaxReplicatedTerms)) {
    std::ostringstream msg;
    msg << "replication would need about " << estimate << " copies, exceeding the limit of "
        << kMaxReplicatedTerms << " terms";
    throw DomainError(msg.str());
  }
  auto fits = [&](std::size_t n) { return need <= budget * static_cast<double>(n); };
  auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(estimate)));
  while (n > 1 && fits(n - 1)) --n;
  while (!fits(n)) ++n;
  return n;
}

void check_total(std::size_t m, std::size_t n) {
  if (n > kMaxReplicatedTerms / std::max<std::size_t>(m, 1))
    throw DomainError("replicated representation would exceed " +
                      std::to_string(kMaxReplicatedTerms) + " terms");
}

// Worst alpha over all prefixes, accumulated in order.
double worst_prefix(const Representation& rep, const Seminorm& alpha) {
  Matrix acc = Matrix::Zero(rep.rows(), rep.cols());
  double worst = 0.0;
  for (const auto& t : rep.terms()) {
    acc.noalias() += t.x * t.y.transpose();
    worst = std::max(worst, alpha(acc));
  }
  return worst;
}

}  // namespace

ReplicationPlan plan_replication(std::size_t m, double alpha_u, double max_term_norm, double c) {
  check_constant(c);
  if (m < 1) throw DomainError("plan_replication needs m >= 1");
  if (!std::isfinite(alpha_u) || !std::isfinite(max_term_norm))
    throw DomainError("plan_replication inputs must be finite");
  if (!(alpha_u > 0.0))
    throw DomainError("plan_replication needs alpha(u) > 0; zero targets take the empty path");
  if (max_term_norm < 0.0) throw DomainError("max term norm must be >= 0");
  const std::size_t n =
      smallest_count(static_cast<double>(m) * max_term_norm, (c - 1.0) * alpha_u);
  check_total(m, n);
  return ReplicationPlan(m, n, c);
}

Representation replicate(const Representation& rep, std::size_t n) {
  if (n < 1) throw DomainError("replication count must be >= 1");
  if (n == 1) return rep;
  check_total(rep.size(), n);
  const double count = static_cast<double>(n);
  std::vector<ElementaryTensor> row;
  row.reserve(rep.size());
  for (const auto& t : rep.terms()) row.push_back({t.x / count, t.y});
  std::vector<ElementaryTensor> terms;
  terms.reserve(rep.size() * n);
  for (std::size_t q = 0; q < n; ++q) terms.insert(terms.end(), row.begin(), row.end());
  return Representation(std::move(terms), rep.target());
}

FlattenResult flatten_bounded(const Representation& rep, const Seminorm& alpha, double c) {
  check_constant(c);
  check_shape(rep, alpha);
  const double alpha_u = alpha(rep.target());
  const double max_norm = max_term_norm(rep, alpha);

  BoundCertificate cert;
  cert.c = c;
  cert.m = rep.size();
  cert.alpha_u = alpha_u;
  cert.max_term_norm = max_norm;

  if (alpha_u <= kZeroThreshold * (1.0 + max_norm)) {
    if (!approx_equal(Matrix::Zero(rep.rows(), rep.cols()), rep.target().coeffs()))
      throw DomainError(alpha.name() +
                        " vanishes on a nonzero target; use flatten_seminorm instead");
    cert.zero_target = true;
    return {Representation(rep.rows(), rep.cols()), cert};
  }

  const ReplicationPlan plan = plan_replication(rep.size(), alpha_u, max_norm, c);
  Representation flat = replicate(rep, plan.n);
  cert.n_used = plan.n;
  cert.worst_prefix_ratio = worst_prefix(flat, alpha) / alpha_u;
  if (!cert.passed()) {
    std::ostringstream msg;
    msg << "prefix bound violated: worst ratio " << cert.worst_prefix_ratio << " > c = " << c
        << " (is " << alpha.name() << " a seminorm?)";
    throw ContractViolation(msg.str());
  }
  return {std::move(flat), cert};
}

Representation flatten_seminorm(const Representation& rep, const Seminorm& alpha, double eps) {
  check_shape(rep, alpha);
  if (!std::isfinite(eps) || !(eps > 0.0)) throw DomainError("eps must be > 0");
  const double alpha_u = alpha(rep.target());
  const double max_norm = max_term_norm(rep, alpha);
  if (alpha_u > kZeroThreshold * (1.0 + max_norm))
    throw DomainError("target has positive seminorm; use flatten_bounded");
  if (rep.empty() || max_norm == 0.0) return rep;

  const std::size_t n = smallest_count(static_cast<double>(rep.size()) * max_norm, eps);
  Representation flat = replicate(rep, n);
  const double worst = worst_prefix(flat, alpha);
  if (worst > eps * (1.0 + kCertificateSlack) + alpha_u) {
    std::ostringstream msg;
    msg << "seminorm prefix bound violated: " << worst << " > eps = " << eps;
    throw ContractViolation(msg.str());
  }
  return flat;
}

std::string_view to_string(Expansion e) {
  switch (e) {
    case Expansion::automatic: return "automatic";
    case Expansion::svd: return "svd";
    case Expansion::standard_basis: return "standard_basis";
  }
  return "?";
}

Expansion parse_expansion(std::string_view name) {
  if (name == "automatic") return Expansion::automatic;
  if (name == "svd") return Expansion::svd;
  if (name == "standard_basis") return Expansion::standard_basis;
  throw DomainError("unknown expansion '" + std::string(name) + "'");
}

Representation expand(const CoefficientTensor& u, Expansion how) {
  std::vector<ElementaryTensor> terms;
  if (how == Expansion::standard_basis) {
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j) {
        if (u(i, j) == 0.0) continue;
        ElementaryTensor t{Vector::Zero(u.rows()), Vector::Zero(u.cols())};
        t.x(i) = u(i, j);
        t.y(j) = 1.0;
        terms.push_back(std::move(t));
      }
  } else {
    const Svd svd = jacobi_svd(u.coeffs());
    const int rank = svd.rank();
    for (int i = 0; i < rank; ++i) {
      const double root = std::sqrt(svd.sigma(i));
      terms.push_back({root * svd.u.col(i), root * svd.v.col(i)});
    }
  }
  return Representation(std::move(terms), u);
}

double absolute_sum(const Representation& rep, VectorNorm x_norm, VectorNorm y_norm) {
  double total = 0.0;
  for (const auto& t : rep.terms()) total += vector_norm(x_norm, t.x) * vector_norm(y_norm, t.y);
  return total;
}

ProjectiveResult projective_absolute(const CoefficientTensor& u, const SpaceSpec& space_x,
                                     const SpaceSpec& space_y, double slack) {
  if (space_x.norm != VectorNorm::euclidean || space_y.norm != VectorNorm::euclidean)
    throw DomainError("projective_absolute needs euclidean spaces (pi = nuclear norm)");
  if (!(slack >= 0.0)) throw DomainError("slack must be >= 0");
  const NormEvaluator nuclear(NormKind::nuclear, space_x, space_y);
  ProjectiveResult out{expand(u, Expansion::svd), 0.0, nuclear(u)};
  out.absolute_sum = absolute_sum(out.rep);
  if (out.absolute_sum > (1.0 + slack) * out.nuclear + std::numeric_limits<double>::min()) {
    std::ostringstream msg;
    msg << "absolute sum " << out.absolute_sum << " exceeds (1 + " << slack << ") * pi(u) = "
        << (1.0 + slack) * out.nuclear;
    throw ContractViolation(msg.str());
  }
  return out;
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_terms: return "max_terms";
    case StopReason::max_blocks: return "max_blocks";
    case StopReason::scheme_exhausted: return "scheme_exhausted";
    case StopReason::stage_limit: return "stage_limit";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// SeriesStream

SeriesStream::SeriesStream(int rows, int cols, double c) : rows_(rows), cols_(cols), c_(c) {}

std::size_t SeriesStream::block_of(std::size_t m) const {
  if (m < 1 || m > terms_.size()) throw DomainError("term index out of range");
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), m,
                             [](const BlockRecord& b, std::size_t v) { return b.block.end < v; });
  while (it != blocks_.end() && it->block.begin >= m) ++it;
  return static_cast<std::size_t>(it - blocks_.begin());
}

double SeriesStream::certified_bound(std::size_t m) const {
  if (m > terms_.size()) throw DomainError("term index out of range");
  std::vector<double> dropped(blocks_.size() + 1, 0.0);
  for (std::size_t b = 0; b < blocks_.size(); ++b) dropped[b + 1] = dropped[b] + blocks_[b].dropped;

  double bound = std::numeric_limits<double>::infinity();
  if (m == 0) {
    bound = initial_bound_;
  } else {
    const std::size_t b = block_of(m);
    const double before = b == 0 ? initial_bound_ : blocks_[b - 1].stage_bound;
    bound = before + blocks_[b].prefix_bound + dropped[b + 1];
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    if (blocks_[b].block.end == m && !blocks_[b].truncated)
      bound = std::min(bound, blocks_[b].stage_bound + dropped[b + 1]);
  return bound;
}

double SeriesStream::final_certified_bound() const { return certified_bound(terms_.size()); }

CoefficientTensor SeriesStream::partial_sum(std::size_t m) const {
  if (m > terms_.size()) throw DomainError("term index out of range");
  Matrix acc = Matrix::Zero(rows_, cols_);
  for (std::size_t i = 0; i < m; ++i) acc.noalias() += terms_[i].outer();
  return CoefficientTensor(std::move(acc));
}

Representation SeriesStream::as_representation() const {
  return Representation::from_terms(rows_, cols_, terms_);
}

// ---------------------------------------------------------------------------
// Telescope

Telescope::Telescope(const ApproximationScheme& scheme, SeminormFamily family,
                     TelescopeOptions options)
    : scheme_(scheme), family_(std::move(family)), options_(std::move(options)),
      expansion_(options_.expansion == Expansion::automatic ? Expansion::standard_basis
                                                            : options_.expansion),
      stream_(scheme.rows(), scheme.cols(), options_.c) {
  check_constant(options_.c);
  if (family_.finest().rows() != scheme.rows() || family_.finest().cols() != scheme.cols())
    throw DimensionError("seminorm family does not match the scheme's tensor shape");
  if (!(options_.envelope.ratio > 0.0 && options_.envelope.ratio < 1.0))
    throw DomainError("envelope ratio must lie in (0, 1): bounds must be summable");
  if (options_.envelope.scale && !(*options_.envelope.scale >= 0.0))
    throw DomainError("envelope scale must be >= 0");
  if (options_.stop.tolerance && !(*options_.stop.tolerance >= 0.0))
    throw DomainError("tolerance must be >= 0");
  if (options_.reference) {
    if (options_.reference->rows() != scheme.rows() || options_.reference->cols() != scheme.cols())
      throw DimensionError("reference target does not match the scheme's tensor shape");
    reference_norm_ = family_.finest()(*options_.reference);
  }
}

namespace {

TelescopeOptions with_norm_expansion(TelescopeOptions options, const NormEvaluator& norm) {
  if (options.expansion == Expansion::automatic)
    options.expansion = (norm.space_x().norm == VectorNorm::euclidean &&
                         norm.space_y().norm == VectorNorm::euclidean)
                            ? Expansion::svd
                            : Expansion::standard_basis;
  return options;
}

}  // namespace

Telescope::Telescope(const ApproximationScheme& scheme, const NormEvaluator& norm,
                     TelescopeOptions options)
    : Telescope(scheme, SeminormFamily::single(Seminorm(norm)),
                with_norm_expansion(std::move(options), norm)) {
  single_norm_ = true;
}

void Telescope::finish(StopReason reason) {
  done_ = true;
  stream_.stop_reason_ = reason;
}

Representation Telescope::increment_terms(int j, const CoefficientTensor& increment) const {
  if (auto natural = scheme_.difference_terms(j)) {
    if (natural->rows() != increment.rows() || natural->cols() != increment.cols())
      throw DimensionError("scheme difference terms have the wrong shape");
    return Representation(natural->terms(), increment);
  }
  return expand(increment, expansion_);
}

bool Telescope::advance() {
  if (done_) return false;
  const int j = next_stage_;
  if (j > options_.stage_limit) {
    finish(StopReason::stage_limit);
    return false;
  }

  SchemeStage st{CoefficientTensor(1, 1), 0.0};
  try {
    st = scheme_.stage(j);
  } catch (const SchemeExhausted&) {
    finish(StopReason::scheme_exhausted);
    return false;
  }
  if (st.approx.rows() != stream_.rows() || st.approx.cols() != stream_.cols())
    throw DimensionError("scheme stage " + std::to_string(j) + " has the wrong shape");

  const Seminorm& alpha = family_.at(j);
  const double bound = st.bound;
  auto violation = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "scheme " << scheme_.kind() << ", stage " << j << ": " << what;
    throw ContractViolation(msg.str());
  };
  if (!std::isfinite(bound) || bound < 0.0) violation("error bound is not a finite nonnegative number");

  if (j == 1) {
    const double first = alpha(st.approx);
    envelope_scale_ = options_.envelope.scale.value_or(first + 1.0);
    stream_.initial_bound_ = first + bound;
  } else if (bound > previous_bound_) {
    std::ostringstream what;
    what << "error bound " << bound << " increases over the previous " << previous_bound_;
    violation(what.str());
  }
  const double envelope = envelope_scale_ * std::pow(options_.envelope.ratio, j);
  if (bound > envelope * (1.0 + 1e-12)) {
    std::ostringstream what;
    what << "error bound " << bound << " exceeds the summable envelope " << envelope;
    violation(what.str());
  }
  if (options_.reference) {
    const double measured = alpha(st.approx - *options_.reference);
    if (measured > bound + kCertificateSlack * (1.0 + reference_norm_)) {
      std::ostringstream what;
      what << "measured error " << measured << " exceeds certified bound " << bound;
      violation(what.str());
    }
  }

  const CoefficientTensor increment = previous_ ? st.approx - *previous_ : st.approx;
  const Representation terms = increment_terms(j, increment);

  BlockRecord rec;
  rec.block.index = j;
  rec.stage_bound = bound;
  rec.seminorm = alpha.name();
  rec.block.block_norm = alpha(increment);
  rec.certificate.c = options_.c;

  Representation flat(stream_.rows(), stream_.cols());
  if (!terms.empty()) {
    double max_norm = 0.0;
    for (const auto& t : terms.terms()) max_norm = std::max(max_norm, alpha(t));
    const bool vanishes = rec.block.block_norm <= kZeroThreshold * (1.0 + max_norm);
    if (vanishes && single_norm_) {
      // alpha is a norm, so the increment is zero up to rounding.
      rec.dropped = rec.block.block_norm;
      rec.certificate.zero_target = true;
    } else if (vanishes) {
      const double eps = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
      flat = flatten_seminorm(terms, alpha, eps);
      rec.seminorm_fallback = true;
      rec.prefix_bound = eps + rec.block.block_norm;
    } else {
      FlattenResult fr = flatten_bounded(terms, alpha, options_.c);
      flat = std::move(fr.rep);
      rec.certificate = fr.certificate;
      rec.prefix_bound = options_.c * rec.block.block_norm;
    }
  } else {
    rec.certificate.zero_target = true;
  }

  auto& out = stream_.terms_;
  rec.block.begin = out.size();
  std::size_t take = flat.size();
  if (options_.stop.max_terms) {
    const std::size_t room = *options_.stop.max_terms > out.size()
                                 ? *options_.stop.max_terms - out.size()
                                 : 0;
    if (take > room) {
      take = room;
      rec.truncated = true;
    }
  }
  out.insert(out.end(), flat.terms().begin(),
             flat.terms().begin() + static_cast<std::ptrdiff_t>(take));
  rec.block.end = out.size();
  stream_.blocks_.push_back(std::move(rec));

  previous_ = st.approx;
  previous_bound_ = bound;
  ++next_stage_;

  const auto& stop = options_.stop;
  if (stream_.blocks_.back().truncated) {
    finish(StopReason::max_terms);
  } else if (stop.tolerance && bound <= *stop.tolerance &&
             family_.size() <= static_cast<std::size_t>(next_stage_ - 1)) {
    // A small bound in a coarse seminorm says nothing about the finer ones.
    finish(StopReason::tolerance);
  } else if (stop.max_blocks && static_cast<int>(stream_.blocks_.size()) >= *stop.max_blocks) {
    finish(StopReason::max_blocks);
  } else if (stop.max_terms && out.size() >= *stop.max_terms) {
    finish(StopReason::max_terms);
  }
  return true;
}

SeriesStream telescope(const ApproximationScheme& scheme, const NormEvaluator& norm,
                       const TelescopeOptions& options) {
  Telescope t(scheme, norm, options);
  while (t.advance()) {
  }
  return std::move(t).take();
}

SeriesStream telescope(const ApproximationScheme& scheme, const SeminormFamily& family,
                       const TelescopeOptions& options) {
  Telescope t(scheme, family, options);
  while (t.advance()) {
  }
  return std::move(t).take();
}

// ---------------------------------------------------------------------------
// Scalar series over a dictionary

Vector SpanSeries::partial_sum(std::size_t m, const std::vector<DictionaryAtom>& atoms) const {
  if (m > terms.size()) throw DomainError("term index out of range");
  if (atoms.empty()) {
    if (m > 0) throw DomainError("partial_sum needs the dictionary");
    return Vector(0);
  }
  std::map<int, const Vector*> by_id;
  for (const auto& a : atoms) by_id[a.id] = &a.atom;
  Vector acc = Vector::Zero(atoms.front().atom.size());
  for (std::size_t i = 0; i < m; ++i) {
    auto it = by_id.find(terms[i].atom_id);
    if (it == by_id.end()) throw DomainError("unknown atom id " + std::to_string(terms[i].atom_id));
    acc += terms[i].lambda * *it->second;
  }
  return acc;
}

SpanSeries dense_span_series(const DictionaryProjector& projector, double c,
                             const StopRule& stop) {
  check_constant(c);
  constexpr int kStageLimit = 200;
  const auto& atoms = projector.atoms();
  const int width = static_cast<int>(projector.target().size());

  SpanSeries out;
  Vector previous = Vector::Zero(0);
  for (int j = 1;; ++j) {
    if (j > kStageLimit) {
      out.stop_reason = StopReason::stage_limit;
      break;
    }
    const DictionaryStage& st = projector.stage(j);
    const Seminorm& alpha = projector.family().at(j);

    Vector delta = st.coefficients;
    delta.head(previous.size()) -= previous;
    std::vector<ElementaryTensor> terms;
    std::vector<int> ids;
    for (Eigen::Index k = 0; k < delta.size(); ++k) {
      if (delta(k) == 0.0) continue;
      terms.push_back({Vector::Constant(1, delta(k)), atoms[static_cast<std::size_t>(k)].atom});
      ids.push_back(atoms[static_cast<std::size_t>(k)].id);
    }

    SpanBlock block;
    block.stage = j;
    block.atoms_used = st.atoms_used;
    block.residual = st.residual;
    block.begin = out.terms.size();

    if (!terms.empty()) {
      const Representation inc = Representation::from_terms(1, width, std::move(terms));
      block.block_norm = alpha(inc.target());
      double max_norm = 0.0;
      for (const auto& t : inc.terms()) max_norm = std::max(max_norm, alpha(t));
      Representation flat(1, width);
      if (block.block_norm <= kZeroThreshold * (1.0 + max_norm)) {
        const double eps = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
        flat = flatten_seminorm(inc, alpha, eps);
        block.seminorm_fallback = true;
        block.prefix_bound = eps + block.block_norm;
      } else {
        flat = flatten_bounded(inc, alpha, c).rep;
        block.prefix_bound = c * block.block_norm;
      }
      const std::size_t m = ids.size();
      std::size_t take = flat.size();
      if (stop.max_terms) {
        const std::size_t room =
            *stop.max_terms > out.terms.size() ? *stop.max_terms - out.terms.size() : 0;
        take = std::min(take, room);
      }
      for (std::size_t l = 0; l < take; ++l)
        out.terms.push_back({flat.term(l).x(0), ids[l % m]});
      block.end = out.terms.size();
      out.blocks.push_back(block);
      if (take < flat.size()) {
        out.stop_reason = StopReason::max_terms;
        break;
      }
    } else {
      block.end = block.begin;
      out.blocks.push_back(block);
    }
    previous = st.coefficients;

    if (stop.tolerance && st.residual <= *stop.tolerance &&
        projector.family().size() <= static_cast<std::size_t>(j)) {
      out.stop_reason = StopReason::tolerance;
      break;
    }
    if (stop.max_blocks && static_cast<int>(out.blocks.size()) >= *stop.max_blocks) {
      out.stop_reason = StopReason::max_blocks;
      break;
    }
    if (stop.max_terms && out.terms.size() >= *stop.max_terms) {
      out.stop_reason = StopReason::max_terms;
      break;
    }
  }
  return out;
}

SpanSeries dense_span_series(const Vector& target, const std::vector<DictionaryAtom>& dictionary,
                             const SeminormFamily& family, double c, const StopRule& stop) {
  const DictionaryProjector projector(target, dictionary, family);
  return dense_span_series(projector, c, stop);
}

}  // namespace tensorseries
