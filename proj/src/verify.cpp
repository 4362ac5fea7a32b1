#include "tensorseries/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace tensorseries {

PartialSums::PartialSums(int rows, int cols, std::size_t expected_terms)
    : compensated_(expected_terms > kCompensatedSumThreshold),
      plain_(Matrix::Zero(rows, cols)),
      accurate_(compensated_ ? rows : 1, compensated_ ? cols : 1) {}

void PartialSums::add(const ElementaryTensor& t) {
  if (compensated_)
    accurate_.add(t);
  else
    plain_.noalias() += t.x * t.y.transpose();
}

Matrix PartialSums::value() const { return compensated_ ? accurate_.value() : plain_; }

namespace {

bool is_zero_target(double alpha_u, double max_term) {
  return alpha_u <= kZeroThreshold * (1.0 + max_term);
}

double max_term_norm(const Representation& rep, const Seminorm& alpha) {
  double best = 0.0;
  for (const auto& t : rep.terms()) best = std::max(best, alpha(t));
  return best;
}

// Uniform draw from [0, n) without modulo bias.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

double worst_along(const Representation& rep, const std::vector<std::size_t>& order,
                   const Seminorm& alpha) {
  PartialSums sums(rep.rows(), rep.cols(), order.size());
  double worst = 0.0;
  for (std::size_t idx : order) {
    sums.add(rep.term(idx));
    worst = std::max(worst, alpha(sums.value()));
  }
  return worst;
}

double subset_norm(const Representation& rep, const std::vector<bool>& chosen,
                   const Seminorm& alpha) {
  PartialSums sums(rep.rows(), rep.cols(), rep.size());
  for (std::size_t i = 0; i < rep.size(); ++i)
    if (chosen[i]) sums.add(rep.term(i));
  return alpha(sums.value());
}

std::vector<double> quantiles(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    return values[static_cast<std::size_t>(q * static_cast<double>(values.size() - 1))];
  };
  return {values.front(), at(0.5), at(0.9), values.back()};
}

}  // namespace

PrefixReport prefix_bound_report(const Representation& rep, const Seminorm& alpha, double c) {
  PrefixReport out;
  out.certificate.c = c;
  out.certificate.m = rep.size();
  out.certificate.alpha_u = alpha(rep.target());
  out.certificate.max_term_norm = max_term_norm(rep, alpha);

  PartialSums sums(rep.rows(), rep.cols(), rep.size());
  for (const auto& t : rep.terms()) {
    sums.add(t);
    out.worst_prefix_norm = std::max(out.worst_prefix_norm, alpha(sums.value()));
  }
  if (is_zero_target(out.certificate.alpha_u, out.certificate.max_term_norm)) {
    out.certificate.zero_target = true;
    return out;
  }
  out.certificate.worst_prefix_ratio = out.worst_prefix_norm / out.certificate.alpha_u;
  out.violation = !out.certificate.passed();
  return out;
}

bool ConvergenceTrace::holds(double slack) const {
  return std::all_of(rows.begin(), rows.end(), [&](const TraceRow& r) {
    return r.error <= r.certified_bound + slack;
  });
}

std::vector<TraceRow> ConvergenceTrace::boundaries(const SeriesStream& stream) const {
  std::vector<TraceRow> out;
  for (const auto& r : rows)
    for (const auto& b : stream.blocks())
      if (!b.truncated && b.block.end == r.m && b.block.size() > 0) {
        out.push_back(r);
        break;
      }
  return out;
}

ConvergenceTrace convergence_trace(const SeriesStream& stream, const CoefficientTensor& target,
                                   const Seminorm& alpha, std::size_t max_terms) {
  if (target.rows() != stream.rows() || target.cols() != stream.cols())
    throw DimensionError("trace target does not match the stream's tensor shape");
  ConvergenceTrace trace;
  trace.requested = max_terms;
  const std::size_t count = std::min(max_terms, stream.size());
  trace.truncated = count < max_terms;

  PartialSums sums(stream.rows(), stream.cols(), count);
  for (std::size_t m = 1; m <= count; ++m) {
    sums.add(stream.terms()[m - 1]);
    TraceRow row;
    row.m = m;
    row.error = alpha(Matrix(sums.value() - target.coeffs()));
    row.certified_bound = stream.certified_bound(m);
    row.block = stream.blocks()[stream.block_of(m)].block.index;
    trace.rows.push_back(row);
  }
  return trace;
}

bool StreamAudit::ok() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const BlockAudit& b) { return b.ok; });
}

StreamAudit audit_stream(const SeriesStream& stream, const SeminormFamily& family) {
  StreamAudit audit;
  for (const auto& rec : stream.blocks()) {
    const Seminorm& alpha = family.at(rec.block.index);
    BlockAudit a;
    a.index = rec.block.index;
    a.recorded_norm = rec.block.block_norm;
    a.prefix_bound = rec.prefix_bound;
    PartialSums sums(stream.rows(), stream.cols(), rec.block.size());
    for (std::size_t i = rec.block.begin; i < rec.block.end; ++i) {
      sums.add(stream.terms()[i]);
      a.worst_prefix = std::max(a.worst_prefix, alpha(sums.value()));
    }
    a.measured_norm = alpha(sums.value());
    const double scale = 1.0 + a.recorded_norm;
    a.ok = a.worst_prefix <= a.prefix_bound + kCertificateSlack * scale;
    // A complete block sums to its increment, unless the increment was
    // discarded as numerically zero.
    if (!rec.truncated && rec.dropped == 0.0)
      a.ok = a.ok && std::abs(a.measured_norm - a.recorded_norm) <= kCertificateSlack * scale;
    if (!rec.truncated && !rec.certificate.zero_target && !rec.seminorm_fallback &&
        rec.block.block_norm > 0.0) {
      const double ratio = a.worst_prefix / rec.block.block_norm;
      a.ok = a.ok && std::abs(ratio - rec.certificate.worst_prefix_ratio) <= kCertificateSlack;
    }
    audit.blocks.push_back(a);
  }
  return audit;
}

StreamAudit audit_stream(const SeriesStream& stream, const NormEvaluator& norm) {
  return audit_stream(stream, SeminormFamily::single(Seminorm(norm)));
}

StressReport permutation_stress(const Representation& rep, const Seminorm& alpha,
                                std::size_t trials, std::uint64_t seed) {
  StressReport out;
  out.trials = trials;
  out.seed = seed;
  out.terms = rep.size();
  const double alpha_u = alpha(rep.target());
  out.zero_target = is_zero_target(alpha_u, max_term_norm(rep, alpha));
  if (out.zero_target) {
    out.worst_prefix_ratio_over_permutations = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  std::vector<double> ratios;
  std::vector<std::size_t> order(rep.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (rep.size() <= kExhaustivePermutationTerms) {
    out.permutations_exhaustive = true;
    do {
      ratios.push_back(worst_along(rep, order, alpha) / alpha_u);
    } while (std::next_permutation(order.begin(), order.end()));
  } else {
    for (std::size_t t = 0; t < trials; ++t) {
      std::mt19937_64 rng(seed + t);
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[bounded(rng, i + 1)]);
      ratios.push_back(worst_along(rep, order, alpha) / alpha_u);
    }
  }
  out.permutations_evaluated = ratios.size();
  out.worst_prefix_ratio_over_permutations =
      ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
  out.permutation_quantiles = quantiles(std::move(ratios));
  return out;
}

StressReport subset_bound_scan(const Representation& rep, const Seminorm& alpha,
                               std::size_t trials, std::uint64_t seed) {
  StressReport out;
  out.trials = trials;
  out.seed = seed;
  out.terms = rep.size();
  const double alpha_u = alpha(rep.target());
  out.zero_target = is_zero_target(alpha_u, max_term_norm(rep, alpha));
  if (out.zero_target) {
    out.worst_subset_ratio = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const std::size_t n = rep.size();
  std::vector<bool> chosen(n, true);
  double worst = subset_norm(rep, chosen, alpha);
  std::size_t evaluated = 1;
  if (n <= kExhaustiveSubsetTerms) {
    out.subsets_exhaustive = true;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t mask = 1; mask + 1 < count; ++mask) {
      for (std::size_t i = 0; i < n; ++i) chosen[i] = ((mask >> i) & 1U) != 0;
      worst = std::max(worst, subset_norm(rep, chosen, alpha));
      ++evaluated;
    }
  } else {
    for (std::size_t t = 0; t < trials; ++t) {
      std::mt19937_64 rng(seed + t);
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) bits = rng();
        chosen[i] = (bits & 1U) != 0;
        bits >>= 1;
      }
      worst = std::max(worst, subset_norm(rep, chosen, alpha));
      ++evaluated;
    }
  }
  out.subsets_evaluated = evaluated;
  out.worst_subset_ratio = worst / alpha_u;
  return out;
}

StressReport stress(const Representation& rep, const Seminorm& alpha, std::size_t trials,
                    std::uint64_t seed) {
  StressReport out = permutation_stress(rep, alpha, trials, seed);
  const StressReport subsets = subset_bound_scan(rep, alpha, trials, seed);
  out.worst_subset_ratio = subsets.worst_subset_ratio;
  out.subsets_evaluated = subsets.subsets_evaluated;
  out.subsets_exhaustive = subsets.subsets_exhaustive;
  return out;
}

}  // namespace tensorseries
