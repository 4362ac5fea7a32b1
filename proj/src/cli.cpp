#include "tensorseries/cli.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <ostream>

#include <CLI11.hpp>

#include "tensorseries/construct.hpp"
#include "tensorseries/schemes.hpp"
#include "tensorseries/verify.hpp"

namespace tensorseries::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr int kMaxGridPoints = (1 << 16) + 1;
constexpr int kDemoLevels = 8;
constexpr int kSpanLevels = 5;

const std::set<std::string> kSchemes = {"svd", "interp", "dict", "cauchy"};

bool is_json_path(const std::string& path) { return fs::path(path).extension() == ".json"; }

std::string default_norm(const RunConfig& config) {
  if (!config.norm.empty()) return config.norm;
  if (config.command == Command::ck_demo) return "grid_sup";
  if (config.command == Command::telescope && config.scheme == "interp") return "grid_sup";
  return "frobenius";
}

void check_dims(const RunConfig& config, int rows, int cols) {
  if (rows > config.max_dim || cols > config.max_dim)
    throw DimensionError("tensor is " + std::to_string(rows) + "x" + std::to_string(cols) +
                         ", above the dimension cap " + std::to_string(config.max_dim));
}

void check_grid(const RunConfig& config, const GridFunction& f) {
  f.validate();
  if (f.dim() > config.max_dim)
    throw DimensionError("grid values have dimension " + std::to_string(f.dim()) +
                         ", above the cap " + std::to_string(config.max_dim));
  if (f.points() > kMaxGridPoints) throw DimensionError("grid has too many points");
}

NormEvaluator make_norm(const RunConfig& config, int rows, int cols) {
  const NormKind kind = parse_norm_kind(default_norm(config));
  if (kind == NormKind::grid_sup)
    return NormEvaluator(kind, SpaceSpec(rows, parse_vector_norm(config.vector_norm)),
                         SpaceSpec(cols, VectorNorm::euclidean));
  return NormEvaluator::natural(kind, rows, cols);
}

Expansion resolve_expansion(const RunConfig& config, const NormEvaluator& ev) {
  const Expansion e = parse_expansion(config.expansion);
  if (e != Expansion::automatic) return e;
  const bool euclidean = ev.space_x().norm == VectorNorm::euclidean &&
                         ev.space_y().norm == VectorNorm::euclidean;
  return euclidean ? Expansion::svd : Expansion::standard_basis;
}

std::string require_input(const RunConfig& config) {
  if (config.in.empty()) throw UsageError("--in is required");
  return io::read_file(config.in);
}

/// A matrix CSV is expanded into terms; a JSON file is read as a representation.
Representation load_representation(const RunConfig& config, NormEvaluator* ev_out = nullptr) {
  const std::string text = require_input(config);
  if (is_json_path(config.in)) {
    Representation rep = io::representation_from_json(io::json::parse(text));
    check_dims(config, rep.rows(), rep.cols());
    if (ev_out) *ev_out = make_norm(config, rep.rows(), rep.cols());
    return rep;
  }
  const CoefficientTensor u(io::parse_matrix_csv(text));
  check_dims(config, u.rows(), u.cols());
  const NormEvaluator ev = make_norm(config, u.rows(), u.cols());
  if (ev_out) *ev_out = ev;
  return expand(u, resolve_expansion(config, ev));
}

void emit(const RunConfig& config, const json& doc, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (config.out.empty())
    out << text;
  else
    io::write_file_atomic(config.out, text);
}

std::string trace_path(const RunConfig& config) {
  if (!config.trace_out.empty()) return config.trace_out;
  if (config.out.empty()) return {};
  fs::path p(config.out);
  p.replace_extension(".trace.csv");
  return p.string();
}

json double_list(const std::vector<double>& v) { return json(v); }

struct TraceOutcome {
  bool ok = true;
  double final_error = 0.0;
};

TraceOutcome trace_and_audit(const RunConfig& config, const SeriesStream& stream,
                             const CoefficientTensor& target, const Seminorm& alpha,
                             const StreamAudit& audit, std::ostream& out) {
  const ConvergenceTrace trace = convergence_trace(stream, target, alpha, stream.size());
  TraceOutcome outcome;
  outcome.ok = trace.holds() && audit.ok();
  outcome.final_error = trace.rows.empty() ? alpha(target) : trace.rows.back().error;
  const std::string path = trace_path(config);
  if (!path.empty()) io::write_file_atomic(path, io::trace_to_csv(trace));
  out << "terms " << stream.size() << ", blocks " << stream.blocks().size() << ", stop "
      << to_string(stream.stop_reason()) << ", final error " << io::format_double(outcome.final_error)
      << ", certified " << io::format_double(stream.final_certified_bound()) << "\n";
  if (!trace.holds()) out << "trace: measured error exceeds the certified bound\n";
  if (!audit.ok()) out << "audit: block records do not match the terms\n";
  return outcome;
}

TelescopeOptions telescope_options(const RunConfig& config) {
  TelescopeOptions opts;
  opts.c = config.c;
  opts.stop.tolerance = config.tol;
  opts.stop.max_terms = config.max_terms;
  opts.expansion = parse_expansion(config.expansion);
  return opts;
}

Vector circle_point(double t) {
  Vector v(2);
  v << std::cos(2.0 * std::numbers::pi * t), std::sin(2.0 * std::numbers::pi * t);
  return v;
}

}  // namespace

void RunConfig::validate() const {
  if (!(c > 1.0) || !std::isfinite(c)) throw UsageError("--c must be a finite number > 1");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw UsageError("--tol must be a finite number > 0");
  if (max_terms && *max_terms == 0) throw UsageError("--max-terms must be positive");
  if (max_dim < 1) throw UsageError("--max-dim must be positive");
  if (atoms < 1) throw UsageError("--atoms must be positive");
  if (trials == 0) throw UsageError("--trials must be positive");
  if (!kSchemes.count(scheme)) throw UsageError("unknown scheme '" + scheme + "'");
  try {
    if (!norm.empty()) parse_norm_kind(norm);
    parse_vector_norm(vector_norm);
    parse_expansion(expansion);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

void apply_config(RunConfig& config, const json& j, const std::set<std::string>& explicit_flags) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (explicit_flags.count(key)) continue;
    try {
      if (key == "norm") config.norm = value.get<std::string>();
      else if (key == "c") config.c = value.get<double>();
      else if (key == "tol") config.tol = value.get<double>();
      else if (key == "max-terms") config.max_terms = value.get<std::size_t>();
      else if (key == "seed") config.seed = value.get<std::uint64_t>();
      else if (key == "in") config.in = value.get<std::string>();
      else if (key == "out") config.out = value.get<std::string>();
      else if (key == "trace-out") config.trace_out = value.get<std::string>();
      else if (key == "scheme") config.scheme = value.get<std::string>();
      else if (key == "trials") config.trials = value.get<std::size_t>();
      else if (key == "vector-norm") config.vector_norm = value.get<std::string>();
      else if (key == "expansion") config.expansion = value.get<std::string>();
      else if (key == "max-dim") config.max_dim = value.get<int>();
      else if (key == "atoms") config.atoms = value.get<int>();
      else throw UsageError("unknown config key '" + key + "'");
    } catch (const json::exception&) {
      throw UsageError("config key '" + key + "' has the wrong type");
    }
  }
}

int cmd_flatten(const RunConfig& config, std::ostream& out) {
  NormEvaluator ev = NormEvaluator::natural(NormKind::frobenius, 1, 1);
  const Representation input = load_representation(config, &ev);
  const FlattenResult result = flatten_bounded(input, Seminorm(ev), config.c);
  const PrefixReport check = prefix_bound_report(result.rep, Seminorm(ev), config.c);

  json doc = io::representation_to_json(result.rep);
  doc["norm"] = ev.name();
  doc["certificate"] = io::certificate_to_json(result.certificate);
  doc["recheck"] = {{"worst_prefix_ratio", check.certificate.worst_prefix_ratio},
                    {"violation", check.violation}};
  emit(config, doc, out);
  if (!config.out.empty())
    out << "flattened " << input.size() << " terms into " << result.rep.size()
        << " (n = " << result.certificate.n_used << "), worst prefix ratio "
        << io::format_double(check.certificate.worst_prefix_ratio) << "\n";
  return result.certificate.passed() && !check.violation ? kOk : kViolation;
}

int cmd_telescope(const RunConfig& config, std::ostream& out) {
  const std::string text = require_input(config);
  const TelescopeOptions opts = telescope_options(config);

  if (config.scheme == "dict") {
    const GridFunction f = io::parse_grid_csv(text);
    check_grid(config, f);
    if (f.dim() != 1) throw DimensionError("dict scheme needs a scalar grid function (t,y1)");
    if (!config.norm.empty() && config.norm != "grid_sup")
      throw UsageError("dict scheme measures in nested grid sup seminorms");
    const int levels = dyadic_level(f.points());
    const SeminormFamily family =
        SeminormFamily::nested_grid_sup(levels, 1, parse_vector_norm(config.vector_norm));
    const Vector target = f.values.row(0).transpose();
    const auto scheme = dictionary_projection_scheme(
        target, monomial_dictionary(f.grid, config.atoms), family);
    const SeriesStream stream = telescope(*scheme, family, opts);
    emit(config, io::stream_to_json(stream), out);
    const auto outcome = trace_and_audit(config, stream, CoefficientTensor(f.values),
                                         family.finest(), audit_stream(stream, family), out);
    return outcome.ok ? kOk : kViolation;
  }

  std::shared_ptr<const ApproximationScheme> scheme;
  std::optional<NormEvaluator> ev;
  if (config.scheme == "svd") {
    const CoefficientTensor u(io::parse_matrix_csv(text));
    check_dims(config, u.rows(), u.cols());
    ev = make_norm(config, u.rows(), u.cols());
    scheme = std::make_shared<GeometricSubsequence>(svd_truncation_scheme(u, *ev));
  } else if (config.scheme == "interp") {
    GridFunction f = io::parse_grid_csv(text);
    check_grid(config, f);
    ev = make_norm(config, f.dim(), f.points());
    if (ev->kind() != NormKind::grid_sup) throw UsageError("interp scheme needs --norm grid_sup");
    scheme = grid_interpolation_scheme(std::move(f), parse_vector_norm(config.vector_norm));
  } else {
    const auto cauchy = io::cauchy_from_json(json::parse(text));
    check_dims(config, cauchy->rows(), cauchy->cols());
    ev = make_norm(config, cauchy->rows(), cauchy->cols());
    scheme = cauchy;
  }

  const SeriesStream stream = telescope(*scheme, *ev, opts);
  emit(config, io::stream_to_json(stream), out);
  const auto target = scheme->exact_target();
  if (!target) {
    out << "terms " << stream.size() << ", blocks " << stream.blocks().size()
        << ", certified " << io::format_double(stream.final_certified_bound())
        << " (no target given, trace skipped)\n";
    return audit_stream(stream, *ev).ok() ? kOk : kViolation;
  }
  const auto outcome =
      trace_and_audit(config, stream, *target, Seminorm(*ev), audit_stream(stream, *ev), out);
  return outcome.ok ? kOk : kViolation;
}

int cmd_stress(const RunConfig& config, std::ostream& out) {
  NormEvaluator ev = NormEvaluator::natural(NormKind::frobenius, 1, 1);
  const Representation rep = load_representation(config, &ev);
  const StressReport report = stress(rep, Seminorm(ev), config.trials, config.seed);
  json doc = io::stress_report_to_json(report);
  doc["norm"] = ev.name();
  emit(config, doc, out);
  if (!config.out.empty())
    out << "stress over " << report.terms << " terms: permutations "
        << io::format_double(report.worst_prefix_ratio_over_permutations) << ", subsets "
        << io::format_double(report.worst_subset_ratio) << "\n";
  return kOk;
}

int cmd_ck_demo(const RunConfig& config, std::ostream& out) {
  const VectorNorm inner = parse_vector_norm(config.vector_norm);
  const auto scheme =
      grid_interpolation_scheme(GridFunction::sample(kDemoLevels, 2, circle_point), inner);
  const GridFunction& f = scheme->function();
  const NormEvaluator ev(NormKind::grid_sup, SpaceSpec(f.dim(), inner),
                         SpaceSpec(f.points(), VectorNorm::euclidean));
  const SeriesStream stream = telescope(*scheme, ev, telescope_options(config));

  std::vector<double> errors;
  std::vector<double> ratios;
  for (int j = 1; j <= scheme->levels(); ++j) {
    errors.push_back(scheme->measured_error(j));
    if (j > 1 && errors.back() > 0.0) ratios.push_back(errors[errors.size() - 2] / errors.back());
  }

  json terms = json::array();
  for (const auto& t : stream.terms())
    terms.push_back({{"f", io::matrix_to_json(t.y.transpose()).at(0)},
                     {"y", io::matrix_to_json(t.x.transpose()).at(0)}});
  const ConvergenceTrace trace =
      convergence_trace(stream, CoefficientTensor(f.values), Seminorm(ev), stream.size());
  const double final_error = trace.rows.empty() ? ev(f.values) : trace.rows.back().error;

  json doc = {{"grid_points", f.points()},
              {"stage_errors", double_list(errors)},
              {"refinement_ratios", double_list(ratios)},
              {"final_error", final_error},
              {"final_certified_bound", stream.final_certified_bound()},
              {"stop_reason", std::string(to_string(stream.stop_reason()))},
              {"blocks", stream.blocks().size()},
              {"terms", std::move(terms)}};
  emit(config, doc, out);
  const std::string path = trace_path(config);
  if (!path.empty()) io::write_file_atomic(path, io::trace_to_csv(trace));
  out << "ck-demo: " << stream.size() << " terms, grid error "
      << io::format_double(final_error) << "\n";
  return trace.holds() && audit_stream(stream, ev).ok() ? kOk : kViolation;
}

int cmd_span_demo(const RunConfig& config, std::ostream& out) {
  const Vector grid = dyadic_grid(kSpanLevels);
  const Vector target = grid.array().exp();
  const auto dictionary = monomial_dictionary(grid, config.atoms);
  const SeminormFamily family =
      SeminormFamily::nested_grid_sup(kSpanLevels, 1, parse_vector_norm(config.vector_norm));
  StopRule stop;
  stop.tolerance = config.tol;
  stop.max_terms = config.max_terms;
  const SpanSeries series = dense_span_series(target, dictionary, family, config.c, stop);

  const Vector sum = series.partial_sum(series.terms.size(), dictionary);
  const double residual = family.finest()(Matrix((target - sum).transpose()));

  json terms = json::array();
  for (const auto& t : series.terms) terms.push_back({{"lambda", t.lambda}, {"atom", t.atom_id}});
  json blocks = json::array();
  for (const auto& b : series.blocks)
    blocks.push_back({{"stage", b.stage},
                      {"begin", b.begin},
                      {"end", b.end},
                      {"atoms_used", b.atoms_used},
                      {"residual", b.residual},
                      {"block_norm", b.block_norm},
                      {"prefix_bound", b.prefix_bound},
                      {"seminorm_fallback", b.seminorm_fallback}});
  json doc = {{"grid_points", grid.size()},
              {"atoms", config.atoms},
              {"final_residual", residual},
              {"stop_reason", std::string(to_string(series.stop_reason))},
              {"blocks", std::move(blocks)},
              {"terms", std::move(terms)}};
  emit(config, doc, out);
  out << "span-demo: " << series.terms.size() << " terms, residual "
      << io::format_double(residual) << "\n";
  return kOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified convergent series of elementary tensors"};
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;
  std::size_t max_terms = 0;
  std::vector<std::pair<std::string, CLI::Option*>> tracked;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file with the same keys as the flags");
    tracked.emplace_back("norm", sub->add_option("--norm", flags.norm, "norm kind"));
    tracked.emplace_back("c", sub->add_option("--c", flags.c, "prefix bound constant (> 1)"));
    tracked.emplace_back("tol", sub->add_option("--tol", flags.tol, "target certified error"));
    tracked.emplace_back("max-terms", sub->add_option("--max-terms", max_terms, "term cap"));
    tracked.emplace_back("seed", sub->add_option("--seed", flags.seed, "random seed"));
    tracked.emplace_back("in", sub->add_option("--in", flags.in, "input CSV or JSON"));
    tracked.emplace_back("out", sub->add_option("--out", flags.out, "output JSON"));
    tracked.emplace_back("trace-out", sub->add_option("--trace-out", flags.trace_out, "trace CSV"));
    tracked.emplace_back("scheme", sub->add_option("--scheme", flags.scheme,
                                                   "svd | interp | dict | cauchy"));
    tracked.emplace_back("trials", sub->add_option("--trials", flags.trials, "random trials"));
    tracked.emplace_back("vector-norm", sub->add_option("--vector-norm", flags.vector_norm,
                                                        "euclidean | l1 | linf"));
    tracked.emplace_back("expansion", sub->add_option("--expansion", flags.expansion,
                                                      "automatic | svd | standard_basis"));
    tracked.emplace_back("max-dim", sub->add_option("--max-dim", flags.max_dim, "dimension cap"));
    tracked.emplace_back("atoms", sub->add_option("--atoms", flags.atoms, "dictionary size"));
  };

  const std::vector<std::pair<Command, CLI::App*>> commands = {
      {Command::flatten, app.add_subcommand("flatten", "bounded-prefix representation")},
      {Command::telescope, app.add_subcommand("telescope", "series from an approximation scheme")},
      {Command::stress, app.add_subcommand("stress", "rearrangement and subset probes")},
      {Command::ck_demo, app.add_subcommand("ck-demo", "circle curve on a dyadic grid")},
      {Command::span_demo, app.add_subcommand("span-demo", "exp(t) from monomials")},
  };
  for (const auto& [cmd, sub] : commands) add_common(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  for (const auto& [cmd, sub] : commands)
    if (sub->parsed()) flags.command = cmd;

  std::set<std::string> explicit_flags;
  for (const auto& [key, opt] : tracked)
    if (opt->count() > 0) explicit_flags.insert(key);
  if (explicit_flags.count("max-terms")) flags.max_terms = max_terms;

  try {
    RunConfig config = flags;
    if (!config_path.empty())
      apply_config(config, json::parse(io::read_file(config_path)), explicit_flags);
    config.validate();

    switch (config.command) {
      case Command::flatten: return cmd_flatten(config, out);
      case Command::telescope: return cmd_telescope(config, out);
      case Command::stress: return cmd_stress(config, out);
      case Command::ck_demo: return cmd_ck_demo(config, out);
      case Command::span_demo: return cmd_span_demo(config, out);
    }
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << "\n";
    return kViolation;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace tensorseries::cli
