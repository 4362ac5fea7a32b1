#include "tensorseries/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace tensorseries::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n'))
    if (!line.empty()) out.push_back(line);
  return out;
}

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ": '" + std::string(field) +
                     "' is not a finite number");
  return v;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(std::string(what) + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move output into place at '" + path.string() + "'");
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

Matrix parse_matrix_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("matrix CSV is empty");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::vector<double> row;
    for (auto field : split(lines[i], ',')) row.push_back(parse_number(field, i + 1));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("line " + std::to_string(i + 1) + ": expected " +
                       std::to_string(rows.front().size()) + " columns");
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

GridFunction parse_grid_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) throw ParseError("grid CSV needs a header and at least one sample");
  const auto header = split(lines.front(), ',');
  if (header.size() < 2 || header.front() != "t")
    throw ParseError("grid CSV header must be t,y1,...,yd");
  for (std::size_t k = 1; k < header.size(); ++k)
    if (header[k] != "y" + std::to_string(k))
      throw ParseError("grid CSV header column " + std::to_string(k + 1) + " must be y" +
                       std::to_string(k));
  const auto d = static_cast<Eigen::Index>(header.size() - 1);
  const auto g = static_cast<Eigen::Index>(lines.size() - 1);
  GridFunction f{Vector(g), Matrix(d, g)};
  for (Eigen::Index t = 0; t < g; ++t) {
    const std::size_t line = static_cast<std::size_t>(t) + 2;
    const auto fields = split(lines[static_cast<std::size_t>(t) + 1], ',');
    if (static_cast<Eigen::Index>(fields.size()) != d + 1)
      throw ParseError("line " + std::to_string(line) + ": expected " + std::to_string(d + 1) +
                       " fields");
    f.grid(t) = parse_number(fields[0], line);
    for (Eigen::Index k = 0; k < d; ++k)
      f.values(k, t) = parse_number(fields[static_cast<std::size_t>(k) + 1], line);
    if (t > 0 && !(f.grid(t) > f.grid(t - 1)))
      throw ParseError("line " + std::to_string(line) + ": t must be strictly increasing");
  }
  return f;
}

std::string grid_to_csv(const GridFunction& f) {
  std::string out = "t";
  for (int k = 1; k <= f.dim(); ++k) out += ",y" + std::to_string(k);
  out += '\n';
  for (int t = 0; t < f.points(); ++t) {
    out += format_double(f.grid(t));
    for (int k = 0; k < f.dim(); ++k) out += ',' + format_double(f.values(k, t));
    out += '\n';
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
  return out;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ParseError("matrix rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from_json(j[i], "matrix row");
    if (static_cast<std::size_t>(row.size()) != cols) throw ParseError("matrix rows differ in length");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

json representation_to_json(const Representation& rep, bool with_target) {
  json terms = json::array();
  for (const auto& t : rep.terms())
    terms.push_back({{"x", vector_to_json(t.x)}, {"y", vector_to_json(t.y)}});
  json out = {{"rows", rep.rows()}, {"cols", rep.cols()}, {"terms", std::move(terms)}};
  if (with_target) out["target"] = matrix_to_json(rep.target().coeffs());
  return out;
}

Representation representation_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("representation must be a JSON object");
  const json* terms_json = j.contains("terms") ? &j["terms"] : nullptr;
  if (!terms_json || !terms_json->is_array()) throw ParseError("representation needs a 'terms' array");

  std::vector<ElementaryTensor> terms;
  for (const auto& t : *terms_json) {
    if (!t.is_object() || !t.contains("x") || !t.contains("y"))
      throw ParseError("each term needs 'x' and 'y'");
    terms.push_back({vector_from_json(t["x"], "x"), vector_from_json(t["y"], "y")});
  }
  int rows = 0;
  int cols = 0;
  if (j.contains("rows") && j.contains("cols")) {
    rows = j["rows"].get<int>();
    cols = j["cols"].get<int>();
  } else if (!terms.empty()) {
    rows = static_cast<int>(terms.front().x.size());
    cols = static_cast<int>(terms.front().y.size());
  } else {
    throw ParseError("an empty representation needs 'rows' and 'cols'");
  }
  if (j.contains("target"))
    return Representation(std::move(terms), CoefficientTensor(matrix_from_json(j["target"])));
  return Representation::from_terms(rows, cols, std::move(terms));
}

json certificate_to_json(const BoundCertificate& c) {
  return {{"c", c.c},
          {"worst_prefix_ratio", c.worst_prefix_ratio},
          {"n_used", c.n_used},
          {"m", c.m},
          {"alpha_u", c.alpha_u},
          {"max_term_norm", c.max_term_norm},
          {"zero_target", c.zero_target},
          {"passed", c.passed()}};
}

json stress_report_to_json(const StressReport& r) {
  json q = json::array();
  for (double v : r.permutation_quantiles) q.push_back(v);
  return {{"exploratory", true},
          {"note", "empirical probe of unconditional convergence; no pass/fail judgment"},
          {"trials", r.trials},
          {"worst_prefix_ratio_over_permutations",
           finite_or_null(r.worst_prefix_ratio_over_permutations)},
          {"worst_subset_ratio", finite_or_null(r.worst_subset_ratio)},
          {"seed", r.seed},
          {"terms", r.terms},
          {"permutations_evaluated", r.permutations_evaluated},
          {"subsets_evaluated", r.subsets_evaluated},
          {"permutations_exhaustive", r.permutations_exhaustive},
          {"subsets_exhaustive", r.subsets_exhaustive},
          {"exhaustive", r.permutations_exhaustive && r.subsets_exhaustive},
          {"zero_target", r.zero_target},
          {"permutation_quantiles_min_median_p90_max", std::move(q)}};
}

std::string trace_to_csv(const ConvergenceTrace& trace) {
  std::string out = "m,error,certified_bound,block\n";
  for (const auto& r : trace.rows) {
    out += std::to_string(r.m) + ',' + format_double(r.error) + ',' +
           format_double(r.certified_bound) + ',' + std::to_string(r.block) + '\n';
  }
  return out;
}

std::shared_ptr<CauchyAdapter> cauchy_from_json(const json& j) {
  if (!j.is_object() || !j.contains("stages") || !j["stages"].is_array())
    throw ParseError("cauchy file needs a 'stages' array");
  std::vector<SchemeStage> stages;
  for (const auto& s : j["stages"]) {
    if (!s.is_object() || !s.contains("tensor") || !s.contains("bound") || !s["bound"].is_number())
      throw ParseError("each stage needs 'tensor' and a numeric 'bound'");
    stages.push_back({CoefficientTensor(matrix_from_json(s["tensor"])), s["bound"].get<double>()});
  }
  std::optional<CoefficientTensor> target;
  if (j.contains("target")) target = CoefficientTensor(matrix_from_json(j["target"]));
  return cauchy_adapter(std::move(stages), std::nullopt, std::move(target));
}

json stream_to_json(const SeriesStream& stream) {
  json blocks = json::array();
  for (const auto& b : stream.blocks()) {
    blocks.push_back({{"index", b.block.index},
                      {"begin", b.block.begin},
                      {"end", b.block.end},
                      {"block_norm", b.block.block_norm},
                      {"stage_bound", b.stage_bound},
                      {"prefix_bound", b.prefix_bound},
                      {"seminorm", b.seminorm},
                      {"seminorm_fallback", b.seminorm_fallback},
                      {"truncated", b.truncated},
                      {"certificate", certificate_to_json(b.certificate)}});
  }
  json terms = json::array();
  for (const auto& t : stream.terms())
    terms.push_back({{"x", vector_to_json(t.x)}, {"y", vector_to_json(t.y)}});
  return {{"rows", stream.rows()},
          {"cols", stream.cols()},
          {"c", stream.c()},
          {"stop_reason", std::string(to_string(stream.stop_reason()))},
          {"final_certified_bound", stream.final_certified_bound()},
          {"blocks", std::move(blocks)},
          {"terms", std::move(terms)}};
}

}  // namespace tensorseries::io
