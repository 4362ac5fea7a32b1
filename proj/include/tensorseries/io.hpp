#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensorseries/construct.hpp"
#include "tensorseries/schemes.hpp"
#include "tensorseries/verify.hpp"

namespace tensorseries::io {

/// Malformed file contents.
class ParseError : public Error {
 public:
  using Error::Error;
};

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest text that reads back as the same double.
std::string format_double(double v);

/// Plain numeric CSV, one matrix row per line, no header.
Matrix parse_matrix_csv(const std::string& text);
std::string matrix_to_csv(const Matrix& m);

/// `t,y1,...,yd` header, one row per sample, strictly increasing t.
GridFunction parse_grid_csv(const std::string& text);
std::string grid_to_csv(const GridFunction& f);

/// {"rows", "cols", "terms": [{"x": [...], "y": [...]}, ...]} plus an
/// optional "target" matrix (list of rows).
json representation_to_json(const Representation& rep, bool with_target = false);
Representation representation_from_json(const json& j);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json certificate_to_json(const BoundCertificate& c);
json stress_report_to_json(const StressReport& r);

/// `m,error,certified_bound,block`
std::string trace_to_csv(const ConvergenceTrace& trace);

/// {"stages": [{"tensor": [[...]], "bound": b}, ...], "target": [[...]]?}
std::shared_ptr<CauchyAdapter> cauchy_from_json(const json& j);

json stream_to_json(const SeriesStream& stream);

}  // namespace tensorseries::io
