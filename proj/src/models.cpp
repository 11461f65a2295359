#include "nhqm/models.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "nhqm/error.hpp"

namespace nhqm {

using json = nlohmann::json;

ComplexMatrix hatano_nelson(const HatanoNelsonSpec& spec) {
  if (spec.sites < 2) {
    throw Error(ErrorKind::InvalidSize,
                "Hatano-Nelson chain needs N >= 2, got " + std::to_string(spec.sites));
  }
  if (!std::isfinite(spec.gamma)) throw Error(ErrorKind::NonFinite, "gamma is not finite");
  ComplexMatrix h = ComplexMatrix::Zero(spec.sites, spec.sites);
  for (Index k = 0; k + 1 < spec.sites; ++k) {
    h(k, k + 1) = 1.0 + spec.gamma;
    h(k + 1, k) = 1.0 - spec.gamma;
  }
  return h;
}

Eigen::VectorXd hatano_nelson_spectrum(const HatanoNelsonSpec& spec) {
  if (spec.sites < 2) {
    throw Error(ErrorKind::InvalidSize,
                "Hatano-Nelson chain needs N >= 2, got " + std::to_string(spec.sites));
  }
  if (!(std::abs(spec.gamma) < 1.0)) {
    throw Error(ErrorKind::ConfigError, "closed-form spectrum needs |gamma| < 1");
  }
  const double n_plus_1 = static_cast<double>(spec.sites + 1);
  const double amplitude = 2.0 * std::sqrt(1.0 - spec.gamma * spec.gamma);
  Eigen::VectorXd e(spec.sites);
  // cos is decreasing on (0, pi): n = N..1 gives ascending order.
  for (Index i = 0; i < spec.sites; ++i) {
    e(i) = amplitude * std::cos(static_cast<double>(spec.sites - i) * std::numbers::pi / n_plus_1);
  }
  return e;
}

namespace {

std::vector<std::vector<double>> read_rows(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw Error(ErrorKind::ParseError, std::string("missing array field '") + key + "'");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& row : doc[key]) {
    if (!row.is_array()) throw Error(ErrorKind::ParseError, std::string("'") + key + "' rows must be arrays");
    std::vector<double> values;
    for (const auto& x : row) {
      if (!x.is_number()) throw Error(ErrorKind::ParseError, std::string("'") + key + "' entries must be numbers");
      values.push_back(x.get<double>());
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

}  // namespace

ComplexMatrix parse_matrix(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "matrix document must be an object");
  const auto re = read_rows(doc, "re");
  const auto im = read_rows(doc, "im");
  if (re.size() != im.size()) throw Error(ErrorKind::ParseError, "'re' and 'im' row counts differ");
  for (std::size_t i = 0; i < re.size(); ++i) {
    if (re[i].size() != im[i].size()) {
      throw Error(ErrorKind::ParseError, "'re' and 'im' differ in row " + std::to_string(i));
    }
    if (re[i].size() != re.front().size()) throw Error(ErrorKind::ParseError, "ragged rows");
  }
  const std::size_t rows = re.size();
  const std::size_t cols = rows == 0 ? 0 : re.front().size();
  if (rows == 0 || rows != cols) {
    throw Error(ErrorKind::NonSquare, "payload is " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (doc.contains("dim")) {
    if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() != static_cast<long long>(rows)) {
      throw Error(ErrorKind::ParseError, "'dim' does not match the payload");
    }
  } else {
    throw Error(ErrorKind::ParseError, "missing field 'dim'");
  }
  const Index n = static_cast<Index>(rows);
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(re[i][j], im[i][j]);
  }
  require_finite(m, "matrix");
  return m;
}

std::string format_matrix(const ComplexMatrix& m) {
  require_square(m, "matrix");
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  json doc = {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
  return doc.dump();
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str());
}

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path.string());
  out << format_matrix(m) << '\n';
}

}  // namespace nhqm
