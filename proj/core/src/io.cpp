#include "cpspectra/io.hpp"

#include <fstream>
#include <sstream>

#include "cpspectra/error.hpp"

namespace cpspectra {

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix &m) {
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      data.push_back(to_json(m(i, j)));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Json to_json(const AlgebraShape &shape) { return Json{{"blocks", shape.blocks()}}; }

Json to_json(const CpMap &tau) {
  Json kraus = Json::array();
  for (const Matrix &a : tau.kraus()) {
    kraus.push_back(to_json(a));
  }
  return Json{{"shape", to_json(tau.shape())}, {"kraus", std::move(kraus)}};
}

namespace {

Index read_extent(const Json &j, const char *key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 0) {
    throw ParseError(std::string("matrix: \"") + key + "\" must be a nonnegative integer");
  }
  return static_cast<Index>(j[key].get<long long>());
}

Complex read_entry(const Json &e) {
  if (e.is_number()) {
    return {e.get<double>(), 0.0};
  }
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw ParseError("matrix: entries must be [re, im] pairs");
}

} // namespace

Matrix matrix_from_json(const Json &j) {
  if (!j.is_object()) {
    throw ParseError("matrix: expected an object with rows, cols and data");
  }
  const Index rows = read_extent(j, "rows");
  const Index cols = read_extent(j, "cols");
  if (!j.contains("data") || !j["data"].is_array()) {
    throw ParseError("matrix: \"data\" must be an array");
  }
  const Json &data = j["data"];
  if (static_cast<Index>(data.size()) != rows * cols) {
    std::ostringstream os;
    os << "matrix: data has " << data.size() << " entries, expected " << rows * cols;
    throw ParseError(os.str());
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) {
      m(i, k) = read_entry(data[static_cast<std::size_t>(i * cols + k)]);
    }
  }
  return m;
}

AlgebraShape shape_from_json(const Json &j) {
  const Json &blocks = j.is_object() && j.contains("blocks") ? j["blocks"] : j;
  if (!blocks.is_array()) {
    throw ParseError("shape: expected {\"blocks\": [n1, ...]}");
  }
  std::vector<Index> out;
  for (const Json &b : blocks) {
    if (!b.is_number_integer()) {
      throw ParseError("shape: block sizes must be integers");
    }
    out.push_back(static_cast<Index>(b.get<long long>()));
  }
  return AlgebraShape(std::move(out));
}

std::vector<Matrix> tuple_from_json(const Json &j) {
  const Json &list = j.is_object() && j.contains("tuple") ? j["tuple"] : j;
  if (!list.is_array()) {
    throw ParseError("tuple: expected an array of matrices or {\"tuple\": [...]}");
  }
  std::vector<Matrix> out;
  for (const Json &m : list) {
    out.push_back(matrix_from_json(m));
  }
  return out;
}

CpMap cpmap_from_json(const Json &j, const Tolerance &tol) {
  if (!j.is_object() || !j.contains("kraus")) {
    throw ParseError("map: expected an object with a \"kraus\" array");
  }
  std::vector<Matrix> kraus = tuple_from_json(j["kraus"]);
  if (j.contains("shape")) {
    return CpMap(std::move(kraus), shape_from_json(j["shape"]), tol);
  }
  return CpMap(std::move(kraus));
}

Json load_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw PreconditionError("cannot open " + path.string());
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

} // namespace cpspectra
