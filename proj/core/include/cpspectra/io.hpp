#ifndef CPSPECTRA_IO_HPP
#define CPSPECTRA_IO_HPP

// JSON encodings:
//   matrix  {"rows": m, "cols": n, "data": [[re, im], ...]}  (row-major)
//   shape   {"blocks": [n1, ...]}
//   map     {"shape": shape, "kraus": [matrix, ...]}  (shape optional)
//   tuple   [matrix, ...] or {"tuple": [matrix, ...]}

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpspectra/algebra.hpp"
#include "cpspectra/cpmap.hpp"
#include "cpspectra/mats.hpp"

namespace cpspectra {

using Json = nlohmann::ordered_json;

Json to_json(const Matrix &m);
Json to_json(const AlgebraShape &shape);
Json to_json(const CpMap &tau);
Json to_json(Complex z);

/// Throw ParseError on structural problems (missing keys, wrong lengths).
Matrix matrix_from_json(const Json &j);
AlgebraShape shape_from_json(const Json &j);
CpMap cpmap_from_json(const Json &j, const Tolerance &tol = {});
std::vector<Matrix> tuple_from_json(const Json &j);

/// Reads and parses a file; ParseError for malformed JSON, PreconditionError
/// if the file cannot be opened.
Json load_json(const std::filesystem::path &path);

} // namespace cpspectra

#endif
