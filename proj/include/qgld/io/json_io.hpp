#pragma once

#include <filesystem>
#include "json.hpp"

#include "qgld/linalg/matrix.hpp"

namespace qgld::io {

using json = nlohmann::ordered_json;

// {"dim": N, "re": [[...]], "im": [[...]]}; "im" optional.
ComplexMatrix matrix_from_json(const json& j);
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix read_matrix_file(const std::filesystem::path& path);

// {"re": [...], "im": [...]}, or a bare array of reals.
CVector vector_from_json(const json& j);
json vector_to_json(std::span<const cplx> v);
CVector read_vector_file(const std::filesystem::path& path);

// Nested [[re...]] / [[im...]] for rectangular blocks.
json block_to_json(const ComplexMatrix& m);

}  // namespace qgld::io
