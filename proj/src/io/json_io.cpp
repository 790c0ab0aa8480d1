#include "qgld/io/json_io.hpp"

#include <fstream>

#include "qgld/error.hpp"

namespace qgld::io {
namespace {

json load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
}

double number_at(const json& row, std::size_t c, const char* field) {
  const json& v = row.at(c);
  if (!v.is_number()) throw Error(ErrorCode::InvalidArgument, std::string(field) + " entries must be numbers");
  return v.get<double>();
}

}  // namespace

ComplexMatrix matrix_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("re")) throw Error(ErrorCode::InvalidArgument, "matrix needs \"re\"");
    const json& re = j.at("re");
    if (!re.is_array() || re.empty()) throw Error(ErrorCode::InvalidArgument, "\"re\" must be a non-empty array");
    const std::size_t n = re.size();
    if (j.contains("dim") && j.at("dim").get<std::size_t>() != n) {
      throw Error(ErrorCode::DimensionMismatch, "\"dim\" disagrees with \"re\"");
    }
    const json* im = j.contains("im") ? &j.at("im") : nullptr;
    if (im != nullptr && im->size() != n) throw Error(ErrorCode::DimensionMismatch, "\"im\" row count");
    ComplexMatrix m(n);
    for (std::size_t r = 0; r < n; ++r) {
      if (!re[r].is_array() || re[r].size() != n) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
      if (im != nullptr && (!(*im)[r].is_array() || (*im)[r].size() != n)) {
        throw Error(ErrorCode::DimensionMismatch, "\"im\" row length");
      }
      for (std::size_t c = 0; c < n; ++c) {
        m(r, c) = {number_at(re[r], c, "re"), im != nullptr ? number_at((*im)[r], c, "im") : 0.0};
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("matrix json: ") + e.what());
  }
}

json matrix_to_json(const ComplexMatrix& m) {
  json out;
  out["dim"] = m.rows();
  json re = json::array();
  json im = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json rr = json::array();
    json ir = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

json block_to_json(const ComplexMatrix& m) {
  json out = matrix_to_json(m);
  out.erase("dim");
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  return out;
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) { return matrix_from_json(load(path)); }

CVector vector_from_json(const json& j) {
  try {
    if (j.is_array()) {
      CVector v;
      for (const auto& x : j) v.emplace_back(x.get<double>(), 0.0);
      return v;
    }
    const json& re = j.at("re");
    const json* im = j.contains("im") ? &j.at("im") : nullptr;
    if (im != nullptr && im->size() != re.size()) throw Error(ErrorCode::DimensionMismatch, "vector re/im length");
    CVector v(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) v[i] = {re[i].get<double>(), im ? (*im)[i].get<double>() : 0.0};
    return v;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("vector json: ") + e.what());
  }
}

json vector_to_json(std::span<const cplx> v) {
  json re = json::array();
  json im = json::array();
  for (const auto& x : v) {
    re.push_back(x.real());
    im.push_back(x.imag());
  }
  json out;
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

CVector read_vector_file(const std::filesystem::path& path) { return vector_from_json(load(path)); }

}  // namespace qgld::io
