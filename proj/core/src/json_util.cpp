#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace levelset::detail {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  // nlohmann emits the shortest decimal string that parses back to the same
  // double, so the round trip is bit-exact.
  out << doc.dump(2) << '\n';
  if (!out) {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

void require_schema(const json& doc, int expected, const std::filesystem::path& path) {
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw SchemaError("'" + path.string() + "' has no schema_version");
  }
  const auto& v = doc.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != expected) {
    throw SchemaError("'" + path.string() + "' has unsupported schema_version " + v.dump() +
                      " (expected " + std::to_string(expected) + ")");
  }
}

json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json to_json_row_major(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  }
  return arr;
}

namespace {

double number_at(const json& arr, std::size_t i, const char* what) {
  const auto& e = arr[i];
  if (!e.is_number()) {
    std::ostringstream msg;
    msg << what << "[" << i << "] is not a number";
    throw SchemaError(msg.str());
  }
  return e.get<double>();
}

}  // namespace

Eigen::VectorXd vector_from_json(const json& arr, Eigen::Index expected, const char* what) {
  if (!arr.is_array()) throw SchemaError(std::string(what) + " is not an array");
  if (static_cast<Eigen::Index>(arr.size()) != expected) {
    std::ostringstream msg;
    msg << what << " has " << arr.size() << " entries, expected " << expected;
    throw ShapeError(msg.str());
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v[i] = number_at(arr, static_cast<std::size_t>(i), what);
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& arr, Eigen::Index rows, Eigen::Index cols,
                                 const char* what) {
  if (!arr.is_array()) throw SchemaError(std::string(what) + " is not an array");
  if (static_cast<Eigen::Index>(arr.size()) != rows * cols) {
    std::ostringstream msg;
    msg << what << " has " << arr.size() << " entries, expected " << rows << "x" << cols;
    throw ShapeError(msg.str());
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number_at(arr, k++, what);
  }
  return m;
}

}  // namespace levelset::detail
