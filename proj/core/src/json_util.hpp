#pragma once

#include <json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <string>

#include "levelset/error.hpp"

namespace levelset::detail {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& doc, const std::filesystem::path& path);

// Checks doc["schema_version"] == expected; SchemaError otherwise.
void require_schema(const json& doc, int expected, const std::filesystem::path& path);

template <typename T>
T require_field(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw SchemaError(std::string("missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

json to_json(const Eigen::VectorXd& v);
json to_json_row_major(const Eigen::MatrixXd& m);

Eigen::VectorXd vector_from_json(const json& arr, Eigen::Index expected, const char* what);
Eigen::MatrixXd matrix_from_json(const json& arr, Eigen::Index rows, Eigen::Index cols,
                                 const char* what);

}  // namespace levelset::detail
