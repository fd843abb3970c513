#pragma once

#include <json.hpp>
#include <string>

#include "biuni/types.hpp"

namespace biuni {

using json = nlohmann::json;

// Matrix wire format: {"n": rows, "m": cols, "re": [[..]], "im": [[..]]}.
// Readers reject non-rectangular or size-inconsistent arrays.
json matrix_to_json(const Mat& a);
Mat matrix_from_json(const json& j);

// Vector wire format: {"re": [..], "im": [..]}.
json vector_to_json(const Vec& v);
Vec vector_from_json(const json& j);

Mat load_matrix_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace biuni
