// Copyright 2026 The pilqr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PILQR_JSON_UTIL_H_
#define PILQR_JSON_UTIL_H_

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <json.hpp>

#include "pilqr/common.h"

namespace pilqr::json_util {

using Json = nlohmann::ordered_json;

// Throws ConfigurationError naming `context` if `j` is not an object or
// holds a key outside `allowed`.
void require_object(const Json& j, std::string_view context);
void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

double get_double(const Json& j, std::string_view key, std::string_view context);
long long get_int(const Json& j, std::string_view key, std::string_view context);
std::string get_string(const Json& j, std::string_view key, std::string_view context);
bool get_bool(const Json& j, std::string_view key, std::string_view context);

// Overwrites `out` only when `key` is present.
void maybe_double(const Json& j, std::string_view key, std::string_view context, double& out);
void maybe_bool(const Json& j, std::string_view key, std::string_view context, bool& out);
template <typename Int>
void maybe_int(const Json& j, std::string_view key, std::string_view context, Int& out) {
  if (j.contains(key)) out = static_cast<Int>(get_int(j, key, context));
}

Eigen::VectorXd to_vector(const Json& j, std::string_view context);
Eigen::MatrixXd to_matrix(const Json& j, std::string_view context);
Json from_vector(const Eigen::VectorXd& v);
Json from_matrix(const Eigen::MatrixXd& m);

Json read_file(const std::filesystem::path& path);
// Writes `j.dump(2)` plus a trailing newline via a temporary file and rename.
void write_file(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pilqr::json_util

#endif  // PILQR_JSON_UTIL_H_
