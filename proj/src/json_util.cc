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

#include "pilqr/json_util.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pilqr::json_util {

namespace {

std::string where(std::string_view context, std::string_view key) {
  std::string s(context);
  if (!key.empty()) {
    s += s.empty() ? "" : ".";
    s += key;
  }
  return s;
}

const Json& field(const Json& j, std::string_view key, std::string_view context) {
  require_object(j, context);
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigurationError("missing key '" + where(context, key) + "'");
  return *it;
}

}  // namespace

void require_object(const Json& j, std::string_view context) {
  if (!j.is_object()) {
    throw ConfigurationError("'" + std::string(context) + "' must be a JSON object");
  }
}

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view context) {
  require_object(j, context);
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigurationError("unknown key '" + where(context, item.key()) + "'");
    }
  }
}

double get_double(const Json& j, std::string_view key, std::string_view context) {
  const Json& v = field(j, key, context);
  if (!v.is_number()) {
    throw ConfigurationError("'" + where(context, key) + "' must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ConfigurationError("'" + where(context, key) + "' must be finite");
  }
  return d;
}

long long get_int(const Json& j, std::string_view key, std::string_view context) {
  const Json& v = field(j, key, context);
  if (!v.is_number_integer()) {
    throw ConfigurationError("'" + where(context, key) + "' must be an integer");
  }
  return v.get<long long>();
}

std::string get_string(const Json& j, std::string_view key, std::string_view context) {
  const Json& v = field(j, key, context);
  if (!v.is_string()) {
    throw ConfigurationError("'" + where(context, key) + "' must be a string");
  }
  return v.get<std::string>();
}

bool get_bool(const Json& j, std::string_view key, std::string_view context) {
  const Json& v = field(j, key, context);
  if (!v.is_boolean()) {
    throw ConfigurationError("'" + where(context, key) + "' must be true or false");
  }
  return v.get<bool>();
}

void maybe_double(const Json& j, std::string_view key, std::string_view context,
                  double& out) {
  if (j.contains(key)) out = get_double(j, key, context);
}

void maybe_bool(const Json& j, std::string_view key, std::string_view context, bool& out) {
  if (j.contains(key)) out = get_bool(j, key, context);
}

Eigen::VectorXd to_vector(const Json& j, std::string_view context) {
  if (!j.is_array()) throw ConfigurationError("'" + std::string(context) + "' must be an array");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ConfigurationError("'" + std::string(context) + "' must contain numbers only");
    }
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd to_matrix(const Json& j, std::string_view context) {
  if (!j.is_array() || j.empty()) {
    throw ConfigurationError("'" + std::string(context) + "' must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigurationError("'" + std::string(context) + "' has ragged rows");
    }
    m.row(static_cast<Index>(r)) = to_vector(j[r], context).transpose();
  }
  return m;
}

Json from_vector(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json from_matrix(const Eigen::MatrixXd& m) {
  Json j = Json::array();
  for (Index r = 0; r < m.rows(); ++r) j.push_back(from_vector(m.row(r).transpose()));
  return j;
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_file(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace pilqr::json_util
