/*
 * Copyright 2026 The callprobe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "callprobe/dataset/annotation.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "callprobe/common/error.h"

namespace callprobe::dataset {
namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t tab = line.find('\t', begin);
    fields.push_back(line.substr(begin, tab - begin));
    if (tab == std::string::npos) break;
    begin = tab + 1;
  }
  return fields;
}

double ParseSeconds(const std::string& field, int line_no) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) +
                                            ": bad time value '" + field + "'");
  }
  return v;
}

}  // namespace

AnnotationTable ReadAnnotations(std::istream& in) {
  struct Raw {
    std::string recording_id;
    std::string class_name;
    double start, end;
  };
  std::vector<Raw> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::vector<std::string> f = SplitTabs(line);
    if (f.size() != 4) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                      std::to_string(f.size()));
    }
    Raw r{f[0], f[3], ParseSeconds(f[1], line_no), ParseSeconds(f[2], line_no)};
    if (r.recording_id.empty() || r.class_name.empty()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": empty field");
    }
    if (!(0.0 <= r.start && r.start < r.end)) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": need 0 <= start < end");
    }
    raw.push_back(std::move(r));
  }

  AnnotationTable table;
  std::map<std::string, int> index;
  for (const Raw& r : raw) index.emplace(r.class_name, 0);
  for (auto& [name, idx] : index) {
    idx = static_cast<int>(table.class_names.size());
    table.class_names.push_back(name);
  }
  table.annotations.reserve(raw.size());
  for (Raw& r : raw) {
    table.annotations.push_back(
        {std::move(r.recording_id), index.at(r.class_name), r.start, r.end});
  }
  return table;
}

AnnotationTable ReadAnnotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return ReadAnnotations(in);
}

}  // namespace callprobe::dataset
