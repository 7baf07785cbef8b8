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

#ifndef CALLPROBE_DATASET_ANNOTATION_H_
#define CALLPROBE_DATASET_ANNOTATION_H_

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace callprobe::dataset {

struct Annotation {
  std::string recording_id;
  int call_type = 0;
  double start = 0.0;
  double end = 0.0;
};

struct AnnotationTable {
  std::vector<Annotation> annotations;
  // class index -> name, sorted lexicographically.
  std::vector<std::string> class_names;
};

// Tab-separated lines: recording_id, start_seconds, end_seconds, class_name.
// Blank lines and lines starting with '#' are skipped. Class indices follow
// the sorted class names, so they do not depend on line order.
AnnotationTable ReadAnnotations(std::istream& in);
AnnotationTable ReadAnnotations(const std::filesystem::path& path);

}  // namespace callprobe::dataset

#endif  // CALLPROBE_DATASET_ANNOTATION_H_
