// Copyright 2026 The evpart Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "evpart/types.hpp"

namespace evpart {

// Text vector format shared by word vectors, base embeddings and graph
// embeddings: a "<count> <dim>" header followed by "<key> <f1> ... <fd>".
struct VectorFile {
  int dim = 0;
  std::vector<std::pair<std::string, Vector>> entries;
};

VectorFile read_vector_file(const std::filesystem::path& path);
void write_vector_file(const std::filesystem::path& path, const VectorFile& file);

// Shortest text form that round-trips a double exactly.
std::string format_double(double v);

}  // namespace evpart
