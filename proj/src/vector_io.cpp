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

#include "evpart/vector_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace evpart {

namespace {

double parse_double(const std::string& tok, const std::filesystem::path& path, int line_no) {
  const char* begin = tok.data();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty()) {
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(line_no) + ": non-finite value");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

VectorFile read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

  VectorFile out;
  std::string line;
  int line_no = 0;
  long expected = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (expected < 0) {
      if (toks.size() != 2) {
        throw Error(ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(line_no) + ": expected '<count> <dim>' header");
      }
      try {
        expected = std::stol(toks[0]);
        out.dim = std::stoi(toks[1]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(line_no) + ": bad header");
      }
      if (expected < 0 || out.dim <= 0) {
        throw Error(ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(line_no) + ": bad header values");
      }
      continue;
    }
    if (static_cast<int>(toks.size()) != out.dim + 1) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) +
                                             ": expected " + std::to_string(out.dim) +
                                             " values, got " + std::to_string(toks.size() - 1));
    }
    Vector v(out.dim);
    for (int i = 0; i < out.dim; ++i) v[i] = parse_double(toks[i + 1], path, line_no);
    out.entries.emplace_back(toks[0], std::move(v));
  }
  if (expected < 0) {
    throw Error(ErrorCode::ParseError, path.string() + ": missing header");
  }
  if (static_cast<long>(out.entries.size()) != expected) {
    throw Error(ErrorCode::ParseError, path.string() + ": header declares " +
                                           std::to_string(expected) + " entries, found " +
                                           std::to_string(out.entries.size()));
  }
  return out;
}

void write_vector_file(const std::filesystem::path& path, const VectorFile& file) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << file.entries.size() << ' ' << file.dim << '\n';
  for (const auto& [key, v] : file.entries) {
    require_same_dim(v.size(), file.dim, "write_vector_file");
    out << key;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace evpart
