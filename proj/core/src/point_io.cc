//
// Copyright 2026 The ldpkm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "ldpkm/point_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace ldpkm {

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

absl::StatusOr<std::string> ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << text;
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<PointSet> ParsePoints(const std::string& text, bool csv,
                                     std::optional<double> lambda) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  std::vector<absl::string_view> rows;
  for (auto line : lines) {
    line = absl::StripAsciiWhitespace(line);
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) return absl::InvalidArgumentError("empty point file");

  std::vector<double> coords;
  size_t dim = 0;
  size_t n = 0;
  double bound = 0.0;
  auto parse_row = [&](absl::string_view row, size_t line_no,
                       bool comma) -> absl::Status {
    std::vector<absl::string_view> fields;
    if (comma) {
      fields = absl::StrSplit(row, ',');
    } else {
      fields = absl::StrSplit(row, absl::ByAnyChar(" \t"), absl::SkipEmpty());
    }
    if (fields.size() != dim) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": expected ", dim, " values, got ", fields.size()));
    }
    for (auto f : fields) {
      double v;
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(f), &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ": bad number '", f, "'"));
      }
      coords.push_back(v);
    }
    return absl::OkStatus();
  };

  if (csv) {
    std::vector<absl::string_view> header = absl::StrSplit(rows[0], ',');
    dim = header.size();
    for (size_t i = 1; i < rows.size(); ++i) {
      if (auto s = parse_row(rows[i], i + 1, true); !s.ok()) return s;
    }
    n = rows.size() - 1;
    if (lambda.has_value()) {
      bound = *lambda;
    } else {
      bound = 1.0;
      for (size_t i = 0; i < n; ++i) {
        double norm = Norm({coords.data() + i * dim, dim});
        bound = std::max(bound, norm);
      }
    }
  } else {
    std::vector<absl::string_view> head =
        absl::StrSplit(rows[0], ' ', absl::SkipEmpty());
    uint64_t n64, d64;
    if (head.size() != 3 || !absl::SimpleAtoi(head[0], &n64) ||
        !absl::SimpleAtoi(head[1], &d64) || !absl::SimpleAtod(head[2], &bound)) {
      return absl::InvalidArgumentError("first line must be 'n d Lambda'");
    }
    n = n64;
    dim = d64;
    if (dim == 0) return absl::InvalidArgumentError("d must be positive");
    if (rows.size() - 1 != n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "header says ", n, " points, file has ", rows.size() - 1));
    }
    coords.reserve(n * dim);
    for (size_t i = 1; i < rows.size(); ++i) {
      if (auto s = parse_row(rows[i], i + 1, false); !s.ok()) return s;
    }
    if (lambda.has_value()) bound = *lambda;
  }
  return PointSet::Create(dim, bound, std::move(coords));
}

absl::StatusOr<PointSet> ReadPointFile(const std::string& path,
                                       std::optional<double> lambda) {
  auto text = ReadTextFile(path);
  if (!text.ok()) return text.status();
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  return ParsePoints(*text, csv, lambda);
}

std::string FormatPoints(const PointSet& points) {
  std::string out = absl::StrCat(points.size(), " ", points.dim(), " ",
                                 FormatDouble(points.radius_bound()), "\n");
  for (size_t i = 0; i < points.size(); ++i) {
    auto x = points[i];
    for (size_t j = 0; j < x.size(); ++j) {
      if (j > 0) out += ' ';
      out += FormatDouble(x[j]);
    }
    out += '\n';
  }
  return out;
}

absl::Status WritePointFile(const std::string& path, const PointSet& points) {
  return WriteTextFile(path, FormatPoints(points));
}

}  // namespace ldpkm
