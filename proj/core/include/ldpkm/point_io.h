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

// Point files.
//
// Native format: a first line "n d Lambda", then n lines of d
// space-separated decimals. CSV variant: a header row naming the columns,
// then one point per row; Lambda is supplied by the caller (or taken as the
// smallest value >= 1 bounding every norm when not given).

#ifndef LDPKM_POINT_IO_H_
#define LDPKM_POINT_IO_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "ldpkm/geometry.h"

namespace ldpkm {

absl::StatusOr<PointSet> ParsePoints(const std::string& text, bool csv,
                                     std::optional<double> lambda = {});
absl::StatusOr<PointSet> ReadPointFile(const std::string& path,
                                       std::optional<double> lambda = {});
std::string FormatPoints(const PointSet& points);
absl::Status WritePointFile(const std::string& path, const PointSet& points);

absl::StatusOr<std::string> ReadTextFile(const std::string& path);
absl::Status WriteTextFile(const std::string& path, const std::string& text);

// Formats a double so that it parses back to the same value.
std::string FormatDouble(double v);

}  // namespace ldpkm

#endif  // LDPKM_POINT_IO_H_
