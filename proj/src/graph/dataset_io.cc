// Copyright 2026 The gdpkit Authors.
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

#include "gdpkit/graph/dataset_io.h"

#include <algorithm>
#include <filesystem>
#include <utility>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "gdpkit/common/binary_io.h"

namespace gdpkit {
namespace {

namespace fs = std::filesystem;

std::vector<absl::string_view> Lines(absl::string_view text) {
  std::vector<absl::string_view> out;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    line = absl::StripSuffix(line, "\r");
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

absl::StatusOr<std::pair<int, int>> ParsePair(absl::string_view line,
                                              const std::string& file) {
  std::vector<absl::string_view> parts = absl::StrSplit(line, ',');
  int a, b;
  if (parts.size() != 2 || !absl::SimpleAtoi(parts[0], &a) ||
      !absl::SimpleAtoi(parts[1], &b)) {
    return absl::InvalidArgumentError(
        absl::StrCat(file, ": malformed line '", line, "'"));
  }
  return std::make_pair(a, b);
}

}  // namespace

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

absl::Status WriteDataset(const GraphDataset& dataset, const std::string& dir,
                          bool directed, const nlohmann::json& extra_meta) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  nlohmann::json meta = extra_meta.is_object() ? extra_meta
                                               : nlohmann::json::object();
  meta["n"] = dataset.n();
  meta["m_labeled"] = dataset.m_labeled;
  meta["F"] = dataset.num_features();
  meta["C"] = dataset.num_classes();
  meta["directed"] = directed;
  absl::Status s = WriteFileBytes(dir + "/meta.json", meta.dump(2) + "\n");
  if (!s.ok()) return s;

  std::vector<std::pair<int, int>> edges = dataset.adjacency.Edges();
  std::sort(edges.begin(), edges.end());
  std::string text = "src,dst\n";
  for (const auto& [src, dst] : edges) {
    // Undirected files list each symmetric pair once.
    if (!directed && src > dst && dataset.adjacency.Get(src, dst)) continue;
    absl::StrAppend(&text, src, ",", dst, "\n");
  }
  s = WriteFileBytes(dir + "/edges.csv", text);
  if (!s.ok()) return s;

  text.clear();
  for (int i = 0; i < dataset.features.rows(); ++i) {
    for (int f = 0; f < dataset.features.cols(); ++f) {
      if (f > 0) text.push_back(',');
      text += FormatDouble(dataset.features(i, f));
    }
    text.push_back('\n');
  }
  s = WriteFileBytes(dir + "/features.csv", text);
  if (!s.ok()) return s;

  text = "node,class\n";
  for (int i = 0; i < dataset.n(); ++i) {
    const int c = dataset.ClassOf(i);
    if (c >= 0) absl::StrAppend(&text, i, ",", c, "\n");
  }
  return WriteFileBytes(dir + "/labels.csv", text);
}

absl::StatusOr<LoadedDataset> ReadDataset(const std::string& dir) {
  absl::StatusOr<std::string> meta_text = ReadFileBytes(dir + "/meta.json");
  if (!meta_text.ok()) return meta_text.status();
  LoadedDataset out;
  out.meta = nlohmann::json::parse(*meta_text, nullptr, false);
  if (out.meta.is_discarded() || !out.meta.is_object()) {
    return absl::InvalidArgumentError(dir + "/meta.json is not a JSON object");
  }
  for (const char* key : {"n", "m_labeled", "F", "C", "directed"}) {
    if (!out.meta.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat(dir, "/meta.json lacks \"", key, "\""));
    }
  }
  const int n = out.meta["n"].get<int>();
  const int m = out.meta["m_labeled"].get<int>();
  const int num_features = out.meta["F"].get<int>();
  const int num_classes = out.meta["C"].get<int>();
  const bool directed = out.meta["directed"].get<bool>();

  absl::StatusOr<std::string> edges_text = ReadFileBytes(dir + "/edges.csv");
  if (!edges_text.ok()) return edges_text.status();
  std::vector<absl::string_view> lines = Lines(*edges_text);
  if (lines.empty() || lines[0] != "src,dst") {
    return absl::InvalidArgumentError("edges.csv must start with 'src,dst'");
  }
  std::vector<std::pair<int, int>> edges;
  for (size_t l = 1; l < lines.size(); ++l) {
    absl::StatusOr<std::pair<int, int>> e = ParsePair(lines[l], "edges.csv");
    if (!e.ok()) return e.status();
    if (e->first < 0 || e->first >= n || e->second < 0 || e->second >= n) {
      return absl::InvalidArgumentError(
          absl::StrCat("edges.csv: node index out of range in '", lines[l], "'"));
    }
    edges.push_back(*e);
    if (!directed) edges.emplace_back(e->second, e->first);
  }

  absl::StatusOr<std::string> feat_text = ReadFileBytes(dir + "/features.csv");
  if (!feat_text.ok()) return feat_text.status();
  Matrix features = Matrix::Zero(n, num_features);
  if (num_features > 0) {
    lines = Lines(*feat_text);
    if (static_cast<int>(lines.size()) != n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "features.csv has ", lines.size(), " rows, expected ", n));
    }
    for (int i = 0; i < n; ++i) {
      std::vector<absl::string_view> parts = absl::StrSplit(lines[i], ',');
      if (static_cast<int>(parts.size()) != num_features) {
        return absl::InvalidArgumentError(
            absl::StrCat("features.csv row ", i, " has ", parts.size(),
                         " columns, expected ", num_features));
      }
      for (int f = 0; f < num_features; ++f) {
        if (!absl::SimpleAtod(parts[f], &features(i, f))) {
          return absl::InvalidArgumentError(
              absl::StrCat("features.csv row ", i, ": bad number"));
        }
      }
    }
  }

  absl::StatusOr<std::string> label_text = ReadFileBytes(dir + "/labels.csv");
  if (!label_text.ok()) return label_text.status();
  lines = Lines(*label_text);
  if (lines.empty() || lines[0] != "node,class") {
    return absl::InvalidArgumentError("labels.csv must start with 'node,class'");
  }
  std::vector<int> classes(n, -1);
  for (size_t l = 1; l < lines.size(); ++l) {
    absl::StatusOr<std::pair<int, int>> p = ParsePair(lines[l], "labels.csv");
    if (!p.ok()) return p.status();
    if (p->first < 0 || p->first >= n || p->second < 0 ||
        p->second >= num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("labels.csv: entry out of range '", lines[l], "'"));
    }
    classes[p->first] = p->second;
  }

  absl::StatusOr<GraphDataset> d =
      MakeDataset(Adjacency::FromEdges(n, edges), std::move(features),
                  std::move(classes), num_classes, m);
  if (!d.ok()) return d.status();
  out.dataset = *std::move(d);
  return out;
}

}  // namespace gdpkit
