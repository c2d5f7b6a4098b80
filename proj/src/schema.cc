//
// Copyright 2026 The LDP Collect Authors
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

#include "ldp/schema.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace ldp {

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon) {
  if (std::isnan(epsilon)) {
    return absl::InvalidArgumentError("Epsilon must be a valid numeric value");
  }
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("Epsilon must be finite and positive, but is ", epsilon));
  }
  return PrivacyBudget(epsilon);
}

PrivacyBudget PrivacyBudget::Scaled(double factor) const {
  return PrivacyBudget(epsilon_ * factor);
}

AttributeSpec AttributeSpec::Numeric(std::string name, double range) {
  AttributeSpec spec;
  spec.name = std::move(name);
  spec.kind = AttributeKind::kNumeric;
  spec.range = range;
  return spec;
}

AttributeSpec AttributeSpec::Categorical(std::string name, int cardinality) {
  AttributeSpec spec;
  spec.name = std::move(name);
  spec.kind = AttributeKind::kCategorical;
  spec.cardinality = cardinality;
  return spec;
}

bool AttributeSpec::Admits(double value) const {
  if (is_numeric()) return std::isfinite(value) && std::abs(value) <= range;
  return value == std::floor(value) && value >= 1 && value <= cardinality;
}

absl::StatusOr<Schema> Schema::Create(std::vector<AttributeSpec> attributes) {
  if (attributes.empty()) {
    return absl::InvalidArgumentError("Schema needs at least one attribute");
  }
  std::set<std::string> names;
  for (const AttributeSpec& a : attributes) {
    if (a.name.empty()) {
      return absl::InvalidArgumentError("Attribute name must be non-empty");
    }
    if (!names.insert(a.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("Duplicate attribute name '", a.name, "'"));
    }
    if (a.is_numeric() && !(std::isfinite(a.range) && a.range > 0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Numeric attribute '", a.name, "' needs a finite range > 0"));
    }
    if (a.is_categorical() && a.cardinality < 2) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Categorical attribute '", a.name, "' needs cardinality >= 2"));
    }
  }
  return Schema(std::move(attributes));
}

absl::StatusOr<Schema> Schema::Parse(absl::string_view text) {
  std::vector<AttributeSpec> attributes;
  int line_number = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_number;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (fields.size() != 3) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Schema line ", line_number, ": expected name,kind,parameter"));
    }
    const std::string name(absl::StripAsciiWhitespace(fields[0]));
    const absl::string_view kind = absl::StripAsciiWhitespace(fields[1]);
    const absl::string_view param = absl::StripAsciiWhitespace(fields[2]);
    if (kind == "numeric") {
      double range;
      if (!absl::SimpleAtod(param, &range)) {
        return absl::InvalidArgumentError(
            absl::StrCat("Schema line ", line_number, ": bad range '", param,
                         "'"));
      }
      attributes.push_back(AttributeSpec::Numeric(name, range));
    } else if (kind == "categorical") {
      int cardinality;
      if (!absl::SimpleAtoi(param, &cardinality)) {
        return absl::InvalidArgumentError(
            absl::StrCat("Schema line ", line_number, ": bad cardinality '",
                         param, "'"));
      }
      attributes.push_back(AttributeSpec::Categorical(name, cardinality));
    } else {
      return absl::InvalidArgumentError(absl::StrCat(
          "Schema line ", line_number, ": unknown kind '", kind, "'"));
    }
  }
  return Create(std::move(attributes));
}

absl::StatusOr<Schema> Schema::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("Cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<Schema> schema = Parse(buffer.str());
  if (!schema.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", schema.status().message()));
  }
  return schema;
}

int Schema::numeric_count() const {
  int count = 0;
  for (const AttributeSpec& a : attributes_) count += a.is_numeric();
  return count;
}

int Schema::categorical_count() const {
  return dimension() - numeric_count();
}

int Schema::IndexOf(absl::string_view name) const {
  for (int j = 0; j < dimension(); ++j) {
    if (attributes_[j].name == name) return j;
  }
  return -1;
}

std::string Schema::Serialize() const {
  std::string out;
  for (const AttributeSpec& a : attributes_) {
    if (a.is_numeric()) {
      absl::StrAppend(&out, a.name, ",numeric,", FormatDouble(a.range), "\n");
    } else {
      absl::StrAppend(&out, a.name, ",categorical,", a.cardinality, "\n");
    }
  }
  return out;
}

absl::Status ValidateTuple(const Schema& schema,
                           std::span<const double> values) {
  if (static_cast<int>(values.size()) != schema.dimension()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Tuple has ", values.size(), " values, schema has ",
                     schema.dimension(), " attributes"));
  }
  for (int j = 0; j < schema.dimension(); ++j) {
    const AttributeSpec& a = schema.attribute(j);
    if (!a.Admits(values[j])) {
      return absl::OutOfRangeError(absl::StrCat(
          "Value ", values[j], " is outside the domain of attribute '", a.name,
          "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Normalize(double value, const AttributeSpec& spec) {
  if (!spec.is_numeric()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Attribute '", spec.name, "' is not numeric"));
  }
  if (!spec.Admits(value)) {
    return absl::OutOfRangeError(
        absl::StrCat("Value ", value, " is outside [-", spec.range, ", ",
                     spec.range, "] of attribute '", spec.name, "'"));
  }
  return value / spec.range;
}

double Denormalize(double value, const AttributeSpec& spec) {
  return value * spec.range;
}

Dataset::Dataset(Schema schema, std::vector<double> values)
    : schema_(std::move(schema)), values_(std::move(values)) {}

absl::Status Dataset::Append(std::span<const double> row) {
  if (absl::Status s = ValidateTuple(schema_, row); !s.ok()) return s;
  values_.insert(values_.end(), row.begin(), row.end());
  return absl::OkStatus();
}

absl::StatusOr<Dataset> Dataset::ReadCsv(const Schema& schema,
                                         const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("Cannot open ", path));
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": missing header"));
  }
  std::vector<std::string> header =
      absl::StrSplit(absl::StripAsciiWhitespace(line), ',');
  if (static_cast<int>(header.size()) != schema.dimension()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": header has ", header.size(),
                     " columns, schema has ", schema.dimension()));
  }
  // column_to_attr[c] = schema index of CSV column c.
  std::vector<int> column_to_attr(header.size());
  std::set<int> seen;
  for (size_t c = 0; c < header.size(); ++c) {
    const int j = schema.IndexOf(absl::StripAsciiWhitespace(header[c]));
    if (j < 0 || !seen.insert(j).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": header column '", header[c], "' does not match the schema"));
    }
    column_to_attr[c] = j;
  }
  Dataset dataset(schema);
  std::vector<double> row(schema.dimension());
  int64_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    absl::string_view stripped = absl::StripAsciiWhitespace(line);
    if (stripped.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(stripped, ',');
    if (fields.size() != header.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", line_number, ": expected ", header.size(), " fields"));
    }
    for (size_t c = 0; c < fields.size(); ++c) {
      double v;
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(fields[c]), &v)) {
        return absl::InvalidArgumentError(absl::StrCat(
            path, ":", line_number, ": bad number '", fields[c], "'"));
      }
      row[column_to_attr[c]] = v;
    }
    if (absl::Status s = dataset.Append(row); !s.ok()) {
      return absl::Status(s.code(),
                          absl::StrCat(path, ":", line_number, ": ",
                                       s.message()));
    }
  }
  return dataset;
}

absl::Status Dataset::WriteCsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("Cannot write ", path));
  std::vector<std::string> names;
  for (const AttributeSpec& a : schema_.attributes()) names.push_back(a.name);
  out << absl::StrJoin(names, ",") << "\n";
  const int d = schema_.dimension();
  for (int64_t i = 0; i < size(); ++i) {
    std::span<const double> row = Row(i);
    for (int j = 0; j < d; ++j) {
      if (j > 0) out << ',';
      out << FormatDouble(row[j]);
    }
    out << '\n';
  }
  if (!out) return absl::UnavailableError(absl::StrCat("Cannot write ", path));
  return absl::OkStatus();
}

std::string FormatDouble(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace ldp
