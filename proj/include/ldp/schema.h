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

// Shared domain types: privacy budget, attribute schema, user tuples and the
// plain-text schema / dataset file formats.

#ifndef LDP_SCHEMA_H_
#define LDP_SCHEMA_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace ldp {

// Privacy parameter epsilon. Always finite and strictly positive.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon);

  double epsilon() const { return epsilon_; }

  // Budget scaled by a positive factor (e.g. epsilon / k). The result of
  // dividing a valid budget by a finite positive number is still valid.
  PrivacyBudget Scaled(double factor) const;

 private:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {}
  double epsilon_;
};

enum class AttributeKind { kNumeric, kCategorical };

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::kNumeric;
  // Symmetric domain [-range, range]; numeric attributes only.
  double range = 1.0;
  // Values are 1..cardinality; categorical attributes only.
  int cardinality = 0;

  static AttributeSpec Numeric(std::string name, double range);
  static AttributeSpec Categorical(std::string name, int cardinality);

  bool is_numeric() const { return kind == AttributeKind::kNumeric; }
  bool is_categorical() const { return kind == AttributeKind::kCategorical; }

  // True iff `value` lies in this attribute's domain.
  bool Admits(double value) const;
};

class Schema {
 public:
  static absl::StatusOr<Schema> Create(std::vector<AttributeSpec> attributes);

  // Parses the line-oriented schema format:
  //   name,numeric,<range>
  //   name,categorical,<cardinality>
  // Blank lines and lines starting with '#' are skipped.
  static absl::StatusOr<Schema> Parse(absl::string_view text);
  static absl::StatusOr<Schema> Load(const std::string& path);

  int dimension() const { return static_cast<int>(attributes_.size()); }
  const AttributeSpec& attribute(int j) const { return attributes_[j]; }
  const std::vector<AttributeSpec>& attributes() const { return attributes_; }

  int numeric_count() const;
  int categorical_count() const;
  // Index of the attribute called `name`, or -1.
  int IndexOf(absl::string_view name) const;

  std::string Serialize() const;

 private:
  explicit Schema(std::vector<AttributeSpec> attributes)
      : attributes_(std::move(attributes)) {}
  std::vector<AttributeSpec> attributes_;
};

// One user's record. Categorical values are stored as integral doubles.
struct UserTuple {
  std::vector<double> values;
};

absl::Status ValidateTuple(const Schema& schema,
                           std::span<const double> values);

// Maps a raw numeric value in [-r, r] to [-1, 1].
absl::StatusOr<double> Normalize(double value, const AttributeSpec& spec);
// Maps a mechanism output back to the attribute's raw scale.
double Denormalize(double value, const AttributeSpec& spec);

// Row-major table of user tuples sharing one schema.
class Dataset {
 public:
  explicit Dataset(Schema schema) : schema_(std::move(schema)) {}
  Dataset(Schema schema, std::vector<double> values);

  const Schema& schema() const { return schema_; }
  int64_t size() const {
    return static_cast<int64_t>(values_.size()) / schema_.dimension();
  }
  std::span<const double> Row(int64_t i) const {
    const int d = schema_.dimension();
    return {values_.data() + i * d, static_cast<size_t>(d)};
  }
  const std::vector<double>& values() const { return values_; }

  absl::Status Append(std::span<const double> row);

  // CSV with a header row of attribute names, one tuple per row. Column
  // order in the file may differ from the schema; extra columns are an error.
  static absl::StatusOr<Dataset> ReadCsv(const Schema& schema,
                                         const std::string& path);
  absl::Status WriteCsv(const std::string& path) const;

 private:
  Schema schema_;
  std::vector<double> values_;
};

// Formats a double so that parsing it back yields the same value.
std::string FormatDouble(double value);

}  // namespace ldp

#endif  // LDP_SCHEMA_H_
