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


#include "ldp/harness.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "ldp/aggregate.h"
#include "ldp/datagen.h"
#include "ldp/mechanisms.h"
#include "ldp/multidim.h"
#include "ldp/random.h"
#include "ldp/schema.h"
#include "ldp/sgd.h"

namespace ldp {
namespace {

// Stream ids under the experiment seed. Synthetic data uses stream 1.
constexpr uint64_t kPerturbStream = 2;
constexpr uint64_t kFoldStream = 3;
constexpr uint64_t kTrainStream = 4;
constexpr uint64_t kTaskStream = 5;

// Synthetic classification points closer than this to the separating
// hyperplane are resampled.
constexpr double kSyntheticMargin = 0.02;

uint64_t EpsilonKey(double epsilon) { return std::bit_cast<uint64_t>(epsilon); }

// Stable per-name stream key (FNV-1a).
uint64_t NameKey(absl::string_view name) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Runs fn(0..count-1) on a few threads. Results must be written to
// per-index slots so they do not depend on scheduling.
void ParallelFor(int64_t count, int threads,
                 const std::function<void(int64_t)>& fn) {
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = static_cast<int>(std::clamp<int64_t>(workers, 1, count));
  if (workers <= 1) {
    for (int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int64_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

absl::Status FirstError(const std::vector<absl::Status>& statuses) {
  for (const absl::Status& s : statuses) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status ParseNumber(absl::string_view key, absl::string_view value,
                         T& out) {
  bool ok;
  if constexpr (std::is_same_v<T, double>) {
    ok = absl::SimpleAtod(value, &out) && std::isfinite(out);
  } else {
    ok = absl::SimpleAtoi(value, &out);
  }
  if (!ok) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bad value '", value, "' for ", key));
  }
  return absl::OkStatus();
}

void ResolveDefaults(ExperimentConfig& config) {
  if (config.epsilons.empty()) {
    if (config.task == Task::kVarianceTable) {
      for (int i = 1; i <= 80; ++i) config.epsilons.push_back(i / 10.0);
    } else {
      config.epsilons = {1.0};
    }
  }
  if (config.mechanisms.empty()) {
    switch (config.task) {
      case Task::kMeanFreq:
        config.mechanisms = {"pm", "hm", "duchi", "laplace", "scdf",
                             "staircase"};
        break;
      case Task::kSgd:
        config.mechanisms = {"pm", "hm", "duchi", "laplace"};
        break;
      case Task::kVarianceTable:
      case Task::kSample:
        break;
    }
  }
}

absl::StatusOr<Dataset> LoadOrGenerate(const ExperimentConfig& config) {
  if (!config.data_path.empty()) {
    if (config.schema_path.empty()) {
      return absl::InvalidArgumentError("--data requires --schema");
    }
    absl::StatusOr<Schema> schema = Schema::Load(config.schema_path);
    if (!schema.ok()) return schema.status();
    return Dataset::ReadCsv(*schema, config.data_path);
  }
  SyntheticSpec spec;
  if (absl::Status s = ParseDistribution(config.distribution, spec); !s.ok()) {
    return s;
  }
  spec.n = config.n;
  spec.d = config.d;
  spec.seed = config.seed;
  if (!config.schema_path.empty()) {
    absl::StatusOr<Schema> schema = Schema::Load(config.schema_path);
    if (!schema.ok()) return schema.status();
    return GenerateForSchema(*schema, spec);
  }
  return Generate(spec);
}

// Population means (normalized scale) and value frequencies.
struct Truth {
  std::vector<double> means;
  std::vector<std::vector<double>> frequencies;
};

Truth ComputeTruth(const Dataset& data) {
  const Schema& schema = data.schema();
  const int d = schema.dimension();
  Truth truth;
  truth.means.assign(d, 0.0);
  truth.frequencies.resize(d);
  std::vector<ExactSum> sums(d);
  for (int j = 0; j < d; ++j) {
    if (schema.attribute(j).is_categorical()) {
      truth.frequencies[j].assign(schema.attribute(j).cardinality, 0.0);
    }
  }
  for (int64_t i = 0; i < data.size(); ++i) {
    const std::span<const double> row = data.Row(i);
    for (int j = 0; j < d; ++j) {
      const AttributeSpec& a = schema.attribute(j);
      if (a.is_numeric()) {
        sums[j].Add(row[j] / a.range);
      } else {
        truth.frequencies[j][static_cast<int>(row[j]) - 1] += 1;
      }
    }
  }
  const double n = static_cast<double>(data.size());
  for (int j = 0; j < d; ++j) {
    truth.means[j] = sums[j].Value() / n;
    for (double& f : truth.frequencies[j]) f /= n;
  }
  return truth;
}

struct RunErrors {
  double numeric = 0;      // Mean squared error over numeric attributes.
  double categorical = 0;  // Mean squared error over categorical values.
  double all = 0;          // Over both kinds of estimated quantity.
};

absl::StatusOr<Aggregator> CollectSampled(const Dataset& data,
                                          NumericBase base,
                                          PrivacyBudget budget,
                                          const RandomSource& run) {
  const Schema& schema = data.schema();
  const RecordPerturber perturber(schema, budget, base);
  Aggregator aggregator = Aggregator::ForSampling(schema, budget);
  Report report;
  for (int64_t i = 0; i < data.size(); ++i) {
    RandomSource user = run.Derive(static_cast<uint64_t>(i));
    if (absl::Status s = perturber.Perturb(i, data.Row(i), user, report);
        !s.ok()) {
      return s;
    }
    if (absl::Status s = aggregator.Add(report); !s.ok()) return s;
  }
  return aggregator;
}

absl::StatusOr<Aggregator> CollectSplit(const Dataset& data,
                                        absl::string_view mechanism,
                                        PrivacyBudget budget,
                                        const RandomSource& run) {
  const Schema& schema = data.schema();
  const int d = schema.dimension();
  std::vector<int> numeric;
  for (int j = 0; j < d; ++j) {
    if (schema.attribute(j).is_numeric()) numeric.push_back(j);
  }
  const PrivacyBudget per_attribute = budget.Scaled(1.0 / d);
  const bool duchi = mechanism == "duchi";
  std::optional<Perturber1d> single;
  if (!duchi) {
    absl::StatusOr<Mechanism1d> m = ParseMechanism1d(mechanism);
    if (!m.ok()) return m.status();
    single.emplace(*m, per_attribute);
  }
  const PrivacyBudget numeric_budget =
      budget.Scaled(static_cast<double>(numeric.size()) / d);
  const OueParams oue = OueParams::For(per_attribute);

  Aggregator aggregator = Aggregator::ForSplit(schema, budget);
  std::vector<double> t(numeric.size());
  std::vector<uint8_t> bits;
  for (int64_t i = 0; i < data.size(); ++i) {
    RandomSource user = run.Derive(static_cast<uint64_t>(i));
    const std::span<const double> row = data.Row(i);
    aggregator.AddUser();
    if (!numeric.empty()) {
      for (size_t a = 0; a < numeric.size(); ++a) {
        t[a] = row[numeric[a]] / schema.attribute(numeric[a]).range;
      }
      if (duchi) {
        const std::vector<double> out = DuchiMulti(t, numeric_budget, user);
        for (size_t a = 0; a < numeric.size(); ++a) {
          aggregator.AddNumeric(numeric[a], out[a]);
        }
      } else {
        for (size_t a = 0; a < numeric.size(); ++a) {
          aggregator.AddNumeric(numeric[a], (*single)(t[a], user));
        }
      }
    }
    for (int j = 0; j < d; ++j) {
      const AttributeSpec& spec = schema.attribute(j);
      if (!spec.is_categorical()) continue;
      OuePerturbInto(static_cast<int>(row[j]), spec.cardinality, oue, user,
                     bits);
      aggregator.AddCategorical(j, bits);
    }
  }
  return aggregator;
}

absl::StatusOr<RunErrors> MeanFreqRun(const Dataset& data, const Truth& truth,
                                      absl::string_view mechanism,
                                      PrivacyBudget budget,
                                      const RandomSource& run) {
  absl::StatusOr<Aggregator> aggregator =
      mechanism == "pm"   ? CollectSampled(data, NumericBase::kPiecewise,
                                           budget, run)
      : mechanism == "hm" ? CollectSampled(data, NumericBase::kHybrid, budget,
                                           run)
                          : CollectSplit(data, mechanism, budget, run);
  if (!aggregator.ok()) return aggregator.status();
  absl::StatusOr<EstimateSet> estimates = aggregator->Estimates();
  if (!estimates.ok()) return estimates.status();
  double numeric_sq = 0;
  double categorical_sq = 0;
  int64_t numeric_count = 0;
  int64_t categorical_count = 0;
  for (const AttributeEstimate& e : estimates->attributes) {
    if (!e.categorical) {
      const double err = e.mean - truth.means[e.attribute];
      numeric_sq += err * err;
      ++numeric_count;
      continue;
    }
    for (size_t v = 0; v < e.frequencies.size(); ++v) {
      const double err = e.frequencies[v] - truth.frequencies[e.attribute][v];
      categorical_sq += err * err;
      ++categorical_count;
    }
  }
  RunErrors errors;
  if (numeric_count > 0) errors.numeric = numeric_sq / numeric_count;
  if (categorical_count > 0) {
    errors.categorical = categorical_sq / categorical_count;
  }
  errors.all =
      (numeric_sq + categorical_sq) / (numeric_count + categorical_count);
  return errors;
}

// Mean and standard error of the mean.
std::pair<double, double> MeanAndSe(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

std::string ProvenanceSuffix(int runs, uint64_t seed) {
  return absl::StrCat(",", runs, ",", seed, "\n");
}

}  // namespace

absl::Status ExperimentConfig::Validate() const {
  if (runs < 1) return absl::InvalidArgumentError("runs must be >= 1");
  if (epsilons.empty()) {
    return absl::InvalidArgumentError("epsilon list is empty");
  }
  for (double e : epsilons) {
    if (absl::Status s = PrivacyBudget::Create(e).status(); !s.ok()) return s;
  }
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (d < 1) return absl::InvalidArgumentError("d must be >= 1");
  if (folds < 2) return absl::InvalidArgumentError("folds must be >= 2");
  if (threads < 0) return absl::InvalidArgumentError("threads must be >= 0");
  if (task == Task::kMeanFreq) {
    for (const std::string& m : mechanisms) {
      if (m != "pm" && m != "hm" && m != "duchi" && m != "laplace" &&
          m != "scdf" && m != "staircase") {
        return absl::InvalidArgumentError(
            absl::StrCat("Unknown mean-freq mechanism '", m, "'"));
      }
    }
  }
  if (task == Task::kSgd) {
    for (const std::string& m : mechanisms) {
      if (absl::Status s = ParseGradientMechanism(m).status(); !s.ok()) {
        return s;
      }
    }
    if (absl::Status s = ParseLossKind(loss).status(); !s.ok()) return s;
    if (!data_path.empty() && label.empty()) {
      return absl::InvalidArgumentError("--data requires --label for sgd");
    }
  }
  return absl::OkStatus();
}

absl::Status ApplyConfigEntry(absl::string_view key, absl::string_view value,
                              ExperimentConfig& config) {
  key = absl::StripAsciiWhitespace(key);
  value = absl::StripAsciiWhitespace(value);
  if (key == "epsilon") {
    config.epsilons.clear();
    for (absl::string_view item : absl::StrSplit(value, ',')) {
      double e;
      if (absl::Status s = ParseNumber(key, absl::StripAsciiWhitespace(item), e);
          !s.ok()) {
        return s;
      }
      config.epsilons.push_back(e);
    }
    return absl::OkStatus();
  }
  if (key == "mechanism") {
    config.mechanisms.clear();
    for (absl::string_view item : absl::StrSplit(value, ',')) {
      config.mechanisms.emplace_back(absl::StripAsciiWhitespace(item));
    }
    return absl::OkStatus();
  }
  if (key == "n") return ParseNumber(key, value, config.n);
  if (key == "d") return ParseNumber(key, value, config.d);
  if (key == "runs") return ParseNumber(key, value, config.runs);
  if (key == "seed") return ParseNumber(key, value, config.seed);
  if (key == "lambda") return ParseNumber(key, value, config.lambda);
  if (key == "group-size") return ParseNumber(key, value, config.group_size);
  if (key == "lr-const") return ParseNumber(key, value, config.lr_const);
  if (key == "folds") return ParseNumber(key, value, config.folds);
  if (key == "threads") return ParseNumber(key, value, config.threads);
  if (key == "schema") {
    config.schema_path = std::string(value);
  } else if (key == "data") {
    config.data_path = std::string(value);
  } else if (key == "dist") {
    config.distribution = std::string(value);
  } else if (key == "out") {
    config.out_path = std::string(value);
  } else if (key == "loss") {
    config.loss = std::string(value);
  } else if (key == "label") {
    config.label = std::string(value);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("Unknown configuration key '", key, "'"));
  }
  return absl::OkStatus();
}

absl::Status ApplyConfigText(absl::string_view text, ExperimentConfig& config) {
  int line_number = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_number;
    const absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("Config line ", line_number, ": expected key=value"));
    }
    if (absl::Status s =
            ApplyConfigEntry(line.substr(0, eq), line.substr(eq + 1), config);
        !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("Config line ", line_number, ": ", s.message()));
    }
  }
  return absl::OkStatus();
}

absl::Status ApplyConfigFile(const std::string& path,
                             ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("Cannot open config ", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ApplyConfigText(buffer.str(), config);
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError(absl::StrCat("Cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::UnavailableError(absl::StrCat("Cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<MeanFreqRow>> RunMeanFreq(
    const ExperimentConfig& input) {
  ExperimentConfig config = input;
  config.task = Task::kMeanFreq;
  ResolveDefaults(config);
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<Dataset> data = LoadOrGenerate(config);
  if (!data.ok()) return data.status();
  const Truth truth = ComputeTruth(*data);

  const int64_t mechanisms = config.mechanisms.size();
  const int64_t epsilons = config.epsilons.size();
  const int64_t tasks = mechanisms * epsilons * config.runs;
  std::vector<RunErrors> errors(tasks);
  std::vector<absl::Status> statuses(tasks);
  const RandomSource root(config.seed, kPerturbStream);
  ParallelFor(tasks, config.threads, [&](int64_t task) {
    const int64_t run = task % config.runs;
    const int64_t e = task / config.runs % epsilons;
    const int64_t m = task / config.runs / epsilons;
    const std::string& mechanism = config.mechanisms[m];
    const double epsilon = config.epsilons[e];
    const RandomSource stream = root.Derive(NameKey(mechanism))
                                    .Derive(EpsilonKey(epsilon))
                                    .Derive(static_cast<uint64_t>(run));
    absl::StatusOr<RunErrors> result = MeanFreqRun(
        *data, truth, mechanism, *PrivacyBudget::Create(epsilon), stream);
    if (result.ok()) {
      errors[task] = *result;
    } else {
      statuses[task] = result.status();
    }
  });
  if (absl::Status s = FirstError(statuses); !s.ok()) return s;

  std::vector<MeanFreqRow> rows;
  for (int64_t m = 0; m < mechanisms; ++m) {
    for (int64_t e = 0; e < epsilons; ++e) {
      std::vector<double> all, numeric, categorical;
      for (int64_t run = 0; run < config.runs; ++run) {
        const RunErrors& r = errors[(m * epsilons + e) * config.runs + run];
        all.push_back(r.all);
        numeric.push_back(r.numeric);
        categorical.push_back(r.categorical);
      }
      MeanFreqRow row;
      row.mechanism = config.mechanisms[m];
      row.epsilon = config.epsilons[e];
      std::tie(row.mse, row.se) = MeanAndSe(all);
      std::tie(row.mse_numeric, row.se_numeric) = MeanAndSe(numeric);
      std::tie(row.mse_categorical, row.se_categorical) =
          MeanAndSe(categorical);
      row.n = data->size();
      row.d = data->schema().dimension();
      row.runs = config.runs;
      row.seed = config.seed;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string MeanFreqCsv(const std::vector<MeanFreqRow>& rows) {
  std::string out =
      "mechanism,epsilon,mse,se,mse_numeric,se_numeric,mse_categorical,"
      "se_categorical,n,d,runs,seed\n";
  for (const MeanFreqRow& r : rows) {
    absl::StrAppend(&out, r.mechanism, ",", FormatDouble(r.epsilon), ",",
                    FormatDouble(r.mse), ",", FormatDouble(r.se), ",",
                    FormatDouble(r.mse_numeric), ",",
                    FormatDouble(r.se_numeric), ",",
                    FormatDouble(r.mse_categorical), ",",
                    FormatDouble(r.se_categorical), ",", r.n, ",", r.d,
                    ProvenanceSuffix(r.runs, r.seed));
  }
  return out;
}

double BisectPiecewiseDuchiCrossover() {
  auto gap = [](double epsilon) {
    const PrivacyBudget b = *PrivacyBudget::Create(epsilon);
    return WorstCaseVariance1d(Mechanism1d::kPiecewise, b) -
           WorstCaseVariance1d(Mechanism1d::kDuchi, b);
  };
  // Piecewise is worse at small budgets and better at large ones.
  double lo = 0.1;
  double hi = 5;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = (lo + hi) / 2;
    (gap(mid) > 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

absl::StatusOr<std::string> RunVarianceTable(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  config.task = Task::kVarianceTable;
  ResolveDefaults(config);
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  std::vector<int> dims = {1, 5, 10, 20, 40};
  if (std::find(dims.begin(), dims.end(), config.d) == dims.end()) {
    dims.push_back(config.d);
    std::sort(dims.begin(), dims.end());
  }
  const std::string tail = ProvenanceSuffix(config.runs, config.seed);
  std::string out = "table,mechanism,epsilon,d,value,runs,seed\n";
  for (double epsilon : config.epsilons) {
    const PrivacyBudget b = *PrivacyBudget::Create(epsilon);
    for (Mechanism1d m : kAllMechanisms1d) {
      absl::StrAppend(&out, "worst_case_1d,", MechanismName(m), ",",
                      FormatDouble(epsilon), ",1,",
                      FormatDouble(WorstCaseVariance1d(m, b)), tail);
    }
  }
  for (int d : dims) {
    for (double epsilon : config.epsilons) {
      const PrivacyBudget b = *PrivacyBudget::Create(epsilon);
      const double duchi =
          WorstCaseVarianceMulti(MultiMechanism::kDuchi, b, d);
      for (MultiMechanism m : {MultiMechanism::kDuchi,
                               MultiMechanism::kPiecewise,
                               MultiMechanism::kHybrid}) {
        absl::StrAppend(&out, "worst_case_multi,", MultiMechanismName(m), ",",
                        FormatDouble(epsilon), ",", d, ",",
                        FormatDouble(WorstCaseVarianceMulti(m, b, d)), tail);
      }
      for (MultiMechanism m :
           {MultiMechanism::kPiecewise, MultiMechanism::kHybrid}) {
        absl::StrAppend(&out, "ratio_to_duchi,", MultiMechanismName(m), ",",
                        FormatDouble(epsilon), ",", d, ",",
                        FormatDouble(WorstCaseVarianceMulti(m, b, d) / duchi),
                        tail);
      }
    }
  }
  const double crossover = BisectPiecewiseDuchiCrossover();
  absl::StrAppend(&out, "crossover,pm=duchi,", FormatDouble(crossover), ",1,",
                  FormatDouble(crossover), tail);
  absl::StrAppend(&out, "crossover,hm=duchi,",
                  FormatDouble(HybridThreshold()), ",1,",
                  FormatDouble(HybridThreshold()), tail);
  return out;
}

absl::StatusOr<std::vector<SgdRow>> RunSgd(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  config.task = Task::kSgd;
  ResolveDefaults(config);
  if (std::find(config.mechanisms.begin(), config.mechanisms.end(), "none") ==
      config.mechanisms.end()) {
    config.mechanisms.push_back("none");
  }
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const LossKind loss = *ParseLossKind(config.loss);

  LabeledData data;
  if (!config.data_path.empty() || !config.label.empty()) {
    if (config.label.empty()) {
      return absl::InvalidArgumentError("sgd on a dataset requires --label");
    }
    absl::StatusOr<Dataset> dataset = LoadOrGenerate(config);
    if (!dataset.ok()) return dataset.status();
    absl::StatusOr<LabeledData> labeled =
        MakeLabeledData(*dataset, config.label, loss);
    if (!labeled.ok()) return labeled.status();
    data = *std::move(labeled);
  } else {
    RandomSource rng(config.seed, kTaskStream);
    data = GenerateSeparableTask(config.d, config.n, loss, kSyntheticMargin,
                                 rng);
  }
  if (data.size() < config.folds) {
    return absl::InvalidArgumentError("Fewer rows than folds");
  }

  const int64_t mechanisms = config.mechanisms.size();
  const int64_t epsilons = config.epsilons.size();
  const int64_t per_cell = static_cast<int64_t>(config.runs) * config.folds;
  const int64_t tasks = mechanisms * epsilons * per_cell;

  std::vector<std::vector<std::vector<int64_t>>> folds(config.runs);
  for (int run = 0; run < config.runs; ++run) {
    RandomSource rng = RandomSource(config.seed, kFoldStream).Derive(run);
    folds[run] = CrossValidationFolds(data.size(), config.folds, rng);
  }

  std::vector<double> metrics(tasks);
  std::vector<int> group_sizes(tasks);
  std::vector<absl::Status> statuses(tasks);
  const RandomSource root(config.seed, kTrainStream);
  ParallelFor(tasks, config.threads, [&](int64_t task) {
    const int64_t fold = task % config.folds;
    const int64_t run = task / config.folds % config.runs;
    const int64_t e = task / per_cell % epsilons;
    const int64_t m = task / per_cell / epsilons;
    const std::vector<int64_t>& test_rows = folds[run][fold];
    std::vector<int64_t> train_rows;
    for (int64_t f = 0; f < config.folds; ++f) {
      if (f == fold) continue;
      train_rows.insert(train_rows.end(), folds[run][f].begin(),
                        folds[run][f].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    const LabeledData train = data.Subset(train_rows);
    const LabeledData test = data.Subset(test_rows);

    SgdConfig sgd;
    sgd.loss = loss;
    sgd.lambda = config.lambda;
    sgd.lr_const = config.lr_const;
    sgd.epsilon = config.epsilons[e];
    sgd.mechanism = *ParseGradientMechanism(config.mechanisms[m]);
    sgd.group_size = config.group_size > 0
                         ? config.group_size
                         : DefaultGroupSize(data.d, sgd.epsilon);
    // Only the final model matters here.
    sgd.log_interval = std::numeric_limits<int>::max();
    group_sizes[task] = sgd.group_size;
    RandomSource rng = root.Derive(NameKey(config.mechanisms[m]))
                           .Derive(EpsilonKey(sgd.epsilon))
                           .Derive(static_cast<uint64_t>(run * config.folds +
                                                         fold));
    absl::StatusOr<TrainResult> result = Train(train, sgd, rng);
    if (!result.ok()) {
      statuses[task] = result.status();
      return;
    }
    absl::StatusOr<double> metric = Evaluate(result->beta, test, loss);
    if (!metric.ok()) {
      statuses[task] = metric.status();
      return;
    }
    metrics[task] = *metric;
  });
  if (absl::Status s = FirstError(statuses); !s.ok()) return s;

  std::vector<SgdRow> rows;
  for (int64_t m = 0; m < mechanisms; ++m) {
    for (int64_t e = 0; e < epsilons; ++e) {
      const int64_t begin = (m * epsilons + e) * per_cell;
      const std::vector<double> cell(metrics.begin() + begin,
                                     metrics.begin() + begin + per_cell);
      SgdRow row;
      row.mechanism = config.mechanisms[m];
      row.epsilon = config.epsilons[e];
      row.loss = config.loss;
      const auto [mean, se] = MeanAndSe(cell);
      row.metric_mean = mean;
      row.metric_sd = se * std::sqrt(static_cast<double>(cell.size()));
      row.group_size = group_sizes[begin];
      row.n = data.size();
      row.d = data.d;
      row.runs = config.runs;
      row.seed = config.seed;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string SgdCsv(const std::vector<SgdRow>& rows) {
  std::string out =
      "mechanism,epsilon,loss,metric_mean,metric_sd,group_size,n,d,runs,seed\n";
  for (const SgdRow& r : rows) {
    absl::StrAppend(&out, r.mechanism, ",", FormatDouble(r.epsilon), ",",
                    r.loss, ",", FormatDouble(r.metric_mean), ",",
                    FormatDouble(r.metric_sd), ",", r.group_size, ",", r.n,
                    ",", r.d, ProvenanceSuffix(r.runs, r.seed));
  }
  return out;
}

absl::Status RunSample(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  config.task = Task::kSample;
  ResolveDefaults(config);
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (config.out_path.empty()) {
    return absl::InvalidArgumentError("sample requires --out");
  }
  std::optional<NumericBase> base;
  if (!config.mechanisms.empty()) {
    if (config.mechanisms.size() != 1 || config.epsilons.size() != 1) {
      return absl::InvalidArgumentError(
          "Reports need exactly one mechanism and one epsilon");
    }
    if (config.mechanisms[0] == "pm") {
      base = NumericBase::kPiecewise;
    } else if (config.mechanisms[0] == "hm") {
      base = NumericBase::kHybrid;
    } else {
      return absl::InvalidArgumentError(
          "Reports are produced with mechanism pm or hm");
    }
  }
  absl::StatusOr<Dataset> data = LoadOrGenerate(config);
  if (!data.ok()) return data.status();
  if (absl::Status s = data->WriteCsv(config.out_path); !s.ok()) return s;
  if (absl::Status s = WriteFile(config.out_path + ".schema",
                                 data->schema().Serialize());
      !s.ok()) {
    return s;
  }
  RandomSource fold_rng = RandomSource(config.seed, kFoldStream).Derive(0);
  if (absl::Status s = WriteFile(
          config.out_path + ".folds",
          FoldsToText(CrossValidationFolds(data->size(),
                                           static_cast<int>(std::min<int64_t>(
                                               config.folds, data->size())),
                                           fold_rng)));
      !s.ok()) {
    return s;
  }
  if (!base.has_value()) return absl::OkStatus();

  const PrivacyBudget budget = *PrivacyBudget::Create(config.epsilons[0]);
  const RecordPerturber perturber(data->schema(), budget, *base);
  const RandomSource run = RandomSource(config.seed, kPerturbStream)
                               .Derive(NameKey(config.mechanisms[0]))
                               .Derive(EpsilonKey(budget.epsilon()))
                               .Derive(0);
  std::string reports;
  Report report;
  for (int64_t i = 0; i < data->size(); ++i) {
    RandomSource user = run.Derive(static_cast<uint64_t>(i));
    if (absl::Status s = perturber.Perturb(i, data->Row(i), user, report);
        !s.ok()) {
      return s;
    }
    reports += SerializeReports(std::span<const Report>(&report, 1));
  }
  return WriteFile(config.out_path + ".reports", reports);
}

absl::StatusOr<std::string> RunExperiment(const ExperimentConfig& config) {
  std::string csv;
  switch (config.task) {
    case Task::kMeanFreq: {
      absl::StatusOr<std::vector<MeanFreqRow>> rows = RunMeanFreq(config);
      if (!rows.ok()) return rows.status();
      csv = MeanFreqCsv(*rows);
      break;
    }
    case Task::kSgd: {
      absl::StatusOr<std::vector<SgdRow>> rows = RunSgd(config);
      if (!rows.ok()) return rows.status();
      csv = SgdCsv(*rows);
      break;
    }
    case Task::kVarianceTable: {
      absl::StatusOr<std::string> table = RunVarianceTable(config);
      if (!table.ok()) return table.status();
      csv = *std::move(table);
      break;
    }
    case Task::kSample:
      if (absl::Status s = RunSample(config); !s.ok()) return s;
      return std::string();
  }
  if (!config.out_path.empty()) {
    if (absl::Status s = WriteFile(config.out_path, csv); !s.ok()) return s;
  }
  return csv;
}

}  // namespace ldp
