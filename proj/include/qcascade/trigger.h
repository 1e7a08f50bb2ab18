// Copyright 2026 The qcascade Authors.
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

#ifndef QCASCADE_TRIGGER_H_
#define QCASCADE_TRIGGER_H_

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcascade {

// CT/LT/FT are the cascade triggers; kRouter is the single-shot router used
// by the routing baselines.
enum class TriggerKind { kCT, kLT, kFT, kRouter };

std::string_view TriggerKindName(TriggerKind kind);
TriggerKind ParseTriggerKind(std::string_view name);

inline constexpr Eigen::Index kDefaultFeatureDim = Eigen::Index{1} << 16;

// Hashed character n-gram counts. Stored indices are strictly increasing
// and every stored value is positive.
struct FeatureVector {
  Eigen::SparseVector<double> values;

  Eigen::Index dim() const { return values.size(); }
  Eigen::Index nonzeros() const { return values.nonZeros(); }
};

// Character 1..3-grams of `x` hashed into `dim` buckets (a power of two).
// With `y`, a separator unit is appended to x and y's n-grams are hashed
// under a different salt, so the encoding is order sensitive.
FeatureVector Featurize(std::string_view x,
                        std::optional<std::string_view> y = std::nullopt,
                        Eigen::Index dim = kDefaultFeatureDim);

template <typename Scalar>
Scalar Sigmoid(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar Softplus(Scalar z) {
  return z > Scalar(0) ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

struct TriggerModel {
  TriggerKind kind = TriggerKind::kCT;
  Eigen::VectorXd weights;
  double bias = 0.0;
  double threshold = 0.5;

  Eigen::Index dim() const { return weights.size(); }

  static TriggerModel Zero(TriggerKind kind, Eigen::Index dim) {
    return {kind, Eigen::VectorXd::Zero(dim), 0.0, 0.5};
  }
};

// Raw logit; DataError when dimensions differ.
double Logit(const TriggerModel& model, const FeatureVector& f);
double Score(const TriggerModel& model, const FeatureVector& f);

struct TriggerDecision {
  bool fire = false;
  double p = 0.0;
};

// Fires when p >= threshold.
TriggerDecision Decide(const TriggerModel& model, const FeatureVector& f);

struct TrainingExample {
  FeatureVector features;
  int label = 0;  // 0 or 1
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 30;
  int batch_size = 32;
  double l2 = 0.0;
  uint64_t seed = 0;

  void Validate() const;  // ConfigError on violation
};

// Mean binary cross-entropy plus l2 * ||weights||^2 (bias unregularized).
double Objective(const TriggerModel& model,
                 std::span<const TrainingExample> examples, double l2);

struct Gradient {
  Eigen::VectorXd weights;
  double bias = 0.0;
};

Gradient ObjectiveGradient(const TriggerModel& model,
                           std::span<const TrainingExample> examples,
                           double l2);

struct TrainResult {
  TriggerModel model;
  std::vector<double> epoch_objective;  // after each epoch, full set
};

// Mini-batch SGD from a zero model. The L2 term is applied as an implicit
// (proximal) shrinkage step so very large penalties stay stable.
// Throws DataError for a single-class set or mismatched dimensions.
TrainResult Fit(std::span<const TrainingExample> examples, TriggerKind kind,
                const TrainConfig& cfg);

inline TriggerModel Train(std::span<const TrainingExample> examples,
                          TriggerKind kind, const TrainConfig& cfg) {
  return Fit(examples, kind, cfg).model;
}

// JSON {"format": 1, "kind", "dim", "bias", "threshold", "weights": [...]}.
std::string SerializeModel(const TriggerModel& model);
TriggerModel DeserializeModel(std::string_view text);
void SaveModel(const std::filesystem::path& path, const TriggerModel& model);
TriggerModel LoadModel(const std::filesystem::path& path);

}  // namespace qcascade

#endif  // QCASCADE_TRIGGER_H_
