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

#include "qcascade/trigger.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "qcascade/errors.h"
#include "qcascade/utf8.h"

namespace qcascade {
namespace {

constexpr int kModelFormat = 1;
constexpr int kMaxOrder = 3;
constexpr char kSaltSource = 'x';
constexpr char kSaltContext = 'y';
constexpr std::string_view kSeparator = "\x1d[SEP]";

uint64_t Fnv1a(uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void AddNgrams(const std::vector<std::string>& units, char salt,
               uint64_t mask, std::map<Eigen::Index, double>& counts) {
  for (int order = 1; order <= kMaxOrder; ++order) {
    const auto width = static_cast<size_t>(order);
    for (size_t begin = 0; begin + width <= units.size(); ++begin) {
      uint64_t h = Fnv1a(0xcbf29ce484222325ULL, std::string_view(&salt, 1));
      h = Fnv1a(h, std::string(1, static_cast<char>('0' + order)));
      for (size_t k = begin; k < begin + width; ++k) {
        h = Fnv1a(h, "\x1f");
        h = Fnv1a(h, units[k]);
      }
      counts[static_cast<Eigen::Index>(h & mask)] += 1.0;
    }
  }
}

void CheckDims(const TriggerModel& model, const FeatureVector& f) {
  if (f.dim() != model.dim()) {
    throw DataError("feature dim " + std::to_string(f.dim()) +
                    " does not match model dim " + std::to_string(model.dim()));
  }
}

// d(objective)/d(logit) summed into `grad`, without the L2 term.
void AccumulateDataGradient(const TriggerModel& model,
                            std::span<const TrainingExample* const> batch,
                            Eigen::VectorXd& grad_w, double& grad_b) {
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const TrainingExample* example : batch) {
    const TrainingExample& ex = *example;
    const double residual =
        (Sigmoid(Logit(model, ex.features)) - ex.label) * inv_n;
    for (Eigen::SparseVector<double>::InnerIterator it(ex.features.values); it;
         ++it) {
      grad_w[it.index()] += residual * it.value();
    }
    grad_b += residual;
  }
}

void CheckExamples(std::span<const TrainingExample> examples) {
  if (examples.empty()) throw DataError("no training examples");
  bool has_pos = false;
  bool has_neg = false;
  const Eigen::Index dim = examples.front().features.dim();
  for (const TrainingExample& ex : examples) {
    if (ex.label != 0 && ex.label != 1) throw DataError("labels must be 0 or 1");
    if (ex.features.dim() != dim) throw DataError("training examples differ in dim");
    (ex.label == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw DataError("degenerate label set");
}

}  // namespace

std::string_view TriggerKindName(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::kCT: return "CT";
    case TriggerKind::kLT: return "LT";
    case TriggerKind::kFT: return "FT";
    case TriggerKind::kRouter: return "ROUTER";
  }
  return "?";
}

TriggerKind ParseTriggerKind(std::string_view name) {
  for (auto kind : {TriggerKind::kCT, TriggerKind::kLT, TriggerKind::kFT,
                    TriggerKind::kRouter}) {
    if (TriggerKindName(kind) == name) return kind;
  }
  throw DataError("unknown trigger kind '" + std::string(name) + "'");
}

FeatureVector Featurize(std::string_view x, std::optional<std::string_view> y,
                        Eigen::Index dim) {
  if (dim <= 0 || (dim & (dim - 1)) != 0) {
    throw ConfigError("feature dim must be a power of two");
  }
  const auto mask = static_cast<uint64_t>(dim - 1);
  std::map<Eigen::Index, double> counts;
  std::vector<std::string> units = utf8::Codepoints(x);
  if (y.has_value()) units.emplace_back(kSeparator);
  AddNgrams(units, kSaltSource, mask, counts);
  if (y.has_value()) AddNgrams(utf8::Codepoints(*y), kSaltContext, mask, counts);

  FeatureVector f;
  f.values.resize(dim);
  f.values.reserve(static_cast<Eigen::Index>(counts.size()));
  for (const auto& [index, value] : counts) f.values.insertBack(index) = value;
  return f;
}

double Logit(const TriggerModel& model, const FeatureVector& f) {
  CheckDims(model, f);
  return model.bias + f.values.dot(model.weights);
}

double Score(const TriggerModel& model, const FeatureVector& f) {
  return Sigmoid(Logit(model, f));
}

TriggerDecision Decide(const TriggerModel& model, const FeatureVector& f) {
  const double p = Score(model, f);
  return {p >= model.threshold, p};
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (!(l2 >= 0.0)) throw ConfigError("l2 must be non-negative");
}

double Objective(const TriggerModel& model,
                 std::span<const TrainingExample> examples, double l2) {
  double total = 0.0;
  for (const TrainingExample& ex : examples) {
    const double z = Logit(model, ex.features);
    // -[y log s(z) + (1-y) log(1-s(z))] == softplus(z) - y z
    total += Softplus(z) - ex.label * z;
  }
  const double mean = examples.empty() ? 0.0 : total / static_cast<double>(examples.size());
  return mean + l2 * model.weights.squaredNorm();
}

Gradient ObjectiveGradient(const TriggerModel& model,
                           std::span<const TrainingExample> examples,
                           double l2) {
  Gradient g{Eigen::VectorXd::Zero(model.dim()), 0.0};
  std::vector<const TrainingExample*> all;
  for (const TrainingExample& ex : examples) all.push_back(&ex);
  if (!all.empty()) AccumulateDataGradient(model, all, g.weights, g.bias);
  g.weights += 2.0 * l2 * model.weights;
  return g;
}

TrainResult Fit(std::span<const TrainingExample> examples, TriggerKind kind,
                const TrainConfig& cfg) {
  cfg.Validate();
  CheckExamples(examples);

  TrainResult result{TriggerModel::Zero(kind, examples.front().features.dim()), {}};
  TriggerModel& model = result.model;
  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const TrainingExample*> batch;
  Eigen::VectorXd grad_w = Eigen::VectorXd::Zero(model.dim());
  const double shrink = 1.0 / (1.0 + 2.0 * cfg.learning_rate * cfg.l2);
  const auto batch_size = static_cast<size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t begin = 0; begin < order.size(); begin += batch_size) {
      const size_t end = std::min(order.size(), begin + batch_size);
      batch.clear();
      for (size_t k = begin; k < end; ++k) batch.push_back(&examples[order[k]]);
      grad_w.setZero();
      double grad_b = 0.0;
      AccumulateDataGradient(model, batch, grad_w, grad_b);
      model.weights -= cfg.learning_rate * grad_w;
      model.weights *= shrink;
      model.bias -= cfg.learning_rate * grad_b;
    }
    result.epoch_objective.push_back(Objective(model, examples, cfg.l2));
  }
  return result;
}

std::string SerializeModel(const TriggerModel& model) {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["kind"] = TriggerKindName(model.kind);
  j["dim"] = model.dim();
  j["bias"] = model.bias;
  j["threshold"] = model.threshold;
  j["weights"] = std::vector<double>(model.weights.begin(), model.weights.end());
  return j.dump();
}

TriggerModel DeserializeModel(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<int>() != kModelFormat) {
      throw DataError("unsupported model format");
    }
    TriggerModel model;
    model.kind = ParseTriggerKind(j.at("kind").get<std::string>());
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(weights.size()) != dim) {
      throw DataError("model weights length does not match dim");
    }
    model.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), dim);
    model.bias = j.at("bias").get<double>();
    model.threshold = j.at("threshold").get<double>();
    if (!(model.threshold > 0.0 && model.threshold < 1.0)) {
      throw DataError("model threshold must be in (0, 1)");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model schema error: ") + e.what());
  }
}

void SaveModel(const std::filesystem::path& path, const TriggerModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << SerializeModel(model) << '\n';
}

TriggerModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return DeserializeModel(buffer.str());
}

}  // namespace qcascade
