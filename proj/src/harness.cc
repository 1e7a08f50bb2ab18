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

#include "qcascade/harness.h"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "qcascade/errors.h"
#include "qcascade/utf8.h"

namespace qcascade {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kReportFormat = 1;

// Stage-specific seeds so that changing one stage never shifts another.
constexpr uint64_t kLabelSeedSalt = 0x6c61626c;
constexpr uint64_t kTrainSeedSalt = 0x74726e;
constexpr uint64_t kPolicySeedSalt = 0x706f6c;

uint64_t MixSeed(uint64_t seed, uint64_t salt, std::string_view tag = {}) {
  uint64_t h = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
T Get(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void RequireFile(const fs::path& path, std::string_view what) {
  if (!fs::exists(path)) {
    throw ConfigError(std::string(what) + " does not exist: " + path.string());
  }
}

CorrectorSpec ParseCorrectorSpec(const json& j, const fs::path& base) {
  CorrectorSpec spec;
  spec.type = Get<std::string>(j, "type", "identity");
  if (spec.type == "rules") {
    spec.path = Resolve(base, Get<std::string>(j, "rules", ""));
  } else if (spec.type == "scripted") {
    spec.path = Resolve(base, Get<std::string>(j, "script", ""));
    const json conf = Get<json>(j, "confidence", json::object());
    spec.confidence.perfect = Get<double>(conf, "perfect", spec.confidence.perfect);
    spec.confidence.noop = Get<double>(conf, "noop", spec.confidence.noop);
    spec.confidence.corrupt = Get<double>(conf, "corrupt", spec.confidence.corrupt);
  } else if (spec.type == "remote") {
    spec.url = Get<std::string>(j, "url", "");
    spec.timeout_ms = Get<int>(j, "timeout_ms", spec.timeout_ms);
    if (spec.url.empty()) throw ConfigError("remote corrector needs a url");
  } else if (spec.type != "identity") {
    throw ConfigError("unknown corrector type '" + spec.type + "'");
  }
  return spec;
}

std::vector<ParallelPair> ApplyLimit(std::vector<ParallelPair> pairs,
                                     const std::optional<size_t>& limit) {
  if (limit && pairs.size() > *limit) pairs.resize(*limit);
  return pairs;
}

std::string FormatThreshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", t);
  return buf;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

json PrfJson(const PRFReport& prf, const EditIndicators& ind) {
  return {{"p", prf.precision}, {"r", prf.recall}, {"f05", prf.f_beta},
          {"tp", ind.tp},       {"fp", ind.fp},     {"fn", ind.fn}};
}

PRFReport PrfFromJson(const json& j) {
  PRFReport r;
  r.precision = j.at("p").get<double>();
  r.recall = j.at("r").get<double>();
  r.f_beta = j.at("f05").get<double>();
  return r;
}

std::vector<std::string> ReadLines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!utf8::Trim(line).empty()) lines.emplace_back(utf8::Trim(line));
  }
  return lines;
}

}  // namespace

std::vector<double> ParseThresholdSweep(std::string_view spec) {
  std::vector<double> parts;
  std::stringstream ss{std::string(spec)};
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad threshold sweep '" + std::string(spec) + "'");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ConfigError("threshold sweep must be start:stop:step with step > 0");
  }
  std::vector<double> grid;
  const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const double t = parts[0] + static_cast<double>(k) * parts[2];
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("sweep thresholds must lie in (0, 1)");
    grid.push_back(t);
  }
  return grid;
}

HarnessConfig HarnessConfig::FromJson(const json& j, const fs::path& base,
                                      const Overrides& overrides) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  HarnessConfig cfg;
  cfg.seed = Get<uint64_t>(j, "seed", 0);
  cfg.parallelism = Get<size_t>(j, "parallelism", 1);
  if (j.contains("limit") && !j["limit"].is_null()) cfg.limit = Get<size_t>(j, "limit", 0);
  cfg.output_dir = Resolve(base, Get<std::string>(j, "output_dir", "out"));
  cfg.max_failure_rate = Get<double>(j, "max_failure_rate", 0.0);

  const json corpus = Get<json>(j, "corpus", json::object());
  if (!corpus.is_object()) throw ConfigError("corpus must map split names to paths");
  for (const auto& [name, path] : corpus.items()) {
    if (!path.is_string()) throw ConfigError("corpus paths must be strings");
    cfg.corpus[name] = Resolve(base, path.get<std::string>());
  }

  if (j.contains("gen_corpus")) {
    const json& g = j["gen_corpus"];
    GenCorpusSpec spec;
    spec.clean_queries = Resolve(base, Get<std::string>(g, "clean_queries", ""));
    if (g.contains("confusion_table") && !g["confusion_table"].is_null()) {
      spec.confusion_table = Resolve(base, Get<std::string>(g, "confusion_table", ""));
    }
    spec.noise.error_rate = Get<double>(g, "error_rate", 0.0);
    if (g.contains("op_weights")) {
      spec.noise.op_weights.fill(0.0);
      for (const auto& [op, w] : g["op_weights"].items()) {
        if (!w.is_number()) throw ConfigError("op_weights must be numbers");
        spec.noise.op_weights[static_cast<size_t>(ParseNoiseOp(op))] = w.get<double>();
      }
    }
    if (g.contains("split")) {
      spec.split.clear();
      for (const auto& [name, frac] : g["split"].items()) {
        if (!frac.is_number() || frac.get<double>() < 0.0) {
          throw ConfigError("split fractions must be non-negative numbers");
        }
        spec.split[name] = frac.get<double>();
      }
    }
    cfg.gen_corpus = std::move(spec);
  }

  const json correctors = Get<json>(j, "correctors", json::object());
  cfg.small = ParseCorrectorSpec(Get<json>(correctors, "small", json::object()), base);
  cfg.llm = ParseCorrectorSpec(Get<json>(correctors, "llm", json::object()), base);

  const json triggers = Get<json>(j, "triggers", json::object());
  cfg.feature_dim = Get<Eigen::Index>(triggers, "dim", kDefaultFeatureDim);
  if (cfg.feature_dim <= 0 || (cfg.feature_dim & (cfg.feature_dim - 1)) != 0) {
    throw ConfigError("triggers.dim must be a power of two");
  }
  const json train = Get<json>(triggers, "train", json::object());
  cfg.train.learning_rate = Get<double>(train, "learning_rate", cfg.train.learning_rate);
  cfg.train.epochs = Get<int>(train, "epochs", cfg.train.epochs);
  cfg.train.batch_size = Get<int>(train, "batch_size", cfg.train.batch_size);
  cfg.train.l2 = Get<double>(train, "l2", cfg.train.l2);
  cfg.train.Validate();
  const json thresholds = Get<json>(triggers, "thresholds", json::object());
  cfg.thresholds = {Get<double>(thresholds, "ct", 0.5), Get<double>(thresholds, "lt", 0.5),
                    Get<double>(thresholds, "ft", 0.5)};
  for (double t : cfg.thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("trigger thresholds must be in (0, 1)");
  }

  std::set<std::string> names;
  for (const json& p : Get<json>(j, "policies", json::array())) {
    PolicySpec spec;
    spec.kind = ParsePolicyKind(Get<std::string>(p, "kind", ""));
    spec.name = Get<std::string>(p, "name", std::string(PolicyKindName(spec.kind)));
    spec.p = Get<double>(p, "p", 0.0);
    spec.tau = Get<double>(p, "tau", 0.5);
    const std::string triggers_src = Get<std::string>(p, "triggers", "trained");
    if (triggers_src != "trained" && triggers_src != "oracle") {
      throw ConfigError("policy '" + spec.name + "': triggers must be trained or oracle");
    }
    spec.oracle_triggers = triggers_src == "oracle";
    if (!names.insert(spec.name).second) {
      throw ConfigError("duplicate policy name '" + spec.name + "'");
    }
    cfg.policies.push_back(std::move(spec));
  }

  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.parallelism) cfg.parallelism = *overrides.parallelism;
  if (overrides.limit) cfg.limit = *overrides.limit;
  if (overrides.threshold_sweep) {
    cfg.threshold_sweep = ParseThresholdSweep(*overrides.threshold_sweep);
  }
  cfg.train.seed = MixSeed(cfg.seed, kTrainSeedSalt);
  if (cfg.gen_corpus) cfg.gen_corpus->noise.seed = cfg.seed;
  return cfg;
}

HarnessConfig HarnessConfig::Load(const fs::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return FromJson(j, fs::absolute(path).parent_path(), overrides);
}

const fs::path& HarnessConfig::split(const std::string& name) const {
  const auto it = corpus.find(name);
  if (it == corpus.end()) throw ConfigError("config has no corpus." + name + " path");
  return it->second;
}

std::unique_ptr<Corrector> MakeCorrector(const CorrectorSpec& spec, std::string name,
                                         CostClass cost,
                                         const std::vector<ParallelPair>& corpus) {
  if (spec.type == "identity") return std::make_unique<IdentityCorrector>(name, cost);
  if (spec.type == "rules") {
    RequireFile(spec.path, "rules file");
    return std::make_unique<RuleCorrector>(name, cost, RuleCorrector::LoadRules(spec.path));
  }
  if (spec.type == "scripted") {
    RequireFile(spec.path, "script file");
    return std::make_unique<ScriptedOracleCorrector>(
        name, cost, corpus, ScriptedOracleCorrector::LoadScript(spec.path),
        spec.confidence);
  }
  return std::make_unique<RemoteCorrector>(name, cost, spec.url,
                                           std::chrono::milliseconds(spec.timeout_ms));
}

OracleTriggers MakeOracleTriggers(const std::vector<ParallelPair>& pairs,
                                  std::shared_ptr<const Corrector> llm_peek) {
  auto gold = std::make_shared<std::unordered_map<std::string, ParallelPair>>();
  for (const ParallelPair& p : pairs) gold->emplace(p.source, p);
  auto lookup = [gold](std::string_view x) -> const ParallelPair* {
    const auto it = gold->find(std::string(x));
    return it == gold->end() ? nullptr : &it->second;
  };

  OracleTriggers t;
  t.ct = std::make_shared<PredicateTrigger>([lookup](std::string_view x, auto) {
    const ParallelPair* p = lookup(x);
    return p != nullptr && p->erroneous();
  });
  t.lt = std::make_shared<PredicateTrigger>(
      [lookup, llm_peek](std::string_view x, std::optional<std::string_view> y) {
        const ParallelPair* p = lookup(x);
        if (p == nullptr || !y) return false;
        try {
          const CorrectionRecord rec{*p, std::string(*y),
                                     CallCorrector(*llm_peek, x, *y).corrected};
          return IsLtPositive(rec);
        } catch (const CorrectorError&) {
          return false;
        }
      });
  t.ft = std::make_shared<PredicateTrigger>(
      [lookup](std::string_view x, std::optional<std::string_view> y) {
        const ParallelPair* p = lookup(x);
        if (p == nullptr || !y || !p->erroneous()) return false;
        const ScoreRecord rec{p->source, std::string(*y), p->target};
        return ScoreRecordAt(rec, Level::kChar).tp == 0;
      });
  return t;
}

PolicyReport Summarize(const std::string& name, PolicyKind kind,
                       const std::vector<ParallelPair>& pairs,
                       const std::vector<PipelineOutcome>& outcomes) {
  std::vector<ScoreRecord> records;
  records.reserve(pairs.size());
  size_t failed = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    records.push_back({pairs[i].source, outcomes[i].y_final, pairs[i].target});
    if (outcomes[i].failed) ++failed;
  }
  return {name, kind, ScoreCorpus(records), LlmCoverage(outcomes), failed};
}

json ScoreToJson(const CorpusScore& score) {
  return {{"format", kReportFormat},
          {"char", PrfJson(score.char_prf, score.char_counts)},
          {"word", PrfJson(score.word_prf, score.word_counts)},
          {"n_records", score.n_records}};
}

json PolicyReportToJson(const PolicyReport& r) {
  json j = ScoreToJson(r.score);
  j["policy"] = r.policy;
  j["kind"] = PolicyKindName(r.kind);
  j["llm_coverage"] = r.llm_coverage;
  j["failed"] = r.failed;
  return j;
}

std::string FormatReportTable(const std::vector<PolicyReport>& reports) {
  std::ostringstream out;
  size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.policy.size());
  out << std::left << std::setw(static_cast<int>(width)) << "policy"
      << " | char P  char R  char F0.5 | word P  word R  word F0.5 |     LC | failed\n";
  out << std::string(width, '-') << "-+-" << std::string(26, '-') << "-+-"
      << std::string(26, '-') << "-+-" << std::string(6, '-') << "-+-------\n";
  out << std::fixed << std::setprecision(2);
  for (const auto& r : reports) {
    const auto& c = r.score.char_prf;
    const auto& w = r.score.word_prf;
    out << std::left << std::setw(static_cast<int>(width)) << r.policy << std::right
        << " | " << std::setw(6) << 100 * c.precision << "  " << std::setw(6)
        << 100 * c.recall << "  " << std::setw(9) << 100 * c.f_beta << " | "
        << std::setw(6) << 100 * w.precision << "  " << std::setw(6) << 100 * w.recall
        << "  " << std::setw(9) << 100 * w.f_beta << " | " << std::setw(6)
        << 100 * r.llm_coverage << " | " << std::setw(6) << r.failed << '\n';
  }
  return out.str();
}

std::vector<CorrectionRecord> CollectCorrections(const std::vector<ParallelPair>& pairs,
                                                 const CorrectorPair& correctors,
                                                 size_t parallelism, size_t* failures) {
  std::vector<std::optional<CorrectionRecord>> slots(pairs.size());
  ParallelFor(pairs.size(), parallelism, [&](size_t i) {
    try {
      const std::string y_small =
          CallCorrector(correctors.small, pairs[i].source, std::nullopt).corrected;
      const std::string y_llm =
          CallCorrector(correctors.llm, pairs[i].source, y_small).corrected;
      slots[i] = CorrectionRecord{pairs[i], y_small, y_llm};
    } catch (const CorrectorError&) {
    }
  });
  std::vector<CorrectionRecord> records;
  size_t failed = 0;
  for (auto& slot : slots) {
    if (slot) {
      records.push_back(std::move(*slot));
    } else {
      ++failed;
    }
  }
  if (failures != nullptr) *failures = failed;
  return records;
}

void WriteRecords(const fs::path& path, const std::vector<CorrectionRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const CorrectionRecord& r : records) {
    out << json{{"id", r.pair.id},       {"source", r.pair.source},
                {"target", r.pair.target}, {"y_small", r.y_small},
                {"y_llm", r.y_llm}}
               .dump()
        << '\n';
  }
}

std::vector<CorrectionRecord> LoadRecords(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<CorrectionRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      const json j = json::parse(line);
      records.push_back({{j.at("id").get<std::string>(), j.at("source").get<std::string>(),
                          j.at("target").get<std::string>()},
                         j.at("y_small").get<std::string>(),
                         j.at("y_llm").get<std::string>()});
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void CmdGenCorpus(const HarnessConfig& cfg, std::ostream& log) {
  if (!cfg.gen_corpus) throw ConfigError("config has no gen_corpus section");
  const GenCorpusSpec& spec = *cfg.gen_corpus;
  RequireFile(spec.clean_queries, "clean query file");
  ConfusionTable table;
  if (spec.confusion_table) {
    RequireFile(*spec.confusion_table, "confusion table");
    table = LoadConfusionTable(*spec.confusion_table);
  } else if (spec.noise.weight(NoiseOp::kConfusionSubstitution) > 0.0) {
    throw ConfigError("confusion_substitution has positive weight but no "
                      "confusion_table is configured");
  }
  std::vector<std::string> clean = ReadLines(spec.clean_queries);
  if (cfg.limit && clean.size() > *cfg.limit) clean.resize(*cfg.limit);

  const std::vector<ParallelPair> pairs = InjectNoise(clean, table, spec.noise);

  double total = 0.0;
  for (const auto& [name, frac] : spec.split) total += frac;
  if (!(total > 0.0)) throw ConfigError("split fractions must sum to a positive value");

  // Contiguous slices in split-name order; the last split takes the rest.
  size_t begin = 0;
  double cumulative = 0.0;
  size_t index = 0;
  for (const auto& [name, frac] : spec.split) {
    cumulative += frac;
    const size_t end = ++index == spec.split.size()
                           ? pairs.size()
                           : static_cast<size_t>(std::llround(cumulative / total *
                                                              static_cast<double>(pairs.size())));
    const std::vector<ParallelPair> part(pairs.begin() + static_cast<std::ptrdiff_t>(begin),
                                         pairs.begin() + static_cast<std::ptrdiff_t>(end));
    begin = end;
    const fs::path& path = cfg.split(name);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    SaveCorpus(path, part);
    if (!part.empty()) {
      const CorpusStats s = ComputeCorpusStats(part);
      log << name << ": " << s.count << " pairs, avg len " << s.avg_source_length
          << ", error rate " << s.error_rate << " -> " << path.string() << '\n';
    }
  }
  const CorpusStats all = ComputeCorpusStats(pairs);
  log << "total: " << all.count << " pairs, avg len " << all.avg_source_length
      << ", error rate " << all.error_rate << '\n';
}

void CmdExtractEdits(const fs::path& corpus, const fs::path& output, Level level,
                     std::ostream& log) {
  const std::vector<ParallelPair> pairs = LoadCorpus(corpus);
  std::ofstream out(output, std::ios::binary);
  if (!out) throw DataError("cannot write " + output.string());
  size_t n_edits = 0;
  for (const ParallelPair& p : pairs) {
    const EditSet edits = ExtractEdits(p.source, p.target, level);
    n_edits += edits.size();
    WriteM2Block(out, p.source, edits);
  }
  log << pairs.size() << " blocks, " << n_edits << " " << LevelName(level)
      << " edits -> " << output.string() << '\n';
}

json CmdScore(const fs::path& path, std::ostream& log) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<ScoreRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      const json j = json::parse(line);
      records.push_back({j.at("source").get<std::string>(),
                         j.at("hypothesis").get<std::string>(),
                         j.at("reference").get<std::string>()});
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  const CorpusScore score = ScoreCorpus(records);
  log << FormatReportTable({PolicyReport{path.stem().string(), PolicyKind::kTrigger3,
                                         score, 0.0, 0}});
  return ScoreToJson(score);
}

void CmdBuildLabels(const HarnessConfig& cfg, std::ostream& log) {
  const fs::path& train_path = cfg.split("train");
  RequireFile(train_path, "train corpus");
  const std::vector<ParallelPair> pairs = ApplyLimit(LoadCorpus(train_path), cfg.limit);
  const auto small = MakeCorrector(cfg.small, "small", CostClass::kSmall, pairs);
  const auto llm = MakeCorrector(cfg.llm, "llm", CostClass::kLlm, pairs);

  size_t failures = 0;
  const std::vector<CorrectionRecord> records =
      CollectCorrections(pairs, {*small, *llm}, cfg.parallelism, &failures);
  if (failures > 0) {
    log << "warning: " << failures << " pairs excluded after corrector failures\n";
  }

  const uint64_t seed = MixSeed(cfg.seed, kLabelSeedSalt);
  const LabelSet ct = BuildCt(pairs);
  const LabelSet lt = BuildLt(records, seed);
  const LabelSet ft = BuildFt(records, seed + 1);

  fs::create_directories(cfg.labels_dir());
  SaveLabels(cfg.labels_dir() / "ct.jsonl", ct.examples);
  SaveLabels(cfg.labels_dir() / "lt.jsonl", lt.examples);
  SaveLabels(cfg.labels_dir() / "ft.jsonl", ft.examples);
  WriteRecords(cfg.labels_dir() / "records.jsonl", records);
  for (const auto& [name, set] : {std::pair<const char*, const LabelSet*>{"CT", &ct},
                                  {"LT", &lt}, {"FT", &ft}}) {
    for (const auto& w : set->warnings) log << "warning: " << w << '\n';
    log << name << ": " << set->positives << " positive, " << set->negatives
        << " negative\n";
  }
}

void CmdTrain(const HarnessConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.models_dir());
  const std::array<std::pair<TriggerKind, const char*>, 3> triggers{
      {{TriggerKind::kCT, "ct"}, {TriggerKind::kLT, "lt"}, {TriggerKind::kFT, "ft"}}};
  for (size_t k = 0; k < triggers.size(); ++k) {
    const auto [kind, stem] = triggers[k];
    const fs::path labels = cfg.labels_dir() / (std::string(stem) + ".jsonl");
    RequireFile(labels, "label file");
    const auto examples = ToTrainingExamples(LoadLabels(labels), cfg.feature_dim);
    TrainConfig train = cfg.train;
    train.seed = cfg.train.seed + k;
    TrainResult result;
    try {
      result = Fit(examples, kind, train);
    } catch (const DataError& e) {
      throw DataError(std::string(TriggerKindName(kind)) + " trigger: " + e.what());
    }
    result.model.threshold = cfg.thresholds[k];
    size_t correct = 0;
    for (const auto& ex : examples) {
      if (Decide(result.model, ex.features).fire == (ex.label == 1)) ++correct;
    }
    SaveModel(cfg.models_dir() / (std::string(stem) + ".json"), result.model);
    log << TriggerKindName(kind) << ": " << examples.size() << " examples, final loss "
        << result.epoch_objective.back() << ", train accuracy "
        << static_cast<double>(correct) / static_cast<double>(examples.size()) << '\n';
  }

  std::set<PolicyKind> routers;
  for (const PolicySpec& p : cfg.policies) {
    if (p.kind == PolicyKind::kMetaRouting || p.kind == PolicyKind::kHybrid) {
      routers.insert(p.kind);
    }
  }
  if (routers.empty()) return;
  const fs::path records_path = cfg.labels_dir() / "records.jsonl";
  RequireFile(records_path, "correction records");
  const std::vector<CorrectionRecord> records = LoadRecords(records_path);
  for (PolicyKind kind : routers) {
    TrainConfig train = cfg.train;
    train.seed = cfg.train.seed + 10 + static_cast<uint64_t>(kind);
    const TriggerModel router = TrainRouter(kind, records, train, cfg.feature_dim);
    SaveModel(cfg.models_dir() / ("router_" + std::string(PolicyKindName(kind)) + ".json"),
              router);
    log << PolicyKindName(kind) << " router: trained on " << records.size() << " records\n";
  }
}

std::vector<PolicyReport> CmdEval(const HarnessConfig& cfg, std::ostream& log) {
  if (cfg.policies.empty()) throw ConfigError("no policies configured for eval");
  const fs::path& test_path = cfg.split("test");
  RequireFile(test_path, "test corpus");
  const std::vector<ParallelPair> pairs = ApplyLimit(LoadCorpus(test_path), cfg.limit);
  if (pairs.empty()) throw DataError("test corpus is empty");
  const std::shared_ptr<const Corrector> small =
      MakeCorrector(cfg.small, "small", CostClass::kSmall, pairs);
  const std::shared_ptr<const Corrector> llm =
      MakeCorrector(cfg.llm, "llm", CostClass::kLlm, pairs);

  auto load_trigger = [&](const std::string& stem, std::optional<double> threshold) {
    const fs::path path = cfg.models_dir() / (stem + ".json");
    RequireFile(path, "model file");
    TriggerModel model = LoadModel(path);
    if (threshold) model.threshold = *threshold;
    return std::make_shared<const ModelTrigger>(std::move(model));
  };

  std::vector<Policy> policies;
  for (const PolicySpec& spec : cfg.policies) {
    Policy policy;
    policy.name = spec.name;
    policy.kind = spec.kind;
    policy.p = spec.p;
    policy.tau = spec.tau;
    policy.seed = MixSeed(cfg.seed, kPolicySeedSalt, spec.name);
    if (spec.kind == PolicyKind::kMetaRouting || spec.kind == PolicyKind::kHybrid) {
      policy.router = load_trigger("router_" + std::string(PolicyKindName(spec.kind)),
                                   std::nullopt);
    }
    if (spec.kind == PolicyKind::kTrigger3 && spec.oracle_triggers) {
      const OracleTriggers oracle = MakeOracleTriggers(pairs, llm);
      policy.ct = oracle.ct;
      policy.lt = oracle.lt;
      policy.ft = oracle.ft;
    } else if (spec.kind == PolicyKind::kTrigger3) {
      policy.ct = load_trigger("ct", std::nullopt);
      policy.lt = load_trigger("lt", std::nullopt);
      policy.ft = load_trigger("ft", std::nullopt);
      for (double t : cfg.threshold_sweep.value_or(std::vector<double>{})) {
        Policy variant = policy;
        variant.name = spec.name + "@" + FormatThreshold(t);
        variant.ct = load_trigger("ct", t);
        variant.lt = load_trigger("lt", t);
        variant.ft = load_trigger("ft", t);
        policies.push_back(std::move(variant));
      }
    }
    policies.push_back(std::move(policy));
  }
  std::sort(policies.begin(), policies.end(),
            [](const Policy& a, const Policy& b) { return a.name < b.name; });

  const fs::path traces_dir = cfg.output_dir / "traces";
  fs::create_directories(traces_dir);
  fs::create_directories(cfg.reports_dir());

  std::vector<PolicyReport> reports;
  size_t total_failed = 0;
  for (const Policy& policy : policies) {
    const auto outcomes = RunPolicy(policy, pairs, {*small, *llm}, cfg.parallelism);
    std::ofstream trace(traces_dir / (policy.name + ".jsonl"), std::ios::binary);
    WriteTrace(trace, outcomes);
    reports.push_back(Summarize(policy.name, policy.kind, pairs, outcomes));
    total_failed += reports.back().failed;
    WriteText(cfg.reports_dir() / (policy.name + ".json"),
              PolicyReportToJson(reports.back()).dump(2) + "\n");
  }

  json combined;
  combined["format"] = kReportFormat;
  combined["seed"] = cfg.seed;
  combined["n_records"] = pairs.size();
  combined["policies"] = json::array();
  for (const PolicyReport& r : reports) combined["policies"].push_back(PolicyReportToJson(r));
  const std::string table = FormatReportTable(reports);
  WriteText(cfg.reports_dir() / "report.json", combined.dump(2) + "\n");
  WriteText(cfg.reports_dir() / "report.txt", table);
  log << table;

  const double runs = static_cast<double>(pairs.size() * policies.size());
  if (static_cast<double>(total_failed) > cfg.max_failure_rate * runs) {
    throw FailureBudgetExceeded(std::to_string(total_failed) +
                                " failed queries exceed the failure budget");
  }
  return reports;
}

void CmdCompare(const std::vector<fs::path>& paths, std::ostream& out) {
  if (paths.empty()) throw ConfigError("compare needs at least one report");
  std::vector<PolicyReport> rows;
  for (const fs::path& path : paths) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    json j;
    try {
      j = json::parse(in);
      const json entries = j.contains("policies") ? j["policies"] : json::array({j});
      for (const json& e : entries) {
        PolicyReport r;
        r.policy = e.at("policy").get<std::string>();
        if (paths.size() > 1) r.policy = path.parent_path().parent_path().filename().string() + ":" + r.policy;
        r.kind = ParsePolicyKind(e.at("kind").get<std::string>());
        r.score.char_prf = PrfFromJson(e.at("char"));
        r.score.word_prf = PrfFromJson(e.at("word"));
        r.score.n_records = e.at("n_records").get<size_t>();
        r.llm_coverage = e.at("llm_coverage").get<double>();
        r.failed = e.at("failed").get<size_t>();
        rows.push_back(std::move(r));
      }
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": not a report: " + e.what());
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.policy < b.policy; });
  out << FormatReportTable(rows);
}

}  // namespace qcascade
