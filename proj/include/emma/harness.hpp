// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

// Corpus-level driver: instance ingestion, manifest parsing, parallel corpus
// evaluation with a fixed reduction order, threshold sweeps, toy training of
// the regularized objective and report emission.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emma/bleu.hpp"
#include "emma/metrics.hpp"
#include "emma/objective.hpp"
#include "emma/runtime.hpp"
#include "emma/scripted_models.hpp"

namespace emma {

// ---------------------------------------------------------------------------
// Instances

/// JSONL, one object per line: {"id": str, "source": [{"dur_ms": num,
/// "token": int}, ...], "reference": [int, ...]}. Blank lines are skipped.
/// Parse failures name the line; validation failures name the instance.
std::vector<StreamInstance> parse_instances(std::istream& in, std::string_view origin = "<stream>");
std::vector<StreamInstance> load_instances(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Toy EMMA model for streaming

struct ToyTrainedOptions {
  std::size_t vocab = 0;  // 0: one past the largest token in the corpus
  std::size_t state_dim = 8;
  std::size_t heads = 2;
  std::size_t steps = 200;
  std::size_t samples = 8;
  std::size_t sample_len = 6;
  double learning_rate = 0.1;
  LossWeights weights{0.1, 0.0};
  double bias_init = -1.0;
  double temperature = 1.0;
};

/// A ToyModel wired to fixed random token embeddings so it can run through
/// the streaming runtime. Source chunk j is encoded as embedding(payload_j)
/// plus a position vector; the decoder state before target i is the
/// embedding of target i-1 (or a begin-of-sequence vector) plus a position
/// vector. Values are one-hot payloads. The next token is the argmax of the
/// readout over softmax attention across the consumed prefix; a finished
/// source that has been copied in full yields end-of-sequence.
class ToyEmmaModel final : public IncrementalModel {
 public:
  ToyEmmaModel(ToyModel model, Matrix source_embedding, Matrix target_embedding,
               std::uint64_t position_seed);

  EncoderState encode_prefix(std::span<const SourceChunk> consumed,
                             bool source_finished) const override;
  std::vector<double> head_probabilities(const EncoderState& state,
                                         std::span<const TokenId> prefix) const override;
  TokenId next_token(const EncoderState& state, std::span<const TokenId> prefix) const override;

  const ToyModel& parameters() const noexcept { return model_; }
  /// Frozen states for a whole (source, target) pair, as used in training.
  EncDecStates states_for(std::span<const TokenId> source, std::span<const TokenId> target) const;

 private:
  Matrix source_states(std::span<const TokenId> source) const;
  Matrix decoder_state(std::span<const TokenId> prefix) const;
  Matrix value_rows(std::span<const TokenId> source) const;
  double position(std::uint64_t stream, std::size_t index, std::size_t dim) const;

  ToyModel model_;
  Matrix source_embedding_;  // vocab x d
  Matrix target_embedding_;  // (vocab + 1) x d; last row is begin-of-sequence
  std::uint64_t position_seed_;
};

/// Trains a ToyEmmaModel on random copy pairs with the regularized objective.
ToyEmmaModel train_toy_emma_model(const ToyTrainedOptions& options, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Manifest

enum class ModelKind { kScriptedWaitK, kScriptedStochastic, kScriptedOffline, kToyTrained };

struct ModelSpec {
  ModelKind kind = ModelKind::kScriptedWaitK;
  std::size_t k = 2;
  StochasticPolicyOptions stochastic;
  ToyTrainedOptions toy;
  TokenMap vocab_map;
};

/// JSON file:
///   {"instances": "path.jsonl", "seed": 0, "latency_unit": "seconds"|"tokens",
///    "workers": 1, "chunk_ms": null,
///    "model": {"kind": "scripted_waitk"|"scripted_stochastic"|"scripted_offline"|
///              "toy_trained", "parameters": {...}},
///    "runtime": {"threshold": 0.5, "min_unit_chunk": 1, "units_per_token": 1,
///                "unit_duration_s": 0.02, "max_target_len": 256},
///    "sweep": [0.4, 0.5, 0.6, 0.7]}
/// Relative instance paths resolve against the manifest's directory.
struct Manifest {
  std::filesystem::path instances;
  ModelSpec model;
  RuntimeConfig runtime;
  std::vector<double> sweep;
  std::uint64_t seed = 0;
  DelayUnit latency_unit = DelayUnit::kSeconds;
  std::size_t workers = 1;
  /// Overrides every chunk duration when set.
  std::optional<double> chunk_ms;
  /// Writes <id>.jsonl event logs when set.
  std::optional<std::filesystem::path> trace_dir;

  void validate() const;
};

Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

/// One model per instance; stochastic models salt the seed with the id.
ModelFactory make_model_factory(const Manifest& manifest,
                                std::span<const StreamInstance> instances);

// ---------------------------------------------------------------------------
// Evaluation

struct InstanceOutcome {
  std::string id;
  std::optional<DecisionTrace> trace;
  std::optional<std::string> error;
};

struct CorpusResult {
  double threshold = 0.0;
  LatencyReport latency;
  QualityReport quality;
  std::vector<InstanceOutcome> outcomes;  // sorted by id
  std::size_t n_instances = 0;
  std::size_t n_failures = 0;
};

/// Runs every instance (in parallel across manifest.workers threads) and
/// reduces in id order, so the result does not depend on scheduling.
/// Failures are counted; a corpus where every instance failed throws
/// kCorpusFailure.
CorpusResult evaluate_corpus(const Manifest& manifest, std::span<const StreamInstance> instances);
CorpusResult evaluate_corpus(const Manifest& manifest);

struct SweepRow {
  double threshold = 0.0;
  double bleu = 0.0;
  double al = 0.0;
  double laal = 0.0;
  double start_offset = 0.0;
  double end_offset = 0.0;
  std::size_t n_instances = 0;
  std::size_t n_failures = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // ascending threshold
};

SweepRow to_row(const CorpusResult& result);

/// One corpus evaluation per threshold. Needs at least two thresholds, each
/// in (0, 1).
SweepReport threshold_sweep(const Manifest& manifest, std::span<const StreamInstance> instances,
                            std::span<const double> thresholds);
SweepReport threshold_sweep(const Manifest& manifest, std::span<const double> thresholds);

// ---------------------------------------------------------------------------
// Toy training

struct ToyTrainingConfig {
  std::size_t source_len = 6;
  std::size_t target_len = 4;
  std::size_t vocab = 8;
  std::size_t state_dim = 8;
  std::size_t heads = 2;
  std::size_t steps = 500;
  double learning_rate = 0.1;
  std::vector<LossWeights> settings;
  std::uint64_t seed = 0;
  double bias_init = -1.0;
  double temperature = 1.0;
  bool force_last_column = true;
};

struct TrainingStep {
  std::size_t step = 0;
  double loss = 0.0;
  double nll = 0.0;
  double mean_delay = 0.0;
  double mean_variance = 0.0;
};

struct TrainingRun {
  LossWeights weights;
  std::vector<TrainingStep> log;  // one entry per step, plus the final state
  ObjectiveTerms initial;
  ObjectiveTerms final_terms;
};

struct TrainingReport {
  ToyTrainingConfig config;
  std::vector<TrainingRun> runs;
};

/// Gradient descent on the policy, energy and readout parameters of one
/// toy instance whose states stay frozen. Every setting starts from the same
/// initialization. Throws kArgument with fewer than two settings and
/// kNumericDomain (naming the step) if the loss stops being finite.
TrainingReport train_toy_policy(const ToyTrainingConfig& config);

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { kCsv, kJson };

/// CSV header: threshold,bleu,al,laal,start_offset,end_offset,n_instances,n_failures.
/// Reals use six decimals; JSON carries the same fields and digits.
std::string format_report(const SweepReport& report, ReportFormat format);
/// Throws kIo naming the path.
void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path);

std::string format_training_report(const TrainingReport& report);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace emma
