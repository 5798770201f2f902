// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "emma/error.hpp"
#include "emma/harness.hpp"

namespace emma {

namespace {

using nlohmann::json;

template <class T>
void read_optional(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it != obj.end() && !it->is_null()) out = it->get<T>();
}

ModelKind parse_kind(const std::string& name) {
  if (name == "scripted_waitk") return ModelKind::kScriptedWaitK;
  if (name == "scripted_stochastic") return ModelKind::kScriptedStochastic;
  if (name == "scripted_offline") return ModelKind::kScriptedOffline;
  if (name == "toy_trained") return ModelKind::kToyTrained;
  fail(ErrorKind::kValidation, "manifest: unknown model kind '" + name + "'");
}

TokenMap parse_vocab_map(const json& obj) {
  TokenMap map;
  for (const auto& [key, value] : obj.items()) {
    std::size_t used = 0;
    const int from = std::stoi(key, &used);
    if (used != key.size()) fail(ErrorKind::kParse, "manifest: vocab_map key '" + key + "'");
    map[from] = value.get<TokenId>();
  }
  return map;
}

ModelSpec parse_model(const json& obj) {
  ModelSpec spec;
  spec.kind = parse_kind(obj.at("kind").get<std::string>());
  const json params = obj.value("parameters", json::object());
  if (auto it = params.find("vocab_map"); it != params.end()) {
    spec.vocab_map = parse_vocab_map(*it);
  }
  switch (spec.kind) {
    case ModelKind::kScriptedWaitK:
      read_optional(params, "k", spec.k);
      break;
    case ModelKind::kScriptedStochastic:
      read_optional(params, "heads", spec.stochastic.heads);
      read_optional(params, "temperature", spec.stochastic.temperature);
      read_optional(params, "mean", spec.stochastic.mean);
      read_optional(params, "stddev", spec.stochastic.stddev);
      read_optional(params, "lookahead", spec.stochastic.lookahead);
      break;
    case ModelKind::kScriptedOffline:
      break;
    case ModelKind::kToyTrained:
      read_optional(params, "vocab", spec.toy.vocab);
      read_optional(params, "state_dim", spec.toy.state_dim);
      read_optional(params, "heads", spec.toy.heads);
      read_optional(params, "steps", spec.toy.steps);
      read_optional(params, "samples", spec.toy.samples);
      read_optional(params, "sample_len", spec.toy.sample_len);
      read_optional(params, "learning_rate", spec.toy.learning_rate);
      read_optional(params, "lambda_latency", spec.toy.weights.latency);
      read_optional(params, "lambda_variance", spec.toy.weights.variance);
      read_optional(params, "bias_init", spec.toy.bias_init);
      read_optional(params, "temperature", spec.toy.temperature);
      break;
  }
  return spec;
}

RuntimeConfig parse_runtime(const json& obj) {
  RuntimeConfig config;
  read_optional(obj, "threshold", config.threshold);
  read_optional(obj, "min_unit_chunk", config.min_unit_chunk);
  read_optional(obj, "units_per_token", config.units_per_token);
  read_optional(obj, "unit_duration_s", config.unit_duration_s);
  read_optional(obj, "max_target_len", config.max_target_len);
  read_optional(obj, "read_compute_s", config.read_compute_s);
  read_optional(obj, "write_compute_s", config.write_compute_s);
  return config;
}

}  // namespace

void Manifest::validate() const {
  try {
    runtime.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kValidation, std::string("manifest: ") + e.what());
  }
  for (double t : sweep) {
    if (!(t > 0.0 && t < 1.0)) {
      fail(ErrorKind::kValidation, "manifest: sweep threshold " + std::to_string(t) +
                                       " outside (0, 1)");
    }
  }
  if (workers == 0) fail(ErrorKind::kValidation, "manifest: workers must be positive");
  if (chunk_ms && !(*chunk_ms > 0.0)) {
    fail(ErrorKind::kValidation, "manifest: chunk_ms must be positive");
  }
  switch (model.kind) {
    case ModelKind::kScriptedStochastic:
      if (model.stochastic.heads == 0 || !(model.stochastic.temperature > 0.0)) {
        fail(ErrorKind::kValidation,
             "manifest: stochastic model needs at least one head and a positive temperature");
      }
      break;
    case ModelKind::kToyTrained:
      if (model.toy.heads == 0 || model.toy.state_dim == 0 || model.toy.sample_len == 0 ||
          !(model.toy.temperature > 0.0) || model.toy.weights.latency < 0.0 ||
          model.toy.weights.variance < 0.0) {
        fail(ErrorKind::kValidation, "manifest: invalid toy_trained parameters");
      }
      break;
    default:
      break;
  }
}

Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  Manifest m;
  try {
    const json root = json::parse(json_text);
    m.instances = root.at("instances").get<std::string>();
    if (m.instances.is_relative()) m.instances = base_dir / m.instances;
    m.model = parse_model(root.at("model"));
    if (auto it = root.find("runtime"); it != root.end()) m.runtime = parse_runtime(*it);
    read_optional(root, "sweep", m.sweep);
    read_optional(root, "seed", m.seed);
    read_optional(root, "workers", m.workers);
    if (auto it = root.find("chunk_ms"); it != root.end() && !it->is_null()) {
      m.chunk_ms = it->get<double>();
    }
    if (auto it = root.find("trace_dir"); it != root.end() && !it->is_null()) {
      std::filesystem::path dir = it->get<std::string>();
      m.trace_dir = dir.is_relative() ? base_dir / dir : dir;
    }
    if (auto it = root.find("latency_unit"); it != root.end()) {
      const auto unit = it->get<std::string>();
      if (unit == "seconds") {
        m.latency_unit = DelayUnit::kSeconds;
      } else if (unit == "tokens") {
        m.latency_unit = DelayUnit::kSourceTokens;
      } else {
        fail(ErrorKind::kValidation, "manifest: latency_unit must be 'seconds' or 'tokens'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("manifest: ") + e.what());
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::kParse, "manifest: vocab_map keys must be integers");
  } catch (const std::out_of_range&) {
    fail(ErrorKind::kParse, "manifest: vocab_map key out of range");
  }
  m.model.stochastic.seed = m.seed;
  m.validate();
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  Manifest m = parse_manifest(text.str(), path.parent_path());
  if (!std::filesystem::exists(m.instances)) {
    fail(ErrorKind::kIo, "manifest " + path.string() + ": instance file " + m.instances.string() +
                             " does not exist");
  }
  return m;
}

ModelFactory make_model_factory(const Manifest& manifest,
                                std::span<const StreamInstance> instances) {
  const ModelSpec spec = manifest.model;
  switch (spec.kind) {
    case ModelKind::kScriptedWaitK:
      return [spec](const StreamInstance&) {
        return std::make_unique<ScriptedWaitKModel>(spec.k, spec.vocab_map);
      };
    case ModelKind::kScriptedOffline:
      return [spec](const StreamInstance&) {
        return std::make_unique<ScriptedOfflineModel>(spec.vocab_map);
      };
    case ModelKind::kScriptedStochastic: {
      const std::uint64_t seed = manifest.seed;
      return [spec, seed](const StreamInstance& inst) {
        StochasticPolicyOptions options = spec.stochastic;
        options.seed = seed ^ fnv1a(inst.id);
        return std::make_unique<ScriptedStochasticModel>(options, spec.vocab_map);
      };
    }
    case ModelKind::kToyTrained: {
      ToyTrainedOptions options = spec.toy;
      if (options.vocab == 0) {
        TokenId largest = 0;
        for (const auto& inst : instances) {
          for (const auto& chunk : inst.source_chunks) largest = std::max(largest, chunk.payload);
        }
        options.vocab = static_cast<std::size_t>(largest) + 1;
      }
      options.vocab = std::max<std::size_t>(options.vocab, 2);
      auto trained = std::make_shared<const ToyEmmaModel>(
          train_toy_emma_model(options, manifest.seed));
      return [trained](const StreamInstance&) { return std::make_unique<ToyEmmaModel>(*trained); };
    }
  }
  fail(ErrorKind::kValidation, "manifest: unsupported model kind");
}

}  // namespace emma
