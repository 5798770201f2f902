// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "emma/error.hpp"
#include "emma/harness.hpp"

namespace emma {

namespace {

using nlohmann::json;

StreamInstance instance_from_json(const json& obj) {
  StreamInstance inst;
  inst.id = obj.at("id").get<std::string>();
  for (const json& chunk : obj.at("source")) {
    const double dur_ms = chunk.at("dur_ms").get<double>();
    inst.source_chunks.push_back({dur_ms / 1000.0, chunk.at("token").get<TokenId>()});
  }
  inst.reference = obj.at("reference").get<std::vector<TokenId>>();
  return inst;
}

}  // namespace

std::vector<StreamInstance> parse_instances(std::istream& in, std::string_view origin) {
  std::vector<StreamInstance> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    StreamInstance inst;
    try {
      inst = instance_from_json(json::parse(line));
    } catch (const json::exception& e) {
      fail(ErrorKind::kParse, std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    inst.validate();
    for (TokenId t : inst.reference) {
      if (t < 0) {
        fail(ErrorKind::kValidation, "instance '" + inst.id + "': negative reference token");
      }
    }
    if (!seen.insert(inst.id).second) {
      fail(ErrorKind::kValidation, std::string(origin) + ":" + std::to_string(line_no) +
                                       ": duplicate instance id '" + inst.id + "'");
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<StreamInstance> load_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open instance file " + path.string());
  return parse_instances(in, path.string());
}

}  // namespace emma
