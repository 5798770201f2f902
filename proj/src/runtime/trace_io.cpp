// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <ostream>

#include "emma/runtime.hpp"
#include "json.hpp"

namespace emma {

void write_trace_jsonl(const DecisionTrace& trace, std::ostream& out) {
  for (const TraceEvent& event : trace.events) {
    nlohmann::ordered_json line;
    line["time"] = event.sim_time_s;
    line["kind"] = to_string(event.kind);
    line["token"] = event.token ? nlohmann::ordered_json(*event.token) : nullptr;
    line["units"] = event.units ? nlohmann::ordered_json(*event.units) : nullptr;
    out << line.dump() << '\n';
  }
}

}  // namespace emma
