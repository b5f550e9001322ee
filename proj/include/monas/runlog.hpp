#pragma once

#include <map>
#include <string>
#include <vector>

#include "monas/engine.hpp"

#include "json.hpp"

namespace monas {

std::string event_kind_str(EventKind k);
EventKind event_kind_from_str(const std::string& s);  // throws Error

nlohmann::json event_to_json(const RunEvent& e);
RunEvent event_from_json(const nlohmann::json& j);

// Line-delimited records behind a version header. Serialization is
// canonical: sorted keys, shortest round-trip numbers, one record per line.
std::string run_log_to_string(const std::vector<RunEvent>& events);
void write_run_log(const std::vector<RunEvent>& events, const std::string& path);
std::vector<RunEvent> read_run_log(const std::string& path);

// Canonical ledger serialization: one record per sample, ordered by
// (epoch, id). Reconstructible bit-exactly.
nlohmann::json ledger_to_json(const Ledger& ledger);
Ledger ledger_from_json(const nlohmann::json& j);

// Everything the log alone determines.
struct LogReplay {
    Ledger ledger;
    std::map<int, std::vector<GenomeId>> selections;  // epoch -> survivor ids in order
    long train_steps = 0;
    long distinct_trained = 0;
};

LogReplay replay_events(const std::vector<RunEvent>& events);

// Re-runs NSGA-II selection on the logged objective vectors and population
// composition; throws Error with a diagnostic when any generation's logged
// survivors disagree.
void verify_selections(const std::vector<RunEvent>& events, const EngineConfig& config);

}  // namespace monas
