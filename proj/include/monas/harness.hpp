#pragma once

#include <memory>
#include <string>
#include <vector>

#include "monas/dataset.hpp"
#include "monas/domain.hpp"
#include "monas/engine.hpp"
#include "monas/simulator.hpp"

#include "json.hpp"

namespace monas {

// Full run configuration: engine settings plus the evaluator backend and its
// constants. Parsing is strict; unknown keys are rejected.
struct RunConfig {
    EngineConfig engine;
    std::string evaluator_kind = "simulator";  // "simulator" | "mlp"
    SearchSpace space = default_search_space();
    SimulatorConfig simulator;
    MlpSpace mlp;
    int mlp_batch_size = 32;
    AdamConfig adam;
    DatasetSpec dataset;
    std::uint64_t dataset_seed = 7;
    int retrain_epochs = 40;
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = "runs/out";

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load_file(const std::string& path);
    nlohmann::json to_json() const;
    void validate() const;
};

// Objective-set shorthand: A = accuracy, P = potential, S = size, in the
// configured order (e.g. "APS").
std::string objective_label(const ObjectiveSet& objectives);

struct RunContext {
    std::unique_ptr<SearchDomain> domain;
    std::unique_ptr<Dataset> dataset;  // mlp backend only
    std::unique_ptr<Evaluator> evaluator;
};

RunContext make_context(const RunConfig& config);

int quarter_of_epoch(int epoch, int warmup_epochs, int total_epochs);  // 0..3
int half_of_epoch(int epoch, int warmup_epochs, int total_epochs);     // 0..1

std::vector<long> distinct_trained_per_quarter(const std::vector<RunEvent>& events,
                                               const EngineConfig& config);

// Deterministic summary of one run; wall clock is reported separately so
// everything under "counters"/"quarters"/"best_final" replays from the log.
nlohmann::json summarize_run(const RunConfig& config, const std::vector<RunEvent>& events,
                             const Counters& counters, std::size_t pareto_size,
                             std::uint64_t seed, const SearchDomain& domain);

// Runs one seed and writes run.log, ledger.json, pareto.json, summary.json
// and config.json into seed_dir. Partial outputs are removed on failure.
nlohmann::json run_one_seed(const RunConfig& config, std::uint64_t seed,
                            const std::string& seed_dir);

// Runs every seed into out_dir/seed_<n>/ and writes runset.json.
void run_search_command(const RunConfig& config, const std::string& out_dir);

// Reconstructs ledger, selections and summary counters from run.log and
// compares them byte-for-byte (after canonical serialization) with the
// artifacts written at run time. Throws Error on any mismatch.
void verify_run_dir(const std::string& seed_dir);

// Multi-set comparison over identical seeds. Throws SeedMismatch.
nlohmann::json compare_runsets(const std::vector<std::string>& dirs);
std::string render_compare_report(const nlohmann::json& report);

// Fig-2/Fig-3 style plot data (and optional SVG scatters) for one run.
void emit_plotdata(const std::string& seed_dir, bool svg);

// Retrains front member `rank` from a pareto.json (MLP runs only) and
// writes a metrics file; returns the metrics.
nlohmann::json retrain_command(const std::string& pareto_path, int rank, int epochs,
                               const std::string& out_path);

}  // namespace monas
