#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "monas/domain.hpp"
#include "monas/evaluator.hpp"
#include "monas/ledger.hpp"
#include "monas/pareto.hpp"
#include "monas/rng.hpp"

namespace monas {

struct EngineConfig {
    int total_epochs = 100;
    int warmup_epochs = 10;
    int population_size = 20;  // P
    int survivors = 10;        // K, kept by NSGA-II each generation
    double crossover_prob = 0.3;
    double mutation_prob = 0.2;
    ObjectiveSet objectives = {ObjectiveName::Accuracy, ObjectiveName::Potential,
                               ObjectiveName::SizeMb};
    PotentialVariant potential_variant = PotentialVariant::Eq3;
    int warmup_pool = 100;
    std::uint64_t seed = 1;
    double per_block_mutation_rate = 0.0;  // 0 -> 1/total_blocks

    void validate() const;  // throws ConfigError
};

enum class EventKind { WarmupTrain, WarmupEval, Train, Eval, Select, Offspring };

// One run-log record. The stream alone suffices to replay the ledger, the
// per-generation selections, and the counters. Counters snapshots carry only
// the deterministic ones so logs stay byte-identical across runs.
struct RunEvent {
    long seq = 0;
    int epoch = 0;
    EventKind kind = EventKind::Train;
    GenomeId id = 0;
    std::vector<std::int16_t> choices;
    std::optional<double> accuracy;             // eval / warmup_eval
    std::optional<ObjectiveVector> objectives;  // eval / select
    long train_steps = 0;
    long distinct_trained = 0;
};

struct Counters {
    long train_steps = 0;
    long distinct_genomes_trained = 0;
    long wall_clock_ms = 0;
};

struct SearchState {
    int epoch = 0;
    std::vector<Candidate> population;           // survivors carry their last objectives
    std::vector<Candidate> evaluated_population; // population as of the last evaluation step
    Ledger ledger;
    Rng rng;
    long train_steps = 0;
    std::unordered_set<GenomeId> trained_ids;
    std::vector<RunEvent> events;
    long seq = 0;

    explicit SearchState(std::uint64_t seed) : rng(seed) {}
};

struct SearchResult {
    std::vector<Candidate> pareto_front;  // front 0 of the final evaluated population
    Ledger ledger;
    std::vector<RunEvent> events;
    Counters counters;
};

// Offspring generation per configured probabilities: crossover of two
// distinct parents (or a copy when only one parent exists), mutation of one
// parent, or a fresh uniform genome for the remaining mass.
std::vector<Genome> generate_offspring(const std::vector<Candidate>& pareto, int count,
                                       const EngineConfig& config, const GenomeShape& shape,
                                       Rng& rng);

// Warm-up plus NSGA-II generations against the given domain and evaluator.
class Engine {
public:
    Engine(EngineConfig config, const SearchDomain* domain, Evaluator* evaluator);

    // Trains the supernet on uniformly sampled subnets, then seeds the
    // population with the top-P of a distinct sampled pool.
    void warmup(SearchState& state);

    // One search epoch: equal-step weight training, evaluation + ledger
    // update, NSGA-II survivor selection, offspring generation.
    void run_generation(SearchState& state, int epoch);

    SearchResult run_search();

    const EngineConfig& config() const { return config_; }

private:
    ObjectiveVector assemble_objectives(GenomeId id, const Genome& g, const Ledger& ledger) const;
    void log_event(SearchState& state, RunEvent event) const;

    EngineConfig config_;
    const SearchDomain* domain_;
    Evaluator* evaluator_;
};

// Retraining of a front member from scratch; delegates to the standalone
// MLP trainer (simulator runs have nothing to retrain).
RetrainResult retrain(const MlpSpace& space, const Genome& genome, const Dataset& data, int epochs,
                      std::uint64_t seed);

}  // namespace monas
