#include "monas/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "monas/errors.hpp"

namespace monas {

void EngineConfig::validate() const {
    if (total_epochs < 2) throw ConfigError("total_epochs must be at least 2");
    if (warmup_epochs < 1 || warmup_epochs >= total_epochs) {
        throw ConfigError("warmup_epochs must satisfy 0 < warmup < total_epochs");
    }
    if (population_size < 2) throw ConfigError("population_size must be at least 2");
    if (survivors < 1 || survivors >= population_size) {
        throw ConfigError("survivors must satisfy 0 < K < P");
    }
    if (crossover_prob < 0.0 || crossover_prob > 1.0 || mutation_prob < 0.0 || mutation_prob > 1.0) {
        throw ConfigError("probabilities must lie in [0,1]");
    }
    if (crossover_prob + mutation_prob > 1.0) {
        throw ConfigError("crossover_prob + mutation_prob must not exceed 1");
    }
    if (objectives.empty()) throw ConfigError("objective set must be non-empty");
    for (std::size_t i = 0; i < objectives.size(); ++i) {
        for (std::size_t j = i + 1; j < objectives.size(); ++j) {
            if (objectives[i] == objectives[j]) throw ConfigError("duplicate objective");
        }
    }
    if (warmup_pool < population_size) throw ConfigError("warmup_pool must be at least P");
    if (per_block_mutation_rate < 0.0 || per_block_mutation_rate > 1.0) {
        throw ConfigError("per_block_mutation_rate must lie in [0,1]");
    }
}

std::vector<Genome> generate_offspring(const std::vector<Candidate>& pareto, int count,
                                       const EngineConfig& config, const GenomeShape& shape,
                                       Rng& rng) {
    const int n = static_cast<int>(pareto.size());
    const double rate = config.per_block_mutation_rate > 0.0
                            ? config.per_block_mutation_rate
                            : 1.0 / shape.total_blocks;
    std::vector<Genome> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double u = rng.uniform01();
        if (u < config.crossover_prob) {
            if (n == 1) {
                out.push_back(pareto.front().genome);
                continue;
            }
            const int a = rng.uniform_int(n);
            int b = rng.uniform_int(n - 1);
            if (b >= a) ++b;
            out.push_back(crossover(pareto[static_cast<std::size_t>(a)].genome,
                                    pareto[static_cast<std::size_t>(b)].genome, rng));
        } else if (u < config.crossover_prob + config.mutation_prob) {
            const int a = rng.uniform_int(n);
            out.push_back(mutate(pareto[static_cast<std::size_t>(a)].genome, rate, shape, rng));
        } else {
            out.push_back(random_genome(shape, rng));
        }
    }
    return out;
}

Engine::Engine(EngineConfig config, const SearchDomain* domain, Evaluator* evaluator)
    : config_(std::move(config)), domain_(domain), evaluator_(evaluator) {
    config_.validate();
}

ObjectiveVector Engine::assemble_objectives(GenomeId id, const Genome& g,
                                            const Ledger& ledger) const {
    return objective_vector(id, ledger, domain_->size_mb(g), config_.objectives,
                            config_.potential_variant);
}

void Engine::log_event(SearchState& state, RunEvent event) const {
    event.seq = state.seq++;
    event.train_steps = state.train_steps;
    event.distinct_trained = static_cast<long>(state.trained_ids.size());
    state.events.push_back(std::move(event));
}

void Engine::warmup(SearchState& state) {
    const GenomeShape shape = domain_->shape();
    const int batches = evaluator_->batches_per_epoch();

    for (int epoch = 1; epoch <= config_.warmup_epochs; ++epoch) {
        state.epoch = epoch;
        evaluator_->begin_epoch(epoch);
        for (int b = 0; b < batches; ++b) {
            const Genome g = random_genome(shape, state.rng);
            evaluator_->train_subnet(g, b);
            ++state.train_steps;
            state.trained_ids.insert(genome_id(g));
            RunEvent ev;
            ev.epoch = epoch;
            ev.kind = EventKind::WarmupTrain;
            ev.id = genome_id(g);
            ev.choices = g.choices;
            log_event(state, ev);
        }
    }

    // Distinct pool; small spaces may not hold warmup_pool distinct genomes,
    // so sampling is attempt-bounded.
    std::vector<Genome> pool;
    std::unordered_set<GenomeId> seen;
    const long max_attempts = std::max(1000L, 50L * config_.warmup_pool);
    for (long attempt = 0; attempt < max_attempts &&
                           static_cast<int>(pool.size()) < config_.warmup_pool; ++attempt) {
        Genome g = random_genome(shape, state.rng);
        if (seen.insert(genome_id(g)).second) pool.push_back(std::move(g));
    }

    struct Scored {
        Genome genome;
        GenomeId id;
        double acc;
    };
    std::vector<Scored> scored;
    scored.reserve(pool.size());
    for (const Genome& g : pool) {
        const double acc = evaluator_->evaluate(g);
        const GenomeId id = genome_id(g);
        state.ledger.record_sample(id, config_.warmup_epochs, acc);
        RunEvent ev;
        ev.epoch = config_.warmup_epochs;
        ev.kind = EventKind::WarmupEval;
        ev.id = id;
        ev.choices = g.choices;
        ev.accuracy = acc;
        log_event(state, ev);
        scored.push_back({g, id, acc});
    }

    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.acc != b.acc) return a.acc > b.acc;
        return a.id < b.id;
    });

    state.population.clear();
    for (int i = 0; i < config_.population_size; ++i) {
        const Scored& s = scored[static_cast<std::size_t>(i) % scored.size()];
        Candidate c;
        c.id = s.id;
        c.genome = s.genome;
        state.population.push_back(std::move(c));
    }
}

void Engine::run_generation(SearchState& state, int epoch) {
    state.epoch = epoch;
    evaluator_->begin_epoch(epoch);
    const int pop_size = config_.population_size;
    const int batches = evaluator_->batches_per_epoch();

    // (i) Weights training: round-robin over the batch schedule, rounded up
    // so every individual gets exactly the same number of steps.
    const int steps_per_individual = (batches + pop_size - 1) / pop_size;
    for (int t = 0; t < pop_size * steps_per_individual; ++t) {
        Candidate& ind = state.population[static_cast<std::size_t>(t % pop_size)];
        evaluator_->train_subnet(ind.genome, t % batches);
        ++state.train_steps;
        state.trained_ids.insert(ind.id);
        RunEvent ev;
        ev.epoch = epoch;
        ev.kind = EventKind::Train;
        ev.id = ind.id;
        ev.choices = ind.genome.choices;
        log_event(state, ev);
    }

    // (ii) Evaluation: each distinct genome once, ascending id, shared by
    // its duplicates.
    std::map<GenomeId, const Genome*> distinct;
    for (const Candidate& c : state.population) distinct.emplace(c.id, &c.genome);
    for (const auto& [id, genome] : distinct) {
        const double acc = evaluator_->evaluate(*genome);
        state.ledger.record_sample(id, epoch, acc);
    }

    // (iii) Objective vectors over the post-update ledger.
    std::map<GenomeId, ObjectiveVector> vectors;
    for (const auto& [id, genome] : distinct) {
        ObjectiveVector v = assemble_objectives(id, *genome, state.ledger);
        RunEvent ev;
        ev.epoch = epoch;
        ev.kind = EventKind::Eval;
        ev.id = id;
        ev.choices = genome->choices;
        ev.accuracy = state.ledger.history(id).latest_accuracy();
        ev.objectives = v;
        log_event(state, ev);
        vectors.emplace(id, std::move(v));
    }
    for (Candidate& c : state.population) {
        c.objectives = vectors.at(c.id);
        c.front_rank.reset();
        c.crowding.reset();
    }
    state.evaluated_population = state.population;

    // (iv) NSGA-II survivors.
    std::vector<Candidate> survivors = select(state.population, config_.survivors);
    for (const Candidate& c : survivors) {
        RunEvent ev;
        ev.epoch = epoch;
        ev.kind = EventKind::Select;
        ev.id = c.id;
        ev.choices = c.genome.choices;
        ev.objectives = c.objectives;
        log_event(state, ev);
    }

    // (v) Offspring from the survivors.
    const std::vector<Genome> offspring = generate_offspring(
        survivors, pop_size - config_.survivors, config_, domain_->shape(), state.rng);
    state.population = std::move(survivors);
    for (const Genome& g : offspring) {
        Candidate c;
        c.id = genome_id(g);
        c.genome = g;
        RunEvent ev;
        ev.epoch = epoch;
        ev.kind = EventKind::Offspring;
        ev.id = c.id;
        ev.choices = g.choices;
        log_event(state, ev);
        state.population.push_back(std::move(c));
    }
}

SearchResult Engine::run_search() {
    const auto start = std::chrono::steady_clock::now();
    evaluator_->reset(derive_seed(config_.seed, 0xe7a1u));
    SearchState state(derive_seed(config_.seed, 0x5ea6c4u));

    warmup(state);
    for (int epoch = config_.warmup_epochs + 1; epoch <= config_.total_epochs; ++epoch) {
        run_generation(state, epoch);
    }

    SearchResult result;
    // Front 0 of the last evaluated population, duplicates collapsed.
    std::vector<Candidate> finals;
    std::unordered_set<GenomeId> seen;
    for (const Candidate& c : state.evaluated_population) {
        if (seen.insert(c.id).second) finals.push_back(c);
    }
    const Fronts fronts = non_dominated_sort(finals);
    if (!fronts.empty()) {
        for (const int i : fronts.front()) result.pareto_front.push_back(finals[static_cast<std::size_t>(i)]);
    }
    result.ledger = std::move(state.ledger);
    result.events = std::move(state.events);
    result.counters.train_steps = state.train_steps;
    result.counters.distinct_genomes_trained = static_cast<long>(state.trained_ids.size());
    result.counters.wall_clock_ms = static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
            .count());
    return result;
}

RetrainResult retrain(const MlpSpace& space, const Genome& genome, const Dataset& data, int epochs,
                      std::uint64_t seed) {
    return retrain_standalone(space, genome, data, epochs, seed);
}

}  // namespace monas
