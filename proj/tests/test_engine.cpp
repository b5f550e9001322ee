#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "monas/engine.hpp"
#include "monas/harness.hpp"
#include "monas/runlog.hpp"
#include "monas/simulator.hpp"

using namespace monas;

namespace {

SearchSpace tiny_space() {
    SearchSpace s;
    s.num_layers = 2;
    s.blocks_per_layer = {3, 3};
    s.calibration_strides = {2, 1};
    s.stem_channels = 8;
    s.layer_channels = {8, 16};
    s.ops = {CandidateOp::skip(), CandidateOp::mbconv(3, 3), CandidateOp::mbconv(5, 4)};
    return s;
}

EngineConfig small_config() {
    EngineConfig c;
    c.total_epochs = 16;
    c.warmup_epochs = 4;
    c.population_size = 8;
    c.survivors = 4;
    c.warmup_pool = 16;
    c.seed = 101;
    return c;
}

struct ConstantEvaluator final : Evaluator {
    void reset(std::uint64_t) override {}
    void begin_epoch(int) override {}
    int batches_per_epoch() const override { return 4; }
    double train_subnet(const Genome&, int) override { return 0.5; }
    double evaluate(const Genome&) override { return 0.5; }
    bool read_only_eval() const override { return true; }
};

}  // namespace

TEST_CASE("warmup: pool of size P becomes the population") {
    const MbconvDomain domain(tiny_space());
    Simulator sim(domain.shape(), SimulatorConfig{}, 1);
    EngineConfig cfg = small_config();
    cfg.warmup_pool = cfg.population_size;
    Engine engine(cfg, &domain, &sim);

    SearchState state(7);
    engine.warmup(state);
    REQUIRE(static_cast<int>(state.population.size()) == cfg.population_size);

    std::set<GenomeId> pool_ids;
    for (const RunEvent& e : state.events) {
        if (e.kind == EventKind::WarmupEval) pool_ids.insert(e.id);
    }
    std::set<GenomeId> pop_ids;
    for (const Candidate& c : state.population) pop_ids.insert(c.id);
    CHECK(pop_ids == pool_ids);
}

TEST_CASE("warmup: top-P selection equals an independent sort of the pool") {
    const MbconvDomain domain(tiny_space());
    Simulator sim(domain.shape(), SimulatorConfig{}, 2);
    const EngineConfig cfg = small_config();
    Engine engine(cfg, &domain, &sim);

    SearchState state(8);
    engine.warmup(state);

    struct Entry {
        double acc;
        GenomeId id;
    };
    std::vector<Entry> pool;
    for (const RunEvent& e : state.events) {
        if (e.kind == EventKind::WarmupEval) pool.push_back({*e.accuracy, e.id});
    }
    std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
        if (a.acc != b.acc) return a.acc > b.acc;
        return a.id < b.id;
    });
    REQUIRE(static_cast<int>(pool.size()) >= cfg.population_size);
    for (int i = 0; i < cfg.population_size; ++i) {
        CHECK(state.population[static_cast<std::size_t>(i)].id ==
              pool[static_cast<std::size_t>(i)].id);
    }
}

TEST_CASE("warmup is deterministic for a fixed seed") {
    const MbconvDomain domain(tiny_space());
    const EngineConfig cfg = small_config();

    auto run = [&] {
        Simulator sim(domain.shape(), SimulatorConfig{}, 3);
        sim.reset(55);
        Engine engine(cfg, &domain, &sim);
        SearchState state(9);
        engine.warmup(state);
        std::vector<GenomeId> ids;
        for (const Candidate& c : state.population) ids.push_back(c.id);
        return ids;
    };
    CHECK(run() == run());
}

TEST_CASE("generate_offspring: zero probabilities give fresh random genomes") {
    EngineConfig cfg = small_config();
    cfg.crossover_prob = 0.0;
    cfg.mutation_prob = 0.0;
    const GenomeShape shape{21, 8};
    Rng rng(10);

    std::vector<Candidate> pareto(1);
    pareto[0].genome.choices.assign(21, 0);
    pareto[0].id = genome_id(pareto[0].genome);

    const auto children = generate_offspring(pareto, 200, cfg, shape, rng);
    REQUIRE(children.size() == 200);
    int equal_parent = 0;
    for (const Genome& child : children) {
        CHECK(valid_genome(child, shape));
        if (child == pareto[0].genome) ++equal_parent;
    }
    CHECK(equal_parent == 0);  // chance of a random all-zero 21-block draw is 8^-21
}

TEST_CASE("generate_offspring: pure crossover children stay within parent values") {
    EngineConfig cfg = small_config();
    cfg.crossover_prob = 1.0;
    cfg.mutation_prob = 0.0;
    const GenomeShape shape{21, 8};
    Rng rng(11);

    std::vector<Candidate> pareto(2);
    pareto[0].genome.choices.assign(21, 2);
    pareto[1].genome.choices.assign(21, 5);
    pareto[0].id = genome_id(pareto[0].genome);
    pareto[1].id = genome_id(pareto[1].genome);

    for (const Genome& child : generate_offspring(pareto, 500, cfg, shape, rng)) {
        for (const auto c : child.choices) CHECK((c == 2 || c == 5));
    }
}

TEST_CASE("generate_offspring: branch frequencies match (0.3, 0.2, 0.5) within 5 sigma") {
    // Single all-zero parent makes the branches observable: crossover
    // duplicates the parent, mutation changes Binom(21, r*7/8) blocks, and
    // random re-draws everything. A silent mutation (no block changed) is
    // indistinguishable from the crossover copy, so its mass is folded in.
    EngineConfig cfg = small_config();
    const GenomeShape shape{21, 8};
    Rng rng(12);

    std::vector<Candidate> pareto(1);
    pareto[0].genome.choices.assign(21, 0);
    pareto[0].id = genome_id(pareto[0].genome);

    const int n = 10000;
    const auto children = generate_offspring(pareto, n, cfg, shape, rng);
    long copylike = 0, small_change = 0, resampled = 0;
    for (const Genome& child : children) {
        int changed = 0;
        for (const auto c : child.choices) changed += c != 0;
        if (changed == 0) {
            ++copylike;
        } else if (changed <= 5) {
            ++small_change;
        } else {
            ++resampled;
        }
    }
    const double rate = 1.0 / 21.0;  // default per-block rate
    const double silent = std::pow(1.0 - rate * 7.0 / 8.0, 21);
    const double p_copy = 0.3 + 0.2 * silent;
    const double p_small = 0.2 * (1.0 - silent);
    const double p_rand = 0.5;
    const auto bound = [&](double p) { return 5.0 * std::sqrt(p * (1 - p) / n); };
    CHECK(std::fabs(static_cast<double>(copylike) / n - p_copy) < bound(p_copy));
    CHECK(std::fabs(static_cast<double>(small_change) / n - p_small) < bound(p_small));
    CHECK(std::fabs(static_cast<double>(resampled) / n - p_rand) < bound(p_rand));
}

TEST_CASE("run_generation: population size stays P and all members are evaluated") {
    const MbconvDomain domain(tiny_space());
    Simulator sim(domain.shape(), SimulatorConfig{}, 4);
    const EngineConfig cfg = small_config();
    Engine engine(cfg, &domain, &sim);

    SearchState state(13);
    engine.warmup(state);
    for (int epoch = cfg.warmup_epochs + 1; epoch <= cfg.warmup_epochs + 3; ++epoch) {
        engine.run_generation(state, epoch);
        CHECK(static_cast<int>(state.population.size()) == cfg.population_size);
        for (const Candidate& c : state.evaluated_population) {
            CHECK(state.ledger.history(c.id).samples() >= 1);
        }
    }
}

TEST_CASE("constant evaluator with accuracy objective completes and keeps K") {
    const MbconvDomain domain(tiny_space());
    ConstantEvaluator eval;
    EngineConfig cfg = small_config();
    cfg.objectives = {ObjectiveName::Accuracy};
    Engine engine(cfg, &domain, &eval);
    const SearchResult result = engine.run_search();
    long selects = 0;
    for (const RunEvent& e : result.events) selects += e.kind == EventKind::Select;
    CHECK(selects == static_cast<long>(cfg.survivors) * (cfg.total_epochs - cfg.warmup_epochs));
    // Every candidate ties, so front 0 is the whole deduplicated population.
    CHECK(result.pareto_front.size() >= 1);
}

TEST_CASE("run_search: total 11 warm-up 10 gives exactly one generation") {
    const MbconvDomain domain(tiny_space());
    Simulator sim(domain.shape(), SimulatorConfig{}, 5);
    EngineConfig cfg = small_config();
    cfg.total_epochs = 11;
    cfg.warmup_epochs = 10;
    Engine engine(cfg, &domain, &sim);
    const SearchResult result = engine.run_search();
    std::set<int> generation_epochs;
    for (const RunEvent& e : result.events) {
        if (e.kind == EventKind::Eval) generation_epochs.insert(e.epoch);
    }
    CHECK(generation_epochs == std::set<int>{11});
}

TEST_CASE("identical config and seed produce identical event streams") {
    const MbconvDomain domain(tiny_space());
    const EngineConfig cfg = small_config();
    auto run = [&] {
        Simulator sim(domain.shape(), SimulatorConfig{}, 0);
        Engine engine(cfg, &domain, &sim);
        return run_log_to_string(engine.run_search().events);
    };
    CHECK(run() == run());
}

TEST_CASE("train-step counters follow the config arithmetic") {
    const MbconvDomain domain(tiny_space());
    SimulatorConfig sim_cfg;
    sim_cfg.steps_per_epoch = 10;
    Simulator sim(domain.shape(), sim_cfg, 6);
    const EngineConfig cfg = small_config();  // P=8
    Engine engine(cfg, &domain, &sim);
    const SearchResult result = engine.run_search();

    const int steps_per_individual = (10 + cfg.population_size - 1) / cfg.population_size;  // ceil
    const long expected = static_cast<long>(cfg.warmup_epochs) * 10 +
                          static_cast<long>(cfg.total_epochs - cfg.warmup_epochs) *
                              cfg.population_size * steps_per_individual;
    CHECK(result.counters.train_steps == expected);

    long train_events = 0;
    for (const RunEvent& e : result.events) {
        train_events += e.kind == EventKind::Train || e.kind == EventKind::WarmupTrain;
    }
    CHECK(train_events == expected);
}

TEST_CASE("ledger and eval events are in bijection") {
    const MbconvDomain domain(tiny_space());
    Simulator sim(domain.shape(), SimulatorConfig{}, 7);
    const EngineConfig cfg = small_config();
    Engine engine(cfg, &domain, &sim);
    const SearchResult result = engine.run_search();

    long eval_events = 0;
    for (const RunEvent& e : result.events) {
        if (e.kind != EventKind::Eval && e.kind != EventKind::WarmupEval) continue;
        ++eval_events;
        const History& h = result.ledger.history(e.id);
        const auto it = std::find(h.epochs.begin(), h.epochs.end(), e.epoch);
        REQUIRE(it != h.epochs.end());
        CHECK(h.accuracies[static_cast<std::size_t>(it - h.epochs.begin())] == *e.accuracy);
    }
    long ledger_samples = 0;
    for (const auto& [id, h] : result.ledger.all()) ledger_samples += h.samples();
    CHECK(ledger_samples == eval_events);
}

TEST_CASE("logged selections replay exactly") {
    const MbconvDomain domain(tiny_space());
    Simulator sim(domain.shape(), SimulatorConfig{}, 8);
    const EngineConfig cfg = small_config();
    Engine engine(cfg, &domain, &sim);
    const SearchResult result = engine.run_search();
    CHECK_NOTHROW(verify_selections(result.events, cfg));
}

TEST_CASE("final front equals front 0 of the final evaluated candidates") {
    const MbconvDomain domain(tiny_space());
    Simulator sim(domain.shape(), SimulatorConfig{}, 9);
    const EngineConfig cfg = small_config();
    Engine engine(cfg, &domain, &sim);
    const SearchResult result = engine.run_search();
    REQUIRE(!result.pareto_front.empty());
    for (const Candidate& c : result.pareto_front) {
        CHECK(c.front_rank == 0);
        // No other front member dominates it.
        for (const Candidate& other : result.pareto_front) {
            CHECK_FALSE(dominates(other.objectives, c.objectives));
        }
    }
}

TEST_CASE("retraining beats the shared-weight estimate on most seeds") {
    DatasetSpec spec;
    spec.classes = 3;
    spec.dims = 6;
    spec.per_class = 60;
    spec.warp_strength = 1.5;
    spec.class_separation = 2.5;

    MlpSpace space;
    space.slots = 4;
    space.base_width = 12;
    space.expansions = {1, 2, 4};
    space.input_dims = spec.dims;
    space.num_classes = spec.classes;
    const MlpDomain domain(space);

    EngineConfig cfg;
    cfg.total_epochs = 12;
    cfg.warmup_epochs = 4;
    cfg.population_size = 8;
    cfg.survivors = 4;
    cfg.warmup_pool = 16;
    cfg.objectives = {ObjectiveName::Accuracy, ObjectiveName::Potential};

    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Dataset data = make_dataset(spec, seed);
        MlpSupernet net(space, &data, seed, AdamConfig{}, 16);
        cfg.seed = seed;
        Engine engine(cfg, &domain, &net);
        const SearchResult result = engine.run_search();
        REQUIRE(!result.pareto_front.empty());
        const Candidate& best = result.pareto_front.front();
        const double shared_acc = result.ledger.history(best.id).latest_accuracy();
        const RetrainResult r = retrain(space, best.genome, data, 30, seed);
        if (r.test_accuracy >= shared_acc) ++wins;
    }
    CHECK(wins >= 7);
}
