// Acceptance suite: runs every gate at its stated tolerance and prints one
// pass/fail line per criterion. Exits nonzero if any gate fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <unistd.h>
#include <vector>

#include "monas/engine.hpp"
#include "monas/errors.hpp"
#include "monas/harness.hpp"
#include "monas/mlp.hpp"
#include "monas/runlog.hpp"
#include "monas/simulator.hpp"

using namespace monas;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    std::string name;
    double time_limit_s;
    std::function<bool(std::string&)> run;
};

bool close_rel(double got, double expected, double tol) {
    return std::fabs(got - expected) <= tol * std::max(1.0, std::fabs(expected));
}

// ---------------------------------------------------------------- 1
bool potential_exactness(std::string& detail) {
    Rng rng(0xac01);
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        History h;
        const int m = 1 + static_cast<int>(rng.uniform_u64(50));
        std::set<int> epochs;
        while (static_cast<int>(epochs.size()) < m) {
            epochs.insert(1 + static_cast<int>(rng.uniform_u64(500)));
        }
        for (const int e : epochs) {
            h.epochs.push_back(e);
            h.accuracies.push_back(rng.uniform01());
        }
        long double num = 0.0L, den = 0.0L;
        for (int i = 0; i < m; ++i) {
            num += static_cast<long double>(h.epochs[i]) * static_cast<long double>(h.accuracies[i]);
            den += static_cast<long double>(h.epochs[i]) * static_cast<long double>(h.epochs[i]);
        }
        const double expected = static_cast<double>(num / den);
        if (!close_rel(potential(h), expected, 1e-12)) ++failures;
    }

    const History a{{1, 2, 3}, {0.1, 0.2, 0.3}};
    const History b{{1}, {0.5}};
    const History c{{10, 20, 30, 40}, {0.5, 0.6, 0.55, 0.7}};
    if (!close_rel(potential(a), 0.1, 1e-12)) ++failures;
    if (potential(b) != 0.5) ++failures;
    if (!close_rel(potential(c), 0.0205, 1e-12)) ++failures;

    detail = failures ? std::to_string(failures) + " mismatches" : "1000 histories + 3 worked examples";
    return failures == 0;
}

// ---------------------------------------------------------------- 2
std::vector<int> oracle_front_ranks(const std::vector<Candidate>& pop) {
    const int n = static_cast<int>(pop.size());
    std::vector<std::vector<int>> dominators(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && dominates(pop[static_cast<std::size_t>(j)].objectives,
                                    pop[static_cast<std::size_t>(i)].objectives)) {
                dominators[static_cast<std::size_t>(i)].push_back(j);
            }
        }
    }
    std::vector<int> rank(static_cast<std::size_t>(n), -1);
    for (bool progress = true; progress;) {
        progress = false;
        for (int i = 0; i < n; ++i) {
            if (rank[static_cast<std::size_t>(i)] >= 0) continue;
            int r = 0;
            bool ready = true;
            for (const int j : dominators[static_cast<std::size_t>(i)]) {
                if (rank[static_cast<std::size_t>(j)] < 0) {
                    ready = false;
                    break;
                }
                r = std::max(r, rank[static_cast<std::size_t>(j)] + 1);
            }
            if (ready) {
                rank[static_cast<std::size_t>(i)] = r;
                progress = true;
            }
        }
    }
    return rank;
}

bool nsga2_oracle_equivalence(std::string& detail) {
    Rng rng(0xac02);
    long disagreements = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_u64(200));
        const int dims = 1 + static_cast<int>(rng.uniform_u64(4));
        std::vector<Direction> dirs;
        for (int d = 0; d < dims; ++d) {
            dirs.push_back(rng.next_u64() & 1 ? Direction::Maximize : Direction::Minimize);
        }
        std::vector<Candidate> pop(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            Candidate& c = pop[static_cast<std::size_t>(i)];
            c.id = static_cast<GenomeId>(i + 1);
            c.objectives.directions = dirs;
            c.objectives.names.assign(static_cast<std::size_t>(dims), ObjectiveName::Accuracy);
            for (int d = 0; d < dims; ++d) {
                c.objectives.values.push_back(static_cast<double>(rng.uniform_u64(10)));
            }
        }
        const std::vector<int> expected = oracle_front_ranks(pop);
        non_dominated_sort(pop);
        for (int i = 0; i < n; ++i) {
            if (pop[static_cast<std::size_t>(i)].front_rank != expected[static_cast<std::size_t>(i)]) {
                ++disagreements;
            }
        }
    }
    detail = disagreements ? std::to_string(disagreements) + " rank disagreements"
                           : "1000 random populations, 100% front agreement";
    return disagreements == 0;
}

// ---------------------------------------------------------------- 3
std::int64_t oracle_params(const Genome& g, const SearchSpace& s) {
    std::int64_t total = 0;
    total += 27LL * s.input_channels * s.stem_channels;  // stem conv
    total += s.stem_channels;                            // bn gamma
    total += s.stem_channels;                            // bn beta
    int block = 0;
    int prev = s.stem_channels;
    for (int layer = 0; layer < s.num_layers; ++layer) {
        const int c = s.layer_channels[static_cast<std::size_t>(layer)];
        total += static_cast<std::int64_t>(prev) * c + c + c;
        for (int b = 0; b < s.blocks_per_layer[static_cast<std::size_t>(layer)]; ++b, ++block) {
            const CandidateOp op = s.ops[static_cast<std::size_t>(g.choices[static_cast<std::size_t>(block)])];
            if (op.is_skip()) continue;
            const std::int64_t inner = static_cast<std::int64_t>(c) * op.expansion;
            total += c * inner + inner + inner;                                       // expand + bn
            total += static_cast<std::int64_t>(op.kernel) * op.kernel * op.kernel * inner + inner + inner;
            total += inner * c + c + c;                                               // project + bn
        }
        prev = c;
    }
    total += static_cast<std::int64_t>(prev) * s.num_classes + s.num_classes;
    return total;
}

bool param_count_oracle(std::string& detail) {
    const SearchSpace space = default_search_space();
    Rng rng(0xac03);
    int failures = 0;
    for (int i = 0; i < 50; ++i) {
        const Genome g = random_genome(space.shape(), rng);
        if (param_count(g, space) != oracle_params(g, space)) ++failures;
    }
    if (mbconv_params(24, 3, 3) != 5736) ++failures;
    detail = failures ? std::to_string(failures) + " mismatches"
                      : "50 genomes exact, mbconv3_3@24 = 5736";
    return failures == 0;
}

// ---------------------------------------------------------------- 4
bool eq2_support(std::string& detail) {
    MlpSpace space;
    space.slots = 4;
    space.base_width = 16;
    space.expansions = {1, 2, 4};
    space.input_dims = 8;
    space.num_classes = 3;

    Rng rng(0xac04);
    MlpWeights w = init_mlp_weights(space, 4242);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Genome g = random_genome(space.shape(), rng);
        Mat x(8, space.input_dims);
        for (auto& v : x.a) v = rng.normal();
        std::vector<int> y(8);
        for (auto& v : y) v = rng.uniform_int(space.num_classes);

        const MlpWeights before = w;
        mlp_train_step(w, g, x, y);
        const auto bit_identical = [](const Tensor& a, const Tensor& b) {
            return a.step == b.step &&
                   std::memcmp(a.w.data(), b.w.data(), a.w.size() * sizeof(double)) == 0 &&
                   std::memcmp(a.m.data(), b.m.data(), a.m.size() * sizeof(double)) == 0 &&
                   std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0;
        };
        for (int s = 0; s < space.slots; ++s) {
            for (std::size_t o = 0; o < space.expansions.size(); ++o) {
                if (g.choices[static_cast<std::size_t>(s)] == static_cast<int>(o) + 1) continue;
                const DenseTensors& now = w.dense[static_cast<std::size_t>(s)][o];
                const DenseTensors& was = before.dense[static_cast<std::size_t>(s)][o];
                if (!bit_identical(now.w1, was.w1) || !bit_identical(now.b1, was.b1) ||
                    !bit_identical(now.w2, was.w2) || !bit_identical(now.b2, was.b2)) {
                    ++violations;
                }
            }
        }
    }
    detail = violations ? std::to_string(violations) + " touched tensors"
                        : "100 (genome, batch) pairs, unselected tensors bit-identical";
    return violations == 0;
}

// ---------------------------------------------------------------- 5
bool gradient_check(std::string& detail) {
    MlpSpace space;
    space.slots = 2;
    space.base_width = 4;
    space.expansions = {1, 2};
    space.input_dims = 3;
    space.num_classes = 2;

    Rng rng(0xac05);
    const double h = 1e-3;
    double max_rel = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        MlpWeights w = init_mlp_weights(space, 100 + static_cast<std::uint64_t>(trial));
        Genome g;
        g.choices = {static_cast<std::int16_t>(trial % 3), static_cast<std::int16_t>((trial / 3) % 3)};
        Mat x(5, space.input_dims);
        for (auto& v : x.a) v = rng.normal();
        std::vector<int> y(5);
        for (auto& v : y) v = rng.uniform_int(space.num_classes);

        std::vector<TensorGrad> grads;
        mlp_loss_and_grads(w, g, x, y, grads);
        for (TensorGrad& tg : grads) {
            Tensor& t = *tg.tensor;
            for (std::size_t i = 0; i < t.w.size(); ++i) {
                const double keep = t.w[i];
                t.w[i] = keep + h;
                const double up = mlp_loss(w, g, x, y);
                t.w[i] = keep - h;
                const double down = mlp_loss(w, g, x, y);
                t.w[i] = keep;
                const double numeric = (up - down) / (2 * h);
                // Denominator floored at h: components below the step size
                // are beyond what central differences can resolve.
                const double rel = std::fabs(tg.g[i] - numeric) /
                                   std::max({std::fabs(tg.g[i]), std::fabs(numeric), h});
                max_rel = std::max(max_rel, rel);
            }
        }
    }
    std::ostringstream ss;
    ss << "max relative error " << max_rel;
    detail = ss.str();
    return max_rel <= 1e-4;
}

// ---------------------------------------------------------------- 6
bool end_to_end_determinism(std::string& detail) {
    const MbconvDomain domain(default_search_space());
    const EngineConfig config;  // paper defaults: 100 epochs, 10 warm-up, P 20, K 10
    auto one = [&] {
        Simulator sim(domain.shape(), SimulatorConfig{}, 0);
        Engine engine(config, &domain, &sim);
        return run_log_to_string(engine.run_search().events);
    };
    const std::string first = one();
    const std::string second = one();
    detail = "two 100-epoch simulator runs, " + std::to_string(first.size()) + " log bytes";
    return !first.empty() && first == second;
}

// ---------------------------------------------------------------- 7
bool exploitation_directional(std::string& detail) {
    const MbconvDomain domain(default_search_space());
    const int n_seeds = 10;

    auto run_set = [&](const ObjectiveSet& objectives, std::uint64_t seed, double& last_quarter,
                       double& best_acc) {
        EngineConfig config;
        config.objectives = objectives;
        config.seed = seed;
        Simulator sim(domain.shape(), SimulatorConfig{}, 0);
        Engine engine(config, &domain, &sim);
        const SearchResult result = engine.run_search();
        const std::vector<long> quarters = distinct_trained_per_quarter(result.events, config);
        last_quarter = static_cast<double>(quarters.back());
        best_acc = 0.0;
        for (const RunEvent& e : result.events) {
            if (e.kind == EventKind::Eval && e.epoch == config.total_epochs) {
                best_acc = std::max(best_acc, *e.accuracy);
            }
        }
    };

    double a_q4 = 0.0, ap_q4 = 0.0, a_best = 0.0, aps_best = 0.0;
    for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
        double q4 = 0.0, best = 0.0;
        run_set({ObjectiveName::Accuracy}, seed, q4, best);
        a_q4 += q4;
        a_best += best;
        run_set({ObjectiveName::Accuracy, ObjectiveName::Potential}, seed, q4, best);
        ap_q4 += q4;
        run_set({ObjectiveName::Accuracy, ObjectiveName::Potential, ObjectiveName::SizeMb}, seed,
                q4, best);
        aps_best += best;
    }
    a_q4 /= n_seeds;
    ap_q4 /= n_seeds;
    a_best /= n_seeds;
    aps_best /= n_seeds;

    std::ostringstream ss;
    ss << "mean last-quarter distinct: A=" << a_q4 << " AP=" << ap_q4
       << "; mean best final acc: A=" << a_best << " APS=" << aps_best;
    detail = ss.str();
    return ap_q4 < a_q4 && aps_best >= a_best - 0.02;
}

// ---------------------------------------------------------------- 8
bool toy_search_quality(std::string& detail) {
    DatasetSpec spec;
    spec.classes = 3;
    spec.dims = 8;
    spec.per_class = 150;
    spec.warp_strength = 1.5;
    spec.class_separation = 2.5;

    MlpSpace space;
    space.slots = 4;
    space.base_width = 16;
    space.expansions = {1, 2, 4};
    space.input_dims = spec.dims;
    space.num_classes = spec.classes;
    const MlpDomain domain(space);

    const int retrain_epochs = 40;
    int wins = 0;
    std::ostringstream ss;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Dataset data = make_dataset(spec, seed);

        EngineConfig config;
        config.total_epochs = 30;
        config.warmup_epochs = 6;
        config.warmup_pool = 64;
        config.objectives = {ObjectiveName::Accuracy, ObjectiveName::Potential};
        config.seed = seed;
        MlpSupernet net(space, &data, seed, AdamConfig{}, 32);
        Engine engine(config, &domain, &net);
        const SearchResult result = engine.run_search();

        // Best front member by shared-weights accuracy.
        const Candidate* best = nullptr;
        for (const Candidate& c : result.pareto_front) {
            const double acc = result.ledger.history(c.id).latest_accuracy();
            if (!best || acc > result.ledger.history(best->id).latest_accuracy()) best = &c;
        }
        const double searched =
            retrain(space, best->genome, data, retrain_epochs, seed).test_accuracy;

        Rng rng(derive_seed(seed, 0xba5eu));
        double random_sum = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Genome g = random_genome(space.shape(), rng);
            random_sum += retrain(space, g, data, retrain_epochs, seed).test_accuracy;
        }
        const double random_mean = random_sum / 20.0;
        if (searched > random_mean) ++wins;
        ss << (seed > 1 ? " " : "") << searched << ">" << random_mean << "?";
    }
    detail = "wins " + std::to_string(wins) + "/10 (" + ss.str() + ")";
    return wins >= 8;
}

// ---------------------------------------------------------------- 9
bool log_replay(std::string& detail) {
    const fs::path root =
        fs::temp_directory_path() / ("monas_acceptance_replay_" + std::to_string(::getpid()));
    fs::remove_all(root);

    nlohmann::json j{
        {"engine",
         {{"total_epochs", 20}, {"warmup_epochs", 5}, {"population_size", 10}, {"survivors", 5},
          {"warmup_pool", 20}}},
        {"evaluator", "simulator"},
        {"simulator", {{"steps_per_epoch", 10}}},
        {"seeds", {1}},
    };
    int verified = 0;
    try {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const RunConfig config = RunConfig::from_json(j);
            const std::string dir = (root / ("run_" + std::to_string(seed))).string();
            run_one_seed(config, seed, dir);
            verify_run_dir(dir);
            ++verified;
        }
    } catch (const std::exception& e) {
        fs::remove_all(root);
        detail = std::string("replay failed after ") + std::to_string(verified) + " runs: " + e.what();
        return false;
    }
    fs::remove_all(root);
    detail = "5 runs replayed byte-for-byte (ledger, selections, counters)";
    return true;
}

// ---------------------------------------------------------------- 10
bool genome_algebra(std::string& detail) {
    const GenomeShape shape = default_search_space().shape();
    Rng rng(0xac10);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const Genome g = random_genome(shape, rng);
        if (!(decode_onehot(encode_onehot(g, shape), shape) == g)) ++failures;
    }
    for (int i = 0; i < 1000; ++i) {
        const Genome a = random_genome(shape, rng);
        const Genome b = random_genome(shape, rng);
        if (!valid_genome(crossover(a, b, rng), shape)) ++failures;
        if (!valid_genome(mutate(a, 0.25, shape, rng), shape)) ++failures;
    }
    try {
        decode_onehot(std::vector<std::uint8_t>(168, 0), shape);
        ++failures;
    } catch (const MalformedEncoding&) {
    }
    try {
        std::vector<std::uint8_t> two_hot(168, 0);
        two_hot[0] = two_hot[1] = 1;
        for (int b = 1; b < 21; ++b) two_hot[static_cast<std::size_t>(b) * 8] = 1;
        decode_onehot(two_hot, shape);
        ++failures;
    } catch (const MalformedEncoding&) {
    }
    try {
        crossover(Genome{{0, 1}}, Genome{{0}}, rng);
        ++failures;
    } catch (const SpaceMismatch&) {
    }
    detail = failures ? std::to_string(failures) + " failures"
                      : "10^4 round-trips, closure, malformed encodings rejected";
    return failures == 0;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "potential exactness vs high-precision oracle", 1.0, potential_exactness},
        {2, "NSGA-II front partitions vs dominance oracle", 30.0, nsga2_oracle_equivalence},
        {3, "parameter-count oracle", 1.0, param_count_oracle},
        {4, "single-subnet gradient support", 60.0, eq2_support},
        {5, "analytic vs finite-difference gradients", 10.0, gradient_check},
        {6, "end-to-end run-log determinism", 120.0, end_to_end_determinism},
        {7, "potential narrows late-stage training", 1800.0, exploitation_directional},
        {8, "searched beats mean random after retraining", 1800.0, toy_search_quality},
        {9, "run-log replay", 300.0, log_replay},
        {10, "genome one-hot algebra and variation closure", 5.0, genome_algebra},
    };

    int failed = 0;
    for (Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > c.time_limit_s) {
            ok = false;
            detail += " [over time limit]";
        }
        std::ostringstream line;
        line << (ok ? "PASS" : "FAIL") << "  criterion " << c.number << ": " << c.name << " ("
             << elapsed << "s) - " << detail;
        std::cout << line.str() << "\n";
        if (!ok) ++failed;
    }
    if (failed) {
        std::cout << failed << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
