#include "monas/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace monas {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Simulator::Simulator(GenomeShape shape, SimulatorConfig config, std::uint64_t seed)
    : shape_(shape), config_(config) {
    reset(seed);
}

void Simulator::reset(std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x51u));
    epoch_ = 0;

    main_effect_.assign(static_cast<std::size_t>(shape_.total_blocks),
                        std::vector<double>(static_cast<std::size_t>(shape_.ops_count), 0.0));
    for (auto& slot : main_effect_) {
        for (int o = 0; o < shape_.ops_count; ++o) {
            // Optional tilt: later ops in the set stand in for higher-capacity
            // choices, tying latent quality to model size the way capacity
            // ties accuracy to size in practice.
            const double tilt = shape_.ops_count > 1
                                    ? config_.capacity_tilt *
                                          (static_cast<double>(o) / (shape_.ops_count - 1) - 0.5)
                                    : 0.0;
            slot[static_cast<std::size_t>(o)] = rng.normal(config_.main_effect_sigma) + tilt;
        }
    }

    pair_effect_.clear();
    const double pair_span = config_.interaction_scale * config_.main_effect_sigma;
    for (int a = 0; a < shape_.total_blocks; ++a) {
        for (int b = a + 1; b < shape_.total_blocks; ++b) {
            if (rng.uniform01() >= config_.interaction_fraction) continue;
            std::vector<double> table(static_cast<std::size_t>(shape_.ops_count) * shape_.ops_count);
            for (auto& v : table) v = (2.0 * rng.uniform01() - 1.0) * pair_span;
            pair_effect_.emplace(std::make_pair(a, b), std::move(table));
        }
    }

    maturity_.assign(static_cast<std::size_t>(shape_.total_blocks),
                     std::vector<double>(static_cast<std::size_t>(shape_.ops_count), 0.0));
}

double Simulator::latent_score(const Genome& g) const {
    double score = config_.base_offset;
    for (int s = 0; s < shape_.total_blocks; ++s) {
        score += main_effect_[static_cast<std::size_t>(s)][static_cast<std::size_t>(g.choices[static_cast<std::size_t>(s)])];
    }
    for (const auto& [slots, table] : pair_effect_) {
        const int op_a = g.choices[static_cast<std::size_t>(slots.first)];
        const int op_b = g.choices[static_cast<std::size_t>(slots.second)];
        score += table[static_cast<std::size_t>(op_a) * shape_.ops_count + op_b];
    }
    return score;
}

double Simulator::mean_maturity(const Genome& g) const {
    double sum = 0.0;
    for (int s = 0; s < shape_.total_blocks; ++s) {
        sum += maturity_[static_cast<std::size_t>(s)][static_cast<std::size_t>(g.choices[static_cast<std::size_t>(s)])];
    }
    return sum / shape_.total_blocks;
}

double Simulator::maturity(int slot, int op) const {
    return maturity_[static_cast<std::size_t>(slot)][static_cast<std::size_t>(op)];
}

void Simulator::set_all_maturity(double value) {
    for (auto& slot : maturity_) {
        for (auto& v : slot) v = value;
    }
}

double Simulator::noise(const Genome& g) const {
    if (config_.noise_sigma <= 0.0) return 0.0;
    return config_.noise_sigma * hash_normal(static_cast<std::uint64_t>(epoch_), genome_id(g));
}

double Simulator::evaluate(const Genome& g) {
    const double acc = sigmoid(latent_score(g)) * mean_maturity(g) + noise(g);
    return std::clamp(acc, 0.0, 1.0);
}

double Simulator::train_subnet(const Genome& g, int /*batch_index*/) {
    for (int s = 0; s < shape_.total_blocks; ++s) {
        const int chosen = g.choices[static_cast<std::size_t>(s)];
        auto& slot = maturity_[static_cast<std::size_t>(s)];
        slot[static_cast<std::size_t>(chosen)] += config_.learn_rate * (1.0 - slot[static_cast<std::size_t>(chosen)]);
        for (int o = 0; o < shape_.ops_count; ++o) {
            if (o != chosen) slot[static_cast<std::size_t>(o)] *= 1.0 - config_.interference_rate;
        }
    }
    return 1.0 - evaluate(g);
}

}  // namespace monas
