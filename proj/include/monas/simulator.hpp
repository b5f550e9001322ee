#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "monas/evaluator.hpp"
#include "monas/genome.hpp"
#include "monas/rng.hpp"

namespace monas {

// Knobs of the weight-sharing instability simulator. Defaults give chance-ish
// accuracy after warm-up, converged accuracies spread over roughly [0.4, 0.9]
// and visible but not dominant cross-subnet interference.
struct SimulatorConfig {
    int steps_per_epoch = 20;
    double learn_rate = 0.15;           // maturity gain per training step
    double interference_rate = 0.03;    // sibling-op maturity decay per step
    double noise_sigma = 0.035;         // evaluation noise
    double interaction_fraction = 0.05; // fraction of slot pairs with coupling terms
    double interaction_scale = 0.1;     // coupling magnitude relative to main effects
    double main_effect_sigma = 0.05;    // per-(slot, op) latent score sd
    double base_offset = 2.2;           // latent score shift before the sigmoid
    double capacity_tilt = 0.0;         // latent bonus from op index (capacity proxy)
};

// Seeded stand-in for a weight-shared supernet. Each (slot, op) pair carries
// a fixed latent quality score and a mutable training maturity in [0, 1];
// training a subnet raises the maturity of its ops and erodes sibling ops in
// the same slots, so one subnet's training perturbs every other subnet's
// measured accuracy.
class Simulator final : public Evaluator {
public:
    Simulator(GenomeShape shape, SimulatorConfig config, std::uint64_t seed);

    void reset(std::uint64_t seed) override;
    void begin_epoch(int epoch) override { epoch_ = epoch; }
    int batches_per_epoch() const override { return config_.steps_per_epoch; }
    double train_subnet(const Genome& g, int batch_index) override;
    double evaluate(const Genome& g) override;
    bool read_only_eval() const override { return true; }

    // Fixed per-genome quality: base + main effects + sparse pairwise terms.
    double latent_score(const Genome& g) const;
    double mean_maturity(const Genome& g) const;
    double maturity(int slot, int op) const;
    void set_all_maturity(double value);

    const SimulatorConfig& config() const { return config_; }

private:
    double noise(const Genome& g) const;

    GenomeShape shape_;
    SimulatorConfig config_;
    int epoch_ = 0;
    std::vector<std::vector<double>> main_effect_;              // slot x op
    std::map<std::pair<int, int>, std::vector<double>> pair_effect_;  // (slot_a, slot_b) -> op_a x op_b
    std::vector<std::vector<double>> maturity_;                 // slot x op, in [0, 1]
};

}  // namespace monas
