#pragma once

#include <cstdint>

#include "monas/genome.hpp"

namespace monas {

// What the engine needs from a training backend: single-subnet gradient
// steps (one sampled subnet per training batch) and validation accuracy.
class Evaluator {
public:
    virtual ~Evaluator() = default;

    // Re-initializes all shared state from the seed.
    virtual void reset(std::uint64_t seed) = 0;

    // The engine announces the current 1-based search epoch before issuing
    // train/evaluate calls for it.
    virtual void begin_epoch(int epoch) = 0;

    // Length of one epoch's training-batch schedule.
    virtual int batches_per_epoch() const = 0;

    // Trains the shared state on one batch using only the subnet selected by
    // g; returns the (pre-update) loss.
    virtual double train_subnet(const Genome& g, int batch_index) = 0;

    // Validation accuracy of g under the current shared state.
    virtual double evaluate(const Genome& g) = 0;

    // True when evaluate never mutates state (both backends here).
    virtual bool read_only_eval() const = 0;
};

}  // namespace monas
