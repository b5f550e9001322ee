#pragma once

#include <map>
#include <string>
#include <vector>

#include "monas/genome.hpp"

namespace monas {

enum class Direction { Maximize, Minimize };

enum class ObjectiveName { Accuracy, Potential, SizeMb };

std::string objective_name_str(ObjectiveName n);
ObjectiveName objective_name_from_str(const std::string& s);  // throws ConfigError

// Ordered, non-empty list of objectives a run selects under.
using ObjectiveSet = std::vector<ObjectiveName>;

enum class PotentialVariant { Eq3, Intercept };

// Direction-annotated objective values; accuracy and potential are
// maximized, size is minimized.
struct ObjectiveVector {
    std::vector<double> values;
    std::vector<Direction> directions;
    std::vector<ObjectiveName> names;

    std::size_t size() const { return values.size(); }
    bool same_shape(const ObjectiveVector& other) const {
        return directions == other.directions && names == other.names;
    }
};

// Per-genome sampling record: the epochs at which the model was evaluated
// (1-based, strictly increasing) and the matching validation accuracies.
struct History {
    std::vector<int> epochs;
    std::vector<double> accuracies;

    int samples() const { return static_cast<int>(epochs.size()); }
    double latest_accuracy() const;  // throws EmptyHistory
};

// Append-only map from genome id to its history. An absent id has an empty
// history. Mutations must be applied in canonical order (ascending epoch,
// then ascending id); reads are safe between mutations.
class Ledger {
public:
    // Appends (epoch, acc) to id's history. Throws NonMonotoneEpoch when the
    // epoch does not exceed the last recorded one for this id.
    void record_sample(GenomeId id, int epoch, double acc);

    const History& history(GenomeId id) const;  // empty history if unseen
    bool contains(GenomeId id) const { return histories_.count(id) != 0; }
    std::size_t distinct_genomes() const { return histories_.size(); }
    const std::map<GenomeId, History>& all() const { return histories_; }

private:
    std::map<GenomeId, History> histories_;
    static const History kEmpty;
};

// The trend objective: regression of accuracy on epoch through the origin,
// sum(e_i * f_i) / sum(e_i^2). Defined for a single sample since epochs are
// 1-based. Throws EmptyHistory when the history has no samples.
double potential(const History& h);

// Slope of least squares with design matrix [1, E]; opt-in alternative.
// Throws InsufficientHistory when fewer than two samples exist (or all
// epochs coincide, which the strictly-increasing invariant rules out).
double potential_with_intercept(const History& h);

// Potential under the configured variant. The intercept variant needs two
// samples; with a single sample it falls back to the through-origin value so
// freshly sampled genomes still get a defined objective.
double potential_value(const History& h, PotentialVariant variant);

// Assembles the objective vector for one candidate: accuracy = most recent
// sample, potential per variant, size as given, ordered per `objectives`.
ObjectiveVector objective_vector(GenomeId id, const Ledger& ledger, double size_mb,
                                 const ObjectiveSet& objectives,
                                 PotentialVariant variant = PotentialVariant::Eq3);

}  // namespace monas
