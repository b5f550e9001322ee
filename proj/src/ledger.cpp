#include "monas/ledger.hpp"

#include "monas/errors.hpp"

namespace monas {

std::string objective_name_str(ObjectiveName n) {
    switch (n) {
        case ObjectiveName::Accuracy: return "accuracy";
        case ObjectiveName::Potential: return "potential";
        case ObjectiveName::SizeMb: return "size_mb";
    }
    return "?";
}

ObjectiveName objective_name_from_str(const std::string& s) {
    if (s == "accuracy") return ObjectiveName::Accuracy;
    if (s == "potential") return ObjectiveName::Potential;
    if (s == "size_mb") return ObjectiveName::SizeMb;
    throw ConfigError("unknown objective '" + s + "' (expected accuracy, potential or size_mb)");
}

double History::latest_accuracy() const {
    if (accuracies.empty()) throw EmptyHistory("no samples recorded");
    return accuracies.back();
}

const History Ledger::kEmpty{};

void Ledger::record_sample(GenomeId id, int epoch, double acc) {
    History& h = histories_[id];
    if (!h.epochs.empty() && epoch <= h.epochs.back()) {
        throw NonMonotoneEpoch("epoch " + std::to_string(epoch) + " not after " +
                               std::to_string(h.epochs.back()));
    }
    if (epoch < 1) throw NonMonotoneEpoch("epochs are 1-based, got " + std::to_string(epoch));
    h.epochs.push_back(epoch);
    h.accuracies.push_back(acc);
}

const History& Ledger::history(GenomeId id) const {
    const auto it = histories_.find(id);
    return it == histories_.end() ? kEmpty : it->second;
}

double potential(const History& h) {
    if (h.samples() == 0) throw EmptyHistory("potential needs at least one sample");
    double sum_ef = 0.0;
    double sum_e2 = 0.0;
    for (int i = 0; i < h.samples(); ++i) {
        const double e = h.epochs[static_cast<std::size_t>(i)];
        sum_ef += e * h.accuracies[static_cast<std::size_t>(i)];
        sum_e2 += e * e;
    }
    return sum_ef / sum_e2;
}

double potential_with_intercept(const History& h) {
    const int m = h.samples();
    if (m < 2) throw InsufficientHistory("intercept slope needs at least two samples");
    double sum_e = 0.0, sum_f = 0.0, sum_ef = 0.0, sum_e2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double e = h.epochs[static_cast<std::size_t>(i)];
        const double f = h.accuracies[static_cast<std::size_t>(i)];
        sum_e += e;
        sum_f += f;
        sum_ef += e * f;
        sum_e2 += e * e;
    }
    const double denom = m * sum_e2 - sum_e * sum_e;
    if (denom == 0.0) throw InsufficientHistory("all epochs coincide");
    return (m * sum_ef - sum_e * sum_f) / denom;
}

double potential_value(const History& h, PotentialVariant variant) {
    if (variant == PotentialVariant::Intercept && h.samples() >= 2) {
        return potential_with_intercept(h);
    }
    return potential(h);
}

ObjectiveVector objective_vector(GenomeId id, const Ledger& ledger, double size_mb,
                                 const ObjectiveSet& objectives, PotentialVariant variant) {
    const History& h = ledger.history(id);
    ObjectiveVector v;
    for (const ObjectiveName name : objectives) {
        switch (name) {
            case ObjectiveName::Accuracy:
                v.values.push_back(h.latest_accuracy());
                v.directions.push_back(Direction::Maximize);
                break;
            case ObjectiveName::Potential:
                v.values.push_back(potential_value(h, variant));
                v.directions.push_back(Direction::Maximize);
                break;
            case ObjectiveName::SizeMb:
                v.values.push_back(size_mb);
                v.directions.push_back(Direction::Minimize);
                break;
        }
        v.names.push_back(name);
    }
    return v;
}

}  // namespace monas
