#include "monas/pareto.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "monas/errors.hpp"

namespace monas {

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (!a.same_shape(b)) throw ShapeMismatch("objective vectors differ in names or directions");
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const bool maximize = a.directions[i] == Direction::Maximize;
        const double x = a.values[i];
        const double y = b.values[i];
        const bool worse = maximize ? x < y : x > y;
        if (worse) return false;
        const bool better = maximize ? x > y : x < y;
        if (better) strictly_better = true;
    }
    return strictly_better;
}

Fronts non_dominated_sort(std::vector<Candidate>& pop) {
    const int n = static_cast<int>(pop.size());
    std::vector<int> dominated_count(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> dominated_by(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = pop[static_cast<std::size_t>(i)].objectives;
            const auto& b = pop[static_cast<std::size_t>(j)].objectives;
            if (dominates(a, b)) {
                dominated_by[static_cast<std::size_t>(i)].push_back(j);
                ++dominated_count[static_cast<std::size_t>(j)];
            } else if (dominates(b, a)) {
                dominated_by[static_cast<std::size_t>(j)].push_back(i);
                ++dominated_count[static_cast<std::size_t>(i)];
            }
        }
    }

    Fronts fronts;
    std::vector<int> current;
    for (int i = 0; i < n; ++i) {
        if (dominated_count[static_cast<std::size_t>(i)] == 0) current.push_back(i);
    }
    int rank = 0;
    while (!current.empty()) {
        std::vector<int> next;
        for (const int i : current) {
            pop[static_cast<std::size_t>(i)].front_rank = rank;
            for (const int j : dominated_by[static_cast<std::size_t>(i)]) {
                if (--dominated_count[static_cast<std::size_t>(j)] == 0) next.push_back(j);
            }
        }
        // Peeling visits indices in front order, not population order.
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
        ++rank;
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<Candidate>& front) {
    const int n = static_cast<int>(front.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return dist;
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }

    const std::size_t dims = front.front().objectives.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    for (std::size_t m = 0; m < dims; ++m) {
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return front[static_cast<std::size_t>(a)].objectives.values[m] <
                   front[static_cast<std::size_t>(b)].objectives.values[m];
        });
        const double lo = front[static_cast<std::size_t>(order.front())].objectives.values[m];
        const double hi = front[static_cast<std::size_t>(order.back())].objectives.values[m];
        dist[static_cast<std::size_t>(order.front())] = inf;
        dist[static_cast<std::size_t>(order.back())] = inf;
        const double range = hi - lo;
        if (range <= 0.0) continue;
        for (int i = 1; i + 1 < n; ++i) {
            const double gap = front[static_cast<std::size_t>(order[static_cast<std::size_t>(i + 1)])].objectives.values[m] -
                               front[static_cast<std::size_t>(order[static_cast<std::size_t>(i - 1)])].objectives.values[m];
            dist[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] += gap / range;
        }
    }
    return dist;
}

std::vector<Candidate> select(const std::vector<Candidate>& pop, int k) {
    if (k < 1 || k > static_cast<int>(pop.size())) {
        throw BadK("k=" + std::to_string(k) + " out of range for population of " +
                   std::to_string(pop.size()));
    }

    // Collapse duplicate genomes to their first occurrence; the extras only
    // come back, in input order, if the unique candidates cannot fill k.
    std::vector<Candidate> unique;
    std::vector<Candidate> duplicates;
    std::unordered_set<GenomeId> seen;
    for (const Candidate& c : pop) {
        if (seen.insert(c.id).second) {
            unique.push_back(c);
        } else {
            duplicates.push_back(c);
        }
    }

    Fronts fronts = non_dominated_sort(unique);
    std::vector<Candidate> survivors;
    survivors.reserve(static_cast<std::size_t>(k));
    for (const auto& front_idx : fronts) {
        const int remaining = k - static_cast<int>(survivors.size());
        if (remaining <= 0) break;
        if (static_cast<int>(front_idx.size()) <= remaining) {
            for (const int i : front_idx) survivors.push_back(unique[static_cast<std::size_t>(i)]);
            continue;
        }
        // Partial front: rank by crowding, ties by ascending id.
        std::vector<Candidate> front;
        front.reserve(front_idx.size());
        for (const int i : front_idx) front.push_back(unique[static_cast<std::size_t>(i)]);
        const std::vector<double> dist = crowding_distance(front);
        for (std::size_t i = 0; i < front.size(); ++i) front[i].crowding = dist[i];
        std::stable_sort(front.begin(), front.end(), [](const Candidate& a, const Candidate& b) {
            if (*a.crowding != *b.crowding) return *a.crowding > *b.crowding;
            return a.id < b.id;
        });
        front.resize(static_cast<std::size_t>(remaining));
        for (auto& c : front) survivors.push_back(std::move(c));
    }

    for (std::size_t i = 0; static_cast<int>(survivors.size()) < k; ++i) {
        survivors.push_back(duplicates[i]);
    }
    return survivors;
}

}  // namespace monas
