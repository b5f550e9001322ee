#pragma once

#include <optional>
#include <vector>

#include "monas/genome.hpp"
#include "monas/ledger.hpp"

namespace monas {

struct Candidate {
    GenomeId id = 0;
    Genome genome;
    ObjectiveVector objectives;
    std::optional<int> front_rank;
    std::optional<double> crowding;
};

// Front 0 first; lists hold indices into the population that was sorted.
using Fronts = std::vector<std::vector<int>>;

// True iff a is no worse than b in every objective (respecting directions)
// and strictly better in at least one. Throws ShapeMismatch when the
// objective sets differ.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Fast non-dominated sort. Assigns front_rank to each candidate; order
// within a front follows population order, so the result is deterministic
// for a given input order.
Fronts non_dominated_sort(std::vector<Candidate>& pop);

// NSGA-II crowding: +inf at each objective's boundary, otherwise the sum
// over objectives of neighbor gap / objective range; a zero range
// contributes nothing. Fronts of size <= 2 are all infinite.
std::vector<double> crowding_distance(const std::vector<Candidate>& front);

// Keeps k survivors, filling front by front; the last partially taken front
// is ordered by descending crowding distance with ties broken by ascending
// GenomeId. Duplicate genomes collapse to their first occurrence before
// sorting and are re-appended, lowest priority, only if needed to reach k.
// Throws BadK when k is out of [1, |pop|].
std::vector<Candidate> select(const std::vector<Candidate>& pop, int k);

}  // namespace monas
