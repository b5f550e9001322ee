#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monas/rng.hpp"

namespace monas {

// One architecture: per searchable block, the index of the chosen candidate
// op. Stored as 16-bit values; GenomeId hashes their little-endian bytes.
struct Genome {
    std::vector<std::int16_t> choices;

    bool operator==(const Genome& other) const { return choices == other.choices; }
    int size() const { return static_cast<int>(choices.size()); }
};

using GenomeId = std::uint64_t;

// The minimal structural facts the genome algebra needs: how many searchable
// blocks there are and how many candidate ops each block chooses from.
struct GenomeShape {
    int total_blocks = 0;
    int ops_count = 0;
};

// Content hash over the little-endian 16-bit encoding of the choice vector
// (FNV-1a 64). Equal choice vectors map to equal ids on every platform.
GenomeId genome_id(const Genome& g);

bool valid_genome(const Genome& g, const GenomeShape& shape);

Genome random_genome(const GenomeShape& shape, Rng& rng);

// Concatenated one-hot segments, one segment of length ops_count per block.
std::vector<std::uint8_t> encode_onehot(const Genome& g, const GenomeShape& shape);

// Throws MalformedEncoding when the length mismatches or any segment does
// not contain exactly one 1.
Genome decode_onehot(const std::vector<std::uint8_t>& bits, const GenomeShape& shape);

// Uniform crossover at block granularity: each child position comes from
// either parent with probability 1/2. Throws SpaceMismatch on length
// disagreement.
Genome crossover(const Genome& a, const Genome& b, Rng& rng);

// Each block independently re-sampled uniformly over the op set with
// probability per_block_rate. Re-drawing the current op is allowed.
Genome mutate(const Genome& g, double per_block_rate, const GenomeShape& shape, Rng& rng);

std::string genome_to_string(const Genome& g);

}  // namespace monas
