#include "monas/genome.hpp"

#include <cstddef>

#include "monas/errors.hpp"

namespace monas {

GenomeId genome_id(const Genome& g) {
    std::uint64_t h = 14695981039346656037ull;
    for (const std::int16_t c : g.choices) {
        const auto u = static_cast<std::uint16_t>(c);
        h = (h ^ (u & 0xffu)) * 1099511628211ull;
        h = (h ^ ((u >> 8) & 0xffu)) * 1099511628211ull;
    }
    return h;
}

bool valid_genome(const Genome& g, const GenomeShape& shape) {
    if (g.size() != shape.total_blocks) return false;
    for (const std::int16_t c : g.choices) {
        if (c < 0 || c >= shape.ops_count) return false;
    }
    return true;
}

Genome random_genome(const GenomeShape& shape, Rng& rng) {
    Genome g;
    g.choices.resize(static_cast<std::size_t>(shape.total_blocks));
    for (auto& c : g.choices) {
        c = static_cast<std::int16_t>(rng.uniform_int(shape.ops_count));
    }
    return g;
}

std::vector<std::uint8_t> encode_onehot(const Genome& g, const GenomeShape& shape) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(shape.total_blocks) * shape.ops_count, 0);
    for (int b = 0; b < shape.total_blocks; ++b) {
        bits[static_cast<std::size_t>(b) * shape.ops_count + g.choices[static_cast<std::size_t>(b)]] = 1;
    }
    return bits;
}

Genome decode_onehot(const std::vector<std::uint8_t>& bits, const GenomeShape& shape) {
    const std::size_t expected = static_cast<std::size_t>(shape.total_blocks) * shape.ops_count;
    if (bits.size() != expected) {
        throw MalformedEncoding("one-hot length " + std::to_string(bits.size()) + ", expected " +
                                std::to_string(expected));
    }
    Genome g;
    g.choices.resize(static_cast<std::size_t>(shape.total_blocks));
    for (int b = 0; b < shape.total_blocks; ++b) {
        int hot = -1;
        for (int o = 0; o < shape.ops_count; ++o) {
            if (bits[static_cast<std::size_t>(b) * shape.ops_count + o] == 0) continue;
            if (hot >= 0) throw MalformedEncoding("block " + std::to_string(b) + " has multiple set bits");
            hot = o;
        }
        if (hot < 0) throw MalformedEncoding("block " + std::to_string(b) + " has no set bit");
        g.choices[static_cast<std::size_t>(b)] = static_cast<std::int16_t>(hot);
    }
    return g;
}

Genome crossover(const Genome& a, const Genome& b, Rng& rng) {
    if (a.size() != b.size()) {
        throw SpaceMismatch("crossover parents of length " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
    }
    Genome child;
    child.choices.resize(a.choices.size());
    for (std::size_t i = 0; i < a.choices.size(); ++i) {
        child.choices[i] = (rng.next_u64() & 1u) ? a.choices[i] : b.choices[i];
    }
    return child;
}

Genome mutate(const Genome& g, double per_block_rate, const GenomeShape& shape, Rng& rng) {
    Genome out = g;
    for (auto& c : out.choices) {
        if (rng.uniform01() < per_block_rate) {
            c = static_cast<std::int16_t>(rng.uniform_int(shape.ops_count));
        }
    }
    return out;
}

std::string genome_to_string(const Genome& g) {
    std::string s = "[";
    for (std::size_t i = 0; i < g.choices.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(g.choices[i]);
    }
    s += "]";
    return s;
}

}  // namespace monas
