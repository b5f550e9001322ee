#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monas/genome.hpp"

namespace monas {

// A searchable block is either a skip connection or a mobile inverted
// bottleneck convolution MBConv k_e (depthwise kernel k, expansion ratio e).
struct CandidateOp {
    enum class Kind { Skip, MBConv };

    Kind kind = Kind::Skip;
    int kernel = 0;     // MBConv only, odd, {3,5,7}
    int expansion = 0;  // MBConv only, {3,4,6}

    static CandidateOp skip() { return {}; }
    static CandidateOp mbconv(int kernel, int expansion) {
        return {Kind::MBConv, kernel, expansion};
    }

    bool is_skip() const { return kind == Kind::Skip; }
    std::string name() const;
};

// Structural constants of the 3D MBConv supernet: stem, six layers of
// calibration + searchable blocks, pooled head. Parameter counting assumes
// convs carry no bias (each is followed by BN contributing 2 learnable
// values per channel) and that searchable blocks keep C_in = C_out =
// layer_channels[i], stride 1.
struct SearchSpace {
    int num_layers = 0;
    std::vector<int> blocks_per_layer;
    std::vector<int> calibration_strides;
    int stem_channels = 0;
    std::vector<int> layer_channels;
    std::vector<CandidateOp> ops;
    int bytes_per_param = 4;
    int num_classes = 3;
    int input_channels = 3;

    int total_blocks() const;
    int ops_count() const { return static_cast<int>(ops.size()); }
    GenomeShape shape() const { return {total_blocks(), ops_count()}; }

    // Channel width of the layer that owns searchable block index b.
    int block_channels(int block_index) const;

    // Structure summary used as the space identifier in serialized genomes.
    std::string id() const;

    void validate() const;  // throws ConfigError on invariant violations
};

// The default space: N=6 layers, blocks [4,4,4,4,4,1], strides [2,2,2,1,2,1],
// stem 32, channels [24,40,80,96,192,320], ops {Skip, MBConv3_3, 3_4, 3_6,
// 5_3, 5_4, 7_3, 7_4}.
SearchSpace default_search_space();

// Learnable parameters of an MBConv block with C_in = C_out = channels:
// pointwise expand + BN, depthwise k^3 + BN, pointwise project + BN.
std::int64_t mbconv_params(int channels, int kernel, int expansion);

// Learnable parameters of the subnet selected by g: stem + per-layer
// calibration blocks + chosen block ops + fully connected head. Pure.
std::int64_t param_count(const Genome& g, const SearchSpace& space);

// param_count * bytes_per_param / 2^20.
double model_size_mb(const Genome& g, const SearchSpace& space);

}  // namespace monas
