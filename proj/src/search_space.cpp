#include "monas/search_space.hpp"

#include <numeric>

#include "monas/errors.hpp"

namespace monas {

std::string CandidateOp::name() const {
    if (is_skip()) return "skip";
    return "mbconv" + std::to_string(kernel) + "_" + std::to_string(expansion);
}

int SearchSpace::total_blocks() const {
    return std::accumulate(blocks_per_layer.begin(), blocks_per_layer.end(), 0);
}

int SearchSpace::block_channels(int block_index) const {
    int b = block_index;
    for (int layer = 0; layer < num_layers; ++layer) {
        if (b < blocks_per_layer[static_cast<std::size_t>(layer)]) {
            return layer_channels[static_cast<std::size_t>(layer)];
        }
        b -= blocks_per_layer[static_cast<std::size_t>(layer)];
    }
    throw OutOfRange("block index " + std::to_string(block_index));
}

std::string SearchSpace::id() const {
    std::string s = "mbconv3d:l" + std::to_string(num_layers) + ":b";
    for (std::size_t i = 0; i < blocks_per_layer.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(blocks_per_layer[i]);
    }
    s += ":ops" + std::to_string(ops_count());
    return s;
}

void SearchSpace::validate() const {
    const auto n = static_cast<std::size_t>(num_layers);
    if (num_layers <= 0) throw ConfigError("search space needs at least one layer");
    if (blocks_per_layer.size() != n || calibration_strides.size() != n || layer_channels.size() != n) {
        throw ConfigError("blocks_per_layer, calibration_strides and layer_channels must all have num_layers entries");
    }
    for (int b : blocks_per_layer) {
        if (b < 1) throw ConfigError("every layer needs at least one searchable block");
    }
    for (int c : layer_channels) {
        if (c < 1) throw ConfigError("layer channels must be positive");
    }
    if (stem_channels < 1) throw ConfigError("stem channels must be positive");
    if (ops.empty()) throw ConfigError("op set must be non-empty");
    if (bytes_per_param < 1) throw ConfigError("bytes_per_param must be positive");
    if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
    for (const CandidateOp& op : ops) {
        if (op.is_skip()) continue;
        if (op.kernel != 3 && op.kernel != 5 && op.kernel != 7) {
            throw ConfigError("MBConv kernel must be one of {3,5,7}");
        }
        if (op.expansion != 3 && op.expansion != 4 && op.expansion != 6) {
            throw ConfigError("MBConv expansion must be one of {3,4,6}");
        }
    }
}

SearchSpace default_search_space() {
    SearchSpace s;
    s.num_layers = 6;
    s.blocks_per_layer = {4, 4, 4, 4, 4, 1};
    s.calibration_strides = {2, 2, 2, 1, 2, 1};
    s.stem_channels = 32;
    s.layer_channels = {24, 40, 80, 96, 192, 320};
    s.ops = {
        CandidateOp::skip(),      CandidateOp::mbconv(3, 3), CandidateOp::mbconv(3, 4),
        CandidateOp::mbconv(3, 6), CandidateOp::mbconv(5, 3), CandidateOp::mbconv(5, 4),
        CandidateOp::mbconv(7, 3), CandidateOp::mbconv(7, 4),
    };
    return s;
}

namespace {

std::int64_t bn_params(std::int64_t channels) { return 2 * channels; }  // scale + shift

}  // namespace

std::int64_t mbconv_params(int channels, int kernel, int expansion) {
    const std::int64_t c = channels;
    const std::int64_t inner = c * expansion;
    const std::int64_t k3 = static_cast<std::int64_t>(kernel) * kernel * kernel;
    std::int64_t total = 0;
    total += c * inner + bn_params(inner);   // pointwise expand
    total += k3 * inner + bn_params(inner);  // depthwise k x k x k
    total += inner * c + bn_params(c);       // pointwise project
    return total;
}

std::int64_t param_count(const Genome& g, const SearchSpace& space) {
    // Stem: full 3x3x3 conv from the input volume, no bias, plus BN.
    std::int64_t total = 27LL * space.input_channels * space.stem_channels + bn_params(space.stem_channels);

    int block = 0;
    int prev_channels = space.stem_channels;
    for (int layer = 0; layer < space.num_layers; ++layer) {
        const int c = space.layer_channels[static_cast<std::size_t>(layer)];
        // Calibration block: pointwise conv prev -> c, plus BN.
        total += static_cast<std::int64_t>(prev_channels) * c + bn_params(c);
        for (int b = 0; b < space.blocks_per_layer[static_cast<std::size_t>(layer)]; ++b, ++block) {
            const CandidateOp& op = space.ops[static_cast<std::size_t>(g.choices[static_cast<std::size_t>(block)])];
            if (!op.is_skip()) total += mbconv_params(c, op.kernel, op.expansion);
        }
        prev_channels = c;
    }

    // Head: global average pool (no params) + fully connected with bias.
    total += static_cast<std::int64_t>(prev_channels) * space.num_classes + space.num_classes;
    return total;
}

double model_size_mb(const Genome& g, const SearchSpace& space) {
    return static_cast<double>(param_count(g, space)) * space.bytes_per_param / (1024.0 * 1024.0);
}

}  // namespace monas
