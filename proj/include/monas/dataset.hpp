#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace monas {

struct DatasetSpec {
    int classes = 3;
    int dims = 8;
    int per_class = 150;
    double warp_strength = 1.0;
    double class_separation = 3.0;  // distance between cluster centers, pre-warp

    void validate() const;  // throws ConfigError
};

// Row-major feature matrix with integer labels and a fixed 70/15/15
// train/val/test split. Generation is a pure function of (spec, seed).
struct Dataset {
    int dims = 0;
    int classes = 0;
    std::vector<double> features;  // rows x dims
    std::vector<int> labels;
    std::vector<int> train_idx;
    std::vector<int> val_idx;
    std::vector<int> test_idx;

    int rows() const { return static_cast<int>(labels.size()); }
    const double* row(int r) const { return features.data() + static_cast<std::size_t>(r) * dims; }
};

// Seeded Gaussian class clusters pushed through a smooth sinusoidal warp,
// then split by a seeded shuffle.
Dataset make_dataset(const DatasetSpec& spec, std::uint64_t seed);

// Flat columnar text format: header with dims/classes, then one row per
// sample (features then label), plus the split assignment.
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace monas
