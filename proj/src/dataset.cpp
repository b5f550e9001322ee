#include "monas/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "monas/errors.hpp"
#include "monas/rng.hpp"
#include "monas/textio.hpp"

namespace monas {

void DatasetSpec::validate() const {
    if (classes < 2) throw ConfigError("dataset needs at least two classes");
    if (dims < 1) throw ConfigError("dataset dims must be positive");
    if (per_class < 1) throw ConfigError("dataset per_class must be positive");
    if (warp_strength < 0.0) throw ConfigError("warp_strength must be non-negative");
}

Dataset make_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(derive_seed(seed, 0xd5u));
    const int n = spec.classes * spec.per_class;
    const std::size_t d = static_cast<std::size_t>(spec.dims);

    Dataset ds;
    ds.dims = spec.dims;
    ds.classes = spec.classes;
    ds.features.resize(static_cast<std::size_t>(n) * d);
    ds.labels.resize(static_cast<std::size_t>(n));

    // Cluster centers: random unit directions scaled by class_separation.
    std::vector<std::vector<double>> means(static_cast<std::size_t>(spec.classes), std::vector<double>(d));
    for (auto& mean : means) {
        double norm2 = 0.0;
        for (auto& v : mean) {
            v = rng.normal();
            norm2 += v * v;
        }
        const double scale = spec.class_separation / std::sqrt(norm2 > 0 ? norm2 : 1.0);
        for (auto& v : mean) v *= scale;
    }

    // Warp parameters: one projection direction and phase per output dim.
    std::vector<double> proj(d * d);
    std::vector<double> phase(d);
    const double proj_sigma = 1.0 / std::sqrt(static_cast<double>(spec.dims));
    for (auto& v : proj) v = rng.normal(proj_sigma);
    for (auto& v : phase) v = rng.uniform01() * 2.0 * 3.14159265358979323846;

    std::vector<double> x(d);
    int row = 0;
    for (int c = 0; c < spec.classes; ++c) {
        for (int i = 0; i < spec.per_class; ++i, ++row) {
            for (std::size_t j = 0; j < d; ++j) x[j] = means[static_cast<std::size_t>(c)][j] + rng.normal();
            double* out = ds.features.data() + static_cast<std::size_t>(row) * d;
            for (std::size_t j = 0; j < d; ++j) {
                double dot = phase[j];
                for (std::size_t k = 0; k < d; ++k) dot += proj[j * d + k] * x[k];
                out[j] = x[j] + spec.warp_strength * std::sin(dot);
            }
            ds.labels[static_cast<std::size_t>(row)] = c;
        }
    }

    // Seeded Fisher-Yates, then 70/15/15.
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = rng.uniform_int(i + 1);
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    const int n_train = n * 70 / 100;
    const int n_val = n * 15 / 100;
    ds.train_idx.assign(order.begin(), order.begin() + n_train);
    ds.val_idx.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    ds.test_idx.assign(order.begin() + n_train + n_val, order.end());
    return ds;
}

void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "dims " << d.dims << "\n";
    out << "classes " << d.classes << "\n";
    out << "rows " << d.rows() << "\n";
    std::vector<char> split(static_cast<std::size_t>(d.rows()), '?');
    for (int i : d.train_idx) split[static_cast<std::size_t>(i)] = 't';
    for (int i : d.val_idx) split[static_cast<std::size_t>(i)] = 'v';
    for (int i : d.test_idx) split[static_cast<std::size_t>(i)] = 's';
    for (int r = 0; r < d.rows(); ++r) {
        const double* row = d.row(r);
        for (int j = 0; j < d.dims; ++j) out << fmt_double(row[j]) << " ";
        out << d.labels[static_cast<std::size_t>(r)] << " " << split[static_cast<std::size_t>(r)] << "\n";
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::string key;
    int rows = 0;
    Dataset d;
    in >> key >> d.dims;
    if (key != "dims") throw Error("bad dataset header in " + path);
    in >> key >> d.classes;
    if (key != "classes") throw Error("bad dataset header in " + path);
    in >> key >> rows;
    if (key != "rows") throw Error("bad dataset header in " + path);
    d.features.resize(static_cast<std::size_t>(rows) * d.dims);
    d.labels.resize(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        std::string field;
        for (int j = 0; j < d.dims; ++j) {
            in >> field;
            d.features[static_cast<std::size_t>(r) * d.dims + j] = parse_double(field);
        }
        char tag = 0;
        in >> d.labels[static_cast<std::size_t>(r)] >> tag;
        switch (tag) {
            case 't': d.train_idx.push_back(r); break;
            case 'v': d.val_idx.push_back(r); break;
            case 's': d.test_idx.push_back(r); break;
            default: throw Error("bad split tag in " + path);
        }
    }
    if (!in) throw Error("truncated dataset file " + path);
    return d;
}

}  // namespace monas
