#include "monas/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "monas/errors.hpp"
#include "monas/rng.hpp"

namespace monas {

namespace {

// x (B x n) * w (n x m) + b (1 x m)
Mat affine(const Mat& x, const Tensor& w, const Tensor& b) {
    Mat out(x.rows, w.cols);
    for (int r = 0; r < x.rows; ++r) {
        for (int c = 0; c < w.cols; ++c) {
            double acc = b.w[static_cast<std::size_t>(c)];
            for (int k = 0; k < x.cols; ++k) {
                acc += x.at(r, k) * w.w[static_cast<std::size_t>(k) * w.cols + c];
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

Mat relu(const Mat& x) {
    Mat out = x;
    for (auto& v : out.a) v = v > 0.0 ? v : 0.0;
    return out;
}

void add_inplace(Mat& dst, const Mat& src) {
    for (std::size_t i = 0; i < dst.a.size(); ++i) dst.a[i] += src.a[i];
}

// dL/dx, dL/dw, dL/db for out = x * w + b given dL/dout.
void affine_backward(const Mat& x, const Tensor& w, const Mat& dout, Mat* dx,
                     std::vector<double>* dw, std::vector<double>* db) {
    if (dw) {
        dw->assign(w.size(), 0.0);
        for (int r = 0; r < x.rows; ++r) {
            for (int k = 0; k < x.cols; ++k) {
                const double xv = x.at(r, k);
                for (int c = 0; c < w.cols; ++c) {
                    (*dw)[static_cast<std::size_t>(k) * w.cols + c] += xv * dout.at(r, c);
                }
            }
        }
    }
    if (db) {
        db->assign(static_cast<std::size_t>(w.cols), 0.0);
        for (int r = 0; r < dout.rows; ++r) {
            for (int c = 0; c < dout.cols; ++c) (*db)[static_cast<std::size_t>(c)] += dout.at(r, c);
        }
    }
    if (dx) {
        *dx = Mat(x.rows, x.cols);
        for (int r = 0; r < x.rows; ++r) {
            for (int c = 0; c < dout.cols; ++c) {
                const double dv = dout.at(r, c);
                for (int k = 0; k < x.cols; ++k) {
                    dx->at(r, k) += dv * w.w[static_cast<std::size_t>(k) * w.cols + c];
                }
            }
        }
    }
}

Tensor make_tensor(int rows, int cols) {
    Tensor t;
    t.rows = rows;
    t.cols = cols;
    t.w.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    t.m.assign(t.w.size(), 0.0);
    t.v.assign(t.w.size(), 0.0);
    return t;
}

void glorot_init(Tensor& t, int fan_in, int fan_out, Rng& rng) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : t.w) v = (2.0 * rng.uniform01() - 1.0) * bound;
}

struct ForwardTrace {
    std::vector<Mat> z;    // activation entering slot s (z[0] = embed output); z[slots] feeds the head
    std::vector<Mat> pre;  // dense slots only: pre-activation
    std::vector<Mat> h;    // dense slots only: relu output
    Mat logits;
};

ForwardTrace run_forward(const MlpWeights& w, const Genome& g, const Mat& x) {
    if (x.cols != w.space.input_dims) {
        throw ShapeMismatch("input width " + std::to_string(x.cols) + ", space expects " +
                            std::to_string(w.space.input_dims));
    }
    ForwardTrace t;
    t.pre.resize(static_cast<std::size_t>(w.space.slots));
    t.h.resize(static_cast<std::size_t>(w.space.slots));
    t.z.reserve(static_cast<std::size_t>(w.space.slots) + 1);
    t.z.push_back(affine(x, w.embed_w, w.embed_b));
    for (int s = 0; s < w.space.slots; ++s) {
        const int op = g.choices[static_cast<std::size_t>(s)];
        if (op == 0) {
            t.z.push_back(t.z.back());
            continue;
        }
        const DenseTensors& d = w.dense[static_cast<std::size_t>(s)][static_cast<std::size_t>(op - 1)];
        t.pre[static_cast<std::size_t>(s)] = affine(t.z.back(), d.w1, d.b1);
        t.h[static_cast<std::size_t>(s)] = relu(t.pre[static_cast<std::size_t>(s)]);
        Mat out = affine(t.h[static_cast<std::size_t>(s)], d.w2, d.b2);
        add_inplace(out, t.z.back());
        t.z.push_back(std::move(out));
    }
    t.logits = affine(t.z.back(), w.head_w, w.head_b);
    return t;
}

// Mean cross-entropy and, when dlogits is non-null, its gradient.
double softmax_ce(const Mat& logits, const std::vector<int>& y, Mat* dlogits) {
    const int batch = logits.rows;
    double loss = 0.0;
    if (dlogits) *dlogits = Mat(logits.rows, logits.cols);
    for (int r = 0; r < batch; ++r) {
        double max_logit = logits.at(r, 0);
        for (int c = 1; c < logits.cols; ++c) max_logit = std::max(max_logit, logits.at(r, c));
        double sum = 0.0;
        for (int c = 0; c < logits.cols; ++c) sum += std::exp(logits.at(r, c) - max_logit);
        const double log_z = max_logit + std::log(sum);
        loss += log_z - logits.at(r, static_cast<std::size_t>(y[static_cast<std::size_t>(r)]));
        if (dlogits) {
            for (int c = 0; c < logits.cols; ++c) {
                const double p = std::exp(logits.at(r, c) - log_z);
                dlogits->at(r, c) = (p - (c == y[static_cast<std::size_t>(r)] ? 1.0 : 0.0)) / batch;
            }
        }
    }
    return loss / batch;
}

}  // namespace

std::string MlpSpace::id() const {
    std::string s = "mlp:s" + std::to_string(slots) + ":w" + std::to_string(base_width) + ":e";
    for (std::size_t i = 0; i < expansions.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(expansions[i]);
    }
    return s;
}

void MlpSpace::validate() const {
    if (slots < 1) throw ConfigError("mlp space needs at least one slot");
    if (base_width < 1) throw ConfigError("mlp base width must be positive");
    if (expansions.empty()) throw ConfigError("mlp space needs at least one dense expansion");
    for (int e : expansions) {
        if (e < 1) throw ConfigError("mlp expansions must be positive");
    }
    if (input_dims < 1) throw ConfigError("mlp input dims must be positive");
    if (num_classes < 2) throw ConfigError("mlp needs at least two classes");
}

std::int64_t MlpSpace::subnet_params(const Genome& g) const {
    const std::int64_t w = base_width;
    std::int64_t total = static_cast<std::int64_t>(input_dims) * w + w;  // embed
    for (int s = 0; s < slots; ++s) {
        const int op = g.choices[static_cast<std::size_t>(s)];
        if (op == 0) continue;
        const std::int64_t inner = w * expansions[static_cast<std::size_t>(op - 1)];
        total += w * inner + inner;  // expand
        total += inner * w + w;      // project
    }
    total += w * num_classes + num_classes;  // head
    return total;
}

double MlpSpace::subnet_size_mb(const Genome& g) const {
    return static_cast<double>(subnet_params(g)) * bytes_per_param / (1024.0 * 1024.0);
}

MlpWeights init_mlp_weights(const MlpSpace& space, std::uint64_t seed) {
    space.validate();
    Rng rng(derive_seed(seed, 0x3eu));
    MlpWeights w;
    w.space = space;
    const int width = space.base_width;

    w.embed_w = make_tensor(space.input_dims, width);
    w.embed_b = make_tensor(1, width);
    glorot_init(w.embed_w, space.input_dims, width, rng);

    w.dense.resize(static_cast<std::size_t>(space.slots));
    for (auto& slot : w.dense) {
        for (const int e : space.expansions) {
            DenseTensors d;
            const int inner = width * e;
            d.w1 = make_tensor(width, inner);
            d.b1 = make_tensor(1, inner);
            d.w2 = make_tensor(inner, width);
            d.b2 = make_tensor(1, width);
            glorot_init(d.w1, width, inner, rng);
            glorot_init(d.w2, inner, width, rng);
            slot.push_back(std::move(d));
        }
    }

    w.head_w = make_tensor(width, space.num_classes);
    w.head_b = make_tensor(1, space.num_classes);
    glorot_init(w.head_w, width, space.num_classes, rng);
    return w;
}

namespace {

template <typename Weights, typename TensorPtr>
std::vector<TensorPtr> collect_used(Weights& w, const Genome& g) {
    std::vector<TensorPtr> out;
    out.push_back(&w.embed_w);
    out.push_back(&w.embed_b);
    for (int s = 0; s < w.space.slots; ++s) {
        const int op = g.choices[static_cast<std::size_t>(s)];
        if (op == 0) continue;
        auto& d = w.dense[static_cast<std::size_t>(s)][static_cast<std::size_t>(op - 1)];
        out.push_back(&d.w1);
        out.push_back(&d.b1);
        out.push_back(&d.w2);
        out.push_back(&d.b2);
    }
    out.push_back(&w.head_w);
    out.push_back(&w.head_b);
    return out;
}

}  // namespace

std::vector<const Tensor*> used_tensors(const MlpWeights& w, const Genome& g) {
    return collect_used<const MlpWeights, const Tensor*>(w, g);
}

std::vector<Tensor*> used_tensors(MlpWeights& w, const Genome& g) {
    return collect_used<MlpWeights, Tensor*>(w, g);
}

Mat mlp_forward(const MlpWeights& w, const Genome& g, const Mat& x) {
    return run_forward(w, g, x).logits;
}

double mlp_loss(const MlpWeights& w, const Genome& g, const Mat& x, const std::vector<int>& y) {
    const ForwardTrace t = run_forward(w, g, x);
    return softmax_ce(t.logits, y, nullptr);
}

double mlp_loss_and_grads(MlpWeights& w, const Genome& g, const Mat& x, const std::vector<int>& y,
                          std::vector<TensorGrad>& grads) {
    const ForwardTrace t = run_forward(w, g, x);
    Mat dlogits;
    const double loss = softmax_ce(t.logits, y, &dlogits);

    grads.clear();
    TensorGrad head_w{&w.head_w, {}};
    TensorGrad head_b{&w.head_b, {}};
    Mat dz;
    affine_backward(t.z.back(), w.head_w, dlogits, &dz, &head_w.g, &head_b.g);

    // Walk the slots backwards, accumulating into dz.
    std::vector<TensorGrad> slot_grads;
    for (int s = w.space.slots - 1; s >= 0; --s) {
        const int op = g.choices[static_cast<std::size_t>(s)];
        if (op == 0) continue;
        DenseTensors& d = w.dense[static_cast<std::size_t>(s)][static_cast<std::size_t>(op - 1)];
        TensorGrad gw2{&d.w2, {}};
        TensorGrad gb2{&d.b2, {}};
        Mat dh;
        affine_backward(t.h[static_cast<std::size_t>(s)], d.w2, dz, &dh, &gw2.g, &gb2.g);
        // Through the relu.
        const Mat& pre = t.pre[static_cast<std::size_t>(s)];
        for (std::size_t i = 0; i < dh.a.size(); ++i) {
            if (pre.a[i] <= 0.0) dh.a[i] = 0.0;
        }
        TensorGrad gw1{&d.w1, {}};
        TensorGrad gb1{&d.b1, {}};
        Mat dz_branch;
        affine_backward(t.z[static_cast<std::size_t>(s)], d.w1, dh, &dz_branch, &gw1.g, &gb1.g);
        add_inplace(dz, dz_branch);  // residual path carries dz through unchanged
        // Pushed reversed so the global reverse below restores w1,b1,w2,b2.
        slot_grads.push_back(std::move(gb2));
        slot_grads.push_back(std::move(gw2));
        slot_grads.push_back(std::move(gb1));
        slot_grads.push_back(std::move(gw1));
    }

    TensorGrad embed_w{&w.embed_w, {}};
    TensorGrad embed_b{&w.embed_b, {}};
    affine_backward(x, w.embed_w, dz, nullptr, &embed_w.g, &embed_b.g);

    // Canonical order: embed, slots ascending, head.
    grads.push_back(std::move(embed_w));
    grads.push_back(std::move(embed_b));
    for (auto it = slot_grads.rbegin(); it != slot_grads.rend(); ++it) grads.push_back(std::move(*it));
    grads.push_back(std::move(head_w));
    grads.push_back(std::move(head_b));
    return loss;
}

double mlp_train_step(MlpWeights& w, const Genome& g, const Mat& x, const std::vector<int>& y,
                      const AdamConfig& adam) {
    if (x.rows == 0) throw Error("empty training batch");
    std::vector<TensorGrad> grads;
    const double loss = mlp_loss_and_grads(w, g, x, y, grads);
    if (!std::isfinite(loss)) throw NonFiniteLoss("loss diverged");
    for (const TensorGrad& tg : grads) {
        for (const double v : tg.g) {
            if (!std::isfinite(v)) throw NonFiniteLoss("gradient diverged");
        }
    }

    for (TensorGrad& tg : grads) {
        Tensor& t = *tg.tensor;
        t.step += 1;
        const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(t.step));
        const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(t.step));
        for (std::size_t i = 0; i < t.w.size(); ++i) {
            const double grad = tg.g[i];
            t.m[i] = adam.beta1 * t.m[i] + (1.0 - adam.beta1) * grad;
            t.v[i] = adam.beta2 * t.v[i] + (1.0 - adam.beta2) * grad * grad;
            const double m_hat = t.m[i] / bc1;
            const double v_hat = t.v[i] / bc2;
            t.w[i] -= adam.learn_rate * m_hat / (std::sqrt(v_hat) + adam.epsilon);
            t.w[i] -= adam.learn_rate * adam.weight_decay * t.w[i];
        }
    }
    return loss;
}

double mlp_evaluate(const MlpWeights& w, const Genome& g, const Mat& x, const std::vector<int>& y) {
    if (x.rows == 0) return 0.0;
    const Mat logits = mlp_forward(w, g, x);
    int correct = 0;
    for (int r = 0; r < logits.rows; ++r) {
        int best = 0;
        for (int c = 1; c < logits.cols; ++c) {
            if (logits.at(r, c) > logits.at(r, best)) best = c;
        }
        if (best == y[static_cast<std::size_t>(r)]) ++correct;
    }
    return static_cast<double>(correct) / logits.rows;
}

namespace {

Mat gather_rows(const Dataset& data, const std::vector<int>& idx, int begin, int end) {
    Mat x(end - begin, data.dims);
    for (int r = begin; r < end; ++r) {
        const double* src = data.row(idx[static_cast<std::size_t>(r)]);
        for (int c = 0; c < data.dims; ++c) x.at(r - begin, c) = src[c];
    }
    return x;
}

std::vector<int> gather_labels(const Dataset& data, const std::vector<int>& idx, int begin, int end) {
    std::vector<int> y(static_cast<std::size_t>(end - begin));
    for (int r = begin; r < end; ++r) y[static_cast<std::size_t>(r - begin)] = data.labels[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
    return y;
}

}  // namespace

MlpSupernet::MlpSupernet(MlpSpace space, const Dataset* data, std::uint64_t seed, AdamConfig adam,
                         int batch_size)
    : space_(space), data_(data), adam_(adam), batch_size_(batch_size),
      weights_(init_mlp_weights(space, seed)) {
    if (batch_size_ < 1) throw ConfigError("batch size must be positive");
    if (data_->dims != space_.input_dims || data_->classes != space_.num_classes) {
        throw ConfigError("dataset shape does not match the mlp space");
    }
}

void MlpSupernet::reset(std::uint64_t seed) { weights_ = init_mlp_weights(space_, seed); }

int MlpSupernet::batches_per_epoch() const {
    const int n = static_cast<int>(data_->train_idx.size());
    return (n + batch_size_ - 1) / batch_size_;
}

double MlpSupernet::train_subnet(const Genome& g, int batch_index) {
    const int n = static_cast<int>(data_->train_idx.size());
    const int begin = batch_index * batch_size_;
    const int end = std::min(n, begin + batch_size_);
    const Mat x = gather_rows(*data_, data_->train_idx, begin, end);
    const std::vector<int> y = gather_labels(*data_, data_->train_idx, begin, end);
    return mlp_train_step(weights_, g, x, y, adam_);
}

double MlpSupernet::evaluate(const Genome& g) {
    const int n = static_cast<int>(data_->val_idx.size());
    const Mat x = gather_rows(*data_, data_->val_idx, 0, n);
    const std::vector<int> y = gather_labels(*data_, data_->val_idx, 0, n);
    return mlp_evaluate(weights_, g, x, y);
}

RetrainResult retrain_standalone(const MlpSpace& space, const Genome& g, const Dataset& data,
                                 int epochs, std::uint64_t seed, AdamConfig adam, int batch_size) {
    MlpWeights w = init_mlp_weights(space, derive_seed(seed, 0x7eu));
    Rng rng(derive_seed(seed, 0x7fu));

    std::vector<int> combined = data.train_idx;
    combined.insert(combined.end(), data.val_idx.begin(), data.val_idx.end());

    RetrainResult result;
    result.epochs = epochs;
    const int n = static_cast<int>(combined.size());
    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i) {
            const int j = rng.uniform_int(i + 1);
            std::swap(combined[static_cast<std::size_t>(i)], combined[static_cast<std::size_t>(j)]);
        }
        for (int begin = 0; begin < n; begin += batch_size) {
            const int end = std::min(n, begin + batch_size);
            const Mat x = gather_rows(data, combined, begin, end);
            const std::vector<int> y = gather_labels(data, combined, begin, end);
            result.final_train_loss = mlp_train_step(w, g, x, y, adam);
        }
    }

    const int n_test = static_cast<int>(data.test_idx.size());
    const Mat x_test = gather_rows(data, data.test_idx, 0, n_test);
    const std::vector<int> y_test = gather_labels(data, data.test_idx, 0, n_test);
    result.test_accuracy = mlp_evaluate(w, g, x_test, y_test);
    return result;
}

}  // namespace monas
