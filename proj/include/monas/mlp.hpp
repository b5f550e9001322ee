#pragma once

#include <cstdint>
#include <vector>

#include "monas/dataset.hpp"
#include "monas/evaluator.hpp"
#include "monas/genome.hpp"

namespace monas {

// Row-major matrix, just enough for the toy trainer.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// Sequential slot search space over dense ops: per slot one of {Skip,
// Dense_e for e in expansions} at a common base width. Mirrors the engine's
// block/op structure while staying cheap enough to train for real.
struct MlpSpace {
    int slots = 4;
    int base_width = 16;
    std::vector<int> expansions = {1, 2, 4};
    int input_dims = 8;
    int num_classes = 3;
    int bytes_per_param = 4;

    GenomeShape shape() const { return {slots, 1 + static_cast<int>(expansions.size())}; }
    std::string id() const;
    void validate() const;  // throws ConfigError

    // Embed + chosen dense blocks + head, weights and biases.
    std::int64_t subnet_params(const Genome& g) const;
    double subnet_size_mb(const Genome& g) const;
};

// One parameter tensor with its Adam state. Moments and the step count
// travel with the tensor; a tensor advances only when its op is trained.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> w;
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    std::size_t size() const { return w.size(); }
};

// Tensors of one Dense_e op: expand (w1, b1) and project-back (w2, b2).
struct DenseTensors {
    Tensor w1, b1, w2, b2;
};

// The supernet's shared parameters: embedding and head used by every
// subnet, plus per-(slot, op) dense tensors sliced out by each genome.
struct MlpWeights {
    MlpSpace space;
    Tensor embed_w, embed_b, head_w, head_b;
    std::vector<std::vector<DenseTensors>> dense;  // slot x dense-op (op index o >= 1 -> dense[slot][o-1])
};

MlpWeights init_mlp_weights(const MlpSpace& space, std::uint64_t seed);

// The tensors the subnet g reads and trains, in canonical order (embed,
// slot tensors, head). Skip slots contribute none.
std::vector<const Tensor*> used_tensors(const MlpWeights& w, const Genome& g);
std::vector<Tensor*> used_tensors(MlpWeights& w, const Genome& g);

// Composes the chosen op per slot (Skip = identity, Dense_e = residual
// expand/relu/project) and returns class logits. Throws ShapeMismatch when
// x's width differs from the space's input dims.
Mat mlp_forward(const MlpWeights& w, const Genome& g, const Mat& x);

// Mean softmax cross-entropy of the batch.
double mlp_loss(const MlpWeights& w, const Genome& g, const Mat& x, const std::vector<int>& y);

struct AdamConfig {
    double learn_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 3e-4;  // decoupled, applied with the update
};

// Gradient of the batch loss for one tensor, aligned with Tensor::w.
struct TensorGrad {
    Tensor* tensor;
    std::vector<double> g;
};

// Backpropagation for exactly the tensors used by g; untouched ops receive
// no gradient and no update. Returns the loss at the current weights.
double mlp_loss_and_grads(MlpWeights& w, const Genome& g, const Mat& x, const std::vector<int>& y,
                          std::vector<TensorGrad>& grads);

// One Adam step on the tensors used by g; returns the pre-update loss.
// Throws NonFiniteLoss when the loss or any gradient is non-finite.
double mlp_train_step(MlpWeights& w, const Genome& g, const Mat& x, const std::vector<int>& y,
                      const AdamConfig& adam = {});

// Argmax accuracy; read-only. Ties resolve to the lowest class index.
double mlp_evaluate(const MlpWeights& w, const Genome& g, const Mat& x, const std::vector<int>& y);

// Weight-shared training backend over a dataset's train/val splits. Batches
// are fixed contiguous slices of the train split.
class MlpSupernet final : public Evaluator {
public:
    MlpSupernet(MlpSpace space, const Dataset* data, std::uint64_t seed, AdamConfig adam = {},
                int batch_size = 32);

    void reset(std::uint64_t seed) override;
    void begin_epoch(int /*epoch*/) override {}
    int batches_per_epoch() const override;
    double train_subnet(const Genome& g, int batch_index) override;
    double evaluate(const Genome& g) override;
    bool read_only_eval() const override { return true; }

    const MlpWeights& weights() const { return weights_; }
    MlpWeights& weights() { return weights_; }

private:
    MlpSpace space_;
    const Dataset* data_;
    AdamConfig adam_;
    int batch_size_;
    MlpWeights weights_;
};

struct RetrainResult {
    double test_accuracy = 0.0;
    double final_train_loss = 0.0;
    int epochs = 0;
};

// Trains a standalone, freshly initialized instance of the subnet on the
// combined train+validation split (reshuffled each epoch) and reports
// accuracy on the held-out test split. Deterministic given the seed.
RetrainResult retrain_standalone(const MlpSpace& space, const Genome& g, const Dataset& data,
                                 int epochs, std::uint64_t seed, AdamConfig adam = {},
                                 int batch_size = 32);

}  // namespace monas
