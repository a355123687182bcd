#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sparks/accounting.hpp"
#include "sparks/codebook.hpp"
#include "sparks/engine.hpp"
#include "sparks/pste.hpp"
#include "sparks/tensor.hpp"

namespace sparks {

enum class Optimizer { kAdam, kSgd };

struct TrainConfig {
  double lr = 1e-3;
  long steps = 500;
  int batch = 32;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.0;
  bool lr_linear_decay = false;
  int n = 32;
  std::optional<SelectionMode> mode;  // defaults per kernel size
  int sinkhorn_iterations = 10;
  double tau = 1e-2;
  bool gumbel = false;
  long trace_interval = 10;

  void validate() const;
};

// First-order moment state shared by the optimizers; SGD ignores it.
class OptimizerState {
 public:
  explicit OptimizerState(std::size_t size) : m_(size, 0.0), v_(size, 0.0) {}
  void step(std::span<double> params, std::span<const double> grads, double lr,
            const TrainConfig& cfg);

 private:
  std::vector<double> m_, v_;
  long t_ = 0;
};

// ---- standalone sub-codebook quantizer ----

struct QuantizerProblem {
  int kernel_size = 0;
  std::vector<std::vector<double>> kernels;  // each of length K^2

  void validate() const;
};

// f(U) = sum_c min_{u in U} ||u - w_c||^2.
double quantization_error(const QuantizerProblem& problem, const SubCodebook& sub,
                          const Codebook& book);

struct QuantizerResult {
  SubCodebook selected;
  double final_objective = 0.0;
  std::vector<double> loss_trace;  // one entry per step
  std::vector<std::pair<std::uint64_t, std::vector<std::uint32_t>>> selection_trace;
  std::vector<PermGapSample> gap_trace;
};

// PSTE loop over a fixed kernel set: select, group, backprop the
// quantization error onto the permutation logits. The returned sub-codebook
// comes from a final noise-free forward pass.
QuantizerResult train_quantizer(const QuantizerProblem& problem, const TrainConfig& cfg,
                                const Codebook& book);

// ---- binarized convolution layer (training side) ----

struct BinConvLayer {
  int c_out = 0, c_in = 0, kernel_size = 3, stride = 1, pad = 1;
  std::vector<double> weights;  // (o, c, ky*K+kx) flattened, c_out*c_in*K^2
  bool affine = true;
  std::vector<double> scale, bias;  // per output channel
  AssignmentMap assign;             // filled by grouping

  std::size_t kernel_count() const { return static_cast<std::size_t>(c_out) * c_in; }
  std::span<const double> kernel(std::size_t index) const {
    const std::size_t k2 = static_cast<std::size_t>(kernel_size) * kernel_size;
    return {weights.data() + index * k2, k2};
  }
};

struct BinConvCache {
  Tensor3d input;                                 // pre-sign input
  Tensor3b activations;                           // sign(input)
  Tensor3i accum;                                 // integer conv output
  std::vector<std::vector<double>> used_kernels;  // what the conv actually used
};

// Binarize activations (sign, ties +1), group every kernel to its nearest
// codeword in `sub`, convolve with integer accumulation, then apply the
// per-channel affine. Updates layer.assign.
Tensor3d binconv_forward(const Tensor3d& input, BinConvLayer& layer, const SubCodebook& sub,
                         const Codebook& book, BinConvCache* cache = nullptr);

// Phase-1 variant: binary activations, real-valued weights.
Tensor3d binconv_forward_real(const Tensor3d& input, const BinConvLayer& layer,
                              BinConvCache* cache = nullptr);

struct BinConvGrads {
  Tensor3d g_input;                          // through the activation STE
  std::vector<std::vector<double>> g_what;   // raw per-kernel binary-weight grads
  std::vector<double> g_weights;             // ste_weight_grad(g_what, weights), flattened
  std::vector<double> g_scale, g_bias;
};

BinConvGrads binconv_backward(const Tensor3d& g_output, const BinConvCache& cache,
                              const BinConvLayer& layer);

// ---- toy network ----

struct LabeledImages {
  int count = 0, channels = 1, height = 0, width = 0;
  std::vector<double> pixels;  // count*channels*h*w, values in [0, 1]
  std::vector<int> labels;

  int classes() const;
  Tensor3d image(int index) const;
};

// Two Gaussian blobs at class-dependent positions plus noise; linearly
// separable by construction. Pixels are quantized to the u8 grid so the
// on-disk round trip is exact.
LabeledImages make_synthetic_blobs(std::uint64_t seed, int count, int height = 8, int width = 8);

void save_dataset(const LabeledImages& data, const std::string& images_path,
                  const std::string& labels_path);
LabeledImages load_dataset(const std::string& images_path, const std::string& labels_path);

// conv(1 -> 8, 3x3) / binconv(8 -> 16, 3x3, stride 2) / fc(16 -> classes).
std::vector<LayerSpec> toy_arch(int height, int width, int classes);

struct ToyTrainResult {
  IndexCodedModel model;
  double final_train_accuracy = 0.0;
  std::vector<std::tuple<long, double, double>> metrics;  // step, loss, accuracy
  std::vector<std::pair<std::uint64_t, std::vector<std::uint32_t>>> selection_trace;
  std::vector<PermGapSample> gap_trace;
};

// Two-phase recipe: first binary activations with real weights, then full
// binarization with PSTE selection. First conv and the classifier stay
// real-valued. cfg.steps counts per phase.
ToyTrainResult train_toynet(const LabeledImages& data, const std::vector<LayerSpec>& arch,
                            const TrainConfig& cfg);

// CSV: "step,loss" or "step,loss,accuracy".
void write_metrics_csv(std::span<const std::tuple<long, double, double>> rows, bool accuracy,
                       std::ostream& out);
void write_loss_csv(std::span<const double> losses, std::ostream& out);

}  // namespace sparks
