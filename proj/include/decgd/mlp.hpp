#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "decgd/problems.hpp"

namespace decgd::mlp {

enum class Activation { ReLU, Tanh };
enum class LossKind { SoftmaxCrossEntropy, MSE };

// Network shape: layer_sizes = {input, hidden..., output}. Hidden layers get
// the chosen activation, the output layer is linear (logits for the
// cross-entropy loss). Weights are flattened transition by transition, each
// as a row-major out-by-in matrix followed by its bias vector.
struct MlpSpec {
  std::vector<std::size_t> layer_sizes;
  Activation activation = Activation::Tanh;
  LossKind loss = LossKind::SoftmaxCrossEntropy;
  std::uint64_t init_seed = 1;

  void validate() const; // >= 2 layers, all sizes >= 1

  std::size_t param_count() const;

  // Uniform in +/- sqrt(6 / (fan_in + fan_out)) per transition, biases zero;
  // fully determined by init_seed.
  std::vector<double> init_weights() const;
};

struct Dataset {
  std::vector<std::vector<double>> features; // n x p
  std::vector<int> labels;                   // class ids in [0, k)
  std::size_t batch_size = 1;
  std::uint64_t shuffle_seed = 0;

  std::size_t size() const { return features.size(); }
};

// Two 2-d Gaussian blobs (unit variance) centered at (-separation/2, 0) and
// (+separation/2, 0), per_class samples each, class 0 first.
Dataset make_two_gaussians(std::size_t per_class, double separation,
                           std::uint64_t seed);

// Reads `label,f0,f1,...` CSV (header mandatory). Parse problems throw
// std::runtime_error naming the offending line.
Dataset load_csv_dataset(const std::string &path);

// Minibatch loss oracle over the flattened weights. Each evaluate() computes
// the mean loss and exact backprop gradient of the current batch, then
// advances the cursor; epochs reshuffle from shuffle_seed. With
// batch_size == n the oracle is stateless and iterates the dataset in
// storage order, so full-batch evaluations are deterministic and ignore the
// shuffle seed entirely.
class MlpOracle : public problems::LossOracle {
public:
  MlpOracle(MlpSpec spec, Dataset data);

  std::size_t dimension() const override;
  double evaluate(const std::vector<double> &weights,
                  std::vector<double> &grad) override;

  std::size_t batches_per_epoch() const;
  const MlpSpec &spec() const { return spec_; }
  const Dataset &data() const { return data_; }

private:
  MlpSpec spec_;
  Dataset data_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::mt19937_64 shuffle_rng_;
};

// Full-dataset mean loss at the given weights; forward pass only, storage
// order, no cursor involved.
double dataset_loss(const MlpSpec &spec, const std::vector<double> &weights,
                    const Dataset &data);

// Argmax-class accuracy over the full dataset; ties go to the lowest class
// index. Rejects empty datasets.
double accuracy(const MlpSpec &spec, const std::vector<double> &weights,
                const Dataset &data);

} // namespace decgd::mlp
