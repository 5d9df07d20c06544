#include "decgd/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace decgd::mlp {

namespace {

struct Forward {
  // acts[0] is the input, acts.back() the linear output layer; zs[l] holds
  // the pre-activations feeding acts[l] for l >= 1.
  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> zs;
};

double activate(Activation a, double z) {
  return a == Activation::Tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

double activate_deriv(Activation a, double z, double act) {
  return a == Activation::Tanh ? 1.0 - act * act : (z > 0.0 ? 1.0 : 0.0);
}

void run_forward(const MlpSpec &spec, const std::vector<double> &w,
                 const std::vector<double> &input, Forward &f) {
  const std::size_t layers = spec.layer_sizes.size();
  f.acts.assign(layers, {});
  f.zs.assign(layers, {});
  f.acts[0] = input;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    const std::size_t in = spec.layer_sizes[l];
    const std::size_t out = spec.layer_sizes[l + 1];
    const double *W = w.data() + off;
    const double *b = w.data() + off + in * out;
    auto &z = f.zs[l + 1];
    auto &a = f.acts[l + 1];
    z.resize(out);
    a.resize(out);
    const auto &prev = f.acts[l];
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      const double *row = W + o * in;
      for (std::size_t i = 0; i < in; ++i)
        acc += row[i] * prev[i];
      z[o] = acc;
      a[o] = (l + 2 == layers) ? acc : activate(spec.activation, acc);
    }
    off += in * out + out;
  }
}

// Loss of one sample given its forward pass; fills dout with the derivative
// w.r.t. the output layer.
double sample_loss(const MlpSpec &spec, const Forward &f, int label,
                   std::vector<double> *dout) {
  const auto &out = f.acts.back();
  const std::size_t k = out.size();
  if (spec.loss == LossKind::SoftmaxCrossEntropy) {
    double zmax = out[0];
    for (double z : out)
      zmax = std::max(zmax, z);
    double sum = 0.0;
    for (double z : out)
      sum += std::exp(z - zmax);
    const double lse = zmax + std::log(sum);
    if (dout) {
      dout->resize(k);
      for (std::size_t j = 0; j < k; ++j)
        (*dout)[j] = std::exp(out[j] - zmax) / sum;
      (*dout)[static_cast<std::size_t>(label)] -= 1.0;
    }
    return lse - out[static_cast<std::size_t>(label)];
  }
  // MSE: one-hot target, or the raw label value when there is a single
  // output unit (regression-style use).
  double loss = 0.0;
  if (dout)
    dout->resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double target =
        k == 1 ? static_cast<double>(label)
               : (j == static_cast<std::size_t>(label) ? 1.0 : 0.0);
    const double diff = out[j] - target;
    loss += 0.5 * diff * diff;
    if (dout)
      (*dout)[j] = diff;
  }
  return loss;
}

void backprop(const MlpSpec &spec, const std::vector<double> &w,
              const Forward &f, const std::vector<double> &dout,
              std::vector<double> &grad) {
  const std::size_t layers = spec.layer_sizes.size();
  std::vector<double> delta = dout;
  // transition offsets, last first
  std::vector<std::size_t> offs(layers - 1);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    offs[l] = off;
    off += spec.layer_sizes[l] * spec.layer_sizes[l + 1] +
           spec.layer_sizes[l + 1];
  }
  for (std::size_t l = layers - 1; l-- > 0;) {
    const std::size_t in = spec.layer_sizes[l];
    const std::size_t out = spec.layer_sizes[l + 1];
    const double *W = w.data() + offs[l];
    double *gW = grad.data() + offs[l];
    double *gb = grad.data() + offs[l] + in * out;
    const auto &prev = f.acts[l];
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      double *grow = gW + o * in;
      for (std::size_t i = 0; i < in; ++i)
        grow[i] += d * prev[i];
      gb[o] += d;
    }
    if (l == 0)
      break;
    std::vector<double> next(in, 0.0);
    for (std::size_t i = 0; i < in; ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < out; ++o)
        acc += W[o * in + i] * delta[o];
      next[i] = acc * activate_deriv(spec.activation, f.zs[l][i], f.acts[l][i]);
    }
    delta.swap(next);
  }
}

void check_weights(const MlpSpec &spec, const std::vector<double> &w) {
  if (w.size() != spec.param_count())
    throw std::invalid_argument("weight vector does not match the network");
}

void check_dataset(const MlpSpec &spec, const Dataset &data) {
  if (data.size() == 0)
    throw std::invalid_argument("dataset is empty");
  if (data.labels.size() != data.size())
    throw std::invalid_argument("dataset features/labels lengths differ");
  const std::size_t in = spec.layer_sizes.front();
  const int k = static_cast<int>(spec.layer_sizes.back());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.features[i].size() != in)
      throw std::invalid_argument("dataset feature dimension mismatch");
    if (data.labels[i] < 0 || data.labels[i] >= k)
      throw std::invalid_argument("dataset label out of range");
  }
}

} // namespace

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("network needs at least input and output layers");
  for (std::size_t s : layer_sizes)
    if (s == 0)
      throw std::invalid_argument("layer sizes must be >= 1");
}

std::size_t MlpSpec::param_count() const {
  validate();
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    total += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  return total;
}

std::vector<double> MlpSpec::init_weights() const {
  validate();
  std::vector<double> w(param_count(), 0.0);
  std::mt19937_64 rng(init_seed);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t in = layer_sizes[l];
    const std::size_t out = layer_sizes[l + 1];
    const double r = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-r, r);
    for (std::size_t i = 0; i < in * out; ++i)
      w[off + i] = dist(rng);
    off += in * out + out; // biases stay zero
  }
  return w;
}

Dataset make_two_gaussians(std::size_t per_class, double separation,
                           std::uint64_t seed) {
  if (per_class == 0)
    throw std::invalid_argument("per_class must be >= 1");
  Dataset data;
  data.features.reserve(2 * per_class);
  data.labels.reserve(2 * per_class);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int cls = 0; cls < 2; ++cls) {
    const double cx = (cls == 0 ? -0.5 : 0.5) * separation;
    for (std::size_t s = 0; s < per_class; ++s) {
      const double x0 = cx + gauss(rng);
      const double x1 = gauss(rng);
      data.features.push_back({x0, x1});
      data.labels.push_back(cls);
    }
  }
  return data;
}

Dataset load_csv_dataset(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": line 1: missing header row");
  std::size_t feature_cols = 0;
  {
    std::stringstream header(line);
    std::string tok;
    if (!std::getline(header, tok, ',') || tok != "label")
      throw std::runtime_error(path + ": line 1: header must start with 'label'");
    while (std::getline(header, tok, ','))
      ++feature_cols;
    if (feature_cols == 0)
      throw std::runtime_error(path + ": line 1: no feature columns");
  }
  Dataset data;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      continue;
    std::stringstream row(line);
    std::string tok;
    const std::string where = path + ": line " + std::to_string(line_no);
    if (!std::getline(row, tok, ','))
      throw std::runtime_error(where + ": empty row");
    int label = 0;
    try {
      std::size_t used = 0;
      label = std::stoi(tok, &used);
      if (used != tok.size())
        throw std::invalid_argument(tok);
    } catch (const std::exception &) {
      throw std::runtime_error(where + ": bad label '" + tok + "'");
    }
    if (label < 0)
      throw std::runtime_error(where + ": negative label");
    std::vector<double> feats;
    feats.reserve(feature_cols);
    while (std::getline(row, tok, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size())
          throw std::invalid_argument(tok);
        feats.push_back(v);
      } catch (const std::exception &) {
        throw std::runtime_error(where + ": bad feature value '" + tok + "'");
      }
    }
    if (feats.size() != feature_cols)
      throw std::runtime_error(where + ": expected " +
                               std::to_string(feature_cols) + " features, got " +
                               std::to_string(feats.size()));
    data.features.push_back(std::move(feats));
    data.labels.push_back(label);
  }
  if (data.size() == 0)
    throw std::runtime_error(path + ": no data rows");
  return data;
}

MlpOracle::MlpOracle(MlpSpec spec, Dataset data)
    : spec_(std::move(spec)), data_(std::move(data)),
      shuffle_rng_(data_.shuffle_seed) {
  spec_.validate();
  check_dataset(spec_, data_);
  if (data_.batch_size == 0)
    throw std::invalid_argument("batch_size must be >= 1");
  if (data_.batch_size > data_.size())
    throw std::invalid_argument("batch_size exceeds dataset size");
}

std::size_t MlpOracle::dimension() const { return spec_.param_count(); }

std::size_t MlpOracle::batches_per_epoch() const {
  return (data_.size() + data_.batch_size - 1) / data_.batch_size;
}

double MlpOracle::evaluate(const std::vector<double> &weights,
                           std::vector<double> &grad) {
  check_weights(spec_, weights);
  const std::size_t n = data_.size();
  std::size_t begin = 0, end = n;
  const bool full_batch = data_.batch_size == n;
  if (!full_batch) {
    if (cursor_ == 0) {
      order_.resize(n);
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      std::shuffle(order_.begin(), order_.end(), shuffle_rng_);
    }
    begin = cursor_;
    end = std::min(cursor_ + data_.batch_size, n);
    cursor_ = end == n ? 0 : end;
  }

  grad.assign(weights.size(), 0.0);
  Forward f;
  std::vector<double> dout;
  double total = 0.0;
  for (std::size_t b = begin; b < end; ++b) {
    const std::size_t idx = full_batch ? b : order_[b];
    run_forward(spec_, weights, data_.features[idx], f);
    total += sample_loss(spec_, f, data_.labels[idx], &dout);
    backprop(spec_, weights, f, dout, grad);
  }
  const double count = static_cast<double>(end - begin);
  for (double &gi : grad)
    gi /= count;
  return total / count;
}

double dataset_loss(const MlpSpec &spec, const std::vector<double> &weights,
                    const Dataset &data) {
  spec.validate();
  check_weights(spec, weights);
  check_dataset(spec, data);
  Forward f;
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    run_forward(spec, weights, data.features[i], f);
    total += sample_loss(spec, f, data.labels[i], nullptr);
  }
  return total / static_cast<double>(data.size());
}

double accuracy(const MlpSpec &spec, const std::vector<double> &weights,
                const Dataset &data) {
  spec.validate();
  check_weights(spec, weights);
  check_dataset(spec, data);
  Forward f;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    run_forward(spec, weights, data.features[i], f);
    const auto &out = f.acts.back();
    std::size_t best = 0;
    for (std::size_t j = 1; j < out.size(); ++j)
      if (out[j] > out[best])
        best = j;
    if (static_cast<int>(best) == data.labels[i])
      ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

} // namespace decgd::mlp
