#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "decgd/mlp.hpp"
#include "decgd/optimizer.hpp"
#include "decgd/problems.hpp"

using namespace decgd::mlp;

namespace {

MlpSpec tiny_spec(std::vector<std::size_t> sizes,
                  Activation act = Activation::Tanh,
                  LossKind loss = LossKind::SoftmaxCrossEntropy) {
  MlpSpec spec;
  spec.layer_sizes = std::move(sizes);
  spec.activation = act;
  spec.loss = loss;
  return spec;
}

Dataset fd_fixture_data() {
  Dataset data;
  std::mt19937_64 rng(123);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    data.features.push_back({gauss(rng), gauss(rng)});
    data.labels.push_back(i % 3);
  }
  data.batch_size = data.size();
  return data;
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string &name, const std::string &content)
      : path(std::filesystem::temp_directory_path() / name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.string().c_str()); }
};

} // namespace

TEST_CASE("parameter counting and validation") {
  CHECK(tiny_spec({2, 16, 3}).param_count() == 99);
  CHECK(tiny_spec({1, 1}).param_count() == 2);
  CHECK(tiny_spec({4, 8, 8, 2}).param_count() ==
        4 * 8 + 8 + 8 * 8 + 8 + 8 * 2 + 2);

  CHECK_THROWS_AS(tiny_spec({5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(tiny_spec({2, 0, 3}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(tiny_spec({}).param_count(), std::invalid_argument);
}

TEST_CASE("zero weights under cross-entropy give exactly ln(k)") {
  const auto spec = tiny_spec({2, 3});
  std::vector<double> w(spec.param_count(), 0.0);
  Dataset data;
  data.features = {{1.0, -2.0}, {0.5, 3.0}};
  data.labels = {0, 2};
  data.batch_size = 2;
  CHECK(dataset_loss(spec, w, data) == std::log(3.0));
}

TEST_CASE("single linear unit realizes the scalar regression loss w^2/2") {
  // One weight w, zero bias, input 1, target 0: loss = w^2 / 2, d/dw = w.
  const auto spec = tiny_spec({1, 1}, Activation::Tanh, LossKind::MSE);
  Dataset data;
  data.features = {{1.0}};
  data.labels = {0};
  data.batch_size = 1;
  MlpOracle oracle(spec, data);

  std::vector<double> grad;
  const double w = 0.7;
  CHECK(oracle.evaluate({w, 0.0}, grad) == 0.5 * w * w);
  CHECK(grad == std::vector<double>{0.7, 0.7}); // d/dw = w, d/db = w too
}

TEST_CASE("piecewise-linear activation: hand-computed gradient, both branches") {
  // 1-1-1 net, weights [W1=2, b1=0.5, W2=2, b2=-4].
  // x=+1: z1=2.5 active, out=1, dout=1 -> grads (2, 2, 2.5, 1)
  // x=-1: z1=-1.5 clipped, out=-4, dout=-4 -> grads (0, 0, 0, -4)
  const auto spec = tiny_spec({1, 1, 1}, Activation::ReLU, LossKind::MSE);
  Dataset data;
  data.features = {{1.0}, {-1.0}};
  data.labels = {0, 0};
  data.batch_size = 2;
  MlpOracle oracle(spec, data);

  std::vector<double> grad;
  const double loss = oracle.evaluate({2.0, 0.5, 2.0, -4.0}, grad);
  CHECK(loss == (0.5 * 1.0 + 0.5 * 16.0) / 2.0);
  CHECK(grad == std::vector<double>{1.0, 1.0, 1.25, -1.5});
}

TEST_CASE("full-batch evaluation is deterministic and order-blind") {
  const auto spec = tiny_spec({2, 4, 2});
  auto w = spec.init_weights();
  Dataset data = make_two_gaussians(10, 3.0, 1);
  data.batch_size = data.size();

  data.shuffle_seed = 0;
  MlpOracle a(spec, data);
  data.shuffle_seed = 999; // must not matter in full batch
  MlpOracle b(spec, data);

  std::vector<double> ga, gb;
  const double la = a.evaluate(w, ga);
  const double lb = b.evaluate(w, gb);
  CHECK(la == lb);
  CHECK(ga == gb);
  const double la2 = a.evaluate(w, ga);
  CHECK(la2 == la);
}

TEST_CASE("minibatch cursor is seeded and reproducible") {
  const auto spec = tiny_spec({2, 3, 2});
  auto w = spec.init_weights();
  Dataset data = make_two_gaussians(5, 3.0, 7); // n = 10
  data.batch_size = 4;
  data.shuffle_seed = 3;

  MlpOracle a(spec, data), b(spec, data);
  CHECK(a.batches_per_epoch() == 3); // 4 + 4 + 2
  std::vector<double> ga, gb;
  for (int i = 0; i < 7; ++i) { // crosses two epoch boundaries
    const double la = a.evaluate(w, ga);
    const double lb = b.evaluate(w, gb);
    CHECK(la == lb);
    CHECK(ga == gb);
  }
}

TEST_CASE("backprop agrees with central differences on a small classifier") {
  MlpSpec spec = tiny_spec({2, 16, 3});
  spec.init_seed = 7;
  MlpOracle oracle(spec, fd_fixture_data());
  CHECK(decgd::problems::finite_diff_check(oracle, spec.init_weights(),
                                           1e-5) <= 1e-4);
}

TEST_CASE("argmax accuracy with constructed weights") {
  // Linear 1 -> 2 net, logits (x, -x): class 0 iff x > 0, ties to class 0.
  const auto spec = tiny_spec({1, 2});
  const std::vector<double> w = {1.0, -1.0, 0.0, 0.0};
  Dataset data;
  data.features = {{1.0}, {2.0}, {-1.0}, {-2.0}};
  data.labels = {0, 0, 1, 1};
  CHECK(accuracy(spec, w, data) == 1.0);

  const std::vector<double> zeros(4, 0.0);
  CHECK(accuracy(spec, zeros, data) == 0.5); // all ties -> class 0
}

TEST_CASE("dataset validation") {
  const auto spec = tiny_spec({2, 3, 2});
  const auto w = spec.init_weights();

  Dataset empty;
  CHECK_THROWS_AS(accuracy(spec, w, empty), std::invalid_argument);
  CHECK_THROWS_AS(dataset_loss(spec, w, empty), std::invalid_argument);
  CHECK_THROWS_AS(MlpOracle(spec, empty), std::invalid_argument);

  Dataset bad_label = make_two_gaussians(3, 2.0, 1);
  bad_label.labels[0] = 2; // network has 2 outputs
  CHECK_THROWS_AS(MlpOracle(spec, bad_label), std::invalid_argument);
  bad_label.labels[0] = -1;
  CHECK_THROWS_AS(MlpOracle(spec, bad_label), std::invalid_argument);

  Dataset bad_dim = make_two_gaussians(3, 2.0, 1);
  bad_dim.features[2] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(MlpOracle(spec, bad_dim), std::invalid_argument);

  Dataset bad_batch = make_two_gaussians(3, 2.0, 1); // n = 6
  bad_batch.batch_size = 0;
  CHECK_THROWS_AS(MlpOracle(spec, bad_batch), std::invalid_argument);
  bad_batch.batch_size = 7;
  CHECK_THROWS_AS(MlpOracle(spec, bad_batch), std::invalid_argument);

  MlpOracle oracle(spec, make_two_gaussians(3, 2.0, 1));
  std::vector<double> grad;
  CHECK_THROWS_AS(oracle.evaluate({1.0, 2.0}, grad), std::invalid_argument);
}

TEST_CASE("weight initialization is seeded, bounded, with zero biases") {
  MlpSpec spec = tiny_spec({3, 5, 2});
  spec.init_seed = 17;
  const auto w1 = spec.init_weights();
  const auto w2 = spec.init_weights();
  CHECK(w1 == w2);

  spec.init_seed = 18;
  CHECK(spec.init_weights() != w1);

  const double r1 = std::sqrt(6.0 / 8.0), r2 = std::sqrt(6.0 / 7.0);
  for (std::size_t i = 0; i < 15; ++i)
    CHECK(std::abs(w1[i]) <= r1);
  for (std::size_t i = 15; i < 20; ++i)
    CHECK(w1[i] == 0.0); // first bias block
  for (std::size_t i = 20; i < 30; ++i)
    CHECK(std::abs(w1[i]) <= r2);
  for (std::size_t i = 30; i < 32; ++i)
    CHECK(w1[i] == 0.0);
}

TEST_CASE("synthetic blob generator") {
  const auto a = make_two_gaussians(100, 4.0, 42);
  CHECK(a.size() == 200);
  for (std::size_t i = 0; i < 100; ++i)
    CHECK(a.labels[i] == 0);
  for (std::size_t i = 100; i < 200; ++i)
    CHECK(a.labels[i] == 1);

  const auto b = make_two_gaussians(100, 4.0, 42);
  CHECK(a.features == b.features);

  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    m0 += a.features[i][0];
    m1 += a.features[i + 100][0];
  }
  CHECK(std::abs(m0 / 100.0 + 2.0) < 0.5); // class 0 near -separation/2
  CHECK(std::abs(m1 / 100.0 - 2.0) < 0.5);

  CHECK_THROWS_AS(make_two_gaussians(0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("dataset files round-trip and errors carry line numbers") {
  SUBCASE("round trip") {
    TempFile f("decgd_mlp_ok.csv", "label,f0,f1\n0,1.5,-2\n1,0.25,3.5\n");
    const auto data = load_csv_dataset(f.path.string());
    REQUIRE(data.size() == 2);
    CHECK(data.labels == std::vector<int>{0, 1});
    CHECK(data.features[0] == std::vector<double>{1.5, -2.0});
    CHECK(data.features[1] == std::vector<double>{0.25, 3.5});
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_csv_dataset("/nonexistent/nowhere.csv"),
                    std::runtime_error);
  }
  SUBCASE("bad header") {
    TempFile f("decgd_mlp_hdr.csv", "id,f0\n0,1\n");
    CHECK_THROWS_WITH_AS(load_csv_dataset(f.path.string()),
                         doctest::Contains("line 1"), std::runtime_error);
  }
  SUBCASE("bad label points at its line") {
    TempFile f("decgd_mlp_lbl.csv", "label,f0\n0,1\nx,2\n");
    CHECK_THROWS_WITH_AS(load_csv_dataset(f.path.string()),
                         doctest::Contains("line 3"), std::runtime_error);
  }
  SUBCASE("negative label") {
    TempFile f("decgd_mlp_neg.csv", "label,f0\n-1,1\n");
    CHECK_THROWS_WITH_AS(load_csv_dataset(f.path.string()),
                         doctest::Contains("line 2"), std::runtime_error);
  }
  SUBCASE("bad feature value") {
    TempFile f("decgd_mlp_feat.csv", "label,f0,f1\n0,1,zap\n");
    CHECK_THROWS_WITH_AS(load_csv_dataset(f.path.string()),
                         doctest::Contains("bad feature value"),
                         std::runtime_error);
  }
  SUBCASE("wrong feature count") {
    TempFile f("decgd_mlp_cnt.csv", "label,f0,f1\n0,1\n");
    CHECK_THROWS_WITH_AS(load_csv_dataset(f.path.string()),
                         doctest::Contains("expected 2 features"),
                         std::runtime_error);
  }
  SUBCASE("no data rows") {
    TempFile f("decgd_mlp_empty.csv", "label,f0\n");
    CHECK_THROWS_WITH_AS(load_csv_dataset(f.path.string()),
                         doctest::Contains("no data rows"),
                         std::runtime_error);
  }
}

TEST_CASE("a small classifier trains to high accuracy on separable blobs") {
  MlpSpec spec = tiny_spec({2, 16, 2});
  spec.init_seed = 1;
  Dataset train = make_two_gaussians(100, 4.0, 42);
  train.batch_size = 32;
  train.shuffle_seed = 11;
  Dataset test = make_two_gaussians(100, 4.0, 43);

  MlpOracle oracle(spec, train);
  decgd::DecGd opt((decgd::Hyperparams()));
  auto w = spec.init_weights();
  std::vector<double> grad;
  double loss = oracle.evaluate(w, grad);
  opt.reset(w, loss);
  for (int t = 0; t < 500; ++t) {
    w = opt.step(w, loss, grad);
    loss = oracle.evaluate(w, grad);
  }
  CHECK(accuracy(spec, w, test) >= 0.95);
}
