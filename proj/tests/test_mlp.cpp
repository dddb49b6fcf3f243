#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vigil/mlp.hpp"
#include "vigil/rng.hpp"

using vigil::MLPModel;
using vigil::MlpParams;
using vigil::Rng;
using vigil::VigilanceState;

namespace {

constexpr auto P = VigilanceState::Paradoxical;
constexpr auto S = VigilanceState::SlowWave;
constexpr auto W = VigilanceState::Wake;

MLPModel random_model(int input_dim, int hidden_dim, Rng& rng, double scale = 0.5) {
  MLPModel model;
  model.input_dim = input_dim;
  model.hidden_dim = hidden_dim;
  model.w1.resize(static_cast<std::size_t>(input_dim) * hidden_dim);
  model.b1.resize(static_cast<std::size_t>(hidden_dim));
  model.w2.resize(static_cast<std::size_t>(hidden_dim) * 3);
  model.b2.resize(3);
  for (double& v : model.w1) v = scale * rng.normal();
  for (double& v : model.b1) v = scale * rng.normal();
  for (double& v : model.w2) v = scale * rng.normal();
  for (double& v : model.b2) v = scale * rng.normal();
  return model;
}

}  // namespace

TEST_CASE("all-zero network outputs the uniform distribution", "[mlp]") {
  MLPModel model;
  model.input_dim = 4;
  model.hidden_dim = 3;
  model.w1.assign(12, 0.0);
  model.b1.assign(3, 0.0);
  model.w2.assign(9, 0.0);
  model.b2.assign(3, 0.0);
  std::vector<double> x = {1.0, -2.0, 3.0, 0.5};
  const auto fwd = vigil::mlp_forward(model, x, 1);
  for (int c = 0; c < 3; ++c) {
    REQUIRE(fwd.probs[static_cast<std::size_t>(c)] ==
            Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("softmax is shift invariant", "[mlp][property]") {
  // Shifting all logits by a constant is the same as shifting both biases and
  // no weights; probabilities must not move.
  Rng rng(3);
  MLPModel model = random_model(3, 4, rng);
  std::vector<double> x = {0.3, -1.2, 0.7};
  const auto base = vigil::mlp_forward(model, x, 1);
  for (double shift : {5.0, -17.0, 123.456}) {
    MLPModel shifted = model;
    for (double& b : shifted.b2) b += shift;
    const auto moved = vigil::mlp_forward(shifted, x, 1);
    for (int c = 0; c < 3; ++c) {
      REQUIRE(moved.probs[static_cast<std::size_t>(c)] ==
              Catch::Approx(base.probs[static_cast<std::size_t>(c)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward pass invariants on random models", "[mlp][property]") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    MLPModel model = random_model(6, 5, rng);
    std::vector<double> x(6);
    for (double& v : x) v = 2.0 * rng.normal();
    const auto fwd = vigil::mlp_forward(model, x, 1);
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
      REQUIRE(fwd.probs[static_cast<std::size_t>(c)] >= 0.0);
      sum += fwd.probs[static_cast<std::size_t>(c)];
    }
    REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-9));
    for (double h : fwd.hidden) REQUIRE(h >= 0.0);
  }
}

TEST_CASE("backward pass matches central finite differences on a 4-3-3 net",
          "[mlp][oracle]") {
  Rng rng(2718);
  MLPModel model = random_model(4, 3, rng);
  const std::size_t n = 2;
  std::vector<double> x(n * 4);
  for (double& v : x) v = rng.normal();
  std::vector<VigilanceState> y = {S, W};

  const auto fwd = vigil::mlp_forward(model, x, n);
  const auto grads = vigil::mlp_backward(model, x, n, fwd, y);

  const double step = 1e-5;
  auto loss_of = [&](const MLPModel& m) {
    return vigil::mlp_loss(vigil::mlp_forward(m, x, n), y);
  };
  auto check = [&](std::vector<double> MLPModel::* field, const std::vector<double>& analytic) {
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      MLPModel plus = model, minus = model;
      (plus.*field)[i] += step;
      (minus.*field)[i] -= step;
      const double fd = (loss_of(plus) - loss_of(minus)) / (2.0 * step);
      const double denom = std::max({std::fabs(fd), std::fabs(analytic[i]), 1e-8});
      REQUIRE(std::fabs(fd - analytic[i]) / denom < 1e-6);
    }
  };
  check(&MLPModel::w1, grads.w1);
  check(&MLPModel::b1, grads.b1);
  check(&MLPModel::w2, grads.w2);
  check(&MLPModel::b2, grads.b2);
}

TEST_CASE("duplicated sample leaves the mean gradient unchanged", "[mlp]") {
  Rng rng(11);
  MLPModel model = random_model(3, 4, rng);
  std::vector<double> one = {0.5, -0.25, 1.5};
  std::vector<double> two = {0.5, -0.25, 1.5, 0.5, -0.25, 1.5};
  std::vector<VigilanceState> y1 = {S}, y2 = {S, S};

  const auto g1 = vigil::mlp_backward(model, one, 1, vigil::mlp_forward(model, one, 1), y1);
  const auto g2 = vigil::mlp_backward(model, two, 2, vigil::mlp_forward(model, two, 2), y2);
  for (std::size_t i = 0; i < g1.w1.size(); ++i) {
    REQUIRE(g2.w1[i] == Catch::Approx(g1.w1[i]).margin(1e-15));
  }
  for (std::size_t i = 0; i < g1.b2.size(); ++i) {
    REQUIRE(g2.b2[i] == Catch::Approx(g1.b2[i]).margin(1e-15));
  }
}

TEST_CASE("saturated correct prediction has near-zero output gradient", "[mlp]") {
  MLPModel model;
  model.input_dim = 2;
  model.hidden_dim = 2;
  model.w1 = {10.0, 0.0, 0.0, 10.0};
  model.b1 = {0.0, 0.0};
  model.w2 = {60.0, -30.0, -30.0, -30.0, 60.0, -30.0};
  model.b2 = {0.0, 0.0, 0.0};
  std::vector<double> x = {1.0, 0.0};  // hidden (10, 0) -> logits (600, -300, -300)
  std::vector<VigilanceState> y = {P};
  const auto fwd = vigil::mlp_forward(model, x, 1);
  REQUIRE(fwd.probs[0] > 0.999999);
  const auto grads = vigil::mlp_backward(model, x, 1, fwd, y);
  for (double g : grads.w2) REQUIRE(std::fabs(g) < 1e-9);
  for (double g : grads.b2) REQUIRE(std::fabs(g) < 1e-9);
}

TEST_CASE("fit_mlp is deterministic and honors the epoch budget", "[mlp]") {
  Rng rng(500);
  const std::size_t n = 120, dim = 6;
  std::vector<double> x_train(n * dim), x_val(30 * dim);
  std::vector<VigilanceState> y_train(n), y_val(30);
  auto fill = [&rng](std::vector<double>& x, std::vector<VigilanceState>& y, std::size_t count,
                     std::size_t d) {
    for (std::size_t i = 0; i < count; ++i) {
      const int c = static_cast<int>(i % 3);
      y[i] = vigil::state_from_index(c);
      for (std::size_t f = 0; f < d; ++f) {
        x[i * d + f] = rng.normal() + 2.0 * static_cast<double>(c == static_cast<int>(f % 3));
      }
    }
  };
  fill(x_train, y_train, n, dim);
  fill(x_val, y_val, 30, dim);

  MlpParams params;
  params.hidden_units = 8;
  params.epochs = 7;
  params.batch_size = 16;
  params.seed = 99;

  const auto a = vigil::fit_mlp(x_train, y_train, x_val, y_val, dim, params);
  const auto b = vigil::fit_mlp(x_train, y_train, x_val, y_val, dim, params);
  REQUIRE(a.history.size() == 7);
  REQUIRE(a.model.w1 == b.model.w1);
  REQUIRE(a.model.b2 == b.model.b2);
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    REQUIRE(a.history[e].epoch == static_cast<int>(e) + 1);
    REQUIRE(a.history[e].train_loss == b.history[e].train_loss);
    REQUIRE(a.history[e].val_accuracy == b.history[e].val_accuracy);
  }

  SECTION("zero epochs returns the initialized model and empty history") {
    MlpParams zero = params;
    zero.epochs = 0;
    const auto result = vigil::fit_mlp(x_train, y_train, x_val, y_val, dim, zero);
    REQUIRE(result.history.empty());
    REQUIRE(result.model.w1.size() == dim * 8);
    for (double w : result.model.w1) REQUIRE(std::isfinite(w));
  }
}
