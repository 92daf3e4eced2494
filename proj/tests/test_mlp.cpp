#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ndpc/adam.hpp"
#include "ndpc/mlp.hpp"
#include "ndpc/numeric.hpp"

using namespace ndpc;

namespace {

double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-300});
}

}  // namespace

TEST_CASE("activation parsing") {
  CHECK(Activation::parse("sin") == Activation::sinusoidal());
  CHECK(Activation::parse("leaky_relu").kind == ActivationKind::LeakyRelu);
  CHECK(Activation::parse("leaky_relu").slope == 0.01);
  CHECK(Activation::leaky_relu().name() == "leaky_relu");
  CHECK_THROWS_AS(Activation::parse("tanh"), std::invalid_argument);
  CHECK_THROWS_AS(Activation::leaky_relu(1.5), std::invalid_argument);
}

TEST_CASE("init_mlp") {
  const std::vector<int> dims{3, 128, 128, 128, 2};
  RngStream r1(7, streams::kEncoderInit), r2(7, streams::kEncoderInit);
  const auto p = init_mlp(dims, Activation::sinusoidal(), r1);
  CHECK(p.layers.size() == 4);
  std::size_t want = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) want += static_cast<std::size_t>(dims[l] * dims[l + 1] + dims[l + 1]);
  CHECK(want == 33794);
  CHECK(p.parameter_count() == want);
  CHECK(p.dims() == dims);
  for (const auto& layer : p.layers) CHECK(layer.bias.isZero());
  const auto q = init_mlp(dims, Activation::sinusoidal(), r2);
  CHECK(p.flatten() == q.flatten());

  // Glorot bound, first layer scaled by omega0 for sinusoidal networks.
  RngStream r3(8, 0), r4(8, 0);
  const auto wide = init_mlp(dims, Activation::sinusoidal(), r3, 30.0);
  const auto relu = init_mlp(dims, Activation::leaky_relu(), r4, 30.0);
  const double b0 = std::sqrt(6.0 / (3 + 128)), b1 = std::sqrt(6.0 / (128 + 128));
  CHECK(wide.layers[0].weight.cwiseAbs().maxCoeff() <= 30.0 * b0);
  CHECK(wide.layers[0].weight.cwiseAbs().maxCoeff() > b0);
  CHECK(relu.layers[0].weight.cwiseAbs().maxCoeff() <= b0);
  CHECK(wide.layers[1].weight.cwiseAbs().maxCoeff() <= b1);

  CHECK_THROWS_AS(init_mlp(std::vector<int>{}, Activation::sinusoidal(), r1), std::invalid_argument);
  CHECK_THROWS_AS(init_mlp(std::vector<int>{3}, Activation::sinusoidal(), r1), std::invalid_argument);
}

TEST_CASE("flatten / assign round trip") {
  RngStream r(9, 0);
  auto p = init_mlp(std::vector<int>{2, 5, 3}, Activation::leaky_relu(), r);
  auto flat = p.flatten();
  CHECK(flat.size() == p.parameter_count());
  CHECK(flat[0] == p.layers[0].weight(0, 0));
  CHECK(flat[1] == p.layers[0].weight(0, 1));  // row-major
  CHECK(flat[10] == p.layers[0].bias(0));
  for (auto& v : flat) v *= 2.0;
  p.assign(flat);
  CHECK(p.flatten() == flat);
  flat.pop_back();
  CHECK_THROWS_AS(p.assign(flat), std::invalid_argument);
}

TEST_CASE("mlp_forward") {
  RngStream r(10, 0);
  auto p = init_mlp(std::vector<int>{3, 8, 8, 2}, Activation::sinusoidal(), r);
  Eigen::VectorXd in(3);
  in << 0.1, -2.0, 5.0;
  CHECK(mlp_forward(p, in) == mlp_forward(p, in));
  for (auto& l : p.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  CHECK(mlp_forward(p, in).isZero());
  CHECK_THROWS_AS(mlp_forward(p, Eigen::VectorXd(2)), std::invalid_argument);

  // One hidden unit per input with identity weights: sin(pi/2) = 1.
  MlpParams id;
  id.hidden = Activation::sinusoidal();
  id.layers.push_back({Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)});
  id.layers.push_back({Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)});
  Eigen::VectorXd half_pi = Eigen::VectorXd::Constant(2, std::numbers::pi / 2);
  CHECK((mlp_forward(id, half_pi) - Eigen::VectorXd::Ones(2)).norm() < 1e-15);

  id.hidden = Activation::leaky_relu(0.1);
  Eigen::VectorXd mixed(2);
  mixed << 2.0, -3.0;
  const auto out = mlp_forward(id, mixed);
  CHECK(out(0) == 2.0);
  CHECK(out(1) == doctest::Approx(-0.3));

  // Batched and single-example paths agree.
  RngStream r2(11, 0);
  const auto q = init_mlp(std::vector<int>{3, 16, 2}, Activation::sinusoidal(), r2);
  Eigen::MatrixXd batch = Eigen::MatrixXd::Random(3, 5);
  const Eigen::MatrixXd bo = mlp_forward(q, batch);
  for (int j = 0; j < 5; ++j) CHECK((bo.col(j) - mlp_forward(q, Eigen::VectorXd(batch.col(j)))).norm() < 1e-12);
}

TEST_CASE("mlp_backward matches finite differences") {
  for (auto act : {Activation::sinusoidal(), Activation::leaky_relu(0.2)}) {
    RngStream r(12, static_cast<std::uint64_t>(act.kind));
    auto p = init_mlp(std::vector<int>{3, 6, 5, 2}, act, r);
    for (auto& l : p.layers) l.bias.setRandom();
    const Eigen::MatrixXd in = Eigen::MatrixXd::Random(3, 4);
    const Eigen::MatrixXd target = Eigen::MatrixXd::Random(2, 4);
    auto loss = [&](const MlpParams& q, const Eigen::MatrixXd& x) { return 0.5 * (mlp_forward(q, x) - target).squaredNorm(); };

    MlpCache cache;
    const Eigen::MatrixXd out = mlp_forward(p, in, &cache);
    MlpGrads g;
    const Eigen::MatrixXd gin = mlp_backward(p, cache, out - target, g);

    const auto theta = p.flatten();
    const auto fd = finite_diff_grad(
        [&](std::span<const double> t) {
          MlpParams q = p;
          q.assign(t);
          return loss(q, in);
        },
        theta, 1e-6);
    CHECK(rel_error(flatten(g), fd) < 1e-6);

    std::vector<double> x0(in.data(), in.data() + in.size());
    const auto fdx = finite_diff_grad(
        [&](std::span<const double> t) { return loss(p, Eigen::Map<const Eigen::MatrixXd>(t.data(), 3, 4)); }, x0, 1e-6);
    CHECK(rel_error(std::vector<double>(gin.data(), gin.data() + gin.size()), fdx) < 1e-6);
  }
}

TEST_CASE("adam_step") {
  RngStream r(13, 0);
  auto p = init_mlp(std::vector<int>{2, 4, 1}, Activation::sinusoidal(), r);
  const auto before = p.flatten();
  AdamState s = AdamState::for_params(p, {1e-3});
  adam_step(p, zeros_like(p), s);
  CHECK(p.flatten() == before);
  CHECK(s.step == 1);

  // Constant gradient: each step moves by lr * sign(g) once the moments settle.
  auto g = zeros_like(p);
  g[0].weight.setConstant(0.37);
  g[0].bias.setConstant(-2.5);
  g[1].weight.setConstant(1e-3);
  g[1].bias.setConstant(4.0);
  AdamState s2 = AdamState::for_params(p, {1e-3});
  std::vector<double> prev = p.flatten();
  for (int i = 0; i < 200; ++i) {
    prev = p.flatten();
    adam_step(p, g, s2);
  }
  const auto now = p.flatten();
  const auto gf = flatten(g);
  for (std::size_t i = 0; i < now.size(); ++i)
    CHECK(now[i] - prev[i] == doctest::Approx(-1e-3 * (gf[i] > 0 ? 1 : -1)).epsilon(1e-4));

  // Identical runs give identical trajectories.
  RngStream ra(14, 0), rb(14, 0);
  auto pa = init_mlp(std::vector<int>{2, 4, 1}, Activation::sinusoidal(), ra);
  auto pb = init_mlp(std::vector<int>{2, 4, 1}, Activation::sinusoidal(), rb);
  AdamState sa = AdamState::for_params(pa), sb = AdamState::for_params(pb);
  for (int i = 0; i < 10; ++i) {
    adam_step(pa, g, sa);
    adam_step(pb, g, sb);
  }
  CHECK(pa.flatten() == pb.flatten());

  auto wrong = zeros_like(init_mlp(std::vector<int>{2, 3, 1}, Activation::sinusoidal(), r));
  CHECK_THROWS_AS(adam_step(p, wrong, s), std::invalid_argument);
}
