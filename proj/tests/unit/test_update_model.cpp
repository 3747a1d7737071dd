#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>

#include "mggo/traffic.hpp"
#include "mggo/update_model.hpp"
#include "test_support.hpp"

using namespace mggo;

namespace {

// Reference forward pass: im2col + matrix product per layer.
Tensor reference_forward(const ModelTopology& t, const std::vector<double>& p, const Tensor& x0) {
  const int h = x0.height(), w = x0.width(), hw = h * w;
  Eigen::MatrixXd x(x0.channels(), hw);
  for (int c = 0; c < x0.channels(); ++c)
    for (int cell = 0; cell < hw; ++cell) x(c, cell) = x0.at(cell, c);
  std::size_t off = 0;
  const int ins[3] = {t.input_depth, t.hidden, t.hidden};
  const int outs[3] = {t.hidden, t.hidden, t.output_depth};
  const int ks[3] = {3, 1, 1};
  for (int l = 0; l < 3; ++l) {
    const int in = ins[l], out = outs[l], k = ks[l], r0 = k / 2;
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(in * k * k, hw);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        for (int i = 0; i < in; ++i)
          for (int kh = 0; kh < k; ++kh)
            for (int kw = 0; kw < k; ++kw) {
              const int rr = r + kh - r0, cc = c + kw - r0;
              if (rr >= 0 && rr < h && cc >= 0 && cc < w) cols((i * k + kh) * k + kw, r * w + c) = x(i, rr * w + cc);
            }
    Eigen::MatrixXd wm(out, in * k * k);
    for (int o = 0; o < out; ++o)
      for (int j = 0; j < in * k * k; ++j) wm(o, j) = p[off++];
    Eigen::VectorXd bias(out), scale(out), shift(out);
    for (int o = 0; o < out; ++o) bias[o] = p[off++];
    for (int o = 0; o < out; ++o) scale[o] = p[off++];
    for (int o = 0; o < out; ++o) shift[o] = p[off++];
    Eigen::MatrixXd y = ((wm * cols).colwise() + bias).cwiseMax(0.0);
    for (int o = 0; o < out; ++o) {
      const double mean = y.row(o).mean();
      const double var = (y.row(o).array() - mean).square().mean();
      y.row(o) = ((y.row(o).array() - mean) * (scale[o] / std::sqrt(var + kNormEpsilon)) + shift[o]).matrix();
    }
    x = y;
  }
  REQUIRE(off == p.size());
  Tensor out(h, w, t.output_depth);
  for (int c = 0; c < t.output_depth; ++c)
    for (int cell = 0; cell < hw; ++cell) out.at(cell, c) = x(c, cell);
  return out;
}

std::vector<double> random_params(int n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 0.5);
  std::vector<double> p(static_cast<std::size_t>(n));
  for (double& v : p) v = nd(rng);
  return p;
}

Tensor random_input(int h, int w, int c, Rng& rng) {
  Tensor t(h, w, c);
  for (double& v : t.values()) v = uniform_unit(rng);
  return t;
}

}  // namespace

TEST_CASE("topology sizes") {
  const ModelTopology joint = ModelTopology::for_observations(2, kJointOutputDepth);
  CHECK(joint.input_depth == 46);
  CHECK(joint.output_depth == 11);
  // (8*46*9 + 24) + (8*8 + 24) + (11*8 + 33)
  CHECK(joint.param_count() == 3336 + 88 + 121);
  const ModelTopology pu = ModelTopology::for_observations(2, kWeightOnlyOutputDepth);
  CHECK(pu.output_depth == 5);
  CHECK(pu.param_count() == 3479);
  CHECK(ModelTopology::for_observations(1, 11).input_depth == 32);
  CHECK(ModelTopology::from_json(joint.to_json()) == joint);
  CHECK_THROWS_AS(ModelTopology::for_observations(0, 11), Error);
}

TEST_CASE("forward matches the im2col reference") {
  Rng rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    const ModelTopology t{5 + trial, 8, trial % 2 ? 11 : 5};
    const auto p = random_params(t.param_count(), rng);
    const Tensor x = random_input(3 + trial, 4 + trial % 3, t.input_depth, rng);
    const Tensor y = forward(t, p, x);
    const Tensor ref = reference_forward(t, p, x);
    REQUIRE(y.channels() == t.output_depth);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.values()[i] == doctest::Approx(ref.values()[i]).epsilon(1e-9));
  }
}

TEST_CASE("spatial normalization centres each channel on its shift") {
  Rng rng(7);
  const ModelTopology t{3, 8, 4};
  auto p = random_params(t.param_count(), rng);
  // Last layer: unit scale, shift 2.
  const std::size_t tail = p.size() - 3 * 4;
  for (int o = 0; o < 4; ++o) {
    p[tail + 4 + static_cast<std::size_t>(o)] = 1.0;
    p[tail + 8 + static_cast<std::size_t>(o)] = 2.0;
  }
  const Tensor y = forward(t, p, random_input(6, 6, 3, rng));
  for (int o = 0; o < 4; ++o) {
    double m = 0;
    for (int c = 0; c < 36; ++c) m += y.at(c, o);
    CHECK(m / 36 == doctest::Approx(2.0));
  }
}

TEST_CASE("forward rejects bad shapes and values") {
  const ModelTopology t{3, 8, 5};
  std::vector<double> p(static_cast<std::size_t>(t.param_count()), 0.1);
  CHECK_THROWS_AS(forward(t, std::span(p).first(10), Tensor(2, 2, 3)), Error);
  CHECK_THROWS_AS(forward(t, p, Tensor(2, 2, 4)), Error);
  Tensor bad(2, 2, 3);
  bad.at(0, 0) = std::nan("");
  CHECK_THROWS_AS(forward(t, p, bad), Error);
  p[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(forward(t, p, Tensor(2, 2, 3)), Error);
}

TEST_CASE("traffic patterns and input assembly") {
  auto base = test::open_grid(5, 5);
  TrafficConfig cfg;
  cfg.num_observations = 2;
  cfg.num_agents = 4;
  cfg.horizon = 50;
  cfg.seed = 1;
  const TrafficPatterns tp = collect_traffic_patterns(base, cfg);
  CHECK(tp.num_observations() == 2);
  CHECK(tp.input_depth() == 46);
  for (const auto& t : tp.unweighted_traffic) CHECK(t.sum() == doctest::Approx(1.0));
  for (const auto& t : tp.crisscross_traffic) CHECK(t.sum() == doctest::Approx(1.0));
  CHECK(TrafficPatterns::from_json(nlohmann::json::parse(tp.to_json().dump())) == tp);
  CHECK(tp == collect_traffic_patterns(base, cfg));

  const Tensor in = assemble_input(tp);
  CHECK(in.channels() == 46);
  CHECK(input_channel_names(2).size() == 46);
  CHECK(in.slice_channels(0, 7) == tp.unweighted_traffic[0]);
  CHECK(in.slice_channels(14, 7) == tp.crisscross_traffic[0]);
  CHECK(in.slice_channels(28, 5) == tp.unweighted_graph.weights.data);
  CHECK(in.slice_channels(33, 4) == tp.unweighted_graph.dirs.data);
  CHECK(in.slice_channels(37, 5) == tp.crisscross_graph.weights.data);
}

TEST_CASE("decode_output picks the decoder by depth") {
  Rng rng(3);
  auto base = test::open_grid(4, 4);
  const Tensor joint = random_input(4, 4, 11, rng);
  MixedGuidanceGraph a = decode_output(base, joint);
  a.validate();
  CHECK(a.unidirectional_ratio() > 0.0);
  const Tensor weights = random_input(4, 4, 5, rng);
  MixedGuidanceGraph b = decode_output(base, weights);
  CHECK(b.unidirectional_ratio() == 0.0);
  CHECK_THROWS_AS(decode_output(base, random_input(4, 4, 7, rng)), Error);
}

TEST_CASE("parameter files round trip") {
  Rng rng(5);
  const ModelTopology t = ModelTopology::for_observations(2, 5);
  const auto p = random_params(t.param_count(), rng);
  const auto path = std::filesystem::temp_directory_path() / "mggo_params_test.bin";
  save_params(path, p);
  CHECK(load_params(path, t) == p);
  CHECK(std::filesystem::file_size(path) == p.size() * sizeof(double));
  CHECK_THROWS_AS(load_params(path, ModelTopology::for_observations(2, 11)), Error);
  std::filesystem::remove(path);
}
