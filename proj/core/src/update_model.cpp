#include "mggo/update_model.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>

namespace mggo {

using nlohmann::json;

namespace {

struct Layer {
  int in;
  int out;
  int kernel;
};

std::array<Layer, 3> layers(const ModelTopology& t) {
  return {{{t.input_depth, t.hidden, 3}, {t.hidden, t.hidden, 1}, {t.hidden, t.output_depth, 1}}};
}

int layer_params(const Layer& l) { return l.out * l.in * l.kernel * l.kernel + 3 * l.out; }

/// conv -> ReLU -> spatial norm; `p` is advanced past this layer's parameters.
Tensor apply_layer(const Layer& l, const double*& p, const Tensor& x) {
  const int h = x.height();
  const int w = x.width();
  const double* weights = p;
  const double* bias = weights + l.out * l.in * l.kernel * l.kernel;
  const double* scale = bias + l.out;
  const double* shift = scale + l.out;
  p = shift + l.out;

  const int r0 = l.kernel / 2;
  Tensor y(h, w, l.out);
  for (int o = 0; o < l.out; ++o) {
    const double* wo = weights + static_cast<std::ptrdiff_t>(o) * l.in * l.kernel * l.kernel;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double acc = bias[o];
        for (int kh = 0; kh < l.kernel; ++kh) {
          const int rr = r + kh - r0;
          if (rr < 0 || rr >= h) continue;
          for (int kw = 0; kw < l.kernel; ++kw) {
            const int cc = c + kw - r0;
            if (cc < 0 || cc >= w) continue;
            for (int i = 0; i < l.in; ++i) {
              acc += wo[(i * l.kernel + kh) * l.kernel + kw] * x.at(rr, cc, i);
            }
          }
        }
        y.at(r, c, o) = acc > 0.0 ? acc : 0.0;
      }
    }
  }

  const double n = static_cast<double>(h) * w;
  for (int o = 0; o < l.out; ++o) {
    double mean = 0.0;
    for (CellId cell = 0; cell < h * w; ++cell) mean += y.at(cell, o);
    mean /= n;
    double var = 0.0;
    for (CellId cell = 0; cell < h * w; ++cell) var += (y.at(cell, o) - mean) * (y.at(cell, o) - mean);
    var /= n;
    const double k = scale[o] / std::sqrt(var + kNormEpsilon);
    for (CellId cell = 0; cell < h * w; ++cell) y.at(cell, o) = (y.at(cell, o) - mean) * k + shift[o];
  }
  return y;
}

}  // namespace

ModelTopology ModelTopology::for_observations(int num_observations, int output_depth) {
  if (num_observations < 1) throw Error(ErrorKind::InvalidArgument, "N_obs must be at least 1");
  return {2 * kTrafficChannels * num_observations + 2 * (kWeightChannels + kDirIndependentChannels), 8,
          output_depth};
}

int ModelTopology::param_count() const {
  int total = 0;
  for (const Layer& l : layers(*this)) total += layer_params(l);
  return total;
}

void ModelTopology::validate() const {
  if (input_depth < 1 || hidden < 1 || output_depth < 1) {
    throw Error(ErrorKind::InvalidArgument, "model depths must be positive");
  }
}

json ModelTopology::to_json() const {
  json ls = json::array();
  for (const Layer& l : layers(*this)) {
    ls.push_back({{"kernel", l.kernel}, {"in", l.in}, {"out", l.out}, {"params", layer_params(l)}});
  }
  return json{{"input_depth", input_depth},
              {"hidden", hidden},
              {"output_depth", output_depth},
              {"param_count", param_count()},
              {"layers", std::move(ls)},
              {"activation", "relu"},
              {"norm", "spatial"},
              {"norm_epsilon", kNormEpsilon},
              {"param_order", "per layer: weights[out][in][kh][kw], bias[out], scale[out], shift[out]"}};
}

ModelTopology ModelTopology::from_json(const json& j) {
  try {
    ModelTopology t{j.at("input_depth").get<int>(), j.at("hidden").get<int>(), j.at("output_depth").get<int>()};
    t.validate();
    return t;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::Parse, std::string("malformed model topology: ") + ex.what());
  }
}

Tensor forward(const ModelTopology& topology, std::span<const double> params, const Tensor& input) {
  topology.validate();
  if (static_cast<int>(params.size()) != topology.param_count()) {
    throw Error(ErrorKind::InvalidArgument, "parameter vector has " + std::to_string(params.size()) +
                                                " entries, topology needs " +
                                                std::to_string(topology.param_count()));
  }
  if (input.channels() != topology.input_depth) {
    throw Error(ErrorKind::InvalidArgument, "input depth " + std::to_string(input.channels()) +
                                                " does not match topology depth " +
                                                std::to_string(topology.input_depth));
  }
  for (double v : params) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite model parameter");
  }
  if (!input.all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite model input");
  const double* p = params.data();
  Tensor x = input;
  for (const Layer& l : layers(topology)) x = apply_layer(l, p, x);
  return x;
}

Tensor assemble_input(const TrafficPatterns& patterns) {
  if (patterns.unweighted_traffic.empty() ||
      patterns.unweighted_traffic.size() != patterns.crisscross_traffic.size()) {
    throw Error(ErrorKind::InvalidArgument, "traffic patterns need N_obs >= 1 runs per reference graph");
  }
  Tensor x = patterns.unweighted_traffic.front();
  for (std::size_t i = 1; i < patterns.unweighted_traffic.size(); ++i) {
    x = x.concat_channels(patterns.unweighted_traffic[i]);
  }
  for (const Tensor& t : patterns.crisscross_traffic) x = x.concat_channels(t);
  for (const GraphTensors* g : {&patterns.unweighted_graph, &patterns.crisscross_graph}) {
    x = x.concat_channels(g->weights.data).concat_channels(g->dirs.data);
  }
  return x;
}

std::vector<std::string> input_channel_names(int num_observations) {
  static constexpr std::array<const char*, kTrafficChannels> kTraffic{
      "move_east", "move_south", "move_west", "move_north", "wait", "rotate_cw", "rotate_ccw"};
  static constexpr std::array<const char*, kWeightChannels + kDirIndependentChannels> kGraph{
      "w_east", "w_south", "w_west", "w_north", "w_self", "d_east", "d_south", "d_west", "d_north"};
  std::vector<std::string> names;
  for (const char* graph : {"unweighted", "crisscross"}) {
    for (int k = 0; k < num_observations; ++k) {
      for (const char* ch : kTraffic) names.push_back(std::string(graph) + ".traffic" + std::to_string(k) + "." + ch);
    }
  }
  for (const char* graph : {"unweighted", "crisscross"}) {
    for (const char* ch : kGraph) names.push_back(std::string(graph) + "." + ch);
  }
  return names;
}

MixedGuidanceGraph decode_output(const BaseGraphPtr& base, const Tensor& output, WeightBounds bounds) {
  if (output.height() != base->height() || output.width() != base->width()) {
    throw Error(ErrorKind::InvalidArgument, "model output does not match the map size");
  }
  if (!output.all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite model output");
  const WeightTensor weights{output.slice_channels(0, kWeightChannels)};
  if (output.channels() == kJointOutputDepth) {
    return decode_dependent(base, DirTensorDependent{output.slice_channels(kWeightChannels, kDirDependentChannels)},
                            weights, bounds);
  }
  if (output.channels() == kWeightOnlyOutputDepth) return decode_bidirected(base, weights, bounds);
  throw Error(ErrorKind::InvalidArgument, "model output must have 5 or 11 channels");
}

void save_params(const std::filesystem::path& path, std::span<const double> params) {
  static_assert(std::endian::native == std::endian::little, "parameter blobs are little-endian");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(params.data()), static_cast<std::streamsize>(params.size_bytes()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

std::vector<double> load_params(const std::filesystem::path& path, const ModelTopology& topology) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::vector<double> params(static_cast<std::size_t>(topology.param_count()));
  in.read(reinterpret_cast<char*>(params.data()), static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(params.size() * sizeof(double)) || in.peek() != EOF) {
    throw Error(ErrorKind::Parse, path.string() + " does not hold exactly " +
                                      std::to_string(topology.param_count()) + " parameters");
  }
  return params;
}

}  // namespace mggo
