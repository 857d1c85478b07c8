#include "sntl/net/network.hpp"

#include "sntl/error.hpp"

#include <cmath>

namespace sntl {

Architecture Architecture::spatial_default(std::size_t input_dim) {
  Architecture arch;
  arch.widths.push_back(input_dim);
  arch.widths.insert(arch.widths.end(), 7, 100);
  arch.widths.push_back(1);
  return arch;
}

std::string Architecture::describe() const {
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(widths[i]);
  }
  return out;
}

NetworkParams NetworkParams::zeros(const Architecture& arch) {
  if (arch.widths.size() < 2 || arch.widths.back() != 1) {
    throw DimensionMismatch("architecture must have at least one layer and a scalar output");
  }
  NetworkParams p;
  for (std::size_t k = 0; k < arch.layer_count(); ++k) {
    const auto in = static_cast<Eigen::Index>(arch.widths[k]);
    const auto out = static_cast<Eigen::Index>(arch.widths[k + 1]);
    p.layers.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
  return p;
}

Architecture NetworkParams::architecture() const {
  Architecture arch;
  if (layers.empty()) return arch;
  arch.widths.push_back(static_cast<std::size_t>(layers.front().weight.cols()));
  for (const auto& l : layers) arch.widths.push_back(static_cast<std::size_t>(l.weight.rows()));
  return arch;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd NetworkParams::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (const auto& l : layers) {
    flat.segment(at, l.weight.size()) = l.weight.reshaped();
    at += l.weight.size();
    flat.segment(at, l.bias.size()) = l.bias;
    at += l.bias.size();
  }
  return flat;
}

void NetworkParams::assign_flat(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw DimensionMismatch("assign_flat: wrong parameter count");
  }
  Eigen::Index at = 0;
  for (auto& l : layers) {
    l.weight.reshaped() = flat.segment(at, l.weight.size());
    at += l.weight.size();
    l.bias = flat.segment(at, l.bias.size());
    at += l.bias.size();
  }
}

bool operator==(const NetworkParams& a, const NetworkParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    const auto& la = a.layers[k];
    const auto& lb = b.layers[k];
    if (la.weight.rows() != lb.weight.rows() || la.weight.cols() != lb.weight.cols()) return false;
    if (la.weight != lb.weight || la.bias != lb.bias) return false;
  }
  return true;
}

NetworkParams init_network(const Architecture& arch, RandomState& state) {
  NetworkParams p = NetworkParams::zeros(arch);
  for (auto& l : p.layers) {
    const double sd = std::sqrt(2.0 / static_cast<double>(l.weight.cols()));
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = sd * state.next_standard_normal();
    }
  }
  return p;
}

Eigen::RowVectorXd forward_batch(const NetworkParams& params, const Eigen::MatrixXd& x,
                                 ForwardCache* cache) {
  if (params.layers.empty()) throw DimensionMismatch("forward: network has no layers");
  if (x.rows() != params.layers.front().weight.cols()) {
    throw DimensionMismatch("forward: input has " + std::to_string(x.rows()) + " features, network expects " +
                            std::to_string(params.layers.front().weight.cols()));
  }
  const std::size_t depth = params.layers.size();
  if (cache) {
    cache->inputs.resize(depth);
    cache->pre_activations.resize(depth - 1);
  }
  Eigen::MatrixXd h = x;
  for (std::size_t k = 0; k + 1 < depth; ++k) {
    const auto& layer = params.layers[k];
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    if (cache) {
      cache->inputs[k] = std::move(h);
      cache->pre_activations[k] = z;
    }
    h = z.cwiseMax(0.0);
  }
  const auto& out_layer = params.layers.back();
  Eigen::RowVectorXd y = out_layer.weight * h;
  y.array() += out_layer.bias[0];
  if (cache) cache->inputs[depth - 1] = std::move(h);
  return y;
}

void backward_batch(const NetworkParams& params, const ForwardCache& cache, const Eigen::RowVectorXd& dy,
                    NetworkParams& grad) {
  const std::size_t depth = params.layers.size();
  if (cache.inputs.size() != depth || dy.size() != cache.inputs.front().cols()) {
    throw DimensionMismatch("backward: cache does not match the network or residuals");
  }
  if (grad.layers.size() != depth) grad = NetworkParams::zeros(params.architecture());
  Eigen::MatrixXd delta = dy;
  for (std::size_t k = depth; k-- > 0;) {
    grad.layers[k].weight.noalias() = delta * cache.inputs[k].transpose();
    grad.layers[k].bias = delta.rowwise().sum();
    if (k == 0) break;
    Eigen::MatrixXd upstream = params.layers[k].weight.transpose() * delta;
    delta = (cache.pre_activations[k - 1].array() > 0.0).select(upstream, 0.0);
  }
}

ForwardResult forward(const NetworkParams& params, const Eigen::VectorXd& x) {
  ForwardResult out;
  out.y = forward_batch(params, Eigen::MatrixXd(x), &out.cache)[0];
  return out;
}

NetworkParams backward(const NetworkParams& params, const ForwardCache& cache, double residual) {
  NetworkParams grad = NetworkParams::zeros(params.architecture());
  backward_batch(params, cache, Eigen::RowVectorXd::Constant(1, residual), grad);
  return grad;
}

Eigen::VectorXd predict(const NetworkParams& params, const Eigen::MatrixXd& design) {
  constexpr Eigen::Index kChunk = 512;
  Eigen::VectorXd out(design.rows());
  for (Eigen::Index start = 0; start < design.rows(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, design.rows() - start);
    out.segment(start, len) = forward_batch(params, design.middleRows(start, len).transpose()).transpose();
  }
  return out;
}

}  // namespace sntl
