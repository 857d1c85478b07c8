#include "sntl/net/adam.hpp"

#include "sntl/error.hpp"

#include <cmath>

namespace sntl {

AdamState AdamState::fresh(const Architecture& arch) {
  return {NetworkParams::zeros(arch), NetworkParams::zeros(arch), 0};
}

namespace {

template <typename Param, typename Grad, typename Moment>
void update(Param& param, const Grad& grad, Moment& m, Moment& v, const AdamConfig& cfg,
            double first_correction, double second_correction) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.square();
  param -= cfg.learning_rate * (m / first_correction) / ((v / second_correction).sqrt() + cfg.epsilon);
}

}  // namespace

void adam_step(NetworkParams& params, const NetworkParams& grad, AdamState& state, const AdamConfig& cfg) {
  const std::size_t depth = params.layers.size();
  if (grad.layers.size() != depth || state.first_moment.layers.size() != depth ||
      state.second_moment.layers.size() != depth) {
    throw DimensionMismatch("adam_step: parameter, gradient and moment shapes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double first_correction = 1.0 - std::pow(cfg.beta1, t);
  const double second_correction = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < depth; ++k) {
    auto& p = params.layers[k];
    const auto& g = grad.layers[k];
    auto& m = state.first_moment.layers[k];
    auto& v = state.second_moment.layers[k];
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() ||
        m.weight.rows() != p.weight.rows() || m.weight.cols() != p.weight.cols()) {
      throw DimensionMismatch("adam_step: layer " + std::to_string(k) + " shape differs");
    }
    auto pw = p.weight.array();
    auto mw = m.weight.array();
    auto vw = v.weight.array();
    update(pw, g.weight.array(), mw, vw, cfg, first_correction, second_correction);
    auto pb = p.bias.array();
    auto mb = m.bias.array();
    auto vb = v.bias.array();
    update(pb, g.bias.array(), mb, vb, cfg, first_correction, second_correction);
  }
}

}  // namespace sntl
