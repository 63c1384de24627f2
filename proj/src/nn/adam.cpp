#include "hnl/nn/adam.hpp"

#include "hnl/core/error.hpp"

#include <cmath>
#include <string>

namespace hnl::nn {

OptimizerState make_optimizer(const DenseNet& net, AdamConfig config) {
    if (!(config.learning_rate >= 0.0) || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
        !(config.beta2 >= 0.0 && config.beta2 < 1.0) || !(config.epsilon > 0.0)) {
        throw ValidationError("invalid optimizer constants");
    }
    OptimizerState s;
    s.config = config;
    s.m.assign(net.parameter_count(), 0.0);
    s.v.assign(net.parameter_count(), 0.0);
    return s;
}

void optimizer_step(OptimizerState& state, DenseNet& net, const GradientSet& grads) {
    const std::vector<double> g = grads.flatten();
    if (g.size() != state.m.size() || g.size() != net.parameter_count()) {
        throw ValidationError("gradient shape does not match optimizer state");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) {
            throw NumericError("non-finite gradient at parameter " + std::to_string(i) +
                               " (optimizer step " + std::to_string(state.step + 1) + ")");
        }
    }
    const auto& c = state.config;
    state.step += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    std::vector<double> p = net.flatten();
    for (std::size_t i = 0; i < g.size(); ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g[i];
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        p[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
    }
    net.assign(p);
}

}  // namespace hnl::nn
