#pragma once

#include "hnl/nn/dense_net.hpp"

#include <cstdint>
#include <vector>

namespace hnl::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct OptimizerState {
    AdamConfig config;
    std::uint64_t step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

OptimizerState make_optimizer(const DenseNet& net, AdamConfig config = {});

/// One Adam step with bias correction. Throws NumericError on a non-finite
/// gradient (parameters and state are left untouched in that case).
void optimizer_step(OptimizerState& state, DenseNet& net, const GradientSet& grads);

}  // namespace hnl::nn
