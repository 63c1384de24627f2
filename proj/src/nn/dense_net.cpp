#include "hnl/nn/dense_net.hpp"

#include "hnl/core/error.hpp"
#include "hnl/simd/kernels.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <string>

namespace hnl::nn {
namespace {

std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

double activate(Activation a, double x) { return a == Activation::tanh ? std::tanh(x) : x; }

// derivative expressed through the activation output y
double activate_grad(Activation a, double y) { return a == Activation::tanh ? 1.0 - y * y : 1.0; }

}  // namespace

DenseNet::DenseNet(std::vector<std::size_t> sizes, std::vector<DenseLayer> layers,
                   std::uint64_t seed)
    : sizes_(std::move(sizes)), layers_(std::move(layers)), seed_(seed), id_(next_id()) {
    if (sizes_.size() < 2 || layers_.size() + 1 != sizes_.size()) {
        throw ValidationError("layer sizes do not match the layer list");
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& L = layers_[l];
        if (L.weight.rows() != sizes_[l + 1] || L.weight.cols() != sizes_[l] ||
            L.bias.size() != sizes_[l + 1]) {
            throw ValidationError("layer " + std::to_string(l) + " has inconsistent shape");
        }
    }
}

std::size_t DenseNet::parameter_count() const {
    std::size_t n = 0;
    for (const auto& L : layers_) n += L.weight.values().size() + L.bias.size();
    return n;
}

DenseLayer& DenseNet::mutable_layer(std::size_t i) {
    ++generation_;
    return layers_.at(i);
}

std::vector<double> DenseNet::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& L : layers_) {
        out.insert(out.end(), L.weight.values().begin(), L.weight.values().end());
        out.insert(out.end(), L.bias.begin(), L.bias.end());
    }
    return out;
}

void DenseNet::assign(std::span<const double> params) {
    if (params.size() != parameter_count()) {
        throw ValidationError("parameter vector has " + std::to_string(params.size()) +
                              " entries, net has " + std::to_string(parameter_count()));
    }
    std::size_t pos = 0;
    for (auto& L : layers_) {
        for (double& w : L.weight.values()) w = params[pos++];
        for (double& b : L.bias) b = params[pos++];
    }
    ++generation_;
}

std::vector<double> GradientSet::flatten() const {
    std::vector<double> out;
    for (std::size_t l = 0; l < weight.size(); ++l) {
        out.insert(out.end(), weight[l].values().begin(), weight[l].values().end());
        out.insert(out.end(), bias[l].begin(), bias[l].end());
    }
    return out;
}

bool GradientSet::all_finite() const {
    for (std::size_t l = 0; l < weight.size(); ++l) {
        for (double g : weight[l].values()) {
            if (!std::isfinite(g)) return false;
        }
        for (double g : bias[l]) {
            if (!std::isfinite(g)) return false;
        }
    }
    return true;
}

DenseNet net_init(const std::vector<std::size_t>& layer_sizes, Activation hidden,
                  std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw ValidationError("a network needs at least 2 layer sizes");
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw ValidationError("layer size 0 is not allowed");
    }
    std::mt19937_64 rng(seed);
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const std::size_t in = layer_sizes[l];
        const std::size_t out = layer_sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        DenseLayer L;
        L.weight = Matrix(out, in);
        for (double& w : L.weight.values()) w = dist(rng);
        L.bias.assign(out, 0.0);
        L.activation = (l + 2 == layer_sizes.size()) ? Activation::identity : hidden;
        layers.push_back(std::move(L));
    }
    return DenseNet(layer_sizes, std::move(layers), seed);
}

ForwardTrace forward_batch(const DenseNet& net, const Matrix& inputs) {
    if (net.layers_.empty()) throw ValidationError("network is empty");
    if (inputs.cols() != net.input_size()) {
        throw ValidationError("input width " + std::to_string(inputs.cols()) + " != " +
                              std::to_string(net.input_size()));
    }
    const auto& k = simd::kernels();
    ForwardTrace trace;
    trace.net_id = net.id_;
    trace.generation = net.generation_;
    trace.values.reserve(net.layers_.size() + 1);
    trace.values.push_back(inputs);
    for (const auto& L : net.layers_) {
        const Matrix& x = trace.values.back();
        Matrix y(x.rows(), L.weight.rows());
        const std::size_t in = L.weight.cols();
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double* xr = x.data() + r * in;
            double* yr = y.data() + r * y.cols();
            for (std::size_t o = 0; o < y.cols(); ++o) {
                yr[o] = activate(L.activation, k.dot(L.weight.data() + o * in, xr, in) + L.bias[o]);
            }
        }
        trace.values.push_back(std::move(y));
    }
    return trace;
}

std::vector<double> net_forward(const DenseNet& net, std::span<const double> input) {
    Matrix x(1, input.size());
    std::copy(input.begin(), input.end(), x.data());
    const ForwardTrace t = forward_batch(net, x);
    return t.output().values();
}

void check_trace(const DenseNet& net, const ForwardTrace& trace) {
    if (trace.values.empty()) throw ValidationError("backward pass without a forward trace");
    if (trace.net_id != net.id_) {
        throw ValidationError("forward trace was recorded on a different network");
    }
    if (trace.generation != net.generation_) {
        throw ValidationError("forward trace is stale: parameters changed since the forward pass");
    }
}

GradientSet zero_gradients(const DenseNet& net) {
    GradientSet g;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto& L = net.layer(l);
        g.weight.emplace_back(L.weight.rows(), L.weight.cols());
        g.bias.emplace_back(L.bias.size(), 0.0);
    }
    return g;
}

void accumulate(GradientSet& acc, const GradientSet& g) {
    const auto& k = simd::kernels();
    for (std::size_t l = 0; l < acc.weight.size(); ++l) {
        k.axpy(1.0, g.weight[l].data(), acc.weight[l].data(), acc.weight[l].values().size());
        k.axpy(1.0, g.bias[l].data(), acc.bias[l].data(), acc.bias[l].size());
    }
}

GradientSet net_backward(const DenseNet& net, const ForwardTrace& trace, const Matrix& grad_output,
                         Matrix* grad_input) {
    check_trace(net, trace);
    const Matrix& out = trace.output();
    if (grad_output.rows() != out.rows() || grad_output.cols() != out.cols()) {
        throw ValidationError("output gradient shape does not match the traced batch");
    }
    const auto& k = simd::kernels();
    GradientSet g = zero_gradients(net);
    Matrix delta = grad_output;
    for (std::size_t l = net.layer_count(); l-- > 0;) {
        const auto& L = net.layer(l);
        const Matrix& y = trace.values[l + 1];
        const Matrix& x = trace.values[l];
        const std::size_t in = L.weight.cols();
        const std::size_t out_w = L.weight.rows();
        if (L.activation != Activation::identity) {
            for (std::size_t i = 0; i < delta.values().size(); ++i) {
                delta.values()[i] *= activate_grad(L.activation, y.values()[i]);
            }
        }
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double* xr = x.data() + r * in;
            const double* dr = delta.data() + r * out_w;
            for (std::size_t o = 0; o < out_w; ++o) {
                if (dr[o] == 0.0) continue;
                k.axpy(dr[o], xr, g.weight[l].data() + o * in, in);
                g.bias[l][o] += dr[o];
            }
        }
        if (l == 0 && grad_input == nullptr) break;
        Matrix prev(x.rows(), in);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double* dr = delta.data() + r * out_w;
            double* pr = prev.data() + r * in;
            for (std::size_t o = 0; o < out_w; ++o) {
                if (dr[o] == 0.0) continue;
                k.axpy(dr[o], L.weight.data() + o * in, pr, in);
            }
        }
        delta = std::move(prev);
    }
    if (grad_input) *grad_input = std::move(delta);
    return g;
}

GradientSet finite_difference_gradient(const DenseNet& net, const Matrix& inputs,
                                       const std::function<double(const Matrix&)>& loss,
                                       double eps) {
    DenseNet probe = net;
    std::vector<double> params = probe.flatten();
    std::vector<double> grad(params.size());
    for (std::size_t p = 0; p < params.size(); ++p) {
        const double saved = params[p];
        params[p] = saved + eps;
        probe.assign(params);
        const double up = loss(forward_batch(probe, inputs).output());
        params[p] = saved - eps;
        probe.assign(params);
        const double down = loss(forward_batch(probe, inputs).output());
        params[p] = saved;
        grad[p] = (up - down) / (2.0 * eps);
    }
    GradientSet g = zero_gradients(net);
    std::size_t pos = 0;
    for (std::size_t l = 0; l < g.weight.size(); ++l) {
        for (double& w : g.weight[l].values()) w = grad[pos++];
        for (double& b : g.bias[l]) b = grad[pos++];
    }
    return g;
}

}  // namespace hnl::nn
