#pragma once

#include "hnl/core/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hnl::nn {

enum class Activation { tanh, identity };

struct ForwardTrace;

struct DenseLayer {
    Matrix weight;             ///< out x in
    std::vector<double> bias;  ///< out
    Activation activation = Activation::tanh;
};

/// Fully connected feed-forward network. Hidden layers use the configured
/// activation, the last layer is always identity.
class DenseNet {
public:
    DenseNet() = default;
    DenseNet(std::vector<std::size_t> sizes, std::vector<DenseLayer> layers, std::uint64_t seed);

    const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    std::size_t layer_count() const noexcept { return layers_.size(); }
    std::size_t parameter_count() const;
    std::uint64_t seed() const noexcept { return seed_; }

    const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }
    /// Mutable access invalidates forward traces taken before it.
    DenseLayer& mutable_layer(std::size_t i);

    /// Bumped on every parameter mutation; used to detect stale traces.
    std::uint64_t generation() const noexcept { return generation_; }

    /// Parameters flattened layer by layer (weights row-major, then bias).
    std::vector<double> flatten() const;
    void assign(std::span<const double> params);

    friend bool operator==(const DenseNet& a, const DenseNet& b) {
        if (a.sizes_ != b.sizes_ || a.seed_ != b.seed_ || a.layers_.size() != b.layers_.size()) {
            return false;
        }
        for (std::size_t i = 0; i < a.layers_.size(); ++i) {
            if (a.layers_[i].weight != b.layers_[i].weight || a.layers_[i].bias != b.layers_[i].bias ||
                a.layers_[i].activation != b.layers_[i].activation) {
                return false;
            }
        }
        return true;
    }

private:
    std::vector<std::size_t> sizes_;
    std::vector<DenseLayer> layers_;
    std::uint64_t seed_ = 0;
    std::uint64_t generation_ = 0;
    std::uint64_t id_ = 0;

    friend ForwardTrace forward_batch(const DenseNet&, const Matrix&);
    friend void check_trace(const DenseNet&, const ForwardTrace&);
};

/// Activations recorded by forward_batch, consumed by net_backward.
struct ForwardTrace {
    std::uint64_t net_id = 0;
    std::uint64_t generation = 0;
    /// values[0] is the input batch; values[l+1] the output of layer l.
    std::vector<Matrix> values;

    const Matrix& output() const { return values.back(); }
};

/// Per-parameter gradients mirroring the net's layers.
struct GradientSet {
    std::vector<Matrix> weight;
    std::vector<std::vector<double>> bias;

    std::vector<double> flatten() const;
    bool all_finite() const;
};

/// Layer sizes [in, h_1, ..., out]; weights uniform in ±1/sqrt(fan_in), zero bias.
DenseNet net_init(const std::vector<std::size_t>& layer_sizes, Activation hidden,
                  std::uint64_t seed);

std::vector<double> net_forward(const DenseNet& net, std::span<const double> input);

/// Batch forward (rows = samples) that keeps every layer's output.
ForwardTrace forward_batch(const DenseNet& net, const Matrix& inputs);

/// Reverse pass for the batch in `trace`. `grad_output` holds dL/dy per row;
/// gradients are summed over rows. If grad_input is non-null it receives
/// dL/dx (rows x input_size). Throws if the trace is stale or from another net.
GradientSet net_backward(const DenseNet& net, const ForwardTrace& trace, const Matrix& grad_output,
                         Matrix* grad_input = nullptr);

GradientSet zero_gradients(const DenseNet& net);
/// acc += g
void accumulate(GradientSet& acc, const GradientSet& g);

/// Central differences of a scalar loss of the network output over a batch.
/// Test oracle: 2 * parameter_count forward passes.
GradientSet finite_difference_gradient(
    const DenseNet& net, const Matrix& inputs,
    const std::function<double(const Matrix& outputs)>& loss, double eps = 1e-5);

}  // namespace hnl::nn
