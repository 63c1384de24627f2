#pragma once

#include "hnl/forecast/common.hpp"
#include "hnl/nn/dense_net.hpp"

namespace hnl::forecast {

/// Network mapping the input features straight to the n_i-step forecast at a
/// single resolution.
class DirectModel {
public:
    DirectModel(double resolution, std::vector<std::size_t> hidden, InputSpec input, data::NormStats stats,
                std::uint64_t seed);

    double resolution() const noexcept { return resolution_; }
    std::size_t output_length() const;
    const InputSpec& input_spec() const noexcept { return input_; }
    const data::NormStats& stats() const noexcept { return stats_; }
    const nn::DenseNet& net() const noexcept { return net_; }
    nn::DenseNet& net() noexcept { return net_; }

    std::vector<double> predict(const data::WindowSample& sample) const;

    nlohmann::json to_json() const;
    static DirectModel from_json(const nlohmann::json& j);

private:
    DirectModel(double resolution, InputSpec input, data::NormStats stats, nn::DenseNet net);

    double resolution_;
    InputSpec input_;
    data::NormStats stats_;
    nn::DenseNet net_;
};

TrainLog train_direct(DirectModel& model, const std::vector<data::WindowSample>& train,
                      const std::vector<data::WindowSample>& val, const TrainConfig& config);

/// Uncoordinated bundle from one direct model per ladder level (coarsest first).
ForecastBundle direct_bundle(const std::vector<DirectModel>& models, const data::WindowSample& sample);

}  // namespace hnl::forecast
