#include "hnl/forecast/direct.hpp"

#include "hnl/core/error.hpp"
#include "hnl/nn/adam.hpp"
#include "hnl/nn/checkpoint.hpp"
#include "trainer.hpp"

#include <cmath>

namespace hnl::forecast {
namespace {

std::size_t length_at(const InputSpec& spec, double resolution) {
    const double n = resolution * spec.horizon_hours();
    if (n < 1.0 || std::abs(n - std::round(n)) > 1e-9) {
        throw ValidationError("horizon is not a whole number of steps at resolution " + std::to_string(resolution));
    }
    return static_cast<std::size_t>(std::llround(n));
}

double direct_mse(const DirectModel& m, const std::vector<data::WindowSample>& samples) {
    if (samples.empty()) throw ValidationError("cannot score an empty sample set");
    double total = 0.0;
    for (const auto& s : samples) {
        const auto y = nn::net_forward(m.net(), build_features(m.input_spec(), m.stats(), s));
        const auto t = normalized_target(m.input_spec(), m.stats(), s, m.resolution());
        double e = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) e += (y[i] - t[i]) * (y[i] - t[i]);
        total += e / static_cast<double>(y.size());
    }
    return total / static_cast<double>(samples.size());
}

}  // namespace

DirectModel::DirectModel(double resolution, std::vector<std::size_t> hidden, InputSpec input, data::NormStats stats,
                         std::uint64_t seed)
    : resolution_(resolution), input_(input), stats_(std::move(stats)) {
    std::vector<std::size_t> sizes{input_.input_size()};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(length_at(input_, resolution_));
    net_ = nn::net_init(sizes, nn::Activation::tanh, seed);
}

DirectModel::DirectModel(double resolution, InputSpec input, data::NormStats stats, nn::DenseNet net)
    : resolution_(resolution), input_(input), stats_(std::move(stats)), net_(std::move(net)) {
    if (net_.input_size() != input_.input_size() || net_.output_size() != length_at(input_, resolution_)) {
        throw ValidationError("direct checkpoint shape does not match its input spec");
    }
}

std::size_t DirectModel::output_length() const { return net_.output_size(); }

std::vector<double> DirectModel::predict(const data::WindowSample& sample) const {
    std::vector<double> y = nn::net_forward(net_, build_features(input_, stats_, sample));
    for (double& v : y) v = stats_.denormalize(v);
    return y;
}

nlohmann::json DirectModel::to_json() const {
    return {{"kind", "direct"},
            {"resolution", resolution_},
            {"input", forecast::to_json(input_)},
            {"stats", forecast::to_json(stats_)},
            {"net", nn::to_json(net_)}};
}

DirectModel DirectModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("kind").get<std::string>() != "direct") throw ValidationError("checkpoint is not a direct model");
        return DirectModel(j.at("resolution").get<double>(), input_spec_from_json(j.at("input")),
                           stats_from_json(j.at("stats")), nn::net_from_json(j.at("net")));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed direct checkpoint: ") + e.what());
    }
}

TrainLog train_direct(DirectModel& model, const std::vector<data::WindowSample>& train,
                      const std::vector<data::WindowSample>& val, const TrainConfig& config) {
    if (train.empty()) throw ValidationError("training set is empty");
    if (val.empty()) throw ValidationError("validation set is empty");
    std::vector<std::vector<double>> features;
    std::vector<std::vector<double>> targets;
    for (const auto& s : train) {
        features.push_back(build_features(model.input_spec(), model.stats(), s));
        targets.push_back(normalized_target(model.input_spec(), model.stats(), s, model.resolution()));
    }
    nn::AdamConfig adam;
    adam.learning_rate = config.learning_rate;
    nn::OptimizerState opt = nn::make_optimizer(model.net(), adam);
    nn::DenseNet best = model.net();
    const std::size_t n = model.output_length();

    detail::TrainHooks hooks;
    hooks.step = [&](std::span<const std::size_t> batch) {
        const std::size_t B = batch.size();
        Matrix X(B, model.input_spec().input_size());
        for (std::size_t s = 0; s < B; ++s) std::copy(features[batch[s]].begin(), features[batch[s]].end(), X.data() + s * X.cols());
        const auto trace = nn::forward_batch(model.net(), X);
        Matrix G(B, n);
        double loss = 0.0;
        for (std::size_t s = 0; s < B; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                const double d = trace.output()(s, i) - targets[batch[s]][i];
                loss += d * d;
                G(s, i) = 2.0 * d / static_cast<double>(B * n);
            }
        }
        loss /= static_cast<double>(B * n);
        if (!std::isfinite(loss)) return loss;
        nn::optimizer_step(opt, model.net(), nn::net_backward(model.net(), trace, G));
        return loss;
    };
    hooks.validate = [&] { return direct_mse(model, val); };
    hooks.snapshot = [&] { best = model.net(); };
    hooks.restore = [&] { model.net() = best; };
    return detail::run_training(train.size(), config, hooks);
}

ForecastBundle direct_bundle(const std::vector<DirectModel>& models, const data::WindowSample& sample) {
    if (models.empty()) throw ValidationError("no direct models");
    ForecastBundle fb;
    fb.origin_time = sample.origin_time;
    fb.model = "direct";
    fb.seed = models.front().net().seed();
    for (const auto& m : models) {
        fb.bundle.resolutions.push_back(m.resolution());
        fb.bundle.levels.push_back(m.predict(sample));
    }
    return fb;
}

}  // namespace hnl::forecast
