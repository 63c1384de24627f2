#include "hnl/forecast/hnl_model.hpp"

#include "hnl/core/error.hpp"
#include "hnl/nn/adam.hpp"
#include "hnl/nn/checkpoint.hpp"
#include "trainer.hpp"

#include <cmath>
#include <string>

namespace hnl::forecast {
namespace {

laplace::BandPartition make_partition(const HnlConfig& c) {
    if (c.anchors.empty()) return laplace::build_band_partition(c.resolutions, c.T, c.gamma);
    if (c.anchors.size() != c.resolutions.size()) {
        throw ValidationError("explicit anchors must match the resolution ladder in length");
    }
    return laplace::custom_partition(c.T, c.gamma, c.anchors, c.resolutions);
}

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
    std::vector<std::size_t> s{in};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
}

// decoder input rows (h, u_k) for a batch of hidden states
Matrix decoder_inputs(const Matrix& H, const std::vector<double>& u) {
    const std::size_t dh = H.cols();
    Matrix in(H.rows() * u.size(), dh + 1);
    for (std::size_t s = 0; s < H.rows(); ++s) {
        for (std::size_t j = 0; j < u.size(); ++j) {
            double* row = in.data() + (s * u.size() + j) * (dh + 1);
            std::copy(H.data() + s * dh, H.data() + (s + 1) * dh, row);
            row[dh] = u[j];
        }
    }
    return in;
}

}  // namespace

nlohmann::json to_json(const HnlConfig& c) {
    return {{"resolutions", c.resolutions}, {"T", c.T}, {"gamma", c.gamma}, {"anchors", c.anchors}, {"d_h", c.d_h},
            {"encoder_hidden", c.encoder_hidden}, {"decoder_hidden", c.decoder_hidden}};
}

HnlConfig hnl_config_from_json(const nlohmann::json& j) {
    HnlConfig c;
    c.resolutions = j.at("resolutions").get<std::vector<double>>();
    c.T = j.at("T").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.anchors = j.at("anchors").get<std::vector<int>>();
    c.d_h = j.at("d_h").get<std::size_t>();
    c.encoder_hidden = j.at("encoder_hidden").get<std::vector<std::size_t>>();
    c.decoder_hidden = j.at("decoder_hidden").get<std::vector<std::size_t>>();
    return c;
}

HnlConfig nl_config(const HnlConfig& base, double resolution, int N) {
    HnlConfig c = base;
    c.resolutions = {resolution};
    c.anchors = {N};
    return c;
}

HnlModel::HnlModel(HnlConfig config, InputSpec input, data::NormStats stats, std::uint64_t seed)
    : config_(std::move(config)), input_(input), stats_(std::move(stats)), seed_(seed) {
    partition_ = make_partition(config_);
    if (config_.d_h == 0) throw ValidationError("hidden state width d_h must be positive");
    encoder_ = nn::net_init(layer_sizes(input_.input_size(), config_.encoder_hidden, config_.d_h),
                            nn::Activation::tanh, seed_);
    for (std::size_t b = 1; b <= partition_.band_count(); ++b) {
        decoders_.push_back(nn::net_init(layer_sizes(config_.d_h + 1, config_.decoder_hidden, 2),
                                         nn::Activation::tanh, seed_ * 1000003ULL + b));
    }
    build_bases();
}

HnlModel::HnlModel(HnlConfig config, InputSpec input, data::NormStats stats, std::uint64_t seed,
                   nn::DenseNet encoder, std::vector<nn::DenseNet> decoders)
    : config_(std::move(config)), input_(input), stats_(std::move(stats)), seed_(seed),
      encoder_(std::move(encoder)), decoders_(std::move(decoders)) {
    partition_ = make_partition(config_);
    if (decoders_.size() != partition_.band_count()) {
        throw ValidationError("checkpoint decoder count does not match the band count");
    }
    if (encoder_.input_size() != input_.input_size() || encoder_.output_size() != config_.d_h) {
        throw ValidationError("checkpoint encoder shape does not match the configuration");
    }
    for (const auto& d : decoders_) {
        if (d.input_size() != config_.d_h + 1 || d.output_size() != 2) {
            throw ValidationError("checkpoint decoder shape does not match the configuration");
        }
    }
    build_bases();
}

void HnlModel::build_bases() {
    const double horizon = input_.horizon_hours();
    if (horizon > 2.0 * config_.T) {
        throw ValidationError("horizon of " + std::to_string(horizon) + " h exceeds the reconstruction period 2T");
    }
    bases_.clear();
    for (double r : config_.resolutions) {
        const std::size_t n = metrics_length(r);
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = (static_cast<double>(i) + 0.5) / r;
        bases_.push_back(std::make_shared<const laplace::IltBasis>(partition_, t));
    }
}

std::size_t HnlModel::metrics_length(double resolution) const {
    const double n = resolution * input_.horizon_hours();
    if (std::abs(n - std::round(n)) > 1e-9 || n < 1.0) {
        throw ValidationError("horizon is not a whole number of steps at resolution " + std::to_string(resolution));
    }
    return static_cast<std::size_t>(std::llround(n));
}

std::vector<double> HnlModel::band_coordinates(std::size_t band) const {
    const int first = partition_.band_first(band);
    const int last = partition_.band_last(band);
    const int prev = band == 1 ? 0 : partition_.anchors[band - 2];
    const double width = static_cast<double>(last - prev);
    std::vector<double> u;
    for (int k = first; k <= last; ++k) u.push_back(static_cast<double>(k - prev) / width);
    return u;
}

std::vector<double> HnlModel::encode(std::span<const double> features) const {
    if (features.size() != encoder_.input_size()) {
        throw ValidationError("encoder expects " + std::to_string(encoder_.input_size()) + " features, got " +
                              std::to_string(features.size()));
    }
    return nn::net_forward(encoder_, features);
}

std::vector<double> HnlModel::encode(const data::WindowSample& sample) const {
    return encode(build_features(input_, stats_, sample));
}

std::vector<std::complex<double>> HnlModel::decode_band(std::size_t band, std::span<const double> h) const {
    if (band < 1 || band > decoders_.size()) {
        throw ValidationError("band " + std::to_string(band) + " outside 1.." + std::to_string(decoders_.size()));
    }
    if (h.size() != config_.d_h) throw ValidationError("hidden state width mismatch");
    Matrix H(1, h.size());
    std::copy(h.begin(), h.end(), H.data());
    const Matrix in = decoder_inputs(H, band_coordinates(band));
    const auto trace = nn::forward_batch(decoders_[band - 1], in);
    const Matrix& out = trace.output();
    std::vector<std::complex<double>> c(out.rows());
    for (std::size_t j = 0; j < out.rows(); ++j) c[j] = {out(j, 0), out(j, 1)};
    return c;
}

laplace::CoefficientSet HnlModel::coefficients(std::span<const double> h) const {
    laplace::CoefficientSet c;
    for (std::size_t b = 1; b <= decoders_.size(); ++b) c.bands.push_back(decode_band(b, h));
    return c;
}

std::size_t HnlModel::level_of(double resolution) const {
    const int idx = partition_.resolution_index(resolution);
    if (idx < 0) throw ValidationError("resolution " + std::to_string(resolution) + " per hour is not on the ladder");
    return static_cast<std::size_t>(idx);
}

std::vector<double> HnlModel::forecast_times(double resolution) const {
    const auto t = basis(level_of(resolution)).times();
    return {t.begin(), t.end()};
}

std::vector<double> HnlModel::assemble_normalized(const laplace::CoefficientSet& coeffs, double resolution) const {
    const std::size_t level = level_of(resolution);
    return basis(level).evaluate(coeffs, level + 1);
}

std::vector<double> HnlModel::assemble_forecast(const data::WindowSample& sample, double resolution) const {
    const std::size_t level = level_of(resolution);
    const auto h = encode(sample);
    laplace::CoefficientSet c;
    for (std::size_t b = 1; b <= level + 1; ++b) c.bands.push_back(decode_band(b, h));
    std::vector<double> y = basis(level).evaluate(c, level + 1);
    for (double& v : y) v = stats_.denormalize(v);
    return y;
}

ForecastBundle HnlModel::forecast_bundle(const data::WindowSample& sample, const std::string& model_name) const {
    ForecastBundle fb;
    fb.origin_time = sample.origin_time;
    fb.model = model_name;
    fb.seed = seed_;
    fb.bundle.resolutions = config_.resolutions;
    const auto h = encode(sample);
    const auto c = coefficients(h);
    for (std::size_t level = 0; level < config_.resolutions.size(); ++level) {
        std::vector<double> y = basis(level).evaluate(c, level + 1);
        for (double& v : y) v = stats_.denormalize(v);
        fb.bundle.levels.push_back(std::move(y));
    }
    return fb;
}

nlohmann::json HnlModel::to_json() const {
    nlohmann::json j;
    j["kind"] = "hnl";
    j["config"] = forecast::to_json(config_);
    j["input"] = forecast::to_json(input_);
    j["stats"] = forecast::to_json(stats_);
    j["seed"] = seed_;
    j["encoder"] = nn::to_json(encoder_);
    nlohmann::json dec = nlohmann::json::array();
    for (const auto& d : decoders_) dec.push_back(nn::to_json(d));
    j["decoders"] = std::move(dec);
    return j;
}

HnlModel HnlModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("kind").get<std::string>() != "hnl") throw ValidationError("checkpoint is not an HNL model");
        std::vector<nn::DenseNet> dec;
        for (const auto& d : j.at("decoders")) dec.push_back(nn::net_from_json(d));
        return HnlModel(hnl_config_from_json(j.at("config")), input_spec_from_json(j.at("input")),
                        stats_from_json(j.at("stats")), j.at("seed").get<std::uint64_t>(),
                        nn::net_from_json(j.at("encoder")), std::move(dec));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed HNL checkpoint: ") + e.what());
    }
}

double hnl_mse(const HnlModel& model, const std::vector<data::WindowSample>& samples) {
    if (samples.empty()) throw ValidationError("cannot score an empty sample set");
    const std::size_t top = model.config().resolutions.size() - 1;
    const double res = model.config().resolutions[top];
    double total = 0.0;
    for (const auto& s : samples) {
        const auto c = model.coefficients(model.encode(s));
        const auto y = model.basis(top).evaluate(c, top + 1);
        const auto t = normalized_target(model.input_spec(), model.stats(), s, res);
        double e = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) e += (y[i] - t[i]) * (y[i] - t[i]);
        total += e / static_cast<double>(y.size());
    }
    return total / static_cast<double>(samples.size());
}

TrainLog train_hnl(HnlModel& model, const std::vector<data::WindowSample>& train,
                   const std::vector<data::WindowSample>& val, const TrainConfig& config) {
    if (train.empty()) throw ValidationError("training set is empty");
    if (val.empty()) throw ValidationError("validation set is empty");
    const InputSpec& spec = model.input_spec();
    const auto& stats = model.stats();
    const std::size_t bands = model.partition().band_count();
    const std::size_t top = model.config().resolutions.size() - 1;
    const double res = model.config().resolutions[top];
    const laplace::IltBasis& basis = model.basis(top);
    const std::size_t n = basis.size();
    const std::size_t dh = model.config().d_h;

    std::vector<std::vector<double>> features;
    std::vector<std::vector<double>> targets;
    for (const auto& s : train) {
        features.push_back(build_features(spec, stats, s));
        targets.push_back(normalized_target(spec, stats, s, res));
    }
    std::vector<std::vector<double>> coords;
    for (std::size_t b = 1; b <= bands; ++b) coords.push_back(model.band_coordinates(b));

    nn::AdamConfig adam;
    adam.learning_rate = config.learning_rate;
    nn::OptimizerState enc_opt = nn::make_optimizer(model.encoder(), adam);
    std::vector<nn::OptimizerState> dec_opt;
    for (std::size_t b = 1; b <= bands; ++b) dec_opt.push_back(nn::make_optimizer(model.decoder(b), adam));

    nn::DenseNet best_encoder = model.encoder();
    std::vector<nn::DenseNet> best_decoders;
    for (std::size_t b = 1; b <= bands; ++b) best_decoders.push_back(model.decoder(b));

    detail::TrainHooks hooks;
    hooks.step = [&](std::span<const std::size_t> batch) {
        const std::size_t B = batch.size();
        Matrix X(B, spec.input_size());
        for (std::size_t s = 0; s < B; ++s) std::copy(features[batch[s]].begin(), features[batch[s]].end(), X.data() + s * X.cols());
        const auto enc_trace = nn::forward_batch(model.encoder(), X);
        const Matrix& H = enc_trace.output();

        std::vector<nn::ForwardTrace> dec_traces;
        for (std::size_t b = 1; b <= bands; ++b) {
            dec_traces.push_back(nn::forward_batch(model.decoder(b), decoder_inputs(H, coords[b - 1])));
        }
        // forward ILT per sample and the output-side loss gradient
        std::vector<std::vector<double>> grad_y(B, std::vector<double>(n));
        double loss = 0.0;
        std::vector<double> y(n), tc(n);
        std::vector<std::complex<double>> cbuf;
        for (std::size_t s = 0; s < B; ++s) {
            std::fill(y.begin(), y.end(), 0.0);
            for (std::size_t b = 1; b <= bands; ++b) {
                const Matrix& out = dec_traces[b - 1].output();
                const std::size_t P = coords[b - 1].size();
                cbuf.resize(P);
                for (std::size_t j = 0; j < P; ++j) cbuf[j] = {out(s * P + j, 0), out(s * P + j, 1)};
                basis.component(b, cbuf, tc);
                for (std::size_t i = 0; i < n; ++i) y[i] += tc[i];
            }
            const auto& t = targets[batch[s]];
            for (std::size_t i = 0; i < n; ++i) {
                const double d = y[i] - t[i];
                loss += d * d;
                grad_y[s][i] = 2.0 * d / static_cast<double>(B * n);
            }
        }
        loss /= static_cast<double>(B * n);
        if (!std::isfinite(loss)) return loss;

        Matrix dH(B, dh);
        std::vector<nn::GradientSet> dec_grads;
        for (std::size_t b = 1; b <= bands; ++b) {
            const std::size_t P = coords[b - 1].size();
            Matrix G(B * P, 2);
            std::vector<double> gr(P), gi(P);
            for (std::size_t s = 0; s < B; ++s) {
                basis.component_adjoint(b, grad_y[s], gr, gi);
                for (std::size_t j = 0; j < P; ++j) {
                    G(s * P + j, 0) = gr[j];
                    G(s * P + j, 1) = gi[j];
                }
            }
            Matrix gin;
            dec_grads.push_back(nn::net_backward(model.decoder(b), dec_traces[b - 1], G, &gin));
            for (std::size_t s = 0; s < B; ++s) {
                for (std::size_t j = 0; j < P; ++j) {
                    const double* row = gin.data() + (s * P + j) * (dh + 1);
                    for (std::size_t c = 0; c < dh; ++c) dH(s, c) += row[c];
                }
            }
        }
        const auto enc_grad = nn::net_backward(model.encoder(), enc_trace, dH);
        nn::optimizer_step(enc_opt, model.encoder(), enc_grad);
        for (std::size_t b = 1; b <= bands; ++b) nn::optimizer_step(dec_opt[b - 1], model.decoder(b), dec_grads[b - 1]);
        return loss;
    };
    hooks.validate = [&] { return hnl_mse(model, val); };
    hooks.snapshot = [&] {
        best_encoder = model.encoder();
        for (std::size_t b = 1; b <= bands; ++b) best_decoders[b - 1] = model.decoder(b);
    };
    hooks.restore = [&] {
        model.encoder() = best_encoder;
        for (std::size_t b = 1; b <= bands; ++b) model.decoder(b) = best_decoders[b - 1];
    };
    return detail::run_training(train.size(), config, hooks);
}

}  // namespace hnl::forecast
