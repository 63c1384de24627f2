#pragma once

#include "hnl/forecast/common.hpp"
#include "hnl/laplace/band_partition.hpp"
#include "hnl/laplace/ilt.hpp"
#include "hnl/nn/dense_net.hpp"

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace hnl::forecast {

struct HnlConfig {
    std::vector<double> resolutions{1.0, 4.0, 12.0};  ///< samples per hour, ascending
    double T = 24.0;
    double gamma = 0.0;
    std::vector<int> anchors;  ///< empty: N_i = T * f_r^i
    std::size_t d_h = 64;
    std::vector<std::size_t> encoder_hidden{128};
    std::vector<std::size_t> decoder_hidden{128, 128};
};

nlohmann::json to_json(const HnlConfig& c);
HnlConfig hnl_config_from_json(const nlohmann::json& j);

/// Encoder -> one Laplace decoder per band -> assembler.
///
/// Decoder i maps (h, u_k) to (Re, Im) of f̄(s_k) for every k in band i, with
/// u_k = (k - N_{i-1}) / (N_i - N_{i-1}); band 1 also covers k = 0 at u = 0.
/// A forecast at ladder resolution i evaluates bands 1..i at the interval
/// midpoints (n - 1/2) / f_r^i and de-normalizes. Training minimizes the MSE
/// of the full-band forecast at the finest ladder resolution.
class HnlModel {
public:
    HnlModel(HnlConfig config, InputSpec input, data::NormStats stats, std::uint64_t seed);

    const HnlConfig& config() const noexcept { return config_; }
    const InputSpec& input_spec() const noexcept { return input_; }
    const data::NormStats& stats() const noexcept { return stats_; }
    const laplace::BandPartition& partition() const noexcept { return partition_; }
    std::uint64_t seed() const noexcept { return seed_; }

    const nn::DenseNet& encoder() const noexcept { return encoder_; }
    nn::DenseNet& encoder() noexcept { return encoder_; }
    const nn::DenseNet& decoder(std::size_t band) const { return decoders_.at(band - 1); }
    nn::DenseNet& decoder(std::size_t band) { return decoders_.at(band - 1); }

    /// u_k for every s-point of the band, ascending k.
    std::vector<double> band_coordinates(std::size_t band) const;

    std::vector<double> encode(std::span<const double> features) const;
    std::vector<double> encode(const data::WindowSample& sample) const;
    std::vector<std::complex<double>> decode_band(std::size_t band, std::span<const double> h) const;
    laplace::CoefficientSet coefficients(std::span<const double> h) const;

    /// Level index of a ladder resolution; throws if it is not on the ladder.
    std::size_t level_of(double resolution) const;
    std::vector<double> forecast_times(double resolution) const;
    const laplace::IltBasis& basis(std::size_t level) const { return *bases_.at(level); }

    /// Normalized forecast from bands 1..level+1.
    std::vector<double> assemble_normalized(const laplace::CoefficientSet& coeffs, double resolution) const;
    /// De-normalized forecast at a ladder resolution.
    std::vector<double> assemble_forecast(const data::WindowSample& sample, double resolution) const;
    ForecastBundle forecast_bundle(const data::WindowSample& sample, const std::string& model_name) const;

    nlohmann::json to_json() const;
    static HnlModel from_json(const nlohmann::json& j);

private:
    HnlModel(HnlConfig config, InputSpec input, data::NormStats stats, std::uint64_t seed,
             nn::DenseNet encoder, std::vector<nn::DenseNet> decoders);
    void build_bases();
    std::size_t metrics_length(double resolution) const;

    HnlConfig config_;
    InputSpec input_;
    data::NormStats stats_;
    std::uint64_t seed_ = 0;
    laplace::BandPartition partition_;
    nn::DenseNet encoder_;
    std::vector<nn::DenseNet> decoders_;
    std::vector<std::shared_ptr<const laplace::IltBasis>> bases_;
};

/// Joint training of encoder and decoders with Adam, early stopping on the
/// validation MSE. Restores the best parameters before returning.
TrainLog train_hnl(HnlModel& model, const std::vector<data::WindowSample>& train,
                   const std::vector<data::WindowSample>& val, const TrainConfig& config);

/// Mean over samples of the normalized MSE at the finest ladder resolution.
double hnl_mse(const HnlModel& model, const std::vector<data::WindowSample>& samples);

/// Single-decoder Neural Laplace for one resolution: one band [0, N].
HnlConfig nl_config(const HnlConfig& base, double resolution, int N);

}  // namespace hnl::forecast
