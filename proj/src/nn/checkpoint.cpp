#include "hnl/nn/checkpoint.hpp"

#include "hnl/core/error.hpp"

namespace hnl::nn {

nlohmann::json to_json(const DenseNet& net) {
    nlohmann::json j;
    j["sizes"] = net.sizes();
    j["seed"] = net.seed();
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto& L = net.layer(l);
        layers.push_back({{"activation", L.activation == Activation::tanh ? "tanh" : "identity"},
                          {"weight", L.weight.values()},
                          {"bias", L.bias}});
    }
    j["layers"] = std::move(layers);
    return j;
}

DenseNet net_from_json(const nlohmann::json& j) {
    try {
        auto sizes = j.at("sizes").get<std::vector<std::size_t>>();
        const auto seed = j.at("seed").get<std::uint64_t>();
        const auto& jl = j.at("layers");
        if (sizes.size() < 2 || jl.size() + 1 != sizes.size()) {
            throw ValidationError("checkpoint layer count does not match sizes");
        }
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l < jl.size(); ++l) {
            DenseLayer L;
            const auto act = jl[l].at("activation").get<std::string>();
            if (act == "tanh") {
                L.activation = Activation::tanh;
            } else if (act == "identity") {
                L.activation = Activation::identity;
            } else {
                throw ValidationError("unknown activation '" + act + "' in checkpoint");
            }
            auto w = jl[l].at("weight").get<std::vector<double>>();
            if (w.size() != sizes[l] * sizes[l + 1]) {
                throw ValidationError("checkpoint weight size mismatch in layer " + std::to_string(l));
            }
            L.weight = Matrix(sizes[l + 1], sizes[l]);
            L.weight.values() = std::move(w);
            L.bias = jl[l].at("bias").get<std::vector<double>>();
            layers.push_back(std::move(L));
        }
        return DenseNet(std::move(sizes), std::move(layers), seed);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed network checkpoint: ") + e.what());
    }
}

}  // namespace hnl::nn
