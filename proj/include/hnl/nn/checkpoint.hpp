#pragma once

#include "hnl/nn/dense_net.hpp"

#include <json.hpp>

namespace hnl::nn {

/// JSON form of a network. Doubles are written with round-trip precision so a
/// save/load cycle reproduces every parameter bit for bit.
nlohmann::json to_json(const DenseNet& net);
DenseNet net_from_json(const nlohmann::json& j);

}  // namespace hnl::nn
