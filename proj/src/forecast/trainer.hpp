#pragma once

#include "hnl/forecast/common.hpp"

#include <functional>
#include <span>

namespace hnl::forecast::detail {

struct TrainHooks {
    /// One optimizer step on the given training indices; returns the batch loss.
    std::function<double(std::span<const std::size_t>)> step;
    std::function<double()> validate;
    std::function<void()> snapshot;
    std::function<void()> restore;
};

/// Shuffled mini-batches, early stopping on validation MSE. Non-finite losses
/// abort with the epoch and batch number.
TrainLog run_training(std::size_t train_count, const TrainConfig& config, const TrainHooks& hooks);

}  // namespace hnl::forecast::detail
