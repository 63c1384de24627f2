#include "trainer.hpp"

#include "hnl/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace hnl::forecast::detail {

TrainLog run_training(std::size_t train_count, const TrainConfig& config, const TrainHooks& hooks) {
    if (train_count == 0) throw ValidationError("training set is empty");
    if (config.batch_size == 0) throw ValidationError("batch size must be positive");
    TrainLog log;
    const double initial = hooks.validate();
    if (!std::isfinite(initial)) throw NumericError("validation loss is not finite before training");
    log.epochs.push_back({0, 0.0, initial});
    log.best_epoch = 0;
    log.best_val_mse = initial;
    hooks.snapshot();

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(train_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < train_count; start += config.batch_size) {
            const std::size_t len = std::min(config.batch_size, train_count - start);
            const double loss = hooks.step(std::span<const std::size_t>(order.data() + start, len));
            if (!std::isfinite(loss)) {
                throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batches + 1));
            }
            total += loss;
            ++batches;
        }
        const double val = hooks.validate();
        if (!std::isfinite(val)) {
            throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
        }
        log.epochs.push_back({epoch, total / static_cast<double>(batches), val});
        if (val < log.best_val_mse) {
            log.best_val_mse = val;
            log.best_epoch = epoch;
            hooks.snapshot();
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }
    hooks.restore();
    return log;
}

}  // namespace hnl::forecast::detail
