#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace tokaudit {

// Power law between model parameter count and compute-optimal vocabulary
// size, fitted in log2-log2 space: log2(vocab) = a + b * log2(params).
struct VocabScalingModel {
    double log_intercept = 0.0;  // a
    double log_slope = 0.0;      // b, positive
    std::vector<std::pair<double, double>> anchors;  // (params, vocab size)
    std::vector<double> residuals;                   // log2-domain, per anchor
};

// Least-squares fit in log-log space; needs at least two positive points.
VocabScalingModel fit_power_law(std::span<const std::pair<double, double>> points);

// Rounded power-law prediction; strictly increasing in n_params.
std::int64_t suggest_vocab_size(const VocabScalingModel& model, double n_params);

// Fitted to the published 3B/7B/15B anchor sizes.
const VocabScalingModel& bundled_scaling_model();

void save_scaling_model(const VocabScalingModel& model, const std::filesystem::path& path);
VocabScalingModel load_scaling_model(const std::filesystem::path& path);

}  // namespace tokaudit
