#include "tokaudit/scaling.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tokaudit/error.hpp"

namespace tokaudit {

VocabScalingModel fit_power_law(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) {
        throw ValidationError("power-law fit needs at least two points");
    }
    double sum_x = 0.0;
    double sum_y = 0.0;
    for (const auto& [params, vocab] : points) {
        if (params <= 0.0 || vocab <= 0.0) {
            throw ValidationError("power-law fit needs strictly positive values");
        }
        sum_x += std::log2(params);
        sum_y += std::log2(vocab);
    }
    const double n = static_cast<double>(points.size());
    const double mean_x = sum_x / n;
    const double mean_y = sum_y / n;
    double cov = 0.0;
    double var = 0.0;
    for (const auto& [params, vocab] : points) {
        const double dx = std::log2(params) - mean_x;
        const double dy = std::log2(vocab) - mean_y;
        cov += dx * dy;
        var += dx * dx;
    }
    if (var == 0.0) {
        throw ValidationError("power-law fit needs at least two distinct parameter counts");
    }
    VocabScalingModel model;
    model.log_slope = cov / var;
    model.log_intercept = mean_y - model.log_slope * mean_x;
    if (model.log_slope <= 0.0) {
        throw ValidationError("fitted slope is not positive; points do not follow an "
                              "increasing power law");
    }
    for (const auto& [params, vocab] : points) {
        model.anchors.emplace_back(params, vocab);
        model.residuals.push_back(std::log2(vocab) -
                                  (model.log_intercept + model.log_slope * std::log2(params)));
    }
    return model;
}

std::int64_t suggest_vocab_size(const VocabScalingModel& model, double n_params) {
    if (n_params <= 0.0) {
        throw ValidationError("parameter count must be positive");
    }
    const double log_vocab = model.log_intercept + model.log_slope * std::log2(n_params);
    return std::llround(std::exp2(log_vocab));
}

const VocabScalingModel& bundled_scaling_model() {
    static const VocabScalingModel model = [] {
        const std::vector<std::pair<double, double>> anchors = {
            {3e9, 39367.0}, {7e9, 62280.0}, {15e9, 93987.0}};
        return fit_power_law(anchors);
    }();
    return model;
}

void save_scaling_model(const VocabScalingModel& model, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["a"] = model.log_intercept;
    j["b"] = model.log_slope;
    nlohmann::ordered_json anchors = nlohmann::ordered_json::array();
    for (const auto& [params, vocab] : model.anchors) {
        anchors.push_back(nlohmann::ordered_json::array({params, vocab}));
    }
    j["anchors"] = std::move(anchors);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open " + path.string() + " for writing");
    }
    out << j.dump(2) << "\n";
}

VocabScalingModel load_scaling_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open scaling model file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scaling model file is not valid JSON: ") + e.what());
    }
    VocabScalingModel model;
    model.log_intercept = j.at("a").get<double>();
    model.log_slope = j.at("b").get<double>();
    if (model.log_slope <= 0.0) {
        throw ValidationError("scaling model slope must be positive");
    }
    if (j.contains("anchors")) {
        for (const auto& anchor : j["anchors"]) {
            model.anchors.emplace_back(anchor.at(0).get<double>(), anchor.at(1).get<double>());
            model.residuals.push_back(
                std::log2(model.anchors.back().second) -
                (model.log_intercept + model.log_slope * std::log2(model.anchors.back().first)));
        }
    }
    return model;
}

}  // namespace tokaudit
