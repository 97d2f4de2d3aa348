#pragma once

#include <span>
#include <vector>

#include "effortlab/dataset.hpp"

namespace effortlab {

/// Generalized regression network: a Gaussian-kernel weighted average of the
/// training targets. Nothing is trained; the model is the training set plus
/// a smoothing width.
struct GrnnModel {
    NormalizationParams norm;
    std::vector<std::vector<double>> inputs; // normalized feature rows
    std::vector<double> targets;             // effort in weeks
    double sigma = 1.0;
};

GrnnModel build_grnn(const Dataset& train, double sigma,
                     std::span<const Feature> features = kAllFeatures);

/// y_hat = sum_i y_i * exp(-d_i^2 / (2 sigma^2)) / sum_i exp(...), with d_i
/// the Euclidean distance to sample i in normalized feature space. The max
/// exponent is subtracted before exponentiating, so tiny sigmas degrade to
/// nearest-neighbor instead of 0/0.
double grnn_predict(const GrnnModel& model, const ProjectRecord& record);

} // namespace effortlab
