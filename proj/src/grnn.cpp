#include "effortlab/grnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"

namespace effortlab {

GrnnModel build_grnn(const Dataset& train, double sigma,
                     std::span<const Feature> features) {
    if (train.records.empty()) {
        throw ValidationError("GRNN needs at least one training sample");
    }
    if (!(sigma > 0.0)) {
        throw ValidationError("GRNN sigma must be > 0, got " + format_double(sigma));
    }
    GrnnModel model;
    model.norm = min_max_normalize(train, features);
    model.sigma = sigma;
    model.inputs.reserve(train.records.size());
    model.targets.reserve(train.records.size());
    for (const ProjectRecord& record : train.records) {
        model.inputs.push_back(model.norm.normalize(record));
        model.targets.push_back(record.rde);
    }
    return model;
}

double grnn_predict(const GrnnModel& model, const ProjectRecord& record) {
    if (model.inputs.empty()) {
        throw ValidationError("GRNN model has no stored samples");
    }
    const std::vector<double> query = model.norm.normalize(record);
    const double denom = 2.0 * model.sigma * model.sigma;

    std::vector<double> exponents;
    exponents.reserve(model.inputs.size());
    double max_exponent = -std::numeric_limits<double>::infinity();
    for (const std::vector<double>& input : model.inputs) {
        double dist2 = 0.0;
        for (std::size_t i = 0; i < input.size(); ++i) {
            const double diff = query[i] - input[i];
            dist2 += diff * diff;
        }
        const double e = -dist2 / denom;
        exponents.push_back(e);
        max_exponent = std::max(max_exponent, e);
    }

    double weight_sum = 0.0;
    double weighted_targets = 0.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        const double w = std::exp(exponents[i] - max_exponent);
        weight_sum += w;
        weighted_targets += model.targets[i] * w;
    }
    return weighted_targets / weight_sum; // weight_sum >= 1: the max term is exp(0)
}

} // namespace effortlab
