#include <doctest.h>

#include <cmath>
#include <vector>

#include "effortlab/dataset.hpp"
#include "effortlab/errors.hpp"
#include "effortlab/grnn.hpp"

using namespace effortlab;

TEST_CASE("a vanishing sigma degrades to nearest-neighbor lookup") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    const GrnnModel model = build_grnn(train, 1e-6);

    // Querying a training record returns that record's own effort.
    const ProjectRecord* five = train.find(5);
    REQUIRE(five != nullptr);
    CHECK(grnn_predict(model, *five) == doctest::Approx(55.0).epsilon(1e-6));
    const ProjectRecord* one = train.find(1);
    REQUIRE(one != nullptr);
    CHECK(grnn_predict(model, *one) == doctest::Approx(one->rde).epsilon(1e-6));

    // A query next to serial 5 snaps to its neighbour's value.
    const ProjectRecord nearby{99, 5, 44, 5, 5.52, 70};
    CHECK(grnn_predict(model, nearby) == doctest::Approx(55.0).epsilon(1e-6));
}

TEST_CASE("an enormous sigma flattens the kernel into the training mean") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    const GrnnModel model = build_grnn(train, 1e6);

    double mean = 0.0;
    for (const ProjectRecord& r : train.records) {
        mean += r.rde;
    }
    mean /= static_cast<double>(train.records.size());

    for (const ProjectRecord& r : builtin_dataset().records) {
        CHECK(grnn_predict(model, r) == doctest::Approx(mean).epsilon(1e-3));
    }
}

TEST_CASE("predictions are convex combinations of the stored efforts") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    double lo = train.records[0].rde;
    double hi = lo;
    for (const ProjectRecord& r : train.records) {
        lo = std::min(lo, r.rde);
        hi = std::max(hi, r.rde);
    }
    CHECK(lo == 55.0);
    CHECK(hi == 80.0);

    for (double sigma : {0.01, 0.1, 0.3, 1.0, 3.0}) {
        const GrnnModel model = build_grnn(train, sigma);
        for (const ProjectRecord& r : builtin_dataset().records) {
            const double p = grnn_predict(model, r);
            CHECK(std::isfinite(p));
            CHECK(p >= lo);
            CHECK(p <= hi);
        }
    }
}

TEST_CASE("the model stores normalized rows and raw-week targets") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    const GrnnModel model = build_grnn(train, 0.5);
    CHECK(model.norm == min_max_normalize(train));
    REQUIRE(model.inputs.size() == 31);
    REQUIRE(model.targets.size() == 31);
    CHECK(model.inputs[0].size() == 4);
    CHECK(model.targets[4] == 55.0); // serial 5
    CHECK(model.sigma == 0.5);

    const std::vector<Feature> two{Feature::Tcoe, Feature::Cgpa};
    const GrnnModel narrow = build_grnn(train, 0.5, two);
    CHECK(narrow.inputs[0].size() == 2);
}

TEST_CASE("construction rejects bad inputs") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    CHECK_THROWS_WITH_AS(build_grnn(train, 0.0), doctest::Contains("sigma"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(build_grnn(train, -1.0), doctest::Contains("sigma"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(build_grnn(Dataset{}, 1.0),
                         doctest::Contains("training sample"), ValidationError);
    CHECK_THROWS_WITH_AS(grnn_predict(GrnnModel{}, builtin_dataset().records[0]),
                         doctest::Contains("stored samples"), ValidationError);
}
