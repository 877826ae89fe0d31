#pragma once

#include <vector>

#include "sharpbound/experiment.hpp"
#include "sharpbound/network.hpp"
#include "sharpbound/rng.hpp"

namespace sharpbound::testing {

struct RandomInstance {
    NetworkParams params;
    Dataset data;
    ActivationKind kind;
};

// Parameters from U(-2,2), gaussian inputs, random labels. Dimensions
// capped at M<=3, N<=4, I<=8 unless overridden.
inline RandomInstance random_instance(Rng& rng, ActivationKind kind,
                                      int max_input = 3, int max_hidden = 4,
                                      int max_samples = 8) {
    RandomInstance inst;
    inst.kind = kind;
    const int input_dim = 1 + static_cast<int>(rng.next_u64() % max_input);
    const int hidden_dim = 1 + static_cast<int>(rng.next_u64() % max_hidden);
    const int count = 1 + static_cast<int>(rng.next_u64() % max_samples);

    const NetworkShape shape{input_dim, hidden_dim};
    std::vector<double> theta(shape.param_dim());
    for (double& x : theta) x = rng.uniform(-2.0, 2.0);
    inst.params = unflatten(theta, shape);

    inst.data.inputs = Matrix(input_dim, count);
    inst.data.labels.resize(count);
    for (int i = 0; i < count; ++i) {
        for (int row = 0; row < input_dim; ++row) inst.data.inputs(row, i) = rng.normal();
        inst.data.labels[i] = static_cast<int>(rng.next_u64() % 2);
    }
    return inst;
}

inline ActivationKind kind_for(int index) {
    return kAllActivations[static_cast<std::size_t>(index) % 5];
}

}  // namespace sharpbound::testing
