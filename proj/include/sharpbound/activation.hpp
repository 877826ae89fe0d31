#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sharpbound {

enum class ActivationKind { Linear, Sigmoid, Tanh, SmoothRelu, Gelu };

inline constexpr ActivationKind kAllActivations[] = {
    ActivationKind::Linear, ActivationKind::Sigmoid, ActivationKind::Tanh,
    ActivationKind::SmoothRelu, ActivationKind::Gelu};

std::string_view to_string(ActivationKind kind);
// Accepts the lowercase names used in configs and on the CLI:
// "linear", "sigmoid", "tanh", "smoothrelu", "gelu".
ActivationKind activation_from_string(std::string_view name);

struct ActivationEval {
    double value;   // f(y)
    double slope;   // f'(y)
    double curve;   // f''(y)
};

// Value and first two derivatives at y. Stable for |y| up to 500:
// the saturating branches are arranged so no exp overflows.
// Throws std::domain_error on non-finite input.
ActivationEval eval(ActivationKind kind, double y);

void eval_vec(ActivationKind kind, std::span<const double> y,
              std::vector<double>& value, std::vector<double>& slope,
              std::vector<double>& curve);

// Closed-form extrema of f' and f'' plus the constants that feed the
// trace upper bounds. zeta1 bounds f'(y)^2, zeta2 bounds |f''(y)|;
// output_sup is +infinity for the unbounded activations.
struct ActivationProfile {
    ActivationKind kind;
    double f_prime_max;
    double f_prime_inf;
    double f_second_max;
    double f_second_min;
    double zeta1;
    double zeta2;
    double output_sup;
};

ActivationProfile profile(ActivationKind kind);

}  // namespace sharpbound
