#include "sharpbound/activation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sharpbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double stable_sigmoid(double y) {
    if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
    const double e = std::exp(y);
    return e / (1.0 + e);
}

double softplus(double y) {
    // log(1 + e^y) = max(y, 0) + log1p(e^{-|y|})
    return std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y)));
}

double gauss_pdf(double y) {
    return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
}

double gauss_cdf(double y) {
    return 0.5 * (1.0 + std::erf(y / std::numbers::sqrt2));
}

}  // namespace

std::string_view to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Linear: return "linear";
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::SmoothRelu: return "smoothrelu";
        case ActivationKind::Gelu: return "gelu";
    }
    throw std::logic_error("to_string: bad ActivationKind");
}

ActivationKind activation_from_string(std::string_view name) {
    for (ActivationKind kind : kAllActivations)
        if (name == to_string(kind)) return kind;
    throw std::invalid_argument("unknown activation: " + std::string(name));
}

ActivationEval eval(ActivationKind kind, double y) {
    if (!std::isfinite(y))
        throw std::domain_error("activation eval: non-finite input");
    switch (kind) {
        case ActivationKind::Linear:
            return {y, 1.0, 0.0};
        case ActivationKind::Sigmoid: {
            const double f = stable_sigmoid(y);
            const double f1 = (1.0 - f) * f;
            return {f, f1, (1.0 - 2.0 * f) * f1};
        }
        case ActivationKind::Tanh: {
            const double f = std::tanh(y);
            const double f1 = 1.0 - f * f;
            return {f, f1, -2.0 * f * f1};
        }
        case ActivationKind::SmoothRelu: {
            // derivative chain collapses onto the sigmoid
            const double f1 = stable_sigmoid(y);
            return {softplus(y), f1, (1.0 - f1) * f1};
        }
        case ActivationKind::Gelu: {
            const double g = gauss_pdf(y);
            const double cdf = gauss_cdf(y);
            return {y * cdf, cdf + y * g, g * (2.0 - y * y)};
        }
    }
    throw std::logic_error("eval: bad ActivationKind");
}

void eval_vec(ActivationKind kind, std::span<const double> y,
              std::vector<double>& value, std::vector<double>& slope,
              std::vector<double>& curve) {
    value.resize(y.size());
    slope.resize(y.size());
    curve.resize(y.size());
    for (std::size_t n = 0; n < y.size(); ++n) {
        const ActivationEval e = eval(kind, y[n]);
        value[n] = e.value;
        slope[n] = e.slope;
        curve[n] = e.curve;
    }
}

ActivationProfile profile(ActivationKind kind) {
    const double sqrt3 = std::numbers::sqrt3;
    switch (kind) {
        case ActivationKind::Linear:
            return {kind, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, kInf};
        case ActivationKind::Sigmoid:
            return {kind, 0.25, 0.0, sqrt3 / 18.0, -sqrt3 / 18.0,
                    1.0 / 16.0, sqrt3 / 18.0, 1.0};
        case ActivationKind::Tanh:
            return {kind, 1.0, 0.0, 4.0 * sqrt3 / 9.0, -4.0 * sqrt3 / 9.0,
                    1.0, 4.0 * sqrt3 / 9.0, 1.0};
        case ActivationKind::SmoothRelu:
            return {kind, 1.0, 0.0, 0.25, 0.0, 1.0, 0.25, kInf};
        case ActivationKind::Gelu: {
            // f'' = 0 at y = +-sqrt(2), f''' = 0 at y in {0, +-2}
            const double s2 = std::numbers::sqrt2;
            const double fp_max = gauss_cdf(s2) + s2 * gauss_pdf(s2);
            const double fp_min = gauss_cdf(-s2) - s2 * gauss_pdf(s2);
            const double fs_max = 2.0 * gauss_pdf(0.0);  // = sqrt(2/pi)
            const double fs_min = -2.0 * gauss_pdf(2.0);
            return {kind, fp_max, fp_min, fs_max, fs_min,
                    fp_max * fp_max, fs_max, kInf};
        }
    }
    throw std::logic_error("profile: bad ActivationKind");
}

}  // namespace sharpbound
