#include "uavmec/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavmec::nn {

namespace {

// Lanczos g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

void check_shapes(const BetaParams& p) {
    if (!(p.alpha > 0.0) || !(p.beta > 0.0)) throw std::invalid_argument("Beta shapes must be positive");
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) {
        if (x == std::floor(x)) throw std::domain_error("log_gamma: pole");
        // Reflection: log|Gamma(x)| = log(pi / |sin(pi x)|) - log|Gamma(1 - x)|
        return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
    }
    if (x < 0.5) return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    if (x == 1.0 || x == 2.0) return 0.0;
    const double z = x - 1.0;
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: non-positive argument");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132)))));
    return acc + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("trigamma: non-positive argument");
    double acc = 0.0;
    while (x < 10.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv + 0.5 * inv2 +
        inv * inv2 * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66)))));
    return acc + series;
}

double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double logistic(double z) { return sigmoid(z); }

double beta_log_prob(const BetaParams& p, double x) {
    check_shapes(p);
    x = std::clamp(x, kBetaEdge, 1.0 - kBetaEdge);
    return log_gamma(p.alpha + p.beta) - log_gamma(p.alpha) - log_gamma(p.beta) + (p.alpha - 1.0) * std::log(x) +
           (p.beta - 1.0) * std::log1p(-x);
}

void beta_log_prob_grad(const BetaParams& p, double x, double& d_alpha, double& d_beta) {
    check_shapes(p);
    x = std::clamp(x, kBetaEdge, 1.0 - kBetaEdge);
    const double psi_sum = digamma(p.alpha + p.beta);
    d_alpha = psi_sum - digamma(p.alpha) + std::log(x);
    d_beta = psi_sum - digamma(p.beta) + std::log1p(-x);
}

double beta_entropy(const BetaParams& p) {
    check_shapes(p);
    const double a = p.alpha;
    const double b = p.beta;
    const double log_b = log_gamma(a) + log_gamma(b) - log_gamma(a + b);
    return log_b - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b) + (a + b - 2.0) * digamma(a + b);
}

void beta_entropy_grad(const BetaParams& p, double& d_alpha, double& d_beta) {
    check_shapes(p);
    const double a = p.alpha;
    const double b = p.beta;
    const double tri_sum = (a + b - 2.0) * trigamma(a + b);
    d_alpha = -(a - 1.0) * trigamma(a) + tri_sum;
    d_beta = -(b - 1.0) * trigamma(b) + tri_sum;
}

double beta_mean(const BetaParams& p) { return p.alpha / (p.alpha + p.beta); }

double gamma_sample(double shape, std::mt19937_64& rng) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma_sample: shape must be positive");
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    if (shape < 1.0) {
        double u = uniform(rng);
        while (u <= 0.0) u = uniform(rng);
        return gamma_sample(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double beta_sample(const BetaParams& p, std::mt19937_64& rng) {
    check_shapes(p);
    const double x = gamma_sample(p.alpha, rng);
    const double y = gamma_sample(p.beta, rng);
    return x / (x + y);
}

double gaussian_log_prob(double x, double mean, double log_std) {
    const double z = (x - mean) * std::exp(-log_std);
    return -0.5 * z * z - log_std - 0.5 * std::log(2.0 * std::numbers::pi);
}

void gaussian_log_prob_grad(double x, double mean, double log_std, double& d_mean, double& d_log_std) {
    const double inv_var = std::exp(-2.0 * log_std);
    const double diff = x - mean;
    d_mean = diff * inv_var;
    d_log_std = diff * diff * inv_var - 1.0;
}

double gaussian_entropy(double log_std) { return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_std; }

double gaussian_sample(double mean, double log_std, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return mean + std::exp(log_std) * normal(rng);
}

}  // namespace uavmec::nn
