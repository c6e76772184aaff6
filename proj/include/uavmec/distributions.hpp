#pragma once

#include <random>

namespace uavmec::nn {

double log_gamma(double x);
double digamma(double x);
double trigamma(double x);

double softplus(double z);
double sigmoid(double z);
double logistic(double z);  // same as sigmoid; named for the action squash

/// Shape parameters of a Beta distribution.
struct BetaParams {
    double alpha = 1.0;
    double beta = 1.0;
};

constexpr double kBetaEdge = 1e-6;

/// Log density; x is clamped to [1e-6, 1 - 1e-6]. Throws for non-positive shapes.
double beta_log_prob(const BetaParams& p, double x);
/// d log f / d alpha and d log f / d beta at the (clamped) point x.
void beta_log_prob_grad(const BetaParams& p, double x, double& d_alpha, double& d_beta);
double beta_entropy(const BetaParams& p);
void beta_entropy_grad(const BetaParams& p, double& d_alpha, double& d_beta);
double beta_mean(const BetaParams& p);

/// Marsaglia-Tsang; shapes below one use the U^{1/a} boost.
double gamma_sample(double shape, std::mt19937_64& rng);
double beta_sample(const BetaParams& p, std::mt19937_64& rng);

double gaussian_log_prob(double x, double mean, double log_std);
/// d log p / d mean and d log p / d log_std.
void gaussian_log_prob_grad(double x, double mean, double log_std, double& d_mean, double& d_log_std);
double gaussian_entropy(double log_std);
double gaussian_sample(double mean, double log_std, std::mt19937_64& rng);

}  // namespace uavmec::nn
