#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "uavmec/matrix.hpp"

namespace uavmec::nn {

using Rng = std::mt19937_64;

/// Parameter gradients, in the same order as the owner's `parameters()`.
using Grads = std::vector<Matrix>;

enum class Activation { identity, tanh };

/// Fully connected layer y = x W + b with W stored in x out.
struct Linear {
    Matrix weight;
    Matrix bias;

    Linear() = default;
    Linear(std::size_t in, std::size_t out) : weight(in, out), bias(1, out) {}

    std::size_t in_dim() const { return weight.rows(); }
    std::size_t out_dim() const { return weight.cols(); }
    Matrix forward(const Matrix& x) const;
};

/// Orthogonal initialization scaled by `gain`; biases zeroed.
void init_orthogonal(Linear& layer, double gain, Rng& rng);

struct MlpCache {
    Matrix input;
    Matrix hidden;  // post-activation
    Matrix output;  // post-activation
};

/// in -> hidden (tanh) -> out network.
class MlpNet {
public:
    MlpNet() = default;
    MlpNet(std::size_t in, std::size_t hidden, std::size_t out, Activation out_act = Activation::identity);

    void init(Rng& rng, double hidden_gain, double out_gain);

    std::size_t in_dim() const { return l1_.in_dim(); }
    std::size_t hidden_dim() const { return l1_.out_dim(); }
    std::size_t out_dim() const { return l2_.out_dim(); }
    Activation output_activation() const { return out_act_; }

    Matrix forward(const Matrix& x) const;
    MlpCache forward_cached(const Matrix& x) const;
    /// Returns dL/dx and appends parameter gradients to `grads`.
    Matrix backward(const MlpCache& cache, const Matrix& dy, Grads& grads) const;

    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;

private:
    Linear l1_;
    Linear l2_;
    Activation out_act_ = Activation::identity;
};

struct AttentionCache {
    Matrix input;
    Matrix queries;
    Matrix keys;
    Matrix values;
    Matrix weights;  // one row per (query, head): softmax over all agents, 0 at self
    std::size_t agents_per_state = 0;
    std::vector<std::size_t> query_agents;
};

/// Multi-head dot-product attention across the agents of one global state.
/// Agent i attends to every j != i; heads split the model dimension evenly
/// and their outputs are concatenated.
class AttentionBlock {
public:
    AttentionBlock() = default;
    AttentionBlock(std::size_t dim, std::size_t heads);

    void init(Rng& rng, double gain);

    std::size_t dim() const { return wq_.rows(); }
    std::size_t heads() const { return heads_; }
    std::size_t head_dim() const { return dim() / heads_; }

    /// `features` stacks states of `agents_per_state` rows each. Output
    /// has one row per (state, query agent), states outermost.
    Matrix forward(const Matrix& features, std::size_t agents_per_state,
                   const std::vector<std::size_t>& query_agents) const;
    AttentionCache forward_cached(const Matrix& features, std::size_t agents_per_state,
                                  const std::vector<std::size_t>& query_agents, Matrix& out) const;
    Matrix backward(const AttentionCache& cache, const Matrix& dout, Grads& grads) const;

    Matrix& query_weight() { return wq_; }
    Matrix& key_weight() { return wk_; }
    Matrix& value_weight() { return wv_; }

    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;

private:
    Matrix wq_;
    Matrix wk_;
    Matrix wv_;
    std::size_t heads_ = 1;
};

/// Adam with bias correction.
class Adam {
public:
    Adam() = default;
    Adam(const std::vector<Matrix*>& params, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);

    void step(const std::vector<Matrix*>& params, const Grads& grads);

    double learning_rate() const { return lr_; }
    std::int64_t steps() const { return t_; }
    std::vector<Matrix>& first_moments() { return m_; }
    std::vector<Matrix>& second_moments() { return v_; }
    void set_steps(std::int64_t t) { t_ = t; }

private:
    double lr_ = 3e-4;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    std::int64_t t_ = 0;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
};

double global_norm(const Grads& grads);
/// Rescales to `max_norm` when above it; returns the pre-clip norm.
double clip_grad_norm(Grads& grads, double max_norm);

struct GradCheckReport {
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    std::size_t checked = 0;
    std::size_t worst_param = 0;
    std::size_t worst_entry = 0;
};

/// Central differences with step h * max(1, |w|) against analytic grads.
/// Relative error is |a - n| / max(|a|, |n|, floor).
GradCheckReport grad_check(const std::function<double()>& loss, const std::vector<Matrix*>& params,
                           const Grads& analytic, double h = 1e-5, double floor = 1e-6);

}  // namespace uavmec::nn
