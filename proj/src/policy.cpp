#include "uavmec/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "uavmec/distributions.hpp"

namespace uavmec::nn {

Actor::Actor(std::size_t obs_dim, std::size_t act_dim, std::size_t hidden, HeadKind kind)
    : net_(obs_dim, hidden, kind == HeadKind::beta ? 2 * act_dim : act_dim), kind_(kind), act_dim_(act_dim) {
    if (kind_ == HeadKind::gaussian) log_std_ = Matrix(1, act_dim, 0.0);
}

void Actor::init(Rng& rng) {
    net_.init(rng, std::sqrt(2.0), 0.01);
    if (kind_ == HeadKind::gaussian) log_std_.fill(0.0);
}

void Actor::head_params(const Matrix& out, Matrix& first, Matrix& second) const {
    const std::size_t n = out.rows();
    first = Matrix(n, act_dim_);
    second = Matrix(n, act_dim_);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < act_dim_; ++a) {
            if (kind_ == HeadKind::beta) {
                first(i, a) = softplus(out(i, a)) + 1.0;
                second(i, a) = softplus(out(i, act_dim_ + a)) + 1.0;
            } else {
                first(i, a) = out(i, a);
                second(i, a) = log_std_(0, a);
            }
        }
    }
}

PolicySample Actor::act(const Matrix& obs, Rng& rng, bool deterministic) const {
    const Matrix out = net_.forward(obs);
    ensure_finite(out, "Actor::act");
    Matrix first;
    Matrix second;
    head_params(out, first, second);
    const std::size_t n = obs.rows();
    PolicySample s;
    s.raw = Matrix(n, act_dim_);
    s.env_action = Matrix(n, act_dim_);
    s.log_prob.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < act_dim_; ++a) {
            double x;
            if (kind_ == HeadKind::beta) {
                const BetaParams p{first(i, a), second(i, a)};
                x = deterministic ? beta_mean(p) : beta_sample(p, rng);
                s.log_prob[i] += beta_log_prob(p, x);
                s.env_action(i, a) = x;
            } else {
                x = deterministic ? first(i, a) : gaussian_sample(first(i, a), second(i, a), rng);
                s.log_prob[i] += gaussian_log_prob(x, first(i, a), second(i, a));
                s.env_action(i, a) = logistic(x);
            }
            s.raw(i, a) = x;
        }
    }
    return s;
}

PolicyEval Actor::evaluate(const Matrix& obs, const Matrix& raw) const {
    if (raw.rows() != obs.rows() || raw.cols() != act_dim_) throw std::invalid_argument("Actor::evaluate: shape");
    PolicyEval e;
    e.cache = net_.forward_cached(obs);
    ensure_finite(e.cache.output, "Actor::evaluate");
    head_params(e.cache.output, e.first, e.second);
    const std::size_t n = obs.rows();
    e.log_prob.assign(n, 0.0);
    e.entropy.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < act_dim_; ++a) {
            if (kind_ == HeadKind::beta) {
                const BetaParams p{e.first(i, a), e.second(i, a)};
                e.log_prob[i] += beta_log_prob(p, raw(i, a));
                e.entropy[i] += beta_entropy(p);
            } else {
                e.log_prob[i] += gaussian_log_prob(raw(i, a), e.first(i, a), e.second(i, a));
                e.entropy[i] += gaussian_entropy(e.second(i, a));
            }
        }
    }
    return e;
}

Grads Actor::backward(const PolicyEval& e, const Matrix& raw, std::span<const double> dlogp,
                      std::span<const double> dent) const {
    const std::size_t n = raw.rows();
    Matrix dout(n, net_.out_dim());
    Matrix dlog_std(1, act_dim_);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < act_dim_; ++a) {
            if (kind_ == HeadKind::beta) {
                const BetaParams p{e.first(i, a), e.second(i, a)};
                double la, lb, ha, hb;
                beta_log_prob_grad(p, raw(i, a), la, lb);
                beta_entropy_grad(p, ha, hb);
                const double da = dlogp[i] * la + dent[i] * ha;
                const double db = dlogp[i] * lb + dent[i] * hb;
                // alpha = softplus(z) + 1, d alpha / dz = sigmoid(z)
                dout(i, a) = da * sigmoid(e.cache.output(i, a));
                dout(i, act_dim_ + a) = db * sigmoid(e.cache.output(i, act_dim_ + a));
            } else {
                double dm, ds;
                gaussian_log_prob_grad(raw(i, a), e.first(i, a), e.second(i, a), dm, ds);
                dout(i, a) = dlogp[i] * dm;
                dlog_std(0, a) += dlogp[i] * ds + dent[i];
            }
        }
    }
    Grads grads;
    net_.backward(e.cache, dout, grads);
    if (kind_ == HeadKind::gaussian) grads.push_back(std::move(dlog_std));
    return grads;
}

std::vector<Matrix*> Actor::parameters() {
    auto p = net_.parameters();
    if (kind_ == HeadKind::gaussian) p.push_back(&log_std_);
    return p;
}

std::vector<const Matrix*> Actor::parameters() const {
    auto p = net_.parameters();
    if (kind_ == HeadKind::gaussian) p.push_back(&log_std_);
    return p;
}

}  // namespace uavmec::nn
