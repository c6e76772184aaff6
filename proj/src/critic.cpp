#include "uavmec/critic.hpp"

#include <cmath>
#include <stdexcept>

namespace uavmec::nn {

CentralCritic::CentralCritic(AgentType owner, const CriticShape& shape) : owner_(owner), shape_(shape) {
    const std::size_t own_dim = owner == AgentType::mu ? shape.mu_obs_dim : shape.uav_obs_dim;
    if (shape.attention) {
        mu_features_ = MlpNet(shape.mu_obs_dim, shape.hidden, shape.feature_dim, Activation::tanh);
        uav_features_ = MlpNet(shape.uav_obs_dim, shape.hidden, shape.feature_dim, Activation::tanh);
        attention_ = AttentionBlock(shape.feature_dim, shape.heads);
        head_ = MlpNet(shape.feature_dim + own_dim, shape.hidden, 1);
    } else {
        const std::size_t flat = shape.num_mus * shape.mu_obs_dim + shape.num_uavs * shape.uav_obs_dim;
        head_ = MlpNet(flat + own_dim, shape.hidden, 1);
    }
}

void CentralCritic::init(Rng& rng) {
    if (shape_.attention) {
        mu_features_.init(rng, std::sqrt(2.0), 1.0);
        uav_features_.init(rng, std::sqrt(2.0), 1.0);
        attention_.init(rng, 1.0);
    }
    head_.init(rng, std::sqrt(2.0), 1.0);
}

const Matrix& CentralCritic::own_obs(const GlobalStates& s) const {
    return owner_ == AgentType::mu ? s.mu_obs : s.uav_obs;
}

Matrix CentralCritic::head_input(const GlobalStates& s, Cache* cache) const {
    const std::size_t K = shape_.num_mus;
    const std::size_t M = shape_.num_uavs;
    const std::size_t S = s.num_states();
    if (s.num_mus != K || s.num_uavs != M || s.uav_obs.rows() != S * M)
        throw std::invalid_argument("CentralCritic: global state shape mismatch");
    const Matrix& own = own_obs(s);

    if (!shape_.attention) {
        const std::size_t dmu = shape_.mu_obs_dim;
        const std::size_t duav = shape_.uav_obs_dim;
        const std::size_t n = agents_per_state();
        const std::size_t own_dim = own.cols();
        Matrix x(S * n, K * dmu + M * duav + own_dim);
        for (std::size_t t = 0; t < S; ++t) {
            for (std::size_t i = 0; i < n; ++i) {
                auto row = x.row(t * n + i);
                std::size_t c = 0;
                for (std::size_t k = 0; k < K; ++k)
                    for (double v : s.mu_obs.row(t * K + k)) row[c++] = v;
                for (std::size_t m = 0; m < M; ++m)
                    for (double v : s.uav_obs.row(t * M + m)) row[c++] = v;
                for (double v : own.row(t * n + i)) row[c++] = v;
            }
        }
        return x;
    }

    const std::size_t I = K + M;
    const std::size_t d = shape_.feature_dim;
    MlpCache fm = mu_features_.forward_cached(s.mu_obs);
    MlpCache fu = uav_features_.forward_cached(s.uav_obs);
    Matrix feats(S * I, d);
    for (std::size_t t = 0; t < S; ++t) {
        for (std::size_t k = 0; k < K; ++k)
            std::copy(fm.output.row(t * K + k).begin(), fm.output.row(t * K + k).end(), feats.row(t * I + k).begin());
        for (std::size_t m = 0; m < M; ++m)
            std::copy(fu.output.row(t * M + m).begin(), fu.output.row(t * M + m).end(),
                      feats.row(t * I + K + m).begin());
    }
    std::vector<std::size_t> queries;
    const std::size_t first = owner_ == AgentType::mu ? 0 : K;
    for (std::size_t i = 0; i < agents_per_state(); ++i) queries.push_back(first + i);
    Matrix attended;
    AttentionCache ac = attention_.forward_cached(feats, I, queries, attended);
    if (cache) {
        cache->mu_feat = std::move(fm);
        cache->uav_feat = std::move(fu);
        cache->attn = std::move(ac);
    }
    return hconcat(attended, own);
}

std::vector<double> CentralCritic::values(const GlobalStates& s) const {
    const Matrix v = head_.forward(head_input(s, nullptr));
    ensure_finite(v, "CentralCritic::values");
    return v.values();
}

double CentralCritic::loss(const GlobalStates& s, const std::vector<double>& targets, Grads* grads) const {
    Cache cache;
    const Matrix input = head_input(s, &cache);
    cache.head = head_.forward_cached(input);
    const Matrix& v = cache.head.output;
    ensure_finite(v, "CentralCritic::loss");
    if (targets.size() != v.rows()) throw std::invalid_argument("CentralCritic::loss: target count mismatch");
    const double n = static_cast<double>(targets.size());
    double total = 0.0;
    Matrix dv(v.rows(), 1);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double diff = v(i, 0) - targets[i];
        total += 0.5 * diff * diff;
        dv(i, 0) = diff / n;
    }
    if (!grads) return total / n;

    Grads head_grads;
    const Matrix dinput = head_.backward(cache.head, dv, head_grads);
    grads->clear();
    if (!shape_.attention) {
        *grads = std::move(head_grads);
        return total / n;
    }

    const std::size_t K = shape_.num_mus;
    const std::size_t M = shape_.num_uavs;
    const std::size_t I = K + M;
    const std::size_t S = s.num_states();
    const std::size_t d = shape_.feature_dim;
    const Matrix dattended = column_slice(dinput, 0, d);
    Grads attn_grads;
    const Matrix dfeats = attention_.backward(cache.attn, dattended, attn_grads);
    Matrix dfm(S * K, d);
    Matrix dfu(S * M, d);
    for (std::size_t t = 0; t < S; ++t) {
        for (std::size_t k = 0; k < K; ++k)
            std::copy(dfeats.row(t * I + k).begin(), dfeats.row(t * I + k).end(), dfm.row(t * K + k).begin());
        for (std::size_t m = 0; m < M; ++m)
            std::copy(dfeats.row(t * I + K + m).begin(), dfeats.row(t * I + K + m).end(), dfu.row(t * M + m).begin());
    }
    Grads mu_grads;
    Grads uav_grads;
    mu_features_.backward(cache.mu_feat, dfm, mu_grads);
    uav_features_.backward(cache.uav_feat, dfu, uav_grads);
    for (auto* g : {&mu_grads, &uav_grads, &attn_grads, &head_grads})
        for (auto& m : *g) grads->push_back(std::move(m));
    return total / n;
}

std::vector<Matrix*> CentralCritic::parameters() {
    std::vector<Matrix*> p;
    if (shape_.attention) {
        for (auto* m : mu_features_.parameters()) p.push_back(m);
        for (auto* m : uav_features_.parameters()) p.push_back(m);
        for (auto* m : attention_.parameters()) p.push_back(m);
    }
    for (auto* m : head_.parameters()) p.push_back(m);
    return p;
}

std::vector<const Matrix*> CentralCritic::parameters() const {
    std::vector<const Matrix*> p;
    if (shape_.attention) {
        for (auto* m : mu_features_.parameters()) p.push_back(m);
        for (auto* m : uav_features_.parameters()) p.push_back(m);
        for (auto* m : attention_.parameters()) p.push_back(m);
    }
    for (auto* m : head_.parameters()) p.push_back(m);
    return p;
}

}  // namespace uavmec::nn
