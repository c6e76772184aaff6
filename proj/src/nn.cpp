#include "uavmec/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavmec::nn {

Matrix Linear::forward(const Matrix& x) const {
    Matrix y = matmul(x, weight);
    add_row_vector(y, bias);
    return y;
}

void init_orthogonal(Linear& layer, double gain, Rng& rng) {
    // Gram-Schmidt on a Gaussian matrix along the longer side.
    const std::size_t rows = layer.weight.rows();
    const std::size_t cols = layer.weight.cols();
    const bool transpose = rows < cols;
    const std::size_t n_vec = transpose ? rows : cols;
    const std::size_t len = transpose ? cols : rows;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> basis;
    basis.reserve(n_vec);
    for (std::size_t i = 0; i < n_vec; ++i) {
        std::vector<double> v(len);
        for (double& x : v) x = normal(rng);
        for (const auto& b : basis) {
            double dot = 0.0;
            for (std::size_t j = 0; j < len; ++j) dot += v[j] * b[j];
            for (std::size_t j = 0; j < len; ++j) v[j] -= dot * b[j];
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        basis.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < n_vec; ++i)
        for (std::size_t j = 0; j < len; ++j) {
            if (transpose)
                layer.weight(i, j) = gain * basis[i][j];
            else
                layer.weight(j, i) = gain * basis[i][j];
        }
    layer.bias.fill(0.0);
}

MlpNet::MlpNet(std::size_t in, std::size_t hidden, std::size_t out, Activation out_act)
    : l1_(in, hidden), l2_(hidden, out), out_act_(out_act) {}

void MlpNet::init(Rng& rng, double hidden_gain, double out_gain) {
    init_orthogonal(l1_, hidden_gain, rng);
    init_orthogonal(l2_, out_gain, rng);
}

Matrix MlpNet::forward(const Matrix& x) const { return forward_cached(x).output; }

MlpCache MlpNet::forward_cached(const Matrix& x) const {
    MlpCache c;
    c.input = x;
    c.hidden = l1_.forward(x);
    for (double& v : c.hidden.values()) v = std::tanh(v);
    c.output = l2_.forward(c.hidden);
    if (out_act_ == Activation::tanh)
        for (double& v : c.output.values()) v = std::tanh(v);
    return c;
}

Matrix MlpNet::backward(const MlpCache& cache, const Matrix& dy, Grads& grads) const {
    Matrix dz2 = dy;
    if (out_act_ == Activation::tanh) {
        for (std::size_t i = 0; i < dz2.size(); ++i) {
            const double y = cache.output.values()[i];
            dz2.values()[i] *= 1.0 - y * y;
        }
    }
    Matrix dw2 = matmul_tn(cache.hidden, dz2);
    Matrix db2 = column_sums(dz2);
    Matrix dh = matmul_nt(dz2, l2_.weight);
    for (std::size_t i = 0; i < dh.size(); ++i) {
        const double h = cache.hidden.values()[i];
        dh.values()[i] *= 1.0 - h * h;
    }
    Matrix dw1 = matmul_tn(cache.input, dh);
    Matrix db1 = column_sums(dh);
    Matrix dx = matmul_nt(dh, l1_.weight);
    grads.push_back(std::move(dw1));
    grads.push_back(std::move(db1));
    grads.push_back(std::move(dw2));
    grads.push_back(std::move(db2));
    return dx;
}

std::vector<Matrix*> MlpNet::parameters() { return {&l1_.weight, &l1_.bias, &l2_.weight, &l2_.bias}; }

std::vector<const Matrix*> MlpNet::parameters() const {
    return {&l1_.weight, &l1_.bias, &l2_.weight, &l2_.bias};
}

AttentionBlock::AttentionBlock(std::size_t dim, std::size_t heads)
    : wq_(dim, dim), wk_(dim, dim), wv_(dim, dim), heads_(heads) {
    if (heads == 0 || dim % heads != 0) throw std::invalid_argument("AttentionBlock: dim must divide into heads");
}

void AttentionBlock::init(Rng& rng, double gain) {
    for (Matrix* w : {&wq_, &wk_, &wv_}) {
        Linear tmp(w->rows(), w->cols());
        init_orthogonal(tmp, gain, rng);
        *w = tmp.weight;
    }
}

Matrix AttentionBlock::forward(const Matrix& features, std::size_t agents_per_state,
                               const std::vector<std::size_t>& query_agents) const {
    Matrix out;
    forward_cached(features, agents_per_state, query_agents, out);
    return out;
}

AttentionCache AttentionBlock::forward_cached(const Matrix& features, std::size_t agents_per_state,
                                              const std::vector<std::size_t>& query_agents, Matrix& out) const {
    const std::size_t I = agents_per_state;
    if (I < 2) throw std::invalid_argument("AttentionBlock: need at least two agents");
    if (features.cols() != dim() || features.rows() % I != 0)
        throw std::invalid_argument("AttentionBlock: feature shape mismatch");
    const std::size_t S = features.rows() / I;
    const std::size_t nq = query_agents.size();
    const std::size_t H = heads_;
    const std::size_t dh = head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    AttentionCache c;
    c.input = features;
    c.queries = matmul(features, wq_);
    c.keys = matmul(features, wk_);
    c.values = matmul(features, wv_);
    c.weights = Matrix(S * nq * H, I);
    c.agents_per_state = I;
    c.query_agents = query_agents;
    out = Matrix(S * nq, dim());

    std::vector<double> scores(I);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t qi = 0; qi < nq; ++qi) {
            const std::size_t i = query_agents[qi];
            const std::size_t qrow = s * I + i;
            for (std::size_t h = 0; h < H; ++h) {
                const std::size_t off = h * dh;
                double mx = -INFINITY;
                for (std::size_t j = 0; j < I; ++j) {
                    if (j == i) continue;
                    double dot = 0.0;
                    for (std::size_t d = 0; d < dh; ++d) dot += c.queries(qrow, off + d) * c.keys(s * I + j, off + d);
                    scores[j] = dot * scale;
                    mx = std::max(mx, scores[j]);
                }
                double denom = 0.0;
                for (std::size_t j = 0; j < I; ++j) {
                    if (j == i) continue;
                    scores[j] = std::exp(scores[j] - mx);
                    denom += scores[j];
                }
                const std::size_t wrow = (s * nq + qi) * H + h;
                for (std::size_t j = 0; j < I; ++j) {
                    if (j == i) continue;
                    const double a = scores[j] / denom;
                    c.weights(wrow, j) = a;
                    for (std::size_t d = 0; d < dh; ++d) out(s * nq + qi, off + d) += a * c.values(s * I + j, off + d);
                }
            }
        }
    }
    return c;
}

Matrix AttentionBlock::backward(const AttentionCache& c, const Matrix& dout, Grads& grads) const {
    const std::size_t I = c.agents_per_state;
    const std::size_t S = c.input.rows() / I;
    const std::size_t nq = c.query_agents.size();
    const std::size_t H = heads_;
    const std::size_t dh = head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Matrix dq(c.queries.rows(), dim());
    Matrix dk(c.keys.rows(), dim());
    Matrix dv(c.values.rows(), dim());
    std::vector<double> dalpha(I);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t qi = 0; qi < nq; ++qi) {
            const std::size_t i = c.query_agents[qi];
            const std::size_t qrow = s * I + i;
            const std::size_t orow = s * nq + qi;
            for (std::size_t h = 0; h < H; ++h) {
                const std::size_t off = h * dh;
                const std::size_t wrow = orow * H + h;
                double weighted = 0.0;
                for (std::size_t j = 0; j < I; ++j) {
                    if (j == i) continue;
                    const double a = c.weights(wrow, j);
                    double da = 0.0;
                    for (std::size_t d = 0; d < dh; ++d) {
                        da += dout(orow, off + d) * c.values(s * I + j, off + d);
                        dv(s * I + j, off + d) += a * dout(orow, off + d);
                    }
                    dalpha[j] = da;
                    weighted += a * da;
                }
                for (std::size_t j = 0; j < I; ++j) {
                    if (j == i) continue;
                    const double ds = c.weights(wrow, j) * (dalpha[j] - weighted) * scale;
                    for (std::size_t d = 0; d < dh; ++d) {
                        dq(qrow, off + d) += ds * c.keys(s * I + j, off + d);
                        dk(s * I + j, off + d) += ds * c.queries(qrow, off + d);
                    }
                }
            }
        }
    }
    grads.push_back(matmul_tn(c.input, dq));
    grads.push_back(matmul_tn(c.input, dk));
    grads.push_back(matmul_tn(c.input, dv));
    Matrix dx = matmul_nt(dq, wq_);
    const Matrix dxk = matmul_nt(dk, wk_);
    const Matrix dxv = matmul_nt(dv, wv_);
    for (std::size_t n = 0; n < dx.size(); ++n) dx.values()[n] += dxk.values()[n] + dxv.values()[n];
    return dx;
}

std::vector<Matrix*> AttentionBlock::parameters() { return {&wq_, &wk_, &wv_}; }
std::vector<const Matrix*> AttentionBlock::parameters() const { return {&wq_, &wk_, &wv_}; }

Adam::Adam(const std::vector<Matrix*>& params, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const Matrix* p : params) {
        m_.emplace_back(p->rows(), p->cols());
        v_.emplace_back(p->rows(), p->cols());
    }
}

void Adam::step(const std::vector<Matrix*>& params, const Grads& grads) {
    if (params.size() != grads.size() || params.size() != m_.size())
        throw std::invalid_argument("Adam::step: parameter/gradient count mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (!params[p]->same_shape(grads[p])) throw std::invalid_argument("Adam::step: gradient shape mismatch");
        auto& w = params[p]->values();
        const auto& g = grads[p].values();
        auto& m = m_[p].values();
        auto& v = v_[p].values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            w[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
        ensure_finite(*params[p], "Adam::step");
    }
}

double global_norm(const Grads& grads) {
    double sq = 0.0;
    for (const auto& g : grads)
        for (double v : g.values()) sq += v * v;
    return std::sqrt(sq);
}

double clip_grad_norm(Grads& grads, double max_norm) {
    const double norm = global_norm(grads);
    if (norm > max_norm && norm > 0.0) {
        const double s = max_norm / norm;
        for (auto& g : grads)
            for (double& v : g.values()) v *= s;
    }
    return norm;
}

GradCheckReport grad_check(const std::function<double()>& loss, const std::vector<Matrix*>& params,
                           const Grads& analytic, double h, double floor) {
    if (params.size() != analytic.size()) throw std::invalid_argument("grad_check: gradient count mismatch");
    GradCheckReport rep;
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& w = params[p]->values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double orig = w[i];
            const double step = h * std::max(1.0, std::abs(orig));
            w[i] = orig + step;
            const double up = loss();
            w[i] = orig - step;
            const double down = loss();
            w[i] = orig;
            const double numeric = (up - down) / (2.0 * step);
            const double a = analytic[p].values()[i];
            const double abs_err = std::abs(a - numeric);
            const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), floor});
            ++rep.checked;
            rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
            if (rel > rep.max_rel_error) {
                rep.max_rel_error = rel;
                rep.worst_param = p;
                rep.worst_entry = i;
            }
        }
    }
    return rep;
}

}  // namespace uavmec::nn
