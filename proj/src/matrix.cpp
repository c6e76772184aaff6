#include "uavmec/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uavmec::nn {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols) throw std::invalid_argument("Matrix: value count does not match shape");
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

// Eight independent accumulators so the reduction can use wide registers.
double dot(const double* x, const double* y, std::size_t n) {
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        for (std::size_t l = 0; l < 8; ++l) acc[l] += x[i + l] * y[i + l];
    double s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    const std::size_t inner = a.cols();
    const std::size_t rows = a.rows();
    if (n < 8) {
        // Narrow outputs: row-times-column dot products vectorize better.
        const Matrix bt = transpose(b);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < n; ++j)
                out(r, j) = dot(a.data() + r * inner, bt.data() + j * inner, inner);
        return out;
    }
    std::size_t i = 0;
    // Four output rows per pass so each row of B is loaded once per block.
    for (; i + 4 <= rows; i += 4) {
        double* o0 = out.data() + i * n;
        double* o1 = o0 + n;
        double* o2 = o1 + n;
        double* o3 = o2 + n;
        const double* a0 = a.data() + i * inner;
        const double* a1 = a0 + inner;
        const double* a2 = a1 + inner;
        const double* a3 = a2 + inner;
        for (std::size_t k = 0; k < inner; ++k) {
            const double s0 = a0[k], s1 = a1[k], s2 = a2[k], s3 = a3[k];
            const double* br = b.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) {
                const double bv = br[j];
                o0[j] += s0 * bv;
                o1[j] += s1 * bv;
                o2[j] += s2 * bv;
                o3[j] += s3 * bv;
            }
        }
    }
    for (; i < rows; ++i) {
        double* o = out.data() + i * n;
        const double* ar = a.data() + i * inner;
        for (std::size_t k = 0; k < inner; ++k) {
            const double s = ar[k];
            const double* br = b.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) o[j] += s * br[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: row counts differ");
    Matrix out(a.cols(), b.cols());
    const std::size_t n = b.cols();
    const std::size_t p = a.cols();
    const std::size_t rows = a.rows();
    std::size_t r = 0;
    // Four input rows per pass so each output row is touched once per block.
    for (; r + 4 <= rows; r += 4) {
        const double* a0 = a.data() + r * p;
        const double* a1 = a0 + p;
        const double* a2 = a1 + p;
        const double* a3 = a2 + p;
        const double* b0 = b.data() + r * n;
        const double* b1 = b0 + n;
        const double* b2 = b1 + n;
        const double* b3 = b2 + n;
        for (std::size_t i = 0; i < p; ++i) {
            const double s0 = a0[i], s1 = a1[i], s2 = a2[i], s3 = a3[i];
            double* o = out.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) o[j] += s0 * b0[j] + s1 * b1[j] + s2 * b2[j] + s3 * b3[j];
        }
    }
    for (; r < rows; ++r) {
        const double* ar = a.data() + r * p;
        const double* br = b.data() + r * n;
        for (std::size_t i = 0; i < p; ++i) {
            const double s = ar[i];
            double* o = out.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) o[j] += s * br[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: column counts differ");
    return matmul(a, transpose(b));
}

void add_row_vector(Matrix& m, const Matrix& row) {
    if (row.rows() != 1 || row.cols() != m.cols()) throw std::invalid_argument("add_row_vector: shape mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* o = m.data() + i * m.cols();
        for (std::size_t j = 0; j < m.cols(); ++j) o[j] += row.data()[j];
    }
}

Matrix column_sums(const Matrix& m) {
    Matrix out(1, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(0, j) += m(i, j);
    return out;
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("hconcat: row counts differ");
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::copy(a.row(i).begin(), a.row(i).end(), out.row(i).begin());
        std::copy(b.row(i).begin(), b.row(i).end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

Matrix column_slice(const Matrix& m, std::size_t begin, std::size_t count) {
    if (begin + count > m.cols()) throw std::invalid_argument("column_slice: out of range");
    Matrix out(m.rows(), count);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < count; ++j) out(i, j) = m(i, begin + j);
    return out;
}

void ensure_finite(const Matrix& m, const char* where) {
    if (!m.all_finite()) throw std::runtime_error(std::string("non-finite value in ") + where);
}

}  // namespace uavmec::nn
