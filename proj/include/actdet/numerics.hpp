#pragma once

// Minimal dense linear algebra, activations and a seedable RNG.
// Everything is 64-bit float, row-major, desk scale; no external math library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "actdet/errors.hpp"

namespace actdet {

using Vec = std::vector<double>;

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major, size rows*cols

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw DimensionError("Matrix: negative dimensions");
    }

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
    double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

inline std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw DimensionError("matmul: incompatible shapes " + shape_str(a) + " * " + shape_str(b));
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (int k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            const double* brow = b.row(k);
            for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

inline Matrix transpose(const Matrix& a) {
    Matrix out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
    return out;
}

// y += W * x, with W (n x m), x of length m, y of length n.
inline void gemv_add(const Matrix& w, const Vec& x, Vec& y) {
    if (static_cast<int>(x.size()) != w.cols || static_cast<int>(y.size()) != w.rows)
        throw DimensionError("gemv_add: W " + shape_str(w) + " vs x[" + std::to_string(x.size()) +
                             "] y[" + std::to_string(y.size()) + "]");
    for (int i = 0; i < w.rows; ++i) {
        const double* row = w.row(i);
        double acc = 0.0;
        for (int j = 0; j < w.cols; ++j) acc += row[j] * x[j];
        y[i] += acc;
    }
}

// y += W^T * x, with W (n x m), x of length n, y of length m.
inline void gemv_transpose_add(const Matrix& w, const Vec& x, Vec& y) {
    if (static_cast<int>(x.size()) != w.rows || static_cast<int>(y.size()) != w.cols)
        throw DimensionError("gemv_transpose_add: W " + shape_str(w) + " vs x[" +
                             std::to_string(x.size()) + "] y[" + std::to_string(y.size()) + "]");
    for (int i = 0; i < w.rows; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* row = w.row(i);
        for (int j = 0; j < w.cols; ++j) y[j] += xi * row[j];
    }
}

// G += a * b^T (outer product accumulate), G (|a| x |b|).
inline void outer_add(const Vec& a, const Vec& b, Matrix& g) {
    if (static_cast<int>(a.size()) != g.rows || static_cast<int>(b.size()) != g.cols)
        throw DimensionError("outer_add: G " + shape_str(g) + " vs a[" + std::to_string(a.size()) +
                             "] b[" + std::to_string(b.size()) + "]");
    for (int i = 0; i < g.rows; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        double* row = g.row(i);
        for (int j = 0; j < g.cols; ++j) row[j] += ai * b[j];
    }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Derivatives expressed in terms of the activation *output*:
// d/dx sigmoid = s(1-s), d/dx tanh = 1 - y^2.
inline double sigmoid_deriv_from_output(double s) { return s * (1.0 - s); }
inline double tanh_deriv_from_output(double y) { return 1.0 - y * y; }

enum class Activation { Sigmoid, Tanh };

inline Matrix apply_activation(const Matrix& x, Activation kind) {
    Matrix out = x;
    for (double& v : out.data) v = (kind == Activation::Sigmoid) ? sigmoid(v) : std::tanh(v);
    return out;
}

inline Matrix activation_deriv_from_output(const Matrix& y, Activation kind) {
    Matrix out = y;
    for (double& v : out.data)
        v = (kind == Activation::Sigmoid) ? sigmoid_deriv_from_output(v) : tanh_deriv_from_output(v);
    return out;
}

// Numerically stable softmax (max subtraction). Output sums to 1.
inline Vec softmax_row(const Vec& x) {
    Vec out(x.size());
    if (x.empty()) return out;
    double mx = x[0];
    for (double v : x) mx = std::max(mx, v);
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        out[i] = std::exp(x[i] - mx);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

// splitmix64: the one RNG algorithm used everywhere in this project.
// Fixed algorithm, so identical seeds give identical streams on every platform.
// Reference: Steele, Lea, Flood, "Fast splittable pseudorandom number generators".
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        if (!(lo < hi)) throw ConfigError("Rng::uniform: requires lo < hi");
        return lo + (hi - lo) * uniform01();
    }

    int bernoulli(double p) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("Rng::bernoulli: p outside [0,1]");
        return uniform01() < p ? 1 : 0;
    }

    // Box-Muller. Consumes two uniforms per draw, no caching.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + stddev * z;
    }

    // Bounded draw by modulo; bias is irrelevant at these ranges and the
    // result is platform independent.
    uint64_t below(uint64_t n) {
        if (n == 0) throw ConfigError("Rng::below: n must be positive");
        return next_u64() % n;
    }

    // Derived independent stream. Advances this generator by one draw.
    Rng fork(uint64_t tag) { return Rng(next_u64() ^ (tag * 0xD1B54A32D192ED03ULL)); }

  private:
    uint64_t state_;
};

template <typename T>
inline void shuffle_in_place(std::vector<T>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = rng.below(i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace actdet
