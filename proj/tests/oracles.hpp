#pragma once

// Independent reference implementations used as test oracles. Written
// straight-line with plain loops and std::vector so they share no code
// with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline double ccc(const std::vector<double>& y, const std::vector<double>& p) {
    const double n = static_cast<double>(y.size());
    long double my = 0, mp = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        my += y[i];
        mp += p[i];
    }
    my /= n;
    mp /= n;
    long double vy = 0, vp = 0, c = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        vy += (y[i] - my) * (y[i] - my);
        vp += (p[i] - mp) * (p[i] - mp);
        c += (y[i] - my) * (p[i] - mp);
    }
    vy /= n;
    vp /= n;
    c /= n;
    return static_cast<double>(2 * c / (vy + vp + (my - mp) * (my - mp)));
}

// Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> solve(Mat a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (a[piv][col] == 0.0) throw std::runtime_error("singular");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Ridge with unpenalized bias: rows of x, returns weights then bias.
inline std::vector<double> ridge(const Mat& x, const std::vector<double>& y, double lambda) {
    const std::size_t n = x.size(), d = x.front().size();
    Mat a(d + 1, std::vector<double>(d + 1, 0.0));
    std::vector<double> b(d + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row = x[i];
        row.push_back(1.0);
        for (std::size_t r = 0; r <= d; ++r) {
            b[r] += row[r] * y[i];
            for (std::size_t c = 0; c <= d; ++c) a[r][c] += row[r] * row[c];
        }
    }
    for (std::size_t r = 0; r < d; ++r) a[r][r] += lambda;
    return solve(a, b);
}

// Exhaustive kNN: sort every (distance, index) pair.
inline std::vector<std::pair<double, std::size_t>> knn(const Mat& keys, const std::vector<double>& q, std::size_t k,
                                                       bool manhattan = false) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double diff = keys[i][j] - q[j];
            s += manhattan ? std::abs(diff) : diff * diff;
        }
        all.emplace_back(manhattan ? s : std::sqrt(s), i);
    }
    std::sort(all.begin(), all.end());
    all.resize(std::min(k, all.size()));
    return all;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    Mat out(a.size(), std::vector<double>(b.front().size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b.front().size(); ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline Mat transpose(const Mat& a) {
    Mat out(a.front().size(), std::vector<double>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.front().size(); ++j) out[j][i] = a[i][j];
    return out;
}

inline Mat add(const Mat& a, const Mat& b) {
    Mat out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.front().size(); ++j) out[i][j] += b[i][j];
    return out;
}

struct XattWeights {
    Mat wja, wjv, wa, wca, wv, wcv, wha, whv;
    std::vector<double> head;  // column-major flatten of X_att, then bias
};

// Cross-attention forward, one equation per line.
inline double xatt_forward(const XattWeights& w, const Mat& xa, const Mat& xv) {
    Mat j = xa;
    j.insert(j.end(), xv.begin(), xv.end());
    const double s = 1.0 / std::sqrt(static_cast<double>(j.size()));
    Mat ca = matmul(matmul(transpose(xa), w.wja), j);
    Mat cv = matmul(matmul(transpose(xv), w.wjv), j);
    for (auto& r : ca)
        for (auto& v : r) v = std::tanh(v * s);
    for (auto& r : cv)
        for (auto& v : r) v = std::tanh(v * s);
    Mat ha = add(matmul(w.wa, xa), matmul(w.wca, transpose(ca)));
    Mat hv = add(matmul(w.wv, xv), matmul(w.wcv, transpose(cv)));
    for (auto& r : ha)
        for (auto& v : r) v = std::max(v, 0.0);
    for (auto& r : hv)
        for (auto& v : r) v = std::max(v, 0.0);
    Mat att = add(matmul(w.wha, ha), xa);
    Mat attv = add(matmul(w.whv, hv), xv);
    att.insert(att.end(), attv.begin(), attv.end());
    double out = w.head.back();
    std::size_t at = 0;
    for (std::size_t c = 0; c < att.front().size(); ++c)
        for (std::size_t r = 0; r < att.size(); ++r) out += w.head[at++] * att[r][c];
    return out;
}

}  // namespace oracle
