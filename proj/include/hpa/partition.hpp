#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "geometry.hpp"

namespace hpa {

// exp(-1/u) smoothstep: 0 for u <= 0, 1 for u >= 1, C-infinity.
inline double smoothstep(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

// Odd mollifier: +1 for x <= -1/2, -1 for x >= 1/2.
inline double mollifier(double x) {
    if (x <= -0.5) return 1.0;
    if (x >= 0.5) return -1.0;
    if (x < 0) return smoothstep(-2.0 * x);
    return -smoothstep(2.0 * x);
}

// Even plateau bump: 1 on [-1,1], 0 outside [-3,3], g*(x) + g*(x-4) = 1 on [1,3].
inline double gstar(double x) {
    const double a = std::abs(x);
    if (a <= 1.0) return 1.0;
    if (a >= 3.0) return 0.0;
    if (a <= 2.0) return mollifier(a - 1.5) / 4.0 + 0.75;
    return mollifier(a - 2.5) / 4.0 + 0.25;
}

// One-dimensional family in the scaled variable y = 6x/h.
inline double g_index(int k, double y) {
    if (k == 0) return gstar(y);
    return gstar(y - 4.0 * k) + gstar(y + 4.0 * k);
}

// Tensor-product bump g_k(x) = prod_j g_{k_j}(6 x_j / h).
inline double g_k(const std::vector<int>& k, double h, const Point& x) {
    double v = 1.0;
    for (std::size_t j = 0; j < k.size() && v != 0.0; ++j) v *= g_index(k[j], 6.0 * x[j] / h);
    return v;
}

// An antipodal pair of cubes: the cube centred at sign*k*(2h/3) and its mirror image.
// Every g_k splits into such pieces, one per sign pattern modulo a global flip.
struct Piece {
    std::vector<int> k;
    std::vector<int> sign;
    Point center;
};

inline double piece_value(const Piece& pc, double h, const Point& x) {
    double a = 1.0, b = 1.0;
    for (std::size_t j = 0; j < pc.k.size(); ++j) {
        const double y = 6.0 * x[j] / h;
        const double s = 4.0 * pc.sign[j] * pc.k[j];
        a *= gstar(y - s);
        b *= gstar(y + s);
    }
    bool centred = true;
    for (int kj : pc.k) centred = centred && kj == 0;
    return centred ? a : a + b;
}

namespace detail {

// Distance range from the origin to the cube prod_j [c_j - r, c_j + r].
inline std::pair<double, double> cube_distance_range(const Point& c, double r) {
    double lo = 0, hi = 0;
    for (int j = 0; j < c.size(); ++j) {
        const double a = std::abs(c[j]);
        const double near = std::max(0.0, a - r);
        lo += near * near;
        hi += (a + r) * (a + r);
    }
    return {std::sqrt(lo), std::sqrt(hi)};
}

inline void for_each_index(int d, int kmax, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> k(d, 0);
    while (true) {
        fn(k);
        int j = 0;
        while (j < d && ++k[j] > kmax) k[j++] = 0;
        if (j == d) break;
    }
}

} // namespace detail

// Multi-indices whose support cubes meet the unit sphere (open supports).
inline std::vector<std::vector<int>> active_indices(double h, int d) {
    if (!(h > 0 && h <= 1)) throw PreconditionError("active_indices: need 0 < h <= 1");
    if (d < 1 || d > 3) throw PreconditionError("active_indices: need 1 <= d <= 3");
    const int kmax = static_cast<int>(std::ceil(1.5 / h + 1.0));
    std::vector<std::vector<int>> out;
    detail::for_each_index(d, kmax, [&](const std::vector<int>& k) {
        Point c(d);
        for (int j = 0; j < d; ++j) c[j] = k[j] * 2.0 * h / 3.0;
        auto [lo, hi] = detail::cube_distance_range(c, h / 2.0);
        if (lo < 1.0 && hi > 1.0) out.push_back(k);
    });
    return out;
}

inline std::vector<Piece> active_pieces(double h, int d) {
    std::vector<Piece> out;
    for (const auto& k : active_indices(h, d)) {
        std::vector<int> nz;
        for (int j = 0; j < d; ++j)
            if (k[j] != 0) nz.push_back(j);
        const int patterns = nz.empty() ? 1 : 1 << (nz.size() - 1);
        for (int m = 0; m < patterns; ++m) {
            Piece pc{k, std::vector<int>(d, 1), Point(d)};
            // The first nonzero coordinate keeps sign +1 to remove the global flip.
            for (std::size_t i = 1; i < nz.size(); ++i)
                if (m >> (i - 1) & 1) pc.sign[nz[i]] = -1;
            for (int j = 0; j < d; ++j) pc.center[j] = pc.sign[j] * k[j] * 2.0 * h / 3.0;
            out.push_back(std::move(pc));
        }
    }
    return out;
}

struct PartitionSample {
    double sum = 0;
    int overlap = 0;
};

// Sum of all g_k at x and the number of k with g_k(x) > 0.
inline PartitionSample partition_at(double h, const Point& x) {
    const int d = static_cast<int>(x.size());
    std::vector<std::vector<int>> cand(d);
    for (int j = 0; j < d; ++j) {
        const double y = 6.0 * std::abs(x[j]) / h;
        const int lo = std::max(0, static_cast<int>(std::floor((y - 3.0) / 4.0)));
        const int hi = static_cast<int>(std::ceil((y + 3.0) / 4.0));
        for (int k = lo; k <= hi; ++k) cand[j].push_back(k);
    }
    PartitionSample ps;
    std::vector<int> k(d);
    std::vector<std::size_t> pos(d, 0);
    while (true) {
        for (int j = 0; j < d; ++j) k[j] = cand[j][pos[j]];
        const double v = g_k(k, h, x);
        ps.sum += v;
        if (v > 0) ++ps.overlap;
        int j = 0;
        while (j < d && ++pos[j] == cand[j].size()) pos[j++] = 0;
        if (j == d) break;
    }
    return ps;
}

// Smoothness bookkeeping for the bump family.
struct BumpFamily {
    double h = 1.0;
    int d = 2;

    double operator()(const std::vector<int>& k, const Point& x) const { return g_k(k, h, x); }
    std::vector<std::vector<int>> active() const { return active_indices(h, d); }
    double count_bound() const { return std::pow(8.0, d) / (2.0 * std::pow(h, d)); }
};

} // namespace hpa
