#pragma once

#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "geometry.hpp"

namespace hpa {

// Quasi-uniform unit directions: an offset angle grid in 2-D, a Fibonacci lattice in 3-D.
inline std::vector<Point> sphere_directions(int dim, int count) {
    std::vector<Point> out;
    out.reserve(count);
    if (dim == 2) {
        for (int i = 0; i < count; ++i) {
            const double a = 2 * std::numbers::pi * (i + 0.5) / count;
            out.push_back(point2(std::cos(a), std::sin(a)));
        }
    } else if (dim == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double a = golden * i;
            out.push_back(point3(r * std::cos(a), r * std::sin(a), z));
        }
    } else {
        throw PreconditionError("sphere_directions: dimension must be 2 or 3");
    }
    return out;
}

inline std::vector<Point> boundary_samples(const ConvexBody& body, int count) {
    auto dirs = sphere_directions(body.dim(), count);
    for (auto& u : dirs) u = body.boundary_point(u);
    return dirs;
}

struct ApproxReport {
    int degree = 0;
    double sup_error = 0;
    double mean_error = 0;
    int samples = 0;
    std::vector<double> residuals;
    double seconds = 0;
};

class Stopwatch {
public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

} // namespace hpa
