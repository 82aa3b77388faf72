#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace hpa {

// External field W = exp(-Q) on the compactified real line.
// W(+-inf) is 0 for weights with finite rho; rho = lim |t| W(t).
struct Weight {
    std::function<double(double)> W;
    std::function<double(double)> Q;
    std::function<double(double)> dQ;
    double rho = 1.0;
    std::string provenance = "custom";
    bool lower_accuracy = false;

    // Optional closed form for W(tan phi) / |cos phi|, i.e. the boundary radius in
    // direction phi when the weight comes from a body.
    std::function<double(double)> radial_of_angle;

    // W(tan phi) * sqrt(1 + tan^2 phi) on [-pi/2, pi/2]; equals rho at the ends.
    double omega(double phi) const {
        if (radial_of_angle) return radial_of_angle(phi);
        const double c = std::cos(phi);
        if (std::abs(c) < 1e-15) return rho;
        return W(std::tan(phi)) / std::abs(c);
    }
};

// W(t) = (1 + |t|^m)^(-1/m), m >= 1. m = 2 is the unit-disk weight.
inline Weight power_family_weight(double m) {
    Weight w;
    auto Q = [m](double t) {
        const double a = std::abs(t);
        if (std::isinf(a)) return std::numeric_limits<double>::infinity();
        if (a <= 1.0) return std::log1p(std::pow(a, m)) / m;
        return std::log(a) + std::log1p(std::pow(a, -m)) / m;
    };
    w.Q = Q;
    w.W = [Q](double t) { return std::exp(-Q(t)); };
    w.dQ = [m](double t) {
        const double a = std::abs(t);
        if (a == 0.0) return 0.0;
        if (std::isinf(a)) return 0.0;
        // sign(t) |t|^(m-1) / (1 + |t|^m), written to stay finite for large |t|
        const double s = t > 0 ? 1.0 : -1.0;
        if (a <= 1.0) return s * std::pow(a, m - 1.0) / (1.0 + std::pow(a, m));
        return s / (a * (1.0 + std::pow(a, -m)));
    };
    w.rho = 1.0;
    std::ostringstream tag;
    tag << "power:" << m;
    w.provenance = tag.str();
    return w;
}

} // namespace hpa
