#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geometry.hpp"
#include "polys.hpp"
#include "sampling.hpp"
#include "unity.hpp"
#include "weighted_approx.hpp"

namespace hpa {

using BoundaryFunction = std::function<double(const Point&)>;

inline constexpr std::uint64_t kFreshSeed = 0xB17E;

struct PipelineOptions {
    int check_samples = 20000;   // deterministic quasi-uniform boundary check
    int fresh_samples = 4000;    // random boundary sample, drawn with `seed`
    std::uint64_t seed = kFreshSeed;
    int grid = 4001;             // angular grid of the planar minimax
    // geometric route
    int m = 8;                   // starting degree of the Weierstrass fit
    int m_cap = 24;
    double delta = 1e-3;         // Weierstrass target is delta / 2
    double ridge = 1e-10;
    UnityParams unity;
};

struct GradedTerm {
    int j = 0;             // degree of the graded part
    int unity_n = 0;       // its multiplier has degree 2 * unity_n
    double part_norm = 0;  // sup of |h_j| on the check sample
    double unity_error = 0;
};

struct HomPair {
    HomogeneousPoly<double> h_even{2, 0};
    HomogeneousPoly<double> h_odd{2, 0};
    std::string route;        // "geometric" or "planar-potential"
    double sup_error = 0;     // max of the two checks below
    double check_error = 0;
    double fresh_error = 0;
    int check_samples = 0;
    int fresh_samples = 0;
    // eps * max sum |c_e x^e| on the check sample; errors near this are rounding in the monomial form
    double rounding_floor = 0;
    double seconds = 0;

    // planar route
    double even_lp_error = 0;
    double odd_lp_error = 0;

    // geometric route
    int weierstrass_degree = 0;
    double weierstrass_error = 0;
    double error_bound = 0;   // weierstrass_error + sum_j |h_j| * unity error
    std::vector<GradedTerm> terms;

    double eval(const Point& x) const { return h_even.eval(x) + h_odd.eval(x); }
};

// Uniform random boundary points (by direction) from a fixed-seed 64-bit Mersenne twister.
inline std::vector<Point> fresh_boundary_sample(const ConvexBody& body, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<Point> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double a = 2 * std::numbers::pi * unit();
        if (body.dim() == 2) {
            out.push_back(body.boundary_point(point2(std::cos(a), std::sin(a))));
        } else {
            const double z = 2 * unit() - 1, r = std::sqrt(std::max(0.0, 1 - z * z));
            out.push_back(body.boundary_point(point3(r * std::cos(a), r * std::sin(a), z)));
        }
    }
    return out;
}

namespace detail {

inline double max_residual(const HomPair& hp, const BoundaryFunction& f, const std::vector<Point>& pts) {
    double err = 0;
    for (const auto& x : pts) {
        const double r = std::abs(f(x) - hp.eval(x));
        if (std::isnan(r)) throw NumericError("approximation residual is NaN");
        err = std::max(err, r);
    }
    return err;
}

inline void fill_report(HomPair& hp, const ConvexBody& body, const BoundaryFunction& f, const PipelineOptions& opt) {
    hp.check_samples = opt.check_samples;
    hp.fresh_samples = opt.fresh_samples;
    const auto pts = boundary_samples(body, opt.check_samples);
    hp.check_error = max_residual(hp, f, pts);
    double scale = 0;
    for (const auto& x : pts) scale = std::max(scale, hp.h_even.abs_eval(x) + hp.h_odd.abs_eval(x));
    hp.rounding_floor = std::numeric_limits<double>::epsilon() * scale;
    hp.fresh_error = max_residual(hp, f, fresh_boundary_sample(body, opt.fresh_samples, opt.seed));
    hp.sup_error = std::max(hp.check_error, hp.fresh_error);
}

inline HomogeneousPoly<double> planar_form(const std::vector<double>& a) {
    const int m = static_cast<int>(a.size()) - 1;
    HomogeneousPoly<double> h(2, m);
    for (int k = 0; k <= m; ++k)
        if (a[k] != 0) h.add({m - k, k, 0}, a[k]);
    return h;
}

// Monomials of total degree <= m in d variables, graded.
inline std::vector<Exponent> monomials_up_to(int d, int m) {
    std::vector<Exponent> out;
    for (int t = 0; t <= m; ++t) {
        if (d == 2) {
            for (int a = t; a >= 0; --a) out.push_back({a, t - a, 0});
        } else {
            for (int a = t; a >= 0; --a)
                for (int b = t - a; b >= 0; --b) out.push_back({a, b, t - a - b});
        }
    }
    return out;
}

inline double monomial(const Point& x, const Exponent& e) {
    double v = 1;
    for (int i = 0; i < x.size(); ++i) v *= std::pow(x[i], e[i]);
    return v;
}

} // namespace detail

// Planar route: h_n + h_(n-1) from two weighted minimax problems on the slope chart.
// The even part f_+ gets the even one of the degrees n, n-1 and the odd part f_- the other.
inline HomPair approximate_planar(const ConvexBody& body, const BoundaryFunction& f, int n,
                                    const PipelineOptions& opt = {}) {
    if (body.dim() != 2) throw PreconditionError("approximate_planar: body must be planar");
    if (n < 2) throw PreconditionError("approximate_planar: n must be >= 2");
    if (n > kWeightedDegreeCap)
        throw DegreeCapError("approximate_planar: n = " + std::to_string(n) + " exceeds the degree cap " +
                             std::to_string(kWeightedDegreeCap));
    Stopwatch sw;
    const int ne = n % 2 == 0 ? n : n - 1;
    const int no = n % 2 == 0 ? n - 1 : n;
    auto at = [&body](double phi) { return body.boundary_point(point2(std::cos(phi), std::sin(phi))); };
    auto f_even = [&](double phi) {
        const Point p = at(phi);
        return 0.5 * (f(p) + f(Point(-p)));
    };
    auto f_odd = [&](double phi) {
        const Point p = at(phi);
        return 0.5 * (f(p) - f(Point(-p)));
    };
    auto omega = [&body](double phi) { return body.radial_at_angle(phi); };

    // Extent of the curve along the axes, for the basis scaling.
    double ax = 0, ay = 0;
    for (const auto& p : boundary_samples(body, 4096)) ax = std::max(ax, std::abs(p[0])), ay = std::max(ay, std::abs(p[1]));

    HomPair hp;
    hp.route = "planar-potential";
    try {
        const auto fe = detail::trig_minimax(f_even, omega, ne, opt.grid, ax, ay);
        hp.h_even = detail::planar_form(fe.a);
        hp.even_lp_error = fe.lp_error;
    } catch (const NumericError& e) {
        throw NumericError(std::string("even part (degree ") + std::to_string(ne) + "): " + e.what());
    }
    try {
        const auto fo = detail::trig_minimax(f_odd, omega, no, opt.grid, ax, ay);
        hp.h_odd = detail::planar_form(fo.a);
        hp.odd_lp_error = fo.lp_error;
    } catch (const NumericError& e) {
        throw NumericError(std::string("odd part (degree ") + std::to_string(no) + "): " + e.what());
    }
    detail::fill_report(hp, body, f, opt);
    hp.seconds = sw.seconds();
    return hp;
}

// Geometric route: Weierstrass fit p_m = sum_j h_j, then h = sum_j h_j * U_(n - floor(j/2)) with unity
// approximants U of degree 2n - 2 floor(j/2). Output degrees are 2n and 2n + 1.
inline HomPair approximate_geometric(const ConvexBody& body, const BoundaryFunction& f, int n,
                                    const PipelineOptions& opt = {}) {
    if (!body.smooth())
        throw UnsupportedBody("approximate_geometric: body is not smooth; use the planar route for " + body.type_name());
    if (n < 1) throw PreconditionError("approximate_geometric: n must be >= 1");
    if (2 * n > kWeightedDegreeCap)
        throw DegreeCapError("approximate_geometric: 2n = " + std::to_string(2 * n) + " exceeds the degree cap " +
                             std::to_string(kWeightedDegreeCap));
    if (!(opt.delta > 0)) throw PreconditionError("approximate_geometric: delta must be positive");
    if (opt.m < 0 || opt.m > opt.m_cap) throw PreconditionError("approximate_geometric: need 0 <= m <= m_cap");
    Stopwatch sw;
    const int d = body.dim();
    const auto check = boundary_samples(body, opt.check_samples);
    std::vector<double> fcheck(check.size());
    for (std::size_t i = 0; i < check.size(); ++i) fcheck[i] = f(check[i]);

    // Weierstrass stage with degree escalation.
    DensePoly<double> pm(d, 0);
    int m = opt.m;
    double werr = 0;
    for (;; ++m) {
        if (n - m / 2 < 1)
            throw PreconditionError("approximate_geometric: Weierstrass degree " + std::to_string(m) +
                                    " needs n > m / 2 (n = " + std::to_string(n) + ")");
        const auto mons = detail::monomials_up_to(d, m);
        const int K = 16 * (m + 1) * (m + 1);
        const auto pts = boundary_samples(body, K);
        const int nb = static_cast<int>(mons.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K + nb, nb);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K + nb);
        for (int r = 0; r < K; ++r) {
            for (int k = 0; k < nb; ++k) A(r, k) = detail::monomial(pts[r], mons[k]);
            rhs[r] = f(pts[r]);
        }
        Eigen::VectorXd colscale(nb);
        for (int k = 0; k < nb; ++k) {
            colscale[k] = std::max(1e-300, A.col(k).head(K).cwiseAbs().maxCoeff());
            A.col(k).head(K) /= colscale[k];
            A(K + k, k) = std::sqrt(opt.ridge);
        }
        const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
        pm = DensePoly<double>(d, m);
        for (int k = 0; k < nb; ++k) pm.add(mons[k], c[k] / colscale[k]);
        werr = 0;
        for (std::size_t i = 0; i < check.size(); ++i) werr = std::max(werr, std::abs(fcheck[i] - pm.eval(check[i])));
        if (werr <= opt.delta / 2) break;
        if (m >= opt.m_cap)
            throw NumericError("approximate_geometric: Weierstrass stage reached degree cap " + std::to_string(opt.m_cap) +
                               " with error " + std::to_string(werr) + " > delta/2 = " + std::to_string(opt.delta / 2));
    }

    HomPair hp;
    hp.route = "geometric";
    hp.weierstrass_degree = m;
    hp.weierstrass_error = werr;
    hp.h_even = HomogeneousPoly<double>(d, 2 * n);
    hp.h_odd = HomogeneousPoly<double>(d, 2 * n + 1);

    std::vector<HomogeneousPoly<double>> parts;
    std::vector<double> norms;
    double top = 0;
    for (int j = 0; j <= m; ++j) {
        parts.push_back(pm.graded_part(j));
        double s = 0;
        for (const auto& x : check) s = std::max(s, std::abs(parts.back().eval(x)));
        norms.push_back(s);
        top = std::max(top, s);
    }
    std::map<int, std::pair<HomogeneousPoly<double>, double>> unity_cache;
    hp.error_bound = werr;
    for (int j = 0; j <= m; ++j) {
        // Parts at rounding level contribute nothing measurable.
        if (norms[j] <= 1e-14 * std::max(1.0, top)) continue;
        const int nn = n - j / 2;
        auto it = unity_cache.find(nn);
        if (it == unity_cache.end()) {
            UnityParams up = opt.unity;
            up.n = nn;
            HomogeneousPoly<double> U = [&] {
                try {
                    return approximate_unity(body, up);
                } catch (const NumericError& e) {
                    throw NumericError("unity multiplier (n = " + std::to_string(nn) + "): " + e.what());
                }
            }();
            double ue = 0;
            for (const auto& x : check) ue = std::max(ue, std::abs(1.0 - U.eval(x)));
            it = unity_cache.emplace(nn, std::make_pair(std::move(U), ue)).first;
        }
        const auto term = parts[j] * it->second.first;
        if (j % 2 == 0) hp.h_even = hp.h_even + term;
        else hp.h_odd = hp.h_odd + term;
        hp.terms.push_back({j, nn, norms[j], it->second.second});
        hp.error_bound += norms[j] * it->second.second;
    }
    detail::fill_report(hp, body, f, opt);
    hp.seconds = sw.seconds();
    return hp;
}

// "auto" takes the planar route in 2-D and the geometric route otherwise.
inline HomPair approximate(const ConvexBody& body, const BoundaryFunction& f, int n, const std::string& route,
                           const PipelineOptions& opt = {}) {
    if (route == "planar" || (route == "auto" && body.dim() == 2)) return approximate_planar(body, f, n, opt);
    if (route == "geometric" || route == "auto") return approximate_geometric(body, f, n, opt);
    throw PreconditionError("approximate: route must be auto, geometric or planar");
}

} // namespace hpa
