#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "partition.hpp"
#include "polys.hpp"
#include "sampling.hpp"

namespace hpa {

struct UnityParams {
    int n = 8;             // output degree is 2n
    double eps = 1.0;      // boundary smoothness exponent
    double tau = 0.5;
    int m = 0;             // Jackson order; 0 picks the default rule
    double gamma = 0;      // mesh exponent; 0 derives it from m, eps, d
    std::string mesh = "fixed"; // "fixed": h as given; "schedule": h = min(1, n^-gamma)
    double h = 0.5;
    double mu = 1e-6;      // ridge weight on the chart Chebyshev coefficients
    int density = 24;      // fit samples per unit of degree
    double radius_factor = 4.0; // patch radius in units of delta_K

    // Smallest m with (m eps - d) / (1 + m + eps + d) > tau eps.
    int jackson_order(int d) const {
        if (m > 0) return m;
        for (int k = 1; k < 10000; ++k)
            if ((k * eps - d) / (1.0 + k + eps + d) > tau * eps) return k;
        throw PreconditionError("UnityParams: no admissible Jackson order for this tau");
    }

    double mesh_exponent(int d) const {
        if (gamma > 0) return gamma;
        const int mm = jackson_order(d);
        return (1.0 + mm) / (1.0 + mm + eps + d);
    }

    double mesh_size(int d) const {
        if (mesh == "fixed") return h;
        if (mesh == "schedule") return std::min(1.0, std::pow(static_cast<double>(n), -mesh_exponent(d)));
        throw PreconditionError("UnityParams: mesh must be \"fixed\" or \"schedule\"");
    }
};

struct PatchInfo {
    Piece piece;
    Point anchor;      // boundary point where the supporting line touches
    SupportLine line;
    int fit_points = 0;
    double max_t_minus_1 = 0; // largest 1/<x,w> - 1 over the patch cell
    double off_patch_max = 0; // largest |p_k| on sampled boundary points outside the cell
};

struct UnityResult {
    HomogeneousPoly<double> poly{2, 0};
    std::vector<PatchInfo> patches;
    double h = 0;
    int m = 0;
    double gamma = 0;
};

namespace detail {

// T_a(l/(R b)) b^a for a = 0..N, as homogeneous polynomials.
inline std::vector<HomogeneousPoly<long double>> chart_chebyshev_forms(const HomogeneousPoly<long double>& l_over_r,
                                                                      const HomogeneousPoly<long double>& b, int N) {
    std::vector<HomogeneousPoly<long double>> H;
    H.push_back(HomogeneousPoly<long double>::constant(b.dim(), 1.0L));
    if (N >= 1) H.push_back(l_over_r);
    const auto b2 = b * b;
    for (int a = 2; a <= N; ++a) H.push_back(l_over_r * H[a - 1] * 2.0L - b2 * H[a - 2]);
    return H;
}

// Chart Chebyshev multi-indices of total degree <= N.
inline std::vector<Exponent> chart_indices(int chart_dim, int N) {
    std::vector<Exponent> out;
    if (chart_dim == 1) {
        for (int a = 0; a <= N; ++a) out.push_back({a, 0, 0});
    } else {
        for (int t = 0; t <= N; ++t)
            for (int a = t; a >= 0; --a) out.push_back({a, t - a, 0});
    }
    return out;
}

} // namespace detail

// Lifts sum_alpha c_alpha prod_i T_{alpha_i}(l_i/R) from the hyperplane to H_{N}, N even.
inline HomogeneousPoly<long double> lift_chart_chebyshev(const std::vector<Exponent>& idx, const Eigen::VectorXd& c,
                                                         const HyperplaneChart& chart, double R, int N) {
    const int d = static_cast<int>(chart.line.normal.size());
    const auto b = chart.b_form<long double>();
    std::vector<std::vector<HomogeneousPoly<long double>>> H;
    for (int i = 0; i < chart.chart_dim(); ++i)
        H.push_back(detail::chart_chebyshev_forms(chart.l_form<long double>(i) * (1.0L / R), b, N));
    DensePoly<long double> even(d, N);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (c[k] == 0) continue;
        const auto& a = idx[k];
        HomogeneousPoly<long double> term = H[0][a[0]] * static_cast<long double>(c[k]);
        if (chart.chart_dim() == 2) term = term * H[1][a[1]];
        // Odd chart degree: parity completion by b, which is 1 on the hyperplane.
        if (term.degree() % 2 == 1) term = term * b;
        even.add(term);
    }
    return homogenize_even(even, chart.line, N);
}

inline UnityResult approximate_unity_detailed(const ConvexBody& body, const UnityParams& params) {
    if (!body.smooth())
        throw UnsupportedBody("approximate_unity: body is not smooth; use the planar route for " + body.type_name());
    if (params.n < 1) throw PreconditionError("approximate_unity: n must be >= 1");
    if (!(params.mu >= 0) || params.density < 1 || !(params.radius_factor > 3.0))
        throw PreconditionError("approximate_unity: invalid fit parameters");
    const int d = body.dim();
    const int N = 2 * params.n;
    UnityResult res;
    res.h = params.mesh_size(d);
    if (!(res.h > 0 && res.h <= 1)) throw PreconditionError("approximate_unity: mesh size must be in (0, 1]");
    res.m = params.jackson_order(d);
    res.gamma = params.mesh_exponent(d);
    const double R = params.radius_factor * delta_K(body);

    const int count = d == 2 ? params.density * N + 600 : params.density * N * N / 4 + 2000;
    const auto dirs = sphere_directions(d, count);
    std::vector<Point> pts(dirs.size());
    for (std::size_t i = 0; i < dirs.size(); ++i) pts[i] = body.boundary_point(dirs[i]);

    HomogeneousPoly<long double> total(d, N);
    for (const auto& pc : active_pieces(res.h, d)) {
        std::vector<double> q(dirs.size());
        Point mean = Point::Zero(d);
        int inside = 0;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            q[i] = piece_value(pc, res.h, dirs[i]);
            if (q[i] > 0) {
                mean += dirs[i] * (dirs[i].dot(pc.center) >= 0 ? 1.0 : -1.0);
                ++inside;
            }
        }
        const Point u = (inside > 0 && mean.norm() > 0) ? Point(mean.normalized()) : Point(pc.center.normalized());
        PatchInfo info;
        info.piece = pc;
        info.anchor = body.boundary_point(u);
        info.line = support_line(body, info.anchor);
        const HyperplaneChart chart(info.line);
        const auto idx = detail::chart_indices(chart.chart_dim(), N);

        std::vector<int> sel;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double b = chart.b(pts[i]);
            if (b <= 0) continue;
            bool ok = true;
            for (int j = 0; j < chart.chart_dim(); ++j) ok = ok && std::abs(chart.l(j, pts[i]) / b) <= R;
            if (ok) sel.push_back(static_cast<int>(i));
        }
        info.fit_points = static_cast<int>(sel.size());
        const int nb = static_cast<int>(idx.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(sel.size() + nb, nb);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sel.size() + nb);
        for (std::size_t r = 0; r < sel.size(); ++r) {
            const Point& x = pts[sel[r]];
            const double b = chart.b(x);
            const double bN = std::pow(b, N);
            std::vector<std::vector<double>> T(chart.chart_dim(), std::vector<double>(N + 1));
            for (int j = 0; j < chart.chart_dim(); ++j) {
                const double v = chart.l(j, x) / (R * b);
                T[j][0] = 1;
                if (N >= 1) T[j][1] = v;
                for (int a = 2; a <= N; ++a) T[j][a] = 2 * v * T[j][a - 1] - T[j][a - 2];
            }
            for (int k = 0; k < nb; ++k) {
                double v = T[0][idx[k][0]] * bN;
                if (chart.chart_dim() == 2) v *= T[1][idx[k][1]];
                A(r, k) = v;
            }
            rhs[r] = q[sel[r]];
        }
        const double smu = std::sqrt(params.mu);
        for (int k = 0; k < nb; ++k) A(sel.size() + k, k) = smu;
        const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);

        const auto pk = lift_chart_chebyshev(idx, c, chart, R, N);
        total = total + pk;

        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (q[i] > 0) {
                const double b = std::abs(chart.b(pts[i]));
                info.max_t_minus_1 = std::max(info.max_t_minus_1, 1.0 / b - 1.0);
            } else {
                info.off_patch_max = std::max(info.off_patch_max, std::abs(static_cast<double>(pk.eval(pts[i]))));
            }
        }
        res.patches.push_back(std::move(info));
    }
    res.poly = total.cast<double>();
    return res;
}

inline HomogeneousPoly<double> approximate_unity(const ConvexBody& body, const UnityParams& params) {
    return approximate_unity_detailed(body, params).poly;
}

// |1 - hp| over quasi-uniform boundary samples.
inline ApproxReport unity_error_report(const ConvexBody& body, const HomogeneousPoly<double>& hp, int samples) {
    if (hp.degree() % 2 != 0) throw PreconditionError("unity_error_report: degree must be even");
    if (samples < 1) throw PreconditionError("unity_error_report: need at least one sample");
    Stopwatch sw;
    ApproxReport rep;
    rep.degree = hp.degree();
    rep.samples = samples;
    double sum = 0;
    for (const auto& x : boundary_samples(body, samples)) {
        const double r = std::abs(1.0 - hp.eval(x));
        rep.residuals.push_back(r);
        rep.sup_error = std::max(rep.sup_error, r);
        sum += r;
    }
    rep.mean_error = sum / samples;
    rep.seconds = sw.seconds();
    return rep;
}

} // namespace hpa
