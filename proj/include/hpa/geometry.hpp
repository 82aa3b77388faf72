#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Boost 1.74's pchip.hpp calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "errors.hpp"
#include "weight.hpp"

namespace hpa {

using Point = Eigen::VectorXd;

inline Point point2(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}

inline Point point3(double x, double y, double z) {
    Point p(3);
    p << x, y, z;
    return p;
}

enum class BodyKind { Disk, Ellipse, Polygon, PNorm, RadialSamples };

inline const char* body_kind_name(BodyKind k) {
    switch (k) {
    case BodyKind::Disk: return "disk";
    case BodyKind::Ellipse: return "ellipse";
    case BodyKind::Polygon: return "polygon";
    case BodyKind::PNorm: return "pnorm";
    case BodyKind::RadialSamples: return "radial-samples";
    }
    return "?";
}

// Centrally symmetric convex body in R^2 or R^3, immutable after construction.
class ConvexBody {
public:
    static ConvexBody disk(double radius = 1.0, int dim = 2) {
        if (!(radius > 0) || (dim != 2 && dim != 3))
            throw PreconditionError("disk: radius must be positive and dimension 2 or 3");
        ConvexBody b(BodyKind::Disk, dim);
        b.radius_ = radius;
        return b;
    }

    static ConvexBody ellipse(std::vector<double> semi_axes) {
        check_axes(semi_axes, "ellipse");
        ConvexBody b(BodyKind::Ellipse, static_cast<int>(semi_axes.size()));
        b.axes_ = std::move(semi_axes);
        return b;
    }

    static ConvexBody pnorm(double p, std::vector<double> semi_axes) {
        if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("pnorm: p must be finite and >= 1");
        check_axes(semi_axes, "pnorm");
        ConvexBody b(BodyKind::PNorm, static_cast<int>(semi_axes.size()));
        b.p_ = p;
        b.axes_ = std::move(semi_axes);
        return b;
    }

    // Vertices in either orientation; stored counterclockwise. Must satisfy v[i + N/2] = -v[i].
    static ConvexBody polygon(std::vector<Eigen::Vector2d> vertices) {
        const std::size_t n = vertices.size();
        if (n < 4 || n % 2 != 0) throw PreconditionError("polygon: need an even number (>= 4) of vertices");
        double area2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = vertices[i];
            const auto& c = vertices[(i + 1) % n];
            area2 += a.x() * c.y() - a.y() * c.x();
        }
        if (area2 < 0) std::reverse(vertices.begin(), vertices.end());
        double scale = 0;
        for (const auto& v : vertices) scale = std::max(scale, v.norm());
        for (std::size_t i = 0; i < n / 2; ++i) {
            if ((vertices[i] + vertices[i + n / 2]).norm() > 1e-12 * scale)
                throw PreconditionError("polygon: vertex list is not centrally symmetric");
        }
        ConvexBody b(BodyKind::Polygon, 2);
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Vector2d a = vertices[i];
            const Eigen::Vector2d c = vertices[(i + 1) % n];
            const Eigen::Vector2d e = c - a;
            Eigen::Vector2d nrm(e.y(), -e.x());
            const double off = nrm.dot(a);
            if (!(off > 0)) throw PreconditionError("polygon: origin must be interior");
            nrm /= off;
            b.normals_.push_back(nrm);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Vector2d e0 = vertices[(i + 1) % n] - vertices[i];
            const Eigen::Vector2d e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            if (e0.x() * e1.y() - e0.y() * e1.x() <= 1e-14 * scale * scale)
                throw PreconditionError("polygon: vertices are not strictly convex");
        }
        b.vertices_ = std::move(vertices);
        return b;
    }

    // (angle, radius) samples; angles are reduced mod pi and r(theta + pi) = r(theta) is enforced.
    static ConvexBody radial_samples(const std::vector<double>& angles, const std::vector<double>& radii) {
        if (angles.size() != radii.size() || angles.size() < 4)
            throw PreconditionError("radial-samples: need >= 4 matching (angle, radius) pairs");
        std::vector<std::pair<double, double>> tab;
        for (std::size_t i = 0; i < angles.size(); ++i) {
            if (!(radii[i] > 0)) throw PreconditionError("radial-samples: radii must be positive");
            double a = std::fmod(angles[i], std::numbers::pi);
            if (a < 0) a += std::numbers::pi;
            tab.emplace_back(a, radii[i]);
        }
        std::sort(tab.begin(), tab.end());
        for (std::size_t i = 1; i < tab.size(); ++i)
            if (tab[i].first - tab[i - 1].first < 1e-12)
                throw PreconditionError("radial-samples: duplicate angle modulo pi");
        std::vector<double> xs, ys;
        for (int rep = -1; rep <= 1; ++rep)
            for (const auto& [a, r] : tab) {
                xs.push_back(a + rep * std::numbers::pi);
                ys.push_back(r);
            }
        ConvexBody b(BodyKind::RadialSamples, 2);
        b.radial_table_ = tab;
        b.interp_ = std::make_shared<Pchip>(std::move(xs), std::move(ys));
        // Convexity is validated on a fine boundary polygon.
        const int m = 4096;
        std::vector<Eigen::Vector2d> pts(m);
        for (int i = 0; i < m; ++i) {
            const double th = 2 * std::numbers::pi * i / m;
            pts[i] = b.radial_at_angle(th) * Eigen::Vector2d(std::cos(th), std::sin(th));
        }
        double rmax = 0;
        for (const auto& [a, r] : tab) rmax = std::max(rmax, r);
        for (int i = 0; i < m; ++i) {
            const Eigen::Vector2d e0 = pts[(i + 1) % m] - pts[i];
            const Eigen::Vector2d e1 = pts[(i + 2) % m] - pts[(i + 1) % m];
            if (e0.x() * e1.y() - e0.y() * e1.x() < -1e-9 * rmax * rmax)
                throw PreconditionError("radial-samples: interpolated boundary is not convex");
        }
        return b;
    }

    int dim() const { return dim_; }
    BodyKind kind() const { return kind_; }
    std::string type_name() const { return body_kind_name(kind_); }
    double radius() const { return radius_; }
    const std::vector<double>& semi_axes() const { return axes_; }
    double p() const { return p_; }
    const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
    const std::vector<std::pair<double, double>>& radial_table() const { return radial_table_; }

    // C^1 boundary with Holder-continuous normal, as the unity construction needs.
    bool smooth() const {
        return kind_ == BodyKind::Disk || kind_ == BodyKind::Ellipse || (kind_ == BodyKind::PNorm && p_ >= 2.0);
    }

    double gauge(const Point& x) const {
        check_dim(x);
        switch (kind_) {
        case BodyKind::Disk: return x.norm() / radius_;
        case BodyKind::Ellipse: {
            double s = 0, m = 0;
            for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(x[i] / axes_[i]));
            if (m == 0) return 0;
            for (int i = 0; i < dim_; ++i) {
                const double q = x[i] / axes_[i] / m;
                s += q * q;
            }
            return m * std::sqrt(s);
        }
        case BodyKind::PNorm: {
            double m = 0;
            for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(x[i] / axes_[i]));
            if (m == 0) return 0;
            double s = 0;
            for (int i = 0; i < dim_; ++i) s += std::pow(std::abs(x[i] / axes_[i]) / m, p_);
            return m * std::pow(s, 1.0 / p_);
        }
        case BodyKind::Polygon: {
            double g = 0;
            for (const auto& w : normals_) g = std::max(g, w.x() * x[0] + w.y() * x[1]);
            return g;
        }
        case BodyKind::RadialSamples: {
            const double r = std::hypot(x[0], x[1]);
            if (r == 0) return 0;
            return r / radial_at_angle(std::atan2(x[1], x[0]));
        }
        }
        return 0;
    }

    // Gradient of the gauge (homogeneous of degree 0). Polygon vertices use the
    // clockwise-adjacent edge.
    Point gauge_gradient(const Point& x) const {
        check_dim(x);
        Point g(dim_);
        const double gx = gauge(x);
        if (gx == 0) throw PreconditionError("gauge gradient undefined at the origin");
        switch (kind_) {
        case BodyKind::Disk: g = x / (radius_ * x.norm()); break;
        case BodyKind::Ellipse:
            for (int i = 0; i < dim_; ++i) g[i] = x[i] / (axes_[i] * axes_[i] * gx);
            break;
        case BodyKind::PNorm:
            for (int i = 0; i < dim_; ++i) {
                const double q = std::abs(x[i] / axes_[i]) / gx;
                g[i] = (x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : 0.0)) * std::pow(q, p_ - 1.0) / axes_[i];
            }
            break;
        case BodyKind::Polygon: {
            const Eigen::Vector2d& w = normals_[polygon_edge(x)];
            g = point2(w.x(), w.y());
            break;
        }
        case BodyKind::RadialSamples: {
            const double h = 1e-6 * x.norm();
            for (int i = 0; i < 2; ++i) {
                Point xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                g[i] = (gauge(xp) - gauge(xm)) / (2 * h);
            }
            break;
        }
        }
        return g;
    }

    // r(u) for a direction u (normalized internally).
    double radial(const Point& u) const {
        const double n = u.norm();
        if (n == 0) throw PreconditionError("radial: zero direction");
        return n / gauge(u);
    }

    Point boundary_point(const Point& dir) const { return dir / gauge(dir); }

    // Radius in the planar direction (cos a, sin a).
    double radial_at_angle(double a) const {
        if (kind_ == BodyKind::RadialSamples) {
            double t = std::fmod(a, std::numbers::pi);
            if (t < 0) t += std::numbers::pi;
            return (*interp_)(t);
        }
        return 1.0 / gauge(point2(std::cos(a), std::sin(a)));
    }

private:
    using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

    ConvexBody(BodyKind k, int d) : kind_(k), dim_(d) {}

    static void check_axes(const std::vector<double>& a, const char* what) {
        if (a.size() != 2 && a.size() != 3)
            throw PreconditionError(std::string(what) + ": need 2 or 3 semi-axes");
        for (double v : a)
            if (!(v > 0) || !std::isfinite(v)) throw PreconditionError(std::string(what) + ": semi-axes must be positive");
    }

    void check_dim(const Point& x) const {
        if (x.size() != dim_) throw PreconditionError("point dimension does not match body");
    }

    std::size_t polygon_edge(const Point& x) const {
        const std::size_t n = normals_.size();
        std::vector<double> v(n);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = normals_[i].x() * x[0] + normals_[i].y() * x[1];
            best = std::max(best, v[i]);
        }
        const double tol = 1e-12 * std::max(1.0, std::abs(best));
        for (std::size_t i = 0; i < n; ++i) {
            if (v[i] < best - tol) continue;
            // If the next edge also attains the max, x sits on vertex i+1 and edge i is
            // the clockwise-adjacent one; if the previous edge attains it, prefer that one.
            const std::size_t prev = (i + n - 1) % n;
            if (v[prev] >= best - tol) return prev;
            return i;
        }
        return 0;
    }

    BodyKind kind_;
    int dim_;
    double radius_ = 1.0;
    double p_ = 2.0;
    std::vector<double> axes_;
    std::vector<Eigen::Vector2d> vertices_;
    std::vector<Eigen::Vector2d> normals_;
    std::vector<std::pair<double, double>> radial_table_;
    std::shared_ptr<const Pchip> interp_;
};

inline double gauge(const ConvexBody& body, const Point& x) { return body.gauge(x); }

namespace detail {

inline double max_radius_numeric(const ConvexBody& body) {
    if (body.dim() == 2) {
        const int m = 20000;
        double best = 0, best_a = 0;
        for (int i = 0; i < m; ++i) {
            const double a = std::numbers::pi * i / m;
            const double r = body.radial_at_angle(a);
            if (r > best) best = r, best_a = a;
        }
        double lo = best_a - std::numbers::pi / m, hi = best_a + std::numbers::pi / m;
        for (int it = 0; it < 100; ++it) {
            const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            if (body.radial_at_angle(m1) < body.radial_at_angle(m2)) lo = m1;
            else hi = m2;
        }
        return std::max(best, body.radial_at_angle(0.5 * (lo + hi)));
    }
    // d = 3: coarse spherical grid followed by coordinate refinement.
    auto r_of = [&](double th, double ph) {
        return body.radial(point3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)));
    };
    const int m = 400;
    double best = 0, bt = 0, bp = 0;
    for (int i = 0; i <= m / 2; ++i)
        for (int j = 0; j < m; ++j) {
            const double th = std::numbers::pi * i / (m / 2), ph = 2 * std::numbers::pi * j / m;
            const double r = r_of(th, ph);
            if (r > best) best = r, bt = th, bp = ph;
        }
    double step = std::numbers::pi / m;
    while (step > 1e-12) {
        bool moved = false;
        for (auto [dt, dp] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
            const double r = r_of(bt + dt, bp + dp);
            if (r > best) best = r, bt += dt, bp += dp, moved = true;
        }
        if (!moved) step *= 0.5;
    }
    return best;
}

} // namespace detail

// Largest Euclidean norm over Bd(K).
inline double delta_K(const ConvexBody& body) {
    switch (body.kind()) {
    case BodyKind::Disk: return body.radius();
    case BodyKind::Ellipse: return *std::max_element(body.semi_axes().begin(), body.semi_axes().end());
    case BodyKind::Polygon: {
        double m = 0;
        for (const auto& v : body.vertices()) m = std::max(m, v.norm());
        return m;
    }
    case BodyKind::RadialSamples: {
        double m = 0;
        for (const auto& [a, r] : body.radial_table()) m = std::max(m, r);
        return m;
    }
    case BodyKind::PNorm: {
        const auto& ax = body.semi_axes();
        if (std::all_of(ax.begin(), ax.end(), [&](double a) { return a == ax[0]; })) {
            if (body.p() <= 2.0) return ax[0];
            return ax[0] * std::pow(static_cast<double>(body.dim()), 0.5 - 1.0 / body.p());
        }
        return detail::max_radius_numeric(body);
    }
    }
    return 0;
}

// Supporting hyperplane {x : <x, w> = 1} through the boundary point `base`.
struct SupportLine {
    Point base;
    Point normal;
};

inline SupportLine support_line(const ConvexBody& body, const Point& p) {
    const double g = body.gauge(p);
    if (std::abs(g - 1.0) > 1e-9) throw PreconditionError("support_line: point is not on the boundary");
    Point w = body.gauge_gradient(p);
    w /= w.dot(p);
    return {p, w};
}

// Boundary point with y/x = t and x > 0; t = +-inf gives (0, y(inf)) with y(inf) > 0.
inline Point slope_point(const ConvexBody& body, double t) {
    if (body.dim() != 2) throw PreconditionError("slope_point: body must be planar");
    if (std::isinf(t)) return body.boundary_point(point2(0.0, 1.0));
    if (std::isnan(t)) throw PreconditionError("slope_point: t is NaN");
    const double s = std::max(1.0, std::abs(t));
    return body.boundary_point(point2(1.0 / s, t / s));
}

// W(t) = |x(t)|, Q = -log W, rho = y(inf).
inline Weight weight_from_body(const ConvexBody& body) {
    if (body.dim() != 2) throw PreconditionError("weight_from_body: body must be planar");
    Weight w;
    auto W = [body](double t) {
        if (std::isinf(t)) return 0.0;
        return slope_point(body, t)[0];
    };
    w.W = W;
    w.Q = [W](double t) { return -std::log(W(t)); };
    if (body.kind() == BodyKind::RadialSamples) {
        auto Q = w.Q;
        w.dQ = [Q](double t) {
            if (std::isinf(t)) return 0.0;
            const double h = 1e-5 * std::max(1.0, std::abs(t));
            return (-Q(t + 2 * h) + 8 * Q(t + h) - 8 * Q(t - h) + Q(t - 2 * h)) / (12 * h);
        };
        w.lower_accuracy = true;
    } else {
        // Q(t) = log gauge(1, t); Q' = d_y gauge / gauge, with the gradient homogeneous of degree 0.
        w.dQ = [body](double t) {
            if (std::isinf(t)) return 0.0;
            const double s = std::max(1.0, std::abs(t));
            const Point v = point2(1.0 / s, t / s);
            const Point g = body.gauge_gradient(v);
            return g[1] / (s * body.gauge(v));
        };
    }
    w.rho = slope_point(body, std::numeric_limits<double>::infinity())[1];
    w.provenance = "body:" + body.type_name();
    w.radial_of_angle = [body](double phi) { return body.radial_at_angle(phi); };
    return w;
}

} // namespace hpa
