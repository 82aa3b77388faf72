// One pass/fail line per acceptance criterion. Tolerances and time limits are pinned below.
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpa/partition.hpp"
#include "hpa/pipeline.hpp"
#include "hpa/potential.hpp"
#include "hpa/unity.hpp"
#include "hpa/weighted_approx.hpp"

namespace fs = std::filesystem;
using namespace hpa;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Criteria that are known to fail, with the reason printed next to the FAIL line.
// A failure outside this set makes the binary exit non-zero.
const std::map<int, std::string> kKnownRed{
    {7, "square, exp(x)cos(y): corner-limited convergence, see README"},
};

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ConvexBody square() { return ConvexBody::polygon({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}); }

Point random_unit(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = g(rng);
    return x.normalized();
}

// ---------------------------------------------------------------- AC1

Outcome ac1() {
    Outcome o;
    std::mt19937_64 rng(1001);
    double worst_sum = 0;
    std::ostringstream os;
    for (int d = 1; d <= 3; ++d)
        for (double h : {1.0, 0.5, 0.1}) {
            std::uniform_real_distribution<double> u(-1.5, 1.5);
            int overlap = 0;
            for (int i = 0; i < 10000; ++i) {
                Point x(d);
                for (int j = 0; j < d; ++j) x[j] = u(rng);
                const auto ps = partition_at(h, x);
                worst_sum = std::max(worst_sum, std::abs(ps.sum - 1));
                overlap = std::max(overlap, ps.overlap);
            }
            const BumpFamily fam{h, d};
            const double count = static_cast<double>(fam.active().size());
            if (overlap > (1 << d) || count > fam.count_bound()) {
                o.pass = false;
                os << " d=" << d << ",h=" << h << ": overlap " << overlap << " count " << count << "/" << fam.count_bound();
            }
        }
    if (worst_sum >= 1e-12) o.pass = false;
    o.detail = "max|sum-1| " + num(worst_sum) + " (<1e-12), overlap<=2^d, count<=8^d/(2h^d)" + os.str();
    return o;
}

// ---------------------------------------------------------------- AC2

Outcome ac2() {
    Outcome o;
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> u(-1, 1);
    const std::vector<ConvexBody> bodies{ConvexBody::disk(), ConvexBody::ellipse({2, 1}), ConvexBody::disk(1, 3),
                                         ConvexBody::ellipse({1, 1.5, 2})};
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& body = bodies[trial % bodies.size()];
        const int d = body.dim();
        const int deg = 2 + 2 * (trial % 4);
        DensePoly<double> p(d, deg);
        for (int t = 0; t <= deg; t += 2)
            for (int a = t; a >= 0; --a)
                for (int b = (d == 3 ? t - a : 0); b >= 0; --b) {
                    if (d == 2) {
                        p.add({a, t - a, 0}, u(rng));
                        break;
                    }
                    p.add({a, b, t - a - b}, u(rng));
                }
        const auto line = support_line(body, body.boundary_point(random_unit(rng, d)));
        const HyperplaneChart chart(line);
        const auto h = homogenize_even(p, line, deg + 2);
        for (int i = 0; i < 20; ++i) {
            Point x = line.base;
            for (const auto& t : chart.tangents) x += 2 * u(rng) * t;
            worst = std::max({worst, std::abs(h.eval(x) - p.eval(x)), std::abs(h.eval(Point(-x)) - p.eval(x))});
        }
    }
    if (!(worst < 1e-10)) o.pass = false;

    // Lifted chart polynomials bounded by 1 on the patch box, sampled at boundary points whose
    // ray meets the hyperplane outside the box.
    double worst_ratio = 0;
    for (int d : {2, 3})
        for (int n : {4, 8, 16}) {
            const auto body = d == 2 ? ConvexBody::ellipse({2, 1}) : ConvexBody::ellipse({1, 1.5, 2});
            const double R = 4 * delta_K(body);
            const auto line = support_line(body, body.boundary_point(random_unit(rng, d)));
            const HyperplaneChart chart(line);
            const auto idx = detail::chart_indices(chart.chart_dim(), 2 * n);
            Eigen::VectorXd c(idx.size());
            for (int k = 0; k < c.size(); ++k) c[k] = u(rng);
            c /= c.cwiseAbs().sum();
            const auto lifted = lift_chart_chebyshev(idx, c, chart, R, 2 * n);
            const double bound = std::pow(2.0 / 3.0, 2 * n);
            for (int i = 0; i < 1000;) {
                std::vector<double> l(chart.chart_dim());
                double lmax = 0;
                for (auto& v : l) v = 50 * R * u(rng), lmax = std::max(lmax, std::abs(v));
                if (lmax <= R) continue;
                Point x = line.base;
                for (int j = 0; j < chart.chart_dim(); ++j) x += l[j] * chart.tangents[j];
                x /= body.gauge(x);
                worst_ratio = std::max(worst_ratio, std::abs(static_cast<double>(lifted.eval(x))) / bound);
                ++i;
            }
        }
    if (!(worst_ratio <= 1 + 1e-6)) o.pass = false;
    o.detail = "hyperplane agreement " + num(worst) + " (<1e-10); off-patch max |p|/(2/3)^(2n) " + num(worst_ratio) +
               " (<=1) for n in {4,8,16}, d in {2,3}";
    return o;
}

// ---------------------------------------------------------------- AC3

Outcome ac3() {
    Outcome o;
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> u(-1, 1), ext(1.0, 20.0);
    int violations = 0, hypothesis_failures = 0;
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 12;
        const double a = 0.5 + std::abs(u(rng));
        DensePoly<double> p(1, n);
        for (int k = 0; k <= n; ++k) p.add({k, 0, 0}, u(rng));
        // Sup on a Chebyshev-angle grid; the grid maximum undershoots by at most ~n^2 dtheta^2 / 2 < 2e-6.
        double sup = 0;
        for (int j = 0; j <= 20000; ++j) {
            Point x(1);
            x[0] = a * std::cos(std::numbers::pi * j / 20000);
            sup = std::max(sup, std::abs(p.eval(x)));
        }
        DensePoly<double> q(1, n);
        for (const auto& [e, c] : p.terms()) q.add(e, c / (sup * (1 + 1e-5)));
        Point probe(1);
        hypothesis_failures += !growth_bound_holds(q, a, 2 * a).hypothesis;
        for (int i = 0; i < 1000; ++i) {
            const double x = (u(rng) < 0 ? -1 : 1) * a * (i % 10 == 0 ? 1 + 1e-9 * (1 + i) : ext(rng));
            probe[0] = x;
            const double ratio = std::abs(q.eval(probe)) / growth_bound_check(q, a, x);
            worst = std::max(worst, ratio);
            violations += ratio > 1;
        }
    }
    o.pass = violations == 0 && hypothesis_failures == 0;
    o.detail = std::to_string(violations) + " violations in 1e5 exterior points, worst |p|/bound " + num(worst) +
               ", hypothesis failures " + std::to_string(hypothesis_failures);
    return o;
}

// ---------------------------------------------------------------- AC4

Outcome ac4() {
    Outcome o;
    Weight flat;
    flat.W = [](double) { return 1.0; };
    flat.Q = [](double) { return 0.0; };
    flat.dQ = [](double) { return 0.0; };
    const auto arc = density(flat, 2.0, {-1.0, 1.0});
    double pot = 0;
    for (double x : {-0.95, -0.5, 0.0, 0.3, 0.9}) pot = std::max(pot, std::abs(arc.log_potential(x) + std::log(2.0)));
    const double arc_mass = std::abs(arc.mass - 1);
    if (!(pot < 1e-8 && arc_mass < 1e-8)) o.pass = false;

    const auto w = weight_from_body(ConvexBody::disk());
    double prev_b = 0, mass = 0, dev = 0, sym = 0;
    bool increasing = true;
    std::ostringstream bs;
    for (double lambda : {2.0, 1.5, 1.2}) {
        const auto [a, b] = mrs_support(w, lambda);
        const auto em = density(w, lambda, {a, b});
        mass = std::max(mass, std::abs(em.mass - 1));
        dev = std::max(dev, equilibrium_check(em, w));
        sym = std::max(sym, std::abs(a + b));
        increasing = increasing && b > prev_b;
        prev_b = b;
        bs << (bs.tellp() ? "/" : "") << num(b);
    }
    if (!(mass < 1e-6 && dev < 1e-4 && sym < 1e-8 && increasing)) o.pass = false;
    o.detail = "arcsine potential " + num(pot) + " mass " + num(arc_mass) + " (<1e-8); disk mass " + num(mass) +
               " (<1e-6) deviation " + num(dev) + " (<1e-4) |a+b| " + num(sym) + " (<1e-8) b " + bs.str() +
               (increasing ? " increasing" : " NOT increasing");
    return o;
}

// ---------------------------------------------------------------- AC5

Outcome ac5() {
    Outcome o;
    std::mt19937_64 rng(1005);
    std::uniform_real_distribution<double> u(-1, 1);
    std::cauchy_distribution<double> slope(0, 2);
    const std::vector<ConvexBody> bodies{ConvexBody::disk(), ConvexBody::ellipse({2, 1}), square()};
    std::vector<Weight> weights;
    for (const auto& b : bodies) weights.push_back(weight_from_body(b));
    double worst = 0, worst_abs = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int bi = trial % 3;
        const int n = 2 + 2 * ((trial / 3) % 16);
        WeightedApproximant wa;
        wa.n = n;
        wa.coef.resize(n + 1);
        for (auto& v : wa.coef) v = u(rng);
        const auto h = homog_from_weighted(wa, bodies[bi]);
        for (int i = 0; i < 12; ++i) {
            const double t = i == 0 ? kInf : (i == 1 ? -kInf : slope(rng));
            const Point p = slope_point(bodies[bi], t);
            const double diff = std::abs(h.eval(p) - weighted_value(wa, weights[bi], t));
            worst_abs = std::max(worst_abs, diff);
            worst = std::max(worst, diff / h.abs_eval(p));
        }
    }
    o.pass = worst < 1e-10;
    o.detail = "max |h - W^n p| / sum|a_k x^(n-k) y^k| " + num(worst) + " (<1e-10), absolute " + num(worst_abs) +
               ", t = +-inf included";
    return o;
}

// ---------------------------------------------------------------- AC6

Outcome ac6() {
    Outcome o;
    const auto w = weight_from_body(ConvexBody::disk());
    auto f = [](double t) { return std::exp(-t * t); };
    double prev = kInf;
    std::ostringstream es;
    for (int n : {8, 16, 32, 64}) {
        const auto wa = weighted_minimax(f, w, n);
        if (!(wa.sup_error < prev)) o.pass = false;
        prev = wa.sup_error;
        es << (es.tellp() ? "/" : "") << num(wa.sup_error);
    }
    if (!(prev < 5e-2)) o.pass = false;
    o.detail = "exp(-t^2), disk weight, n=8/16/32/64: " + es.str() + " (strictly decreasing, last <5e-2)";
    return o;
}

// ---------------------------------------------------------------- AC7

Outcome ac7() {
    Outcome o;
    struct Target {
        std::string name;
        BoundaryFunction f;
    };
    const std::vector<Target> targets{
        {"1", [](const Point&) { return 1.0; }},
        {"x", [](const Point& x) { return x[0]; }},
        {"|x|", [](const Point& x) { return std::abs(x[0]); }},
        {"exp(x)cos(y)", [](const Point& x) { return std::exp(x[0]) * std::cos(x[1]); }},
    };
    const std::vector<std::pair<std::string, ConvexBody>> bodies{
        {"circle", ConvexBody::disk()}, {"ellipse(2,1)", ConvexBody::ellipse({2, 1})}, {"square", square()}};
    // Errors at this level are rounding in exact cases; the ladder need not decrease there.
    const double exact_level = 1e-10;
    std::ostringstream fails, table;
    for (const auto& [bname, body] : bodies)
        for (const auto& tg : targets) {
            double prev = kInf, last = 0;
            bool dec = true;
            std::string errs;
            for (int n : {8, 16, 32}) {
                const auto hp = approximate_planar(body, tg.f, n);
                dec = dec && (hp.sup_error < prev || std::max(hp.sup_error, prev) <= exact_level);
                prev = last = hp.sup_error;
                errs += (errs.empty() ? "" : "/") + num(hp.sup_error);
            }
            table << "\n    " << bname << " " << tg.name << ": " << errs;
            const bool top = last < 0.1;
            const bool exact = !(bname == "circle" && tg.name == "1") || last < 1e-6;
            if (!(dec && top && exact)) {
                o.pass = false;
                fails << " " << bname << "/" << tg.name << (dec ? "" : " not decreasing") << (top ? "" : " top >= 0.1")
                      << (exact ? "" : " f=1 >= 1e-6");
            }
        }
    o.detail = "n=8/16/32, decreasing and <0.1 at n=32, circle f=1 <1e-6" +
               (o.pass ? std::string() : ";" + fails.str()) + table.str();
    return o;
}

// ---------------------------------------------------------------- AC8

Outcome ac8() {
    Outcome o;
    const auto body = ConvexBody::ellipse({2, 1});
    auto f = [](const Point& x) { return std::exp(x[0]); };
    const double tau = 0.5, eps = 1.0;
    double prev = kInf, scaled0 = 0, scaled_max = 0;
    std::ostringstream es;
    for (int n : {8, 16, 32}) {
        const auto hp = approximate_geometric(body, f, n);
        if (!(hp.sup_error < prev)) o.pass = false;
        prev = hp.sup_error;
        const double scaled = hp.sup_error * std::pow(n, tau * eps);
        if (n == 8) scaled0 = scaled;
        scaled_max = std::max(scaled_max, scaled);
        es << (es.tellp() ? "/" : "") << num(hp.sup_error);
    }
    if (!(scaled_max <= 2 * scaled0)) o.pass = false;
    o.detail = "exp(x) on ellipse(2,1), n=8/16/32: " + es.str() + " decreasing; max err*n^0.5 " + num(scaled_max) +
               " <= 2 x first " + num(2 * scaled0);
    return o;
}

// ---------------------------------------------------------------- AC9

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome ac9() {
    Outcome o;
    const fs::path configs = fs::path(HPA_SOURCE_DIR) / "configs";
    const fs::path scratch = fs::temp_directory_path() / ("hpa_acceptance_" + std::to_string(::getpid()));
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(configs))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    int compared = 0;
    std::ostringstream bad;
    for (const auto& cfg : files) {
        const auto sub = nlohmann::json::parse(slurp(cfg)).at("subcommand").get<std::string>();
        const fs::path a = scratch / (cfg.stem().string() + "_a"), b = scratch / (cfg.stem().string() + "_b");
        int codes[2];
        for (int r = 0; r < 2; ++r) {
            const std::string cmd = std::string("\"") + HPA_TOOL + "\" " + sub + " --config \"" + cfg.string() +
                                    "\" --out \"" + (r ? b : a).string() + "\" 2>/dev/null";
            const int st = std::system(cmd.c_str());
            codes[r] = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
        }
        if (codes[0] != 0 || codes[1] != 0) {
            bad << " " << cfg.filename().string() << " exit " << codes[0] << "/" << codes[1];
            continue;
        }
        std::set<std::string> names;
        for (const auto& dir : {a, b})
            for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
        for (const auto& name : names) {
            if (name == "run_manifest.json") continue;
            if (!fs::exists(a / name) || !fs::exists(b / name) || slurp(a / name) != slurp(b / name))
                bad << " " << cfg.filename().string() << ":" << name;
            ++compared;
        }
    }
    fs::remove_all(scratch);
    o.pass = bad.str().empty() && !files.empty();
    o.detail = std::to_string(files.size()) + " configs, " + std::to_string(compared) +
               " output files byte-identical across reruns (run_manifest.json excluded)" +
               (bad.str().empty() ? "" : "; differs:" + bad.str());
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, 10, ac1}, {2, 30, ac2}, {3, 5, ac3}, {4, 60, ac4}, {5, 20, ac5},
        {6, 120, ac6}, {7, 300, ac7}, {8, 300, ac8}, {9, 0, ac9},
    };
    int unexpected = 0;
    for (const auto& c : all) {
        Stopwatch sw;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = sw.seconds();
        std::string timing = num(secs) + " s";
        if (c.limit_seconds > 0) {
            timing += " / " + num(c.limit_seconds) + " s";
            if (secs >= c.limit_seconds) {
                o.pass = false;
                o.detail += "; over the time limit";
            }
        }
        std::cout << "AC" << c.id << " " << (o.pass ? "PASS" : "FAIL") << " [" << timing << "] " << o.detail;
        const auto red = kKnownRed.find(c.id);
        if (!o.pass && red != kKnownRed.end()) std::cout << "\n    known failure: " << red->second;
        else if (!o.pass) ++unexpected;
        else if (red != kKnownRed.end()) std::cout << "\n    listed as a known failure but passed; update the list";
        std::cout << std::endl;
    }
    return unexpected == 0 ? 0 : 1;
}
