#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpa/config.hpp"
#include "run.hpp"

namespace {

struct Flags {
    std::string config, out = "out", body, weight, f, route;
    std::uint64_t seed = 0;
    int n = 0, m = 0, samples = 0, grid = 0, dim = 0, points = 0;
    double delta = 0, tau = 0;
    std::vector<int> n_list;
    std::vector<double> lambda, h;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homogeneous polynomial approximation on boundaries of symmetric convex bodies"};
    app.require_subcommand(1);
    Flags fl;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", fl.config, "JSON config file");
        s->add_option("--out", fl.out, "output directory")->capture_default_str();
        s->add_option("--seed", fl.seed, "random seed (overrides the config)");
    };

    auto* approx = app.add_subcommand("approx", "approximate f on the boundary by h_n + h_(n-1)");
    auto* unity = app.add_subcommand("unity", "approximate 1 on the boundary by an even form of degree 2n");
    auto* equil = app.add_subcommand("equilibrium", "equilibrium support and density for lambda Q");
    auto* wapprox = app.add_subcommand("wapprox", "weighted minimax W^n p_n on the slope line");
    auto* part = app.add_subcommand("partition-diag", "partition of unity diagnostics");
    auto* checkw = app.add_subcommand("check-weight", "check the two weight conditions");
    for (auto* s : {approx, unity, equil, wapprox, part, checkw}) common(s);

    for (auto* s : {approx, unity, equil, wapprox, checkw}) s->add_option("--body", fl.body, "e.g. disk, ellipse:2,1, square");
    for (auto* s : {equil, wapprox, checkw}) s->add_option("--weight", fl.weight, "body | power:M [:inverted]");
    for (auto* s : {approx, wapprox}) s->add_option("--f", fl.f, "function expression");
    for (auto* s : {approx, unity}) s->add_option("--n", fl.n, "degree parameter");
    for (auto* s : {approx, unity, wapprox}) s->add_option("--n-list", fl.n_list, "degree ladder")->delimiter(',');
    approx->add_option("--route", fl.route, "auto | geometric | planar");
    approx->add_option("--m", fl.m, "Weierstrass degree");
    approx->add_option("--delta", fl.delta, "Weierstrass target");
    for (auto* s : {approx, unity}) s->add_option("--samples", fl.samples, "boundary check samples");
    unity->add_option("--tau", fl.tau, "rate exponent used for the Jackson order");
    equil->add_option("--lambda", fl.lambda, "field strengths > 1")->delimiter(',');
    equil->add_option("--grid", fl.grid, "density curve points");
    for (auto* s : {wapprox, checkw}) s->add_option("--grid", fl.grid, "grid size");
    part->add_option("--dim", fl.dim, "dimension 1..3");
    part->add_option("--h-list", fl.h, "mesh sizes in (0, 1]")->delimiter(',');
    part->add_option("--points", fl.points, "random points per mesh size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hpa::cli::kConfigFailure;
    }

    CLI::App* sub = app.get_subcommands().front();
    hpa::cli::RunRequest req;
    req.subcommand = sub->get_name();
    req.out_dir = fl.out;
    auto given = [sub](const char* name) {
        try {
            return sub->get_option(name)->count() > 0;
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
    };
    try {
        if (given("--config")) {
            std::ifstream in(fl.config, std::ios::binary);
            if (!in) throw hpa::ConfigError("", "cannot read config file " + fl.config);
            std::ostringstream ss;
            ss << in.rdbuf();
            req.config_text = ss.str();
        }
        auto& o = req.overrides;
        if (given("--seed")) req.seed = fl.seed;
        if (given("--body")) o["body"] = hpa::cli::body_from_flag(fl.body);
        if (given("--weight")) o["weight"] = hpa::cli::weight_from_flag(fl.weight);
        if (given("--f")) o["f"] = fl.f;
        if (given("--n")) o["n"] = fl.n;
        if (given("--n-list")) o["n_list"] = fl.n_list;
        if (given("--route")) o["route"] = fl.route;
        if (given("--m")) o["m"] = fl.m;
        if (given("--delta")) o["delta"] = fl.delta;
        if (given("--samples")) o["samples"] = fl.samples;
        if (given("--tau")) o["unity"]["tau"] = fl.tau;
        if (given("--lambda")) o["lambda"] = fl.lambda;
        if (given("--grid")) o[req.subcommand == "equilibrium" ? "curve_points" : "grid"] = fl.grid;
        if (given("--dim")) o["dim"] = fl.dim;
        if (given("--h-list")) o["h"] = fl.h;
        if (given("--points")) o["points"] = fl.points;
    } catch (const hpa::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hpa::cli::kConfigFailure;
    }
    return hpa::cli::run(req, std::cerr);
}
