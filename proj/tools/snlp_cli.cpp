// Command-line front end: evaluate scale functions and occupation-time
// densities to CSV, price step options, run the Monte Carlo engine, and run
// the built-in identity suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snlp/errors.hpp"
#include "snlp/hyperexp_model.hpp"
#include "snlp/identity_checks.hpp"
#include "snlp/mc.hpp"
#include "snlp/model_io.hpp"
#include "snlp/occupation.hpp"
#include "snlp/pricing.hpp"
#include "snlp/root_finding.hpp"
#include "snlp/scale_functions.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

snlp::HyperExpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return snlp::model_from_json_text(ss.str());
}

/// Output sink: file when --out given, stdout otherwise.
struct Sink {
    std::ofstream file;
    std::ostream& stream(const std::string& out_path) {
        if (out_path.empty()) return std::cout;
        file.open(out_path);
        if (!file) throw std::invalid_argument("cannot open output file: " + out_path);
        return file;
    }
};

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("bad number in list: " + tok);
        vals.push_back(v);
    }
    if (vals.empty()) throw std::invalid_argument("empty list");
    return vals;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Occupation-time laws and step-option pricing for spectrally "
                 "negative hyper-exponential jump-diffusions"};
    app.require_subcommand(1);

    std::string model_path, out_path, maturities_csv, method = "talbot";
    double p = 1.0, q = 0.0, rho = 0.0, x = 0.0, rate = 0.0;
    double spot = 0.0, strike = 0.0, barrier = 0.0;
    std::optional<double> a_opt, b_opt, ymin, ymax, xmax;
    long long paths = 100000;
    double dt = 0.0;
    std::uint64_t seed = 20240915;
    std::size_t grid = 513;
    bool force = false;

    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_path, "model JSON file")->required();
        cmd->add_option("--out", out_path, "output file (default stdout)");
    };

    CLI::App* scale = app.add_subcommand("scale", "emit W^(q)/Z^(q) grid as CSV");
    add_model(scale);
    scale->add_option("--q", q, "level q >= 0");
    scale->add_option("--xmax", xmax, "grid upper end (default 5)");
    scale->add_option("--grid", grid, "number of grid points");

    CLI::App* density = app.add_subcommand(
        "density", "occupation-time density slice as CSV (finite interval with --a/--b, "
                   "half-line below --b otherwise)");
    add_model(density);
    density->add_option("--p", p, "Laplace variable in t (> 0)");
    density->add_option("--q", q, "occupation penalty (>= 0)");
    density->add_option("--a", a_opt, "interval lower end");
    density->add_option("--b", b_opt, "interval upper end (required)");
    density->add_option("--x", x, "starting point");
    density->add_option("--grid", grid, "grid points");
    density->add_option("--ymin", ymin, "grid lower end override");
    density->add_option("--ymax", ymax, "grid upper end override");

    CLI::App* price = app.add_subcommand("price", "step-option price curve as CSV");
    add_model(price);
    price->add_option("--spot", spot, "S0")->required();
    price->add_option("--strike", strike, "K")->required();
    price->add_option("--barrier", barrier, "L")->required();
    price->add_option("--rho", rho, "knock-out rate");
    price->add_option("--rate", rate, "risk-free rate r");
    price->add_option("--maturities", maturities_csv, "comma-separated maturities")->required();
    price->add_option("--method", method, "talbot|gs")->check(CLI::IsMember({"talbot", "gs"}));
    price->add_flag("--force", force, "keep points whose error estimate exceeds 1e-2 * price");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo estimates with standard errors (option mode with --spot/"
                    "--strike/--barrier, joint-density mode with --p/--b/--x)");
    add_model(simulate);
    simulate->add_option("--spot", spot, "S0 (option mode)");
    simulate->add_option("--strike", strike, "K");
    simulate->add_option("--barrier", barrier, "L");
    simulate->add_option("--rho", rho, "knock-out rate");
    simulate->add_option("--rate", rate, "risk-free rate");
    simulate->add_option("--maturities", maturities_csv, "maturities (option mode)");
    simulate->add_option("--p", p, "Laplace variable (joint mode)");
    simulate->add_option("--q", q, "occupation penalty (joint mode)");
    simulate->add_option("--a", a_opt, "interval lower end (joint mode)");
    simulate->add_option("--b", b_opt, "interval upper end (joint mode)");
    simulate->add_option("--x", x, "starting point (joint mode)");
    simulate->add_option("--grid", grid, "number of bins (joint mode)");
    simulate->add_option("--paths", paths, "number of paths");
    simulate->add_option("--dt", dt, "time step (default 1e-3 * horizon)");
    simulate->add_option("--seed", seed, "RNG seed");

    CLI::App* check = app.add_subcommand("check", "run the built-in identity suite");
    add_model(check);

    CLI11_PARSE(app, argc, argv);

    try {
        const snlp::HyperExpModel model = load_model(model_path);
        Sink sink;

        if (scale->parsed()) {
            const double hi = xmax.value_or(5.0);
            if (grid < 2 || !(hi > 0.0))
                throw std::invalid_argument("scale: need grid >= 2 and xmax > 0");
            snlp::ScaleEvaluator ev(model, q);
            std::ostream& os = sink.stream(out_path);
            os << "x,W,Z\n";
            for (std::size_t i = 0; i < grid; ++i) {
                const double xv = hi * static_cast<double>(i) / static_cast<double>(grid - 1);
                os << fmt(xv) << "," << fmt(ev.w(xv)) << "," << fmt(ev.z(xv)) << "\n";
            }
        } else if (density->parsed()) {
            if (!b_opt) throw std::invalid_argument("density: --b is required");
            snlp::TransformQuery query;
            query.p = p;
            query.q = q;
            query.x = x;
            query.interval = a_opt ? snlp::OccupationInterval::finite_interval(*a_opt, *b_opt)
                                   : snlp::OccupationInterval::half_line_below(*b_opt);
            const snlp::DensitySlice slice =
                snlp::evaluate_density_slice(model, query, grid, ymin, ymax);
            if (slice.negative_flagged > 0)
                std::cerr << "warning: " << slice.negative_flagged
                          << " grid values below -1e-9 were clipped (min raw "
                          << fmt(slice.min_raw_value) << ")\n";
            snlp::write_density_csv(slice, sink.stream(out_path), snlp::model_hash(model));
        } else if (price->parsed()) {
            snlp::StepOptionContract contract;
            contract.spot = spot;
            contract.strike = strike;
            contract.barrier = barrier;
            contract.knock_out_rate = rho;
            contract.rate = rate;
            const std::vector<double> ts = parse_list(maturities_csv);
            contract.maturity = ts.front();
            contract.validate();
            if (!snlp::is_martingale_measure(model, rate))
                std::cerr << "warning: psi(1) = " << fmt(snlp::laplace_exponent(model, 1.0))
                          << " != r; model measure is not risk-neutral for this rate\n";
            snlp::PricingOptions opts;
            opts.method = method == "gs" ? snlp::InversionMethod::gaver_stehfest
                                         : snlp::InversionMethod::talbot;
            opts.force = force;
            const snlp::PriceCurve curve = snlp::price_step_option(model, contract, ts, opts);
            std::ostream& os = sink.stream(out_path);
            os << "T,price,error_estimate,method\n";
            for (std::size_t i = 0; i < curve.maturities.size(); ++i)
                os << fmt(curve.maturities[i]) << "," << fmt(curve.prices[i]) << ","
                   << fmt(curve.error_estimates[i]) << "," << curve.method << "\n";
        } else if (simulate->parsed()) {
            snlp::SimConfig cfg;
            cfg.n_paths = paths;
            cfg.seed = seed;
            if (spot > 0.0) { // option mode
                if (maturities_csv.empty())
                    throw std::invalid_argument("simulate: option mode needs --maturities");
                snlp::StepOptionContract contract;
                contract.spot = spot;
                contract.strike = strike;
                contract.barrier = barrier;
                contract.knock_out_rate = rho;
                contract.rate = rate;
                const std::vector<double> ts = parse_list(maturities_csv);
                std::ostream& os = sink.stream(out_path);
                os << "T,estimate,std_error,n_effective\n";
                for (double T : ts) {
                    contract.maturity = T;
                    cfg.horizon = T;
                    cfg.dt = dt > 0.0 ? dt : 1e-3 * T;
                    const snlp::PathFunctionalEstimate e =
                        snlp::estimate_option(model, contract, cfg);
                    os << fmt(T) << "," << fmt(e.mean) << "," << fmt(e.std_error) << ","
                       << e.n_effective << "\n";
                }
            } else { // joint-density mode
                if (!b_opt) throw std::invalid_argument("simulate: joint mode needs --b");
                snlp::OccupationWindow window;
                window.hi = *b_opt;
                if (a_opt) window.lo = *a_opt;
                cfg.horizon = 1.0 / p;
                cfg.dt = dt > 0.0 ? dt : 1e-3 * cfg.horizon;
                const double span = 8.0 * std::sqrt(snlp::variance_rate(model) / p);
                std::vector<double> edges(grid + 1);
                for (std::size_t i = 0; i <= grid; ++i)
                    edges[i] = x - span + 2.0 * span * static_cast<double>(i) /
                                               static_cast<double>(grid);
                const snlp::JointHistogram hist =
                    snlp::estimate_joint(model, x, p, q, window, edges, cfg);
                if (hist.bias_warning)
                    std::cerr << "warning: dt exceeds (bin width)^2/sigma^2; estimates may be "
                                 "biased\n";
                std::ostream& os = sink.stream(out_path);
                os << "y,density,std_error\n";
                for (std::size_t b = 0; b < hist.bins.size(); ++b) {
                    const double yc = 0.5 * (hist.bin_edges[b] + hist.bin_edges[b + 1]);
                    os << fmt(yc) << "," << fmt(hist.bins[b].mean) << ","
                       << fmt(hist.bins[b].std_error) << "\n";
                }
            }
        } else if (check->parsed()) {
            const auto results = snlp::run_identity_suite(model);
            bool all_pass = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name
                          << "  (error " << fmt(r.error) << ", tolerance " << fmt(r.tolerance)
                          << ")\n";
                all_pass = all_pass && r.pass;
            }
            if (!all_pass) return 2;
        }
    } catch (const snlp::InversionUnstable& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const snlp::BracketFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const snlp::DegenerateRoots& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const snlp::AbscissaTooSmall& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::overflow_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
