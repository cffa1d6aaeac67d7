// kpztail: evaluations, sweeps, and certification reports for the
// gamma-deformed Airy functions, the crossover kernel, its Fredholm
// determinant, and the right tail of the edge crossover distribution.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpztail/bounds.hpp"
#include "kpztail/contour.hpp"
#include "kpztail/crossover.hpp"
#include "kpztail/deformed_airy.hpp"
#include "kpztail/fredholm.hpp"
#include "kpztail/kernel_ops.hpp"
#include "kpztail/special.hpp"

using json = nlohmann::json;
using namespace kpztail;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + out_path);
        f << text;
    }
}

std::vector<double> parse_list(const std::string& text) {
    // "a,b,c" or "a:b:step"
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double a = 0, b = 0, step = 1;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0) {
            throw CLI::ValidationError("range must be a:b:step with step > 0: " + text);
        }
        for (double v = a; v <= b + 1e-12 * std::max(1.0, std::abs(b)); v += step) {
            out.push_back(v);
        }
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("empty list: " + text);
    return out;
}

int run_selftest(const Config& cfg) {
    int failures = 0;
    auto check = [&](const char* name, bool ok, const std::string& detail = "") {
        std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name,
                    detail.empty() ? "" : ": ", detail.c_str());
        if (!ok) ++failures;
    };

    // gamma trivia
    check("gamma(1) = 1", std::abs(special::gamma({1, 0}) - Complex(1, 0)) < 1e-13);
    check("gamma(3/2) = sqrt(pi)/2",
          std::abs(special::gamma({1.5, 0}).real() - 0.88622692545275801) < 1e-12);
    check("recip_gamma(-1) = 0", std::abs(special::recip_gamma({-1, 0})) < 1e-10);
    check("recip_gamma(2) = 1",
          std::abs(special::recip_gamma({2, 0}) - Complex(1, 0)) < 1e-12);

    // Stirling sandwich at x = 1: middle e/sqrt(2 pi), bounds (1, e^{1/12})
    auto st = special::check_stirling_sandwich(1.0);
    check("stirling sandwich x=1", st.ok && std::abs(st.middle - 1.0844375514192275) < 1e-12);
    auto st10 = special::check_stirling_sandwich(10.0);
    check("stirling sandwich x=10", st10.ok);

    // recip-gamma envelope degenerate points
    auto e1 = special::check_recip_gamma_envelope({1, 1, 0, 0}, 0.1);
    check("envelope point z=1: ratio e^-2",
          std::abs(e1.max_ratio - std::exp(-2.0)) < 1e-12 && e1.violations == 0);
    auto e2 = special::check_recip_gamma_envelope({2, 2, 0, 0}, 0.1);
    check("envelope point z=2: ratio e^-4",
          std::abs(e2.max_ratio - std::exp(-4.0)) < 1e-12 && e2.violations == 0);

    // contour basics: circle of 1/z and a Gaussian on a vertical line
    {
        contour::Contour circle{{contour::Arc{{0, 0}, 1.0, 0.0, kTwoPi}}};
        auto q = contour::integrate(
            circle, [](Complex z) { return 1.0 / z; }, 1e-10, cfg);
        check("circle 1/z = 2 pi i", std::abs(q.value - Complex(0, kTwoPi)) < 1e-10);
        double d = contour::deform_check(
            circle, circle, [](Complex z) { return 1.0 / z; }, {}, 1e-10, cfg);
        check("deform_check identity", d < 2e-10);
        contour::Contour circle2{{contour::Arc{{0, 0}, 2.0, 0.0, kTwoPi}}};
        double d2 = contour::deform_check(
            circle, circle2, [](Complex z) { return 1.0 / z; }, {}, 1e-10, cfg);
        check("deform_check homotopic circles", d2 < 2e-10);
    }
    {
        // on z = 1 + i t the parameter Gaussian e^{-t^2} is e^{(z-1)^2};
        // dz = i dt makes the integral i sqrt(pi)
        contour::Contour line{{contour::Line{{1, -9}, {1, 9}}}};
        auto q = contour::integrate(
            line, [](Complex z) { return std::exp((z - 1.0) * (z - 1.0)); }, 1e-10, cfg);
        check("gaussian on vertical line",
              std::abs(q.value - Complex(0, std::sqrt(kPi))) < 1e-9);
    }

    // classical Airy point
    check("Ai(0)", std::abs(airy::airy_classical(0.0, cfg) - 0.35502805388781724) < 1e-9);

    // residue value at T = 2: kappa_T = 1
    check("upper residue T=2 equals 1",
          std::abs(airy::upper_residue_at_zero(airy::DeformedAiryParams::from_T(0, 2).kappa_inv) - 1.0) < 1e-15);

    // mu-factor trivia
    op::KernelSpec spec{2.0, Complex(-1, 0), 2.0};
    check("mu_factor(0, mu=-1) = -1/2",
          std::abs(op::mu_factor(0.0, spec) - Complex(-0.5, 0)) < 1e-15);
    check("a1 weights at x=t=0 are 1",
          std::abs(op::a1_kernel(0.0, 0.0, spec, cfg) -
                   airy::ai_upper_gamma(airy::DeformedAiryParams::from_T(0, 2), cfg).value) < 1e-9);

    // Fredholm trivia
    auto zero = fredholm::nystrom_det([](double, double) { return Complex(0, 0); }, 0.0,
                                      1.0, 1e-10, 8, 64);
    check("zero kernel det = 1", zero.det == Complex(1, 0));
    auto r1 = fredholm::nystrom_det(
        [](double x, double y) { return Complex(std::exp(-x - y), 0); }, 0.0, 1.0, 1e-10,
        8, 1024);
    check("rank-one det = 1/2", std::abs(r1.det.real() - 0.5) < 1e-8 && r1.converged);

    // zero operator: det bound is vacuous (0 <= 0)
    op::KernelSpec vac{8.0, Complex(0, 0), 10.0};
    auto db = fredholm::det_bound_check(vac, cfg);
    check("mu=0 det bound vacuous", db.ok && db.lhs < 1e-14 && db.rhs < 1e-14);

    std::printf("%d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kpztail: deformed Airy functions, crossover kernel determinants, "
                 "and KPZ edge crossover tail certification"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a TOML-style config file");

    Config cfg;
    int jobs = 1;
    std::string out_path;
    bool dump_config = false;
    app.add_option("--T0", cfg.T0, "lower bound T0 of the admissible T range")
        ->capture_default_str();
    app.add_option("--abs-tol", cfg.abs_tol, "quadrature absolute tolerance")
        ->capture_default_str();
    app.add_option("--det-tol", cfg.det_tol, "determinant convergence tolerance")
        ->capture_default_str();
    app.add_option("--node-cap", cfg.det_node_cap, "Nystrom node cap")
        ->capture_default_str();
    app.add_option("--jobs", jobs, "worker thread bound for sweeps")
        ->capture_default_str();
    app.add_option("--out", out_path, "output path (default stdout)");
    app.add_flag("--dump-config", dump_config, "print the effective config and exit")
        ->configurable(false);

    // airy
    auto* airy_cmd = app.add_subcommand("airy", "evaluate Ai^Gamma / Ai_Gamma / classical Ai");
    std::string which = "upper";
    double ax = 0, aT = 1;
    airy_cmd->add_option("--which", which, "upper | lower | classical")
        ->check(CLI::IsMember({"upper", "lower", "classical"}))
        ->capture_default_str();
    airy_cmd->add_option("--x", ax, "argument")->capture_default_str();
    airy_cmd->add_option("--T", aT, "time parameter T >= T0")->capture_default_str();

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "certify a deformed-Airy growth envelope");
    std::string bwhich = "upper_all_x";
    double bxmax = 20, bstep = 0.5;
    std::string bT = "1,8,64", bcsv;
    bounds_cmd->add_option("--which", bwhich, "upper_all_x | lower_pos_x | lower_neg_x")
        ->check(CLI::IsMember({"upper_all_x", "lower_pos_x", "lower_neg_x"}))
        ->capture_default_str();
    bounds_cmd->add_option("--x-max", bxmax, "|x| range limit")->capture_default_str();
    bounds_cmd->add_option("--x-step", bstep, "linear grid step")->capture_default_str();
    bounds_cmd->add_option("--T", bT, "T grid (comma list)")->capture_default_str();
    bounds_cmd->add_option("--csv", bcsv, "also write (x,T,value,envelope,ratio) rows");

    // kernel
    auto* kernel_cmd = app.add_subcommand("kernel", "evaluate the crossover kernel");
    double kT = 8, kmu_re = -1, kmu_im = 0, ks = 10, kx = 10, ky = 10;
    std::string kgrid;
    kernel_cmd->add_option("--T", kT)->capture_default_str();
    kernel_cmd->add_option("--mu-re", kmu_re)->capture_default_str();
    kernel_cmd->add_option("--mu-im", kmu_im)->capture_default_str();
    kernel_cmd->add_option("--s", ks)->capture_default_str();
    kernel_cmd->add_option("--x", kx)->capture_default_str();
    kernel_cmd->add_option("--y", ky)->capture_default_str();
    kernel_cmd->add_option("--grid", kgrid,
                           "a:b:step -> CSV rows (x,y,Re,Im) over the grid square");

    // hsnorm
    auto* hs_cmd = app.add_subcommand("hsnorm", "Hilbert-Schmidt norms and I-splits");
    double hT = 8, hmu_re = -1, hmu_im = 0, hs_s = 10;
    hs_cmd->add_option("--T", hT)->capture_default_str();
    hs_cmd->add_option("--mu-re", hmu_re)->capture_default_str();
    hs_cmd->add_option("--mu-im", hmu_im)->capture_default_str();
    hs_cmd->add_option("--s", hs_s)->capture_default_str();

    // det
    auto* det_cmd = app.add_subcommand("det", "Nystrom Fredholm determinant");
    double dT = 8, dmu_re = -1, dmu_im = 0, ds = 10;
    int dnodes = 16;
    det_cmd->add_option("--T", dT)->capture_default_str();
    det_cmd->add_option("--mu-re", dmu_re)->capture_default_str();
    det_cmd->add_option("--mu-im", dmu_im)->capture_default_str();
    det_cmd->add_option("--s", ds)->capture_default_str();
    det_cmd->add_option("--nodes", dnodes, "starting node count (power of two)")
        ->capture_default_str();

    // tail / sweep / fit
    auto* tail_cmd = app.add_subcommand("tail", "single tail probability 1 - F(s)");
    double tT = 8, ts = 10, tdelta = 0.5, tradius = 0.5, ttrunc = 40;
    tail_cmd->add_option("--T", tT)->capture_default_str();
    tail_cmd->add_option("--s", ts)->capture_default_str();
    tail_cmd->add_option("--delta", tdelta, "mu-contour ray offset")->capture_default_str();
    tail_cmd->add_option("--radius", tradius, "mu-contour cap radius")->capture_default_str();
    tail_cmd->add_option("--truncation", ttrunc, "mu-contour truncation")->capture_default_str();

    auto* sweep_cmd = app.add_subcommand("sweep", "tail sweep over (s, T) -> CSV");
    std::string swT = "8,64", sws = "8:20:1";
    double swdelta = 0.5, swradius = 0.5, swtrunc = 40;
    sweep_cmd->add_option("--T", swT, "T values (comma list)")->capture_default_str();
    sweep_cmd->add_option("--s", sws, "s values (a:b:step or comma list)")
        ->capture_default_str();
    sweep_cmd->add_option("--delta", swdelta)->capture_default_str();
    sweep_cmd->add_option("--radius", swradius)->capture_default_str();
    sweep_cmd->add_option("--truncation", swtrunc)->capture_default_str();

    auto* fit_cmd = app.add_subcommand("fit", "fit the mixed-exponential upper envelope");
    std::string fin, fplot;
    fit_cmd->add_option("--in", fin, "sweep CSV input");
    fit_cmd->add_option("--plot-data", fplot, "gnuplot data file: s, log tail, log envelope per T");

    // contour-check
    auto* cc_cmd = app.add_subcommand("contour-check",
                                      "validate a JSON contour description");
    std::string cc_in;
    cc_cmd->add_option("--json", cc_in, "contour JSON file (segment list)");

    app.add_subcommand("selftest", "run the trivial-example checks end-to-end");

    for (auto* sc : app.get_subcommands(
             [](const CLI::App*) { return true; })) {
        sc->fallthrough(); // let --out/--T0/... appear after the subcommand
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e); // prints the message / usage
        return code == 0 ? 0 : 2;
    }

    if (dump_config) {
        std::cout << app.config_to_str(true, true);
        return 0;
    }

    try {
        if (app.got_subcommand("selftest")) {
            return run_selftest(cfg);
        }
        if (app.got_subcommand(airy_cmd)) {
            json j{{"schema_version", 1}, {"which", which}, {"x", ax}};
            if (which == "classical") {
                j["value"] = airy::airy_classical(ax, cfg);
            } else {
                auto p = airy::DeformedAiryParams::from_T(ax, aT);
                auto r = which == "upper" ? airy::ai_upper_gamma(p, cfg)
                                          : airy::ai_lower_gamma(p, cfg);
                j["T"] = aT;
                j["value"] = r.value;
                j["imag_residual"] = r.imag_residual;
                j["contour_case"] = airy::to_string(r.contour_case);
                j["nodes_used"] = r.quad.nodes_used;
                j["abs_error_estimate"] = r.quad.abs_error_estimate;
            }
            emit(j.dump(2), out_path);
            return 0;
        }
        if (app.got_subcommand(bounds_cmd)) {
            bounds::EnvelopeSpec spec;
            if (bwhich == "upper_all_x") spec.which = bounds::EnvelopeKind::upper_all_x;
            if (bwhich == "lower_pos_x") spec.which = bounds::EnvelopeKind::lower_pos_x;
            if (bwhich == "lower_neg_x") spec.which = bounds::EnvelopeKind::lower_neg_x;
            auto xg = bounds::default_x_grid(spec.which, bxmax, bstep);
            auto rep = bounds::certify_envelope(spec, xg, parse_list(bT), cfg);
            json j{{"schema_version", 1},
                   {"which", bwhich},
                   {"empirical_C", rep.empirical_C},
                   {"argmax", {{"x", rep.argmax_x}, {"T", rep.argmax_T}}},
                   {"grid", rep.grid},
                   {"monotone_tail_ok", rep.monotone_tail_ok}};
            for (auto& [T, mx] : rep.per_T_max) {
                j["per_T_max"].push_back({{"T", T}, {"max_ratio", mx}});
            }
            if (!bcsv.empty()) {
                std::string csv = "x,T,value,envelope,ratio\n";
                for (const auto& r : rep.rows) {
                    csv += fmt17(r.x) + "," + fmt17(r.T) + "," + fmt17(r.value) + "," +
                           fmt17(r.envelope) + "," + fmt17(r.ratio) + "\n";
                }
                emit(csv, bcsv);
            }
            emit(j.dump(2), out_path);
            return 0;
        }
        if (app.got_subcommand(kernel_cmd)) {
            op::KernelSpec spec{kT, Complex(kmu_re, kmu_im), ks};
            airy::TabulatedAiry tab(kT, cfg);
            if (kgrid.empty()) {
                Complex v = op::kernel_eval(kx, ky, spec, cfg, &tab);
                json j{{"schema_version", 1}, {"x", kx},          {"y", ky},
                       {"re", v.real()},      {"im", v.imag()},   {"T", kT},
                       {"s", ks},             {"mu_re", kmu_re},  {"mu_im", kmu_im}};
                emit(j.dump(2), out_path);
            } else {
                auto g = parse_list(kgrid);
                std::string csv = "x,y,Re,Im\n";
                for (double x : g) {
                    for (double y : g) {
                        Complex v = op::kernel_eval(x, y, spec, cfg, &tab);
                        csv += fmt17(x) + "," + fmt17(y) + "," + fmt17(v.real()) + "," +
                               fmt17(v.imag()) + "\n";
                    }
                }
                emit(csv, out_path);
            }
            return 0;
        }
        if (app.got_subcommand(hs_cmd)) {
            op::KernelSpec spec{hT, Complex(hmu_re, hmu_im), hs_s};
            auto rep = op::hs_norms(spec, cfg);
            json j{{"schema_version", 1},
                   {"norm_a1", rep.norm_a1},
                   {"norm_a2", rep.norm_a2},
                   {"I1", rep.I1},
                   {"I2", rep.I2},
                   {"I3", rep.I3},
                   {"I4", rep.I4},
                   {"product", rep.product},
                   {"largeness_ok", rep.largeness_ok},
                   {"err_estimate", rep.err_estimate}};
            emit(j.dump(2), out_path);
            return 0;
        }
        if (app.got_subcommand(det_cmd)) {
            op::KernelSpec spec{dT, Complex(dmu_re, dmu_im), ds};
            auto r = fredholm::nystrom_det(spec, dnodes, cfg);
            json j{{"schema_version", 1},
                   {"det_re", r.det.real()},
                   {"det_im", r.det.imag()},
                   {"n", r.n},
                   {"richardson_re", r.richardson.real()},
                   {"richardson_im", r.richardson.imag()},
                   {"converged", r.converged},
                   {"last_delta", r.last_delta}};
            emit(j.dump(2), out_path);
            return r.converged ? 0 : 1;
        }
        if (app.got_subcommand(tail_cmd)) {
            crossover::MuContourSpec mc{tdelta, tradius, ttrunc};
            auto r = crossover::tail_probability(ts, tT, mc, cfg.det_tol, cfg);
            json j{{"schema_version", 1},
                   {"s", ts},
                   {"T", tT},
                   {"tail", r.tail},
                   {"imag_residual", r.imag_residual},
                   {"err_estimate", r.err_estimate},
                   {"n_used", r.n_used},
                   {"det_evals", r.det_evals},
                   {"clipped", r.clipped}};
            emit(j.dump(2), out_path);
            return 0;
        }
        if (app.got_subcommand(sweep_cmd)) {
            crossover::MuContourSpec mc{swdelta, swradius, swtrunc};
            auto rows = crossover::sweep(parse_list(sws), parse_list(swT), mc,
                                         cfg.det_tol, cfg, jobs);
            emit(crossover::to_csv(rows), out_path);
            return 0;
        }
        if (app.got_subcommand(cc_cmd)) {
            if (cc_in.empty()) throw std::invalid_argument("contour-check: --json required");
            std::ifstream f(cc_in, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + cc_in);
            std::stringstream ss;
            ss << f.rdbuf();
            auto c = contour::from_json(ss.str());
            c.validate();
            double len = 0;
            for (const auto& s : c.segments) len += contour::segment_length(s);
            Complex a = contour::segment_start(c.segments.front());
            Complex b = contour::segment_end(c.segments.back());
            json j{{"schema_version", 1},
                   {"segments", c.segments.size()},
                   {"length", len},
                   {"start", {a.real(), a.imag()}},
                   {"end", {b.real(), b.imag()}},
                   {"valid", true},
                   {"round_trip", contour::to_json(c)}};
            emit(j.dump(2), out_path);
            return 0;
        }
        if (app.got_subcommand(fit_cmd)) {
            if (fin.empty()) throw std::invalid_argument("fit: --in required");
            std::ifstream f(fin, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open " + fin);
            std::stringstream ss;
            ss << f.rdbuf();
            auto rows = crossover::from_csv(ss.str());
            auto fit = crossover::fit_tail_envelope(rows);
            json j{{"schema_version", 1},
                   {"c1", fit.c1},
                   {"c2", fit.c2},
                   {"c3", fit.c3},
                   {"rms_log_residual", fit.rms_log_residual},
                   {"max_log_residual", fit.max_log_residual},
                   {"s_range", {fit.s_min, fit.s_max}},
                   {"T_range", {fit.T_min, fit.T_max}},
                   {"model_slope_ratio", fit.model_slope_ratio},
                   {"empirical_slope_ratio", fit.empirical_slope_ratio}};
            if (!fplot.empty()) {
                // gnuplot blocks: per T, columns s log(tail) log(envelope)
                std::map<double, std::vector<crossover::SweepRow>> byT;
                for (const auto& r : rows) byT[r.T].push_back(r);
                std::string data = "# s log_tail log_envelope (blocks per T)\n";
                for (auto& [T, rs] : byT) {
                    std::sort(rs.begin(), rs.end(),
                              [](auto& a, auto& b) { return a.s < b.s; });
                    data += "# T = " + fmt17(T) + "\n";
                    for (const auto& r : rs) {
                        double a = -fit.c2 * std::cbrt(r.T) * r.s;
                        double b = -fit.c3 * r.s * std::sqrt(r.s);
                        double m = std::max(a, b);
                        double env = std::log(fit.c1) + m + std::log1p(std::exp(std::min(a, b) - m));
                        data += fmt17(r.s) + " " + fmt17(std::log(r.tail)) + " " +
                                fmt17(env) + "\n";
                    }
                    data += "\n";
                }
                emit(data, fplot);
            }
            emit(j.dump(2), out_path);
            return 0;
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
