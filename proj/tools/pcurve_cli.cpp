// Command-line front end: build states, evaluate the curve and the fiber
// maps, run verification suites, export plots.
//
// Exit codes: 0 success, 1 verification failure, 2 construction failure,
// 3 invalid input.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "pcurve/construction.hpp"
#include "pcurve/dynamics.hpp"
#include "pcurve/export.hpp"
#include "pcurve/verify.hpp"

using namespace pcurve;

namespace {

// "k*", "k*+p/q", "k*-p/q", "p/q", "p/2^q" or a plain decimal
Angle parse_theta(const std::string& text, unsigned precision_bits) {
    auto star = text.find('*');
    if (star != std::string::npos) {
        long ell = std::stol(text.substr(0, star));
        Rat off(0);
        if (star + 1 < text.size()) {
            std::string rest = text.substr(star + 1);
            if (rest[0] != '+' && rest[0] != '-') throw domain_error("theta: expected +- offset");
            Rat mag = rat_from_string(rest.substr(1));
            off = rest[0] == '-' ? Rat(-mag) : mag;
        }
        return Angle::orbit(ell, precision_bits).plus(off, precision_bits);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        unsigned long places = text.size() - dot - 1;
        mpz_class den(10);
        mpz_pow_ui(den.get_mpz_t(), den.get_mpz_t(), places);
        Rat q = Rat(mpz_class(digits, 10)) / Rat(den);
        q.canonicalize();
        return Angle::reduce(Scalar(q));
    }
    return Angle::reduce(Scalar(rat_from_string(text)));
}

void print_scalar(const char* label, const Scalar& s) {
    std::printf("%s = [%s, %s]  (~%.17g, width ~%.3g)\n", label, s.lo().get_str().c_str(),
                s.hi().get_str().c_str(), rat_to_double(s.mid()), rat_to_double(s.width()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified realization of a skew-product counterexample family"};
    app.require_subcommand(1);

    // ---- build ----
    auto* build = app.add_subcommand("build", "construct levels and save the state");
    int depth = 6, horizon = -1;
    unsigned prec = kDefaultPrecision;
    std::string out_path = "state.json";
    build->add_option("--depth", depth, "construction depth J");
    build->add_option("--orbit-horizon", horizon, "orbit horizon L (default 4J)");
    build->add_option("--precision-bits", prec, "working precision");
    build->add_option("--out", out_path, "state file");

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate gamma or a fiber map");
    std::string eval_what = "gamma", state_path = "state.json", theta_text = "0*+1/64";
    int eval_level = -2, eval_m = 0;
    std::string x_text = "0", eps_text = "1/2^10";
    eval->add_option("what", eval_what, "gamma | map")->required();
    eval->add_option("--state", state_path, "state file");
    eval->add_option("--level", eval_level, "curve level (gamma; default: deepest)");
    eval->add_option("-m,--m", eval_m, "map index");
    eval->add_option("--theta", theta_text, "angle: k*, k*+p/q, p/q or decimal");
    eval->add_option("--x", x_text, "fiber coordinate in [-2,2]");
    eval->add_option("--eps", eps_text, "limit tail budget");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite = "all", report_path;
    long samples = 10000;
    unsigned long long seed = 1;
    std::string verify_state = "state.json";
    verify->add_option("--state", verify_state, "state file");
    verify->add_option("--suite", suite, "all | construction | curve | dynamics | metrics");
    verify->add_option("--samples", samples, "sample budget");
    verify->add_option("--seed", seed, "sampling seed");
    verify->add_option("--report", report_path, "write the report to this file");

    // ---- plot ----
    auto* plot = app.add_subcommand("plot", "export data as csv or svg");
    std::string what = "gamma", format = "csv", plot_out = "plot.csv", plot_state = "state.json";
    int plot_level = -2, plot_m = 0, grid = 2048;
    std::string plot_theta = "0*+1/64";
    plot->add_option("--state", plot_state, "state file");
    plot->add_option("--what", what, "gamma | boxes | map | orbit");
    plot->add_option("--level", plot_level, "level (gamma/boxes; default: deepest)");
    plot->add_option("-m,--m", plot_m, "map index (map)");
    plot->add_option("--theta", plot_theta, "angle (map)");
    plot->add_option("--grid", grid, "grid size");
    plot->add_option("--format", format, "csv | svg");
    plot->add_option("--out", plot_out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (build->parsed()) {
            BuildConfig cfg;
            cfg.depth = depth;
            cfg.orbit_horizon = horizon;
            cfg.precision_bits = prec;
            try {
                ConstructionState st = build_state(cfg);
                save_state(st, out_path);
                std::printf("built depth %d (orbit horizon %d, %u bits) -> %s\n", st.depth(),
                            st.orbit_horizon, st.precision_bits, out_path.c_str());
                for (int j = 0; j <= st.depth(); ++j) {
                    const LevelSpec& l = st.level(j);
                    std::printf("  level %d: n=%d alpha=%s delta=%s\n", j, l.n,
                                l.alpha.get_str().c_str(), l.delta.get_str().c_str());
                }
            } catch (const construction_error& e) {
                std::fprintf(stderr, "construction failure: %s\n", e.what());
                return 2;
            }
            return 0;
        }

        if (eval->parsed()) {
            ConstructionState st = load_state(state_path);
            Angle theta = parse_theta(theta_text, st.precision_bits);
            Rat eps = rat_from_string(eps_text);
            if (eval_what == "gamma") {
                int level = eval_level == -2 ? st.depth() : eval_level;
                CurveValue v = gamma_eval(st, level, theta);
                print_scalar("gamma", v.value);
                std::printf("status: %s\n", v.status == CurveValue::Status::certified
                                                ? "certified"
                                                : v.status == CurveValue::Status::excluded
                                                      ? "excluded"
                                                      : "horizon_limited");
            } else if (eval_what == "map") {
                Dynamics dyn(st);
                Scalar x(rat_from_string(x_text));
                MapValue v = dyn.fm(eval_m, theta, x, eps);
                print_scalar("f_m", v.value);
                if (v.value.is_point()) std::printf("%s\n", v.value.lo().get_str().c_str());
                std::printf("status: %s\n", v.status == MapValue::Status::certified
                                                ? "certified"
                                                : "horizon_limited");
            } else {
                std::fprintf(stderr, "eval: unknown target %s\n", eval_what.c_str());
                return 3;
            }
            return 0;
        }

        if (verify->parsed()) {
            ConstructionState st = load_state(verify_state);
            VerificationReport rep = verify_suite(st, suite, samples, seed);
            for (const auto& r : rep.records) {
                std::printf("%-36s %-16s samples=%-6ld margin=%.3g %s\n", r.id.c_str(),
                            r.status.c_str(), r.samples, rat_to_double(r.margin),
                            r.witness.c_str());
            }
            if (!report_path.empty()) save_report(rep, report_path);
            std::printf("overall: %s\n", rep.overall_pass() ? "pass" : "fail");
            return rep.overall_pass() ? 0 : 1;
        }

        if (plot->parsed()) {
            ConstructionState st = load_state(plot_state);
            int level = plot_level == -2 ? st.depth() : plot_level;
            if (what == "gamma") {
                export_curve(st, level, grid, format, plot_out);
            } else if (what == "boxes") {
                export_boxes(st, level, format, plot_out);
            } else if (what == "map") {
                Dynamics dyn(st);
                export_map(dyn, plot_m, parse_theta(plot_theta, st.precision_bits), pow2(-10),
                           format, plot_out);
            } else if (what == "orbit") {
                export_orbit(st, std::min(grid, st.orbit_horizon), format, plot_out);
            } else {
                std::fprintf(stderr, "plot: unknown target %s\n", what.c_str());
                return 3;
            }
            return 0;
        }
    } catch (const construction_error& e) {
        std::fprintf(stderr, "construction failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 3;
}
