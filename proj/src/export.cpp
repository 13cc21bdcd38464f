#include "pcurve/export.hpp"

#include <fstream>
#include <vector>

namespace pcurve {

namespace {

constexpr const char* kCsvHeader = "theta_lo,theta_hi,value_lo,value_hi,tag\n";

// endpoints are rounded outward onto the dyadic grid, so the decimal strings
// are exact, enclosure-sound, and round-trip exactly for dyadic inputs
std::string dec_down(const Rat& q) {
    if (is_dyadic(q)) return dyadic_to_decimal(q);
    Rat scaled = q * pow2(60);
    return dyadic_to_decimal(Rat(rat_floor(scaled) / pow2(60)));
}

std::string dec_up(const Rat& q) {
    if (is_dyadic(q)) return dyadic_to_decimal(q);
    Rat scaled = q * pow2(60);
    Rat f = rat_floor(scaled) + 1;
    return dyadic_to_decimal(Rat(f / pow2(60)));
}

void csv_row(std::ofstream& out, const Scalar& a, const Scalar& b, const std::string& tag) {
    out << dec_down(a.lo()) << "," << dec_up(a.hi()) << "," << dec_down(b.lo()) << ","
        << dec_up(b.hi()) << "," << tag << "\n";
}

struct Polyline {
    std::vector<std::pair<double, double>> pts;
    std::string cls;
};

void write_svg(const std::string& path, const std::vector<Polyline>& lines, double ymin,
               double ymax) {
    std::ofstream out(path);
    if (!out) throw domain_error("write_svg: cannot open " + path);
    const double W = 960, H = 480, pad = 8;
    auto X = [&](double t) { return pad + t * (W - 2 * pad); };
    auto Y = [&](double v) { return pad + (ymax - v) / (ymax - ymin) * (H - 2 * pad); };
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<style>.curve{fill:none;stroke:#0b3d91;stroke-width:1}"
           ".box{fill:#d9822b33;stroke:#d9822b;stroke-width:0.8}"
           ".wing{fill:none;stroke:#7a1f1f;stroke-width:2.5}"
           ".fiber{fill:none;stroke:#0b3d91;stroke-width:2}"
           ".map{fill:none;stroke:#11640d;stroke-width:1.2}</style>\n";
    for (const auto& pl : lines) {
        if (pl.pts.size() < 2) continue;
        bool closed = pl.cls == "box";
        out << (closed ? "<polygon" : "<polyline") << " class=\"" << pl.cls << "\" points=\"";
        for (const auto& [t, v] : pl.pts) out << X(t) << "," << Y(v) << " ";
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

double mid(const Scalar& s) { return rat_to_double(s.mid()); }

}  // namespace

void export_curve(const ConstructionState& state, int level, int grid, const std::string& format,
                  const std::string& path) {
    auto samples = pseudo_curve_sample(state, level, grid);
    if (format == "csv") {
        std::ofstream out(path);
        if (!out) throw domain_error("export_curve: cannot open " + path);
        out << kCsvHeader;
        for (const auto& s : samples) {
            csv_row(out, s.theta.rep().compressed(60), s.value.compressed(60),
                    s.is_fiber ? "fiber:" + std::to_string(s.fiber_index)
                               : "curve:" + std::to_string(level));
        }
        return;
    }
    std::vector<Polyline> lines;
    Polyline curve;
    curve.cls = "curve";
    for (const auto& s : samples)
        if (!s.is_fiber) curve.pts.push_back({mid(s.theta.rep()), mid(s.value)});
    lines.push_back(curve);
    for (const auto& s : samples) {
        if (!s.is_fiber) continue;
        Polyline fib;
        fib.cls = "fiber";
        fib.pts.push_back({mid(s.theta.rep()), rat_to_double(s.value.lo())});
        fib.pts.push_back({mid(s.theta.rep()), rat_to_double(s.value.hi())});
        lines.push_back(fib);
    }
    write_svg(path, lines, -1.05, 1.05);
}

void export_boxes(const ConstructionState& state, int depth, const std::string& format,
                  const std::string& path) {
    if (depth > state.depth()) throw domain_error("export_boxes: depth beyond construction");
    const int segments = 24;
    std::ofstream csv;
    std::vector<Polyline> lines;
    bool is_csv = format == "csv";
    if (is_csv) {
        csv.open(path);
        if (!csv) throw domain_error("export_boxes: cannot open " + path);
        csv << kCsvHeader;
    }
    for (long ell = -depth; ell <= depth; ++ell) {
        const GenericBoxParams p = state.box(ell);
        std::string tag = "box:" + std::to_string(ell);
        Polyline outline;
        outline.cls = "box";
        // upper wall left-to-right, then lower wall right-to-left
        std::vector<std::pair<Scalar, Scalar>> upper, lower;
        for (int k = 0; k <= segments; ++k) {
            Rat z = -p.alpha + Rat(2 * k) * p.alpha / segments;
            Angle theta = state.star(ell).plus(z, state.precision_bits);
            FiberInterval f = box_boundary(p, theta, state.precision_bits);
            upper.push_back({theta.rep(), f.hi});
            lower.push_back({theta.rep(), f.lo});
        }
        for (const auto& [t, v] : upper) {
            if (is_csv) csv_row(csv, t.compressed(60), v.compressed(60), tag);
            outline.pts.push_back({mid(t), mid(v)});
        }
        for (auto it = lower.rbegin(); it != lower.rend(); ++it) {
            if (is_csv) csv_row(csv, it->first.compressed(60), it->second.compressed(60), tag);
            outline.pts.push_back({mid(it->first), mid(it->second)});
        }
        lines.push_back(outline);
        if (ell < 0) {  // wings as thick segments
            std::string wtag = "wing:" + std::to_string(ell);
            const Rat rad = state.wbasint_radius(ell);
            for (int side = -1; side <= 1; side += 2) {
                Polyline wing;
                wing.cls = "wing";
                for (int k = 0; k <= segments / 2; ++k) {
                    Rat z0 = p.alpha + Rat(k) * (rad - p.alpha) / (segments / 2);
                    Rat z = side < 0 ? Rat(-z0) : z0;
                    Angle theta = state.star(ell).plus(z, state.precision_bits);
                    CurveValue v = gamma_eval(state, static_cast<int>(-ell), theta);
                    if (is_csv)
                        csv_row(csv, theta.rep().compressed(60), v.value.compressed(60), wtag);
                    wing.pts.push_back({mid(theta.rep()), mid(v.value)});
                }
                lines.push_back(wing);
            }
        }
    }
    if (!is_csv) write_svg(path, lines, -1.05, 1.05);
}

void export_map(const Dynamics& dyn, int m, const Angle& theta, const Rat& eps,
                const std::string& format, const std::string& path) {
    FiberMapSpec spec = dyn.fiber_map(m, theta, eps);
    if (format == "csv") {
        std::ofstream out(path);
        if (!out) throw domain_error("export_map: cannot open " + path);
        out << kCsvHeader;
        for (const auto& k : spec.knots)
            csv_row(out, k.x.compressed(60), k.y.compressed(60), "map:" + std::to_string(m));
        return;
    }
    Polyline pl;
    pl.cls = "map";
    for (const auto& k : spec.knots)
        pl.pts.push_back({(mid(k.x) + 2) / 4, mid(k.y)});
    write_svg(path, {pl}, -2.1, 2.1);
}

void export_orbit(const ConstructionState& state, int count, const std::string& format,
                  const std::string& path) {
    if (format == "csv") {
        std::ofstream out(path);
        if (!out) throw domain_error("export_orbit: cannot open " + path);
        out << kCsvHeader;
        for (long i = -count; i <= count; ++i) {
            Angle a = state.star(i);
            csv_row(out, a.rep().compressed(60), Scalar(Rat(i)), "orbit:" + std::to_string(i));
        }
        return;
    }
    std::vector<Polyline> lines;
    for (long i = -count; i <= count; ++i) {
        Polyline tick;
        tick.cls = "fiber";
        double t = mid(state.star(i).rep());
        tick.pts.push_back({t, -0.05});
        tick.pts.push_back({t, 0.05});
        lines.push_back(tick);
    }
    write_svg(path, lines, -1.0, 1.0);
}

}  // namespace pcurve
