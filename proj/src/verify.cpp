#include "pcurve/verify.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "pcurve/dynamics.hpp"
#include "pcurve/metrics.hpp"

namespace pcurve {

namespace {

struct Sampler {
    unsigned long long s;
    explicit Sampler(unsigned long long seed) : s(seed * 2862933555777941757ULL + 3037000493ULL) {}
    unsigned long long next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return s >> 16;
    }
    Rat unit() {  // dyadic in [0,1)
        Rat q = Rat(static_cast<unsigned long>(next() & ((1ULL << 40) - 1))) / Rat(1L << 20) /
                Rat(1L << 20);
        q.canonicalize();
        return q;
    }
    Rat in_range(const Rat& lo, const Rat& hi) {
        Rat v = lo + (hi - lo) * unit();
        v.canonicalize();
        return v;
    }
};

struct SuiteRun {
    const ConstructionState& state;
    long budget;
    unsigned long long seed;
    VerificationReport* report;

    void record(const std::string& id, long samples, const Rat& margin, bool pass,
                const std::string& witness = "") {
        report->records.push_back({id, samples, margin, pass ? "pass" : "fail", witness});
    }
    void record_absent(const std::string& id, const std::string& why) {
        report->records.push_back({id, 0, Rat(0), "skipped-absent", why});
    }
};

Rat overlap_gap(const Scalar& a, const Scalar& b) {
    // 0 when the enclosures overlap, else the separation
    Rat gap = std::max(a.lo() - b.hi(), b.lo() - a.hi());
    return std::max(gap, Rat(0));
}

// --------------------------------------------------------- construction ----

void suite_construction(SuiteRun& run) {
    const ConstructionState& st = run.state;
    const int J = st.depth();
    for (int j = 0; j <= J; ++j) {
        ConditionReport rep = check_conditions(st, j);
        const ConditionClause* fail = rep.first_failure();
        run.record("construction.conditions[" + std::to_string(j) + "]",
                   static_cast<long>(rep.clauses.size()), rep.min_margin(), rep.all_true(),
                   fail ? fail->id : "");
    }

    {  // curve stays within the unit band
        Sampler gen(run.seed + 11);
        Rat worst(1);
        long n = std::max<long>(run.budget / 4, 64);
        for (long k = 0; k < n; ++k) {
            Angle theta = Angle::reduce(Scalar(gen.unit()));
            CurveValue v = gamma_eval(st, J, theta);
            worst = std::min(worst, Rat(1 - v.value.abs().hi()));
        }
        run.record("curve.bound", n, worst, worst > 0);
    }

    {  // stored anchors re-derive from the previous curve
        Rat tol = pow2(-40);
        Rat worst = tol;
        long samples = 0;
        for (int j = 1; j <= J; ++j) {
            for (long ell : {static_cast<long>(j), static_cast<long>(-j)}) {
                const AnchorTriple& t = st.anchors(ell);
                const Rat alpha = st.level(j).alpha;
                CurveValue a = gamma_eval(st, j - 1, st.star(ell));
                CurveValue p = gamma_eval(st, j - 1, st.star(ell).plus(alpha, st.precision_bits));
                CurveValue m = gamma_eval(st, j - 1, st.star(ell).plus(-alpha, st.precision_bits));
                Rat dev = std::max(overlap_gap(t.a, a.value),
                                   std::max(overlap_gap(t.a_plus, p.value),
                                            overlap_gap(t.a_minus, m.value)));
                worst = std::min(worst, Rat(tol - dev));
                samples += 3;
            }
        }
        run.record("curve.corner-identities", samples, worst, worst > 0);
    }

    {  // boundary points keep their value at all later levels, also rotated
        Rat tol = pow2(-40);
        Rat worst = tol;
        long samples = 0;
        for (int j = 1; j <= J; ++j) {
            for (long ell : {static_cast<long>(j), static_cast<long>(-j)}) {
                const Rat rad = st.wbasint_radius(ell);
                const Rat ain = st.level(j).alpha;
                for (const Rat& off : {rad, Rat(-rad), ain, Rat(-ain)}) {
                    Angle theta = st.star(ell).plus(off, st.precision_bits);
                    CurveValue ref = gamma_eval(st, j - 1, theta);
                    Angle rot = theta.rotated(1, st.precision_bits);
                    CurveValue ref_rot = gamma_eval(st, j - 1, rot);
                    for (int n = j; n <= J; ++n) {
                        Rat dev = overlap_gap(gamma_eval(st, n, theta).value, ref.value);
                        Rat dev_rot = overlap_gap(gamma_eval(st, n, rot).value, ref_rot.value);
                        worst = std::min(worst, Rat(tol - std::max(dev, dev_rot)));
                        samples += 2;
                    }
                }
            }
        }
        run.record("curve.boundary-stability", samples, worst, worst > 0);
    }

    {  // winged diameters: vertical scale exact, caps by the index
        Rat worst(1);
        long samples = 0;
        bool ok = true;
        for (long ell = -J; ell <= J; ++ell) {
            const int n = st.level(static_cast<int>(std::abs(ell))).n;
            // fiber at the center has length exactly 2*2^-n
            FiberInterval f = winged_bounds(st, ell, st.star(ell));
            Scalar len = f.hi - f.lo;
            Rat dev = overlap_gap(len, Scalar(Rat(2) * pow2(-n)));
            ok = ok && dev == 0 && len.width() <= pow2(-50);
            if (ell >= 0) {
                ok = ok && Rat(2) * pow2(-n) <= pow2(-static_cast<long>(ell));
            } else {
                const int n_wing = st.level(static_cast<int>(-ell) - 1).n;
                ok = ok && Rat(2) * pow2(-n_wing) <= Rat(2) * pow2(ell);  // 2*2^-|ell|
                // wing height: curve over the wings stays near the anchor
                Rat rad = st.wbasint_radius(ell);
                Rat alpha = st.level(static_cast<int>(-ell)).alpha;
                Scalar wing_rng =
                    Scalar::hull(gamma_range(st, static_cast<int>(-ell), {ell, alpha, rad}),
                                 gamma_range(st, static_cast<int>(-ell), {ell, -rad, -alpha}));
                Scalar dev_rng = (wing_rng - st.anchors(ell).a).abs();
                worst = std::min(worst, Rat(pow2(-n_wing) - dev_rng.hi()));
            }
            samples += 2;
        }
        run.record("curve.winged-diameter", samples, ok ? worst : Rat(-1), ok && worst > 0);
    }

    {  // intersecting footprints nest strictly
        try {
            DepthTable table = build_depth_table(st);
            Rat worst(1);
            long pairs = 0;
            for (const auto& [ell, d] : table.dep) {
                if (d == 0) continue;
                for (const auto& [host, hd] : table.dep) {
                    if (host == ell || std::abs(host) >= std::abs(ell)) continue;
                    if (st.wbasint(host).contains_arc(st.wbasint(ell)) != Cert::yes) continue;
                    Cert strict = st.wbasint(host).contains_arc_strict(st.wbasint(ell));
                    Rat d_center = st.wbasint(ell).distance_lower(st.star(host));
                    if (strict != Cert::yes || d_center <= 0) {
                        run.record("curve.nesting-dichotomy", pairs, Rat(-1), false,
                                   "footprint " + std::to_string(ell) + " in " +
                                       std::to_string(host));
                        return;
                    }
                    worst = std::min(worst, d_center);
                    ++pairs;
                }
            }
            run.record("curve.nesting-dichotomy", pairs, worst, true);
        } catch (const precision_error& e) {
            run.record("curve.nesting-dichotomy", 0, Rat(-1), false, e.what());
        }
    }
}

// ----------------------------------------------------------------- curve ----

void suite_curve(SuiteRun& run) {
    const ConstructionState& st = run.state;
    const int J = st.depth();

    {  // adjacent-level distance within the box-diameter bound
        Rat worst(1);
        long samples = 0;
        Sampler gen(run.seed + 23);
        for (int j = 1; j <= J; ++j) {
            Rat bound = pow2(-j) + pow2(-40);
            Rat sup(0);
            const Rat alpha = st.level(j).alpha;
            long per = std::max<long>(run.budget / (4 * J), 32);
            for (long ell : {static_cast<long>(j), static_cast<long>(-j)}) {
                for (long k = 0; k < per; ++k) {
                    Rat z = gen.in_range(-alpha, alpha);
                    if (z == 0) continue;
                    Angle theta = st.star(ell).plus(z, st.precision_bits);
                    Scalar d = (gamma_eval(st, j, theta).value -
                                gamma_eval(st, j - 1, theta).value)
                                   .abs();
                    sup = std::max(sup, d.hi());
                    ++samples;
                }
            }
            worst = std::min(worst, Rat(bound - sup));
        }
        run.record("curve.cauchy-bound", samples, worst, worst > 0);
    }

    {  // the curve passes through every fiber of its own winged box
        Rat worst = pow2(-40);
        long samples = 0;
        Sampler gen(run.seed + 29);
        for (int j = 1; j <= J; ++j) {
            for (long ell : {static_cast<long>(j), static_cast<long>(-j)}) {
                const Rat rad = st.wbasint_radius(ell);
                long per = std::max<long>(run.budget / (8 * J), 16);
                for (long k = 0; k < per; ++k) {
                    Rat z = gen.in_range(-rad, rad);
                    if (z == 0) continue;
                    Angle theta = st.star(ell).plus(z, st.precision_bits);
                    FiberInterval fib = winged_bounds(st, ell, theta);
                    Scalar g = gamma_eval(st, j, theta).value;
                    Rat below = std::max(Rat(fib.lo.lo() - g.hi()), Rat(0));
                    Rat above = std::max(Rat(g.lo() - fib.hi.hi()), Rat(0));
                    worst = std::min(worst, Rat(pow2(-40) - std::max(below, above)));
                    ++samples;
                }
            }
        }
        run.record("curve.fiber-membership", samples, worst, worst > 0);
    }

    {  // gamma_j = gamma_{j-1} away from the level-j boxes
        Rat worst = pow2(-40);
        long samples = 0;
        Sampler gen(run.seed + 31);
        long n = std::max<long>(run.budget / 4, 64);
        for (long k = 0; k < n; ++k) {
            Angle theta = Angle::reduce(Scalar(gen.unit()));
            for (int j = 1; j <= J; ++j) {
                Scalar z1 = box_local(st.box(j), theta).abs();
                Scalar z2 = box_local(st.box(-j), theta).abs();
                if (z1.lo() <= st.level(j).alpha || z2.lo() <= st.level(j).alpha) continue;
                Rat dev = overlap_gap(gamma_eval(st, j, theta).value,
                                      gamma_eval(st, j - 1, theta).value);
                worst = std::min(worst, Rat(pow2(-40) - dev));
                ++samples;
            }
        }
        run.record("curve.level-agreement", samples, worst, worst > 0);
    }

    {  // center fibers are non-degenerate with the exact diameter
        Rat worst(1);
        long samples = 0;
        for (long ell = -J; ell <= J; ++ell) {
            FiberInterval f = winged_bounds(st, ell, st.star(ell));
            Scalar len = f.hi - f.lo;
            Rat target = Rat(2) * pow2(-st.level(static_cast<int>(std::abs(ell))).n);
            Rat dev = overlap_gap(len, Scalar(target));
            worst = std::min(worst, Rat(pow2(-50) - dev));
            worst = std::min(worst, Rat(pow2(-50) - len.width()));
            ++samples;
        }
        run.record("curve.fiber-nondegenerate", samples, worst, worst > 0);
    }

    {  // oscillation probe at the sine extrema
        Rat worst(1);
        long samples = 0;
        for (long ell = -std::min(J, 4); ell <= std::min(J, 4); ++ell) {
            const int aj = static_cast<int>(std::abs(ell));
            const Rat delta = st.level(aj).delta;
            const int n = st.level(aj).n;
            // smallest k with 2/(2k+1) <= delta
            long k0 = std::max<long>(1, rat_floor_long(Rat(1) / delta) + 1);
            Rat lo(2), hi(-2);
            for (long k = k0; k < k0 + 8; ++k) {
                Rat z = rat(2, 2 * k + 1);
                for (const Rat& off : {z, Rat(-z)}) {
                    Angle theta = st.star(ell).plus(off, st.precision_bits);
                    Scalar v = gamma_eval(st, aj, theta).value;
                    lo = std::min(lo, v.hi());
                    hi = std::max(hi, v.lo());
                    ++samples;
                }
            }
            Rat osc = hi - lo;  // certified lower bound of the oscillation
            worst = std::min(worst, Rat(osc - Rat(3) * pow2(-n - 1)));
        }
        run.record("curve.oscillation-probe", samples, worst, worst > 0);
    }

    {  // limit enclosures: far samples collapse to the base circle
        Sampler gen(run.seed + 37);
        Rat worst(1);
        long samples = 0;
        bool ok = true;
        long n = std::max<long>(run.budget / 8, 32);
        for (long k = 0; k < n; ++k) {
            Angle theta = Angle::reduce(Scalar(gen.unit()));
            CurveValue lim = gamma_limit(st, theta, pow2(-J));
            ok = ok && lim.value.abs().hi() <= Rat(1) + pow2(-J + 1);
            if (gamma_eval(st, J, theta).value.is_point() &&
                gamma_eval(st, J, theta).value.lo() == 0) {
                ok = ok && lim.value.contains(Rat(0)) && lim.value.abs().hi() <= pow2(-J + 1);
            }
            ++samples;
        }
        run.record("curve.limit-tail", samples, ok ? worst : Rat(-1), ok);
    }
}

// -------------------------------------------------------------- dynamics ----

struct ThetaPool {
    std::vector<Angle> uniform;     // plain grid points
    std::vector<Angle> per_stratum; // inside stratum footprints (all strata)
};

ThetaPool make_pool(const ConstructionState& st, const DepthTable& table, long budget,
                    unsigned long long seed) {
    ThetaPool pool;
    Sampler gen(seed + 41);
    long n = std::max<long>(budget / 4, 64);
    for (long k = 0; k < n; ++k) pool.uniform.push_back(Angle::reduce(Scalar(gen.unit())));
    long footprints = 0;
    for (const auto& stratum : table.strata) footprints += static_cast<long>(stratum.size());
    for (int m = 0; m <= table.max_depth(); ++m) {
        for (long i : table.strata[static_cast<size_t>(m)]) {
            const Rat rad = st.wbasint_radius(i);
            long per = std::max<long>(budget / (4 * std::max<long>(footprints, 1)), 12);
            for (long k = 0; k < per; ++k) {
                Rat z = gen.in_range(-rad, rad);
                if (z == 0) continue;
                pool.per_stratum.push_back(st.star(i).plus(z, st.precision_bits));
            }
        }
    }
    return pool;
}

void suite_dynamics(SuiteRun& run) {
    const ConstructionState& st = run.state;
    Dynamics dyn(st);
    const DepthTable& table = dyn.table();
    const Rat eps0 = pow2(-10);
    ThetaPool pool = make_pool(st, table, run.budget, run.seed);
    std::vector<Angle> all_theta = pool.uniform;
    all_theta.insert(all_theta.end(), pool.per_stratum.begin(), pool.per_stratum.end());
    const int mmax = std::min(4, std::max(0, table.max_depth()));

    {  // endpoint pinning and monotone knots
        bool pinned = true;
        Rat worst(1);
        long samples = 0;
        for (const Angle& theta : all_theta) {
            for (int m = 0; m <= mmax; ++m) {
                FiberMapSpec spec;
                try {
                    spec = dyn.fiber_map(m, theta, eps0);
                } catch (const precision_error&) {
                    continue;  // unresolvable sample
                }
                const Knot& first = spec.knots.front();
                const Knot& last = spec.knots.back();
                pinned = pinned && first.x.is_point() && first.x.lo() == -2 &&
                         first.y.is_point() && first.y.lo() == 2 && last.x.is_point() &&
                         last.x.lo() == 2 && last.y.is_point() && last.y.lo() == -2;
                for (size_t k = 0; k + 1 < spec.knots.size(); ++k) {
                    worst = std::min(worst,
                                     Rat(spec.knots[k].y.hi() - spec.knots[k + 1].y.lo()));
                }
                ++samples;
            }
        }
        run.record("dynamics.endpoint-pinning", samples, pinned ? Rat(1) : Rat(-1), pinned);
        run.record("dynamics.monotone", samples, worst, worst >= 0);
    }

    {  // core values stay in the inner band
        Rat worst(1);
        long samples = 0;
        for (const Angle& theta : pool.per_stratum) {
            for (int m = 0; m <= mmax; ++m) {
                WingLocation loc;
                try {
                    loc = locate(st, table, m, theta);
                } catch (const precision_error&) {
                    continue;
                }
                if (loc.kind == WingLocation::Kind::outside) continue;
                try {
                    FiberInterval fib = winged_bounds(st, loc.b, theta);
                    MapValue lo_v = dyn.fm(m, theta, fib.lo, eps0);
                    MapValue hi_v = dyn.fm(m, theta, fib.hi, eps0);
                    Rat band = Rat(1) + pow2(-40);
                    worst = std::min(worst, Rat(band - lo_v.value.abs().hi()));
                    worst = std::min(worst, Rat(band - hi_v.value.abs().hi()));
                    ++samples;
                } catch (const precision_error&) {
                    continue;
                }
            }
        }
        run.record("dynamics.core-range", samples, worst, worst > 0);
    }

    {  // the box maps conjugate the curve levels
        Rat tol = pow2(-40);
        Rat worst = tol;
        long samples = 0;
        Sampler gen(run.seed + 43);
        const int J = st.depth();
        for (long i = -(J - 1); i <= J - 1; ++i) {
            const Rat rad = st.wbasint_radius(i);
            long per = std::max<long>(run.budget / (8 * (2 * J - 1)), 24);
            for (long k = 0; k < per; ++k) {
                Rat z = gen.in_range(-rad, rad);
                if (z == 0) continue;
                Angle theta = st.star(i).plus(z, st.precision_bits);
                Scalar gi = gamma_eval(st, static_cast<int>(std::abs(i)), theta).value;
                Scalar img;
                try {
                    img = dyn.g_apply(i, theta, gi);
                } catch (const precision_error&) {
                    continue;
                }
                Angle rot = theta.rotated(1, st.precision_bits);
                Scalar target = gamma_eval(st, static_cast<int>(std::abs(i + 1)), rot).value;
                Rat dev = overlap_gap(img, target);
                Rat width = std::max(img.width(), target.width());
                worst = std::min(worst, Rat(tol - std::max(dev, width)));
                ++samples;
            }
        }
        run.record("dynamics.conjugation-identity", samples, worst, worst > 0);
    }

    {  // fiber endpoints transport onto / into the next fiber
        Rat tol = pow2(-40);
        Rat worst = tol;
        long samples = 0;
        Sampler gen(run.seed + 47);
        const int J = st.depth();
        for (long i = -(J - 1); i <= J - 1; ++i) {
            const Rat d = i >= 0 ? st.level(static_cast<int>(i) + 1).delta
                                 : st.level(static_cast<int>(-i)).delta;
            for (long k = 0; k < 12; ++k) {
                Rat z = gen.in_range(-d, d);
                if (z == 0) continue;
                Angle theta = st.star(i).plus(z, st.precision_bits);
                FiberInterval fib = winged_bounds(st, i, theta);
                Angle rot = theta.rotated(1, st.precision_bits);
                FiberInterval next = box_boundary(st.box(i + 1), rot, st.precision_bits);
                Scalar img_lo = dyn.g_apply(i, theta, fib.lo);
                Scalar img_hi = dyn.g_apply(i, theta, fib.hi);
                Rat dev = std::max(overlap_gap(img_lo, next.hi), overlap_gap(img_hi, next.lo));
                worst = std::min(worst, Rat(tol - dev));
                ++samples;
            }
        }
        run.record("dynamics.fiber-transport", samples, worst, worst > 0);
    }

    {  // distance of consecutive maps against the shallow-box bound
        for (int m = 1; m <= std::max(1, mmax); ++m) {
            std::string id = "dynamics.map-cauchy-" + std::string(m == 1 ? "m1" : "bound[" +
                                                                  std::to_string(m) + "]");
            if (m - 1 > table.max_depth() || table.strata[static_cast<size_t>(m - 1)].empty()) {
                run.record_absent(id, "stratum " + std::to_string(m - 1) + " empty");
                continue;
            }
            Rat worst(1);
            long samples = 0;
            Sampler gen(run.seed + 53 + m);
            for (long i : table.strata[static_cast<size_t>(m - 1)]) {
                const Rat rad = st.wbasint_radius(i);
                long per = std::max<long>(run.budget / 16, 24);
                for (long k = 0; k < per; ++k) {
                    Rat z = gen.in_range(-rad, rad);
                    if (z == 0) continue;
                    Angle theta = st.star(i).plus(z, st.precision_bits);
                    Rat bound = Rat(2) * pow2(-static_cast<long>(std::abs(i))) + pow2(-40);
                    try {
                        FiberMapSpec fa = dyn.fiber_map(m, theta, eps0);
                        FiberMapSpec fb = dyn.fiber_map(m - 1, theta, eps0);
                        Rat sup(0);
                        auto feed = [&](const Scalar& x) {
                            Scalar d = (dyn.fm(m, theta, x, eps0).value -
                                        dyn.fm(m - 1, theta, x, eps0).value)
                                           .abs();
                            sup = std::max(sup, d.hi());
                        };
                        for (const Knot& kn : fa.knots) feed(kn.x);
                        for (const Knot& kn : fb.knots) feed(kn.x);
                        worst = std::min(worst, Rat(bound - sup));
                        ++samples;
                    } catch (const precision_error&) {
                        continue;
                    }
                }
            }
            run.record(id, samples, worst, worst > 0 && samples > 0);
        }
    }

    {  // the two defining routes agree on flat wing points
        Rat tol = pow2(-40);
        Rat worst = tol;
        long samples = 0;
        Sampler gen(run.seed + 61);
        for (int m = 0; m <= table.max_depth(); ++m) {
            for (long i : table.strata[static_cast<size_t>(m)]) {
                if (i >= 0) continue;
                const Rat a_in = st.level(static_cast<int>(-i)).alpha;
                const Rat rad = st.wbasint_radius(i);
                for (long k = 0; k < 24; ++k) {
                    Rat z = gen.in_range(a_in, rad);
                    if (gen.next() % 2) z = -z;
                    Angle theta = st.star(i).plus(z, st.precision_bits);
                    WingLocation loc;
                    try {
                        loc = locate(st, table, m, theta);
                    } catch (const precision_error&) {
                        continue;
                    }
                    if (loc.kind != WingLocation::Kind::in_wing_flat) continue;
                    // route A: wing constant with conjugated outer pieces is
                    // what fm computes; route B: the box-map form
                    Scalar gv = gamma_eval(st, static_cast<int>(-i), theta).value;
                    Scalar routeA = dyn.fm(m, theta, gv, eps0).value;
                    Scalar routeB;
                    try {
                        routeB = dyn.g_apply(i, theta, gv);
                    } catch (const precision_error&) {
                        continue;
                    }
                    Rat dev = overlap_gap(routeA, routeB);
                    worst = std::min(worst, Rat(tol - dev));
                    ++samples;
                }
            }
        }
        run.record("dynamics.branch-agreement", samples, worst, worst > 0 && samples > 0);
    }

    {  // on footprint boundaries the new level changes nothing
        Rat tol = pow2(-40);
        Rat worst = tol;
        long samples = 0;
        for (int m = 0; m <= table.max_depth(); ++m) {
            for (long i : table.strata[static_cast<size_t>(m)]) {
                const Rat rad = st.wbasint_radius(i);
                for (const Rat& off : {rad, Rat(-rad)}) {
                    Angle theta = st.star(i).plus(off, st.precision_bits);
                    int hi_m = std::min(mmax, table.max_depth());
                    for (int mm = std::max(1, m); mm <= hi_m; ++mm) {
                        try {
                            FiberMapSpec fa = dyn.fiber_map(mm, theta, eps0);
                            FiberMapSpec fb = dyn.fiber_map(mm - 1, theta, eps0);
                            Rat sup(0);
                            for (const Knot& kn : fa.knots) {
                                Scalar d = (dyn.fm(mm, theta, kn.x, eps0).value -
                                            dyn.fm(mm - 1, theta, kn.x, eps0).value)
                                               .abs();
                                sup = std::max(sup, d.hi());
                            }
                            worst = std::min(worst, Rat(tol - sup));
                            ++samples;
                        } catch (const precision_error&) {
                            continue;
                        }
                    }
                }
            }
        }
        run.record("dynamics.boundary-equality", samples, worst, worst > 0 && samples > 0);
    }

    {  // upper and lower circles swap exactly
        bool ok = true;
        long samples = 0;
        for (const Angle& theta : all_theta) {
            for (int m = 0; m <= mmax; ++m) {
                MapValue up = dyn.fm(m, theta, Scalar(Rat(2)), eps0);
                MapValue dn = dyn.fm(m, theta, Scalar(Rat(-2)), eps0);
                ok = ok && up.value.is_point() && up.value.lo() == -2 && dn.value.is_point() &&
                     dn.value.lo() == 2;
                ++samples;
            }
            if (!ok) break;
        }
        run.record("dynamics.boundary-permutation", samples, ok ? Rat(1) : Rat(-1), ok);
    }

    {  // center fibers are settled at their own stratum
        Rat tol = pow2(-40);
        Rat worst = tol;
        long samples = 0;
        for (int m = 0; m <= table.max_depth(); ++m) {
            for (long i : table.strata[static_cast<size_t>(m)]) {
                Angle theta = st.star(i);
                int hi_m = std::min(mmax, table.max_depth());
                for (int k = m + 1; k <= hi_m; ++k) {
                    FiberMapSpec fa = dyn.fiber_map(k, theta, eps0);
                    for (const Knot& kn : fa.knots) {
                        Scalar d = (dyn.fm(k, theta, kn.x, eps0).value -
                                    dyn.fm(m, theta, kn.x, eps0).value)
                                       .abs();
                        worst = std::min(worst, Rat(tol - d.hi()));
                    }
                    ++samples;
                }
            }
        }
        if (samples == 0)
            run.record_absent("dynamics.center-fiber-stability", "no deeper strata");
        else
            run.record("dynamics.center-fiber-stability", samples, worst, worst > 0);
    }

    {  // the limit map carries the limit curve to itself (within tails)
        Rat worst(1);
        long samples = 0;
        Sampler gen(run.seed + 67);
        long n = std::max<long>(run.budget / 8, 48);
        for (long k = 0; k < n; ++k) {
            Angle theta = Angle::reduce(Scalar(gen.unit()));
            CurveValue cx = gamma_limit(st, theta, eps0);
            MapValue img;
            try {
                img = dyn.f_limit(theta, cx.value, eps0);
            } catch (const precision_error&) {
                continue;
            }
            Angle rot = theta.rotated(1, st.precision_bits);
            CurveValue target = gamma_limit(st, rot, eps0);
            Rat lo = std::max(img.value.lo(), target.value.lo());
            Rat hi = std::min(img.value.hi(), target.value.hi());
            worst = std::min(worst, Rat(hi - lo));  // overlap amount
            ++samples;
        }
        run.record("dynamics.invariance-overlap", samples, worst, worst >= 0 && samples > 0);
    }

    {  // kappa basics on the negative boxes
        Rat worst(1);
        long samples = 0;
        bool ok = true;
        Sampler gen(run.seed + 71);
        const int J = st.depth();
        for (long i = -1; i >= -(J - 1); --i) {
            const Rat d = st.level(static_cast<int>(-i)).delta;
            const Rat a = st.level(static_cast<int>(-i)).alpha;
            // the matching condition at the delta edge
            for (const Rat& off : {d, Rat(-d)}) {
                Angle edge = st.star(i).plus(off, st.precision_bits);
                Scalar kt = dyn.kappa_tilde(i, edge);
                Scalar kp = dyn.kappa(i, edge);
                ok = ok && kt.contains(Rat(1)) && kt.width() <= pow2(-40);
                ok = ok && kp.hi() >= Rat(1) - pow2(-40);
                samples += 2;
            }
            // interior: 0 < kappa <= kappa_tilde <= 1, non-increasing outward
            Rat prev_lo(2);
            for (int k = 1; k <= 8; ++k) {
                Rat z = d + (a - d) * k / 10;
                Angle theta = st.star(i).plus(z, st.precision_bits);
                try {
                    Scalar kt = dyn.kappa_tilde(i, theta);
                    Scalar kp = dyn.kappa(i, theta);
                    ok = ok && kt.hi() <= 1 && kt.lo() > 0;
                    ok = ok && kp.lo() <= kt.hi();  // kappa <= kappa_tilde
                    ok = ok && kp.lo() <= prev_lo;  // non-increasing away from center
                    prev_lo = kp.hi();
                    ++samples;
                } catch (const precision_error&) {
                    continue;
                }
            }
        }
        run.record("dynamics.kappa", samples, ok ? worst : Rat(-1), ok);
    }
}

// ---------------------------------------------------------------- metrics ----

void suite_metrics(SuiteRun& run) {
    const ConstructionState& st = run.state;
    const int J = st.depth();
    long grid = std::max<long>(run.budget / 8, 128);

    {
        MetricEstimate same = dinf_sampled(st, J, J, static_cast<int>(grid));
        run.record("metrics.dinf-identical", same.sample_count,
                   Rat(pow2(-40) - same.low.hi()),
                   same.low.lo() == 0 && same.low.hi() <= pow2(-40));
    }
    {
        Rat worst(1);
        long samples = 0;
        for (int j = 1; j <= J; ++j) {
            MetricEstimate est = dinf_sampled(st, j - 1, j, static_cast<int>(grid));
            worst = std::min(worst, Rat(pow2(-j) - est.low.lo()));
            samples += est.sample_count;
        }
        run.record("metrics.dinf-adjacent", samples, worst, worst >= 0);
    }
    {
        MetricEstimate coarse = dinf_sampled(st, -1, 0, static_cast<int>(grid / 4));
        MetricEstimate fine = dinf_sampled(st, -1, 0, static_cast<int>(grid));
        bool ok = fine.low.lo() <= rat(1, 2) && coarse.low.lo() <= fine.low.lo() + pow2(-40);
        // the estimate must close in on half the oscillation amplitude
        ok = ok && fine.low.lo() >= rat(2, 5);
        run.record("metrics.dinf-base", fine.sample_count, Rat(rat(1, 2) - fine.low.lo()), ok);
    }
    {
        auto sampleA = pseudo_curve_sample(st, J, static_cast<int>(grid / 2));
        std::vector<CylPoint> A;
        for (const auto& s : sampleA)
            if (!s.is_fiber) A.push_back({s.theta, s.value});
        MetricEstimate self = hausdorff_sampled(A, A);
        run.record("metrics.hausdorff-selfzero", self.sample_count,
                   Rat(pow2(-40) - self.low.hi()),
                   self.low.lo() == 0 && self.low.hi() <= pow2(-40));

        std::vector<CylPoint> circle0, circleH;
        Rat h = rat(3, 4);
        for (int k = 0; k < 64; ++k) {
            Angle theta = Angle::reduce(Scalar(rat(k, 64)));
            circle0.push_back({theta, Scalar(Rat(0))});
            circleH.push_back({theta, Scalar(h)});
        }
        MetricEstimate circles = hausdorff_sampled(circle0, circleH);
        run.record("metrics.hausdorff-circles", circles.sample_count,
                   Rat(pow2(-40) - overlap_gap(circles.low, Scalar(h))),
                   circles.low.contains(h));
    }
    {
        // sampled Hausdorff between adjacent levels against the sampled sup
        auto pts = [&](int j) {
            std::vector<CylPoint> out;
            for (const auto& s : pseudo_curve_sample(st, j, static_cast<int>(grid / 2)))
                if (!s.is_fiber) out.push_back({s.theta, s.value});
            return out;
        };
        Rat worst(1);
        long samples = 0;
        for (int j = std::max(1, J - 1); j <= J; ++j) {
            MetricEstimate h = hausdorff_sampled(pts(j - 1), pts(j));
            MetricEstimate d = dinf_sampled(st, j - 1, j, static_cast<int>(grid));
            Rat slack = Rat(8) / Rat(grid) + pow2(-j - 2);
            worst = std::min(worst, Rat(d.low.hi() + slack - h.low.lo()));
            samples += h.sample_count;
        }
        run.record("metrics.hausdorff-vs-dinf", samples, worst, worst >= 0);
    }
}

}  // namespace

VerificationReport verify_suite(const ConstructionState& state, const std::string& suite,
                                long sample_budget, unsigned long long seed) {
    VerificationReport report;
    report.suite = suite;
    report.seed = seed;
    report.sample_budget = sample_budget;
    SuiteRun run{state, sample_budget, seed, &report};
    bool known = false;
    if (suite == "construction" || suite == "all") {
        suite_construction(run);
        known = true;
    }
    if (suite == "curve" || suite == "all") {
        suite_curve(run);
        known = true;
    }
    if (suite == "dynamics" || suite == "all") {
        if (state.depth() >= 2)
            suite_dynamics(run);
        else
            run.record_absent("dynamics", "state depth below 2");
        known = true;
    }
    if (suite == "metrics" || suite == "all") {
        suite_metrics(run);
        known = true;
    }
    if (!known) throw domain_error("verify_suite: unknown suite " + suite);
    return report;
}

void save_report(const VerificationReport& report, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["suite"] = report.suite;
    doc["seed"] = report.seed;
    doc["sample_budget"] = report.sample_budget;
    doc["overall"] = report.overall_pass() ? "pass" : "fail";
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto& r : report.records) {
        records.push_back({{"id", r.id},
                           {"samples", r.samples},
                           {"margin", r.margin.get_str()},
                           {"status", r.status},
                           {"witness", r.witness}});
    }
    doc["records"] = records;
    std::ofstream out(path);
    if (!out) throw domain_error("save_report: cannot open " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace pcurve
