#include "pcurve/dynamics.hpp"

#include <algorithm>
#include <deque>

namespace pcurve {

namespace {

// both-ends-anchored affine interpolation through two knots; the enclosures
// are intersected, which pins exact values at the knots themselves
Scalar segment_eval(const Scalar& x0, const Scalar& y0, const Scalar& x1, const Scalar& y1,
                    const Scalar& x) {
    Scalar den = x1 - x0;
    if (!den.certainly_nonzero()) return Scalar::hull(y0, y1);
    Scalar slope = (y1 - y0) / den;
    Scalar v1 = y0 + (x - x0) * slope;
    Scalar v2 = y1 + (x - x1) * slope;
    Rat lo = std::max(v1.lo(), v2.lo());
    Rat hi = std::min(v1.hi(), v2.hi());
    if (lo > hi) throw precision_error("segment_eval: inconsistent anchorings");
    return Scalar(lo, hi);
}

bool is_exact_point(const Scalar& x, long v) { return x.is_point() && x.lo() == v; }

}  // namespace

Scalar fiber_eval(const FiberMapSpec& spec, const Scalar& x) {
    if (spec.knots.size() < 2) throw domain_error("fiber_eval: degenerate knot list");
    if (x.lo() < -2 || x.hi() > 2) throw domain_error("fiber_eval: x outside [-2,2]");
    if (is_exact_point(x, -2)) return spec.knots.front().y;
    if (is_exact_point(x, 2)) return spec.knots.back().y;
    std::optional<Scalar> acc;
    for (size_t k = 0; k + 1 < spec.knots.size(); ++k) {
        const Knot& a = spec.knots[k];
        const Knot& b = spec.knots[k + 1];
        if (x.hi() < a.x.lo() || x.lo() > b.x.hi()) continue;
        Scalar xs = Scalar(std::max(x.lo(), a.x.lo()), std::min(x.hi(), b.x.hi()));
        Scalar v = segment_eval(a.x, a.y, b.x, b.y, xs);
        acc = acc ? Scalar::hull(*acc, v) : v;
    }
    if (!acc) throw domain_error("fiber_eval: x not covered by knots");
    return *acc;
}

Dynamics::Dynamics(const ConstructionState& state)
    : state_(state), table_(build_depth_table_limited(state, state.depth() - 1)) {
    // the box map of index i needs the level |i|+1 data, so the usable
    // stratification stops one level short of the construction depth
    if (state.depth() < 1) throw domain_error("Dynamics: state depth must be at least 1");
}

// ------------------------------------------------------------------ kappa ----

Scalar Dynamics::kappa_tilde(long i, const Angle& theta) const {
    if (i >= 0) throw domain_error("kappa_tilde: index must be negative");
    const int ai = static_cast<int>(-i);
    const GenericBoxParams p = state_.box(i);
    Scalar z = box_local(p, theta);
    if (z.abs().hi() > p.alpha || z.abs().lo() < p.delta)
        throw domain_error("kappa_tilde: angle outside the flange region");
    Scalar slope(pow2(state_.level(ai).n - state_.level(ai - 1).n));
    FiberInterval fib = box_boundary(p, theta, state_.precision_bits);
    Scalar gi = gamma_eval(state_, ai, theta).value;
    Angle rt = theta.rotated(1, state_.precision_bits);
    FiberInterval fib_next = box_boundary(state_.box(i + 1), rt, state_.precision_bits);
    Scalar gnext = gamma_eval(state_, ai - 1, rt).value;
    Scalar r1 = (fib_next.lo - gnext) / (slope * (gi - fib.hi));
    Scalar r2 = (fib_next.hi - gnext) / (slope * (gi - fib.lo));
    return Scalar::min(Scalar(Rat(1)), Scalar::min(r1, r2)).compressed(state_.precision_bits);
}

Scalar Dynamics::kappa_tilde_range(long i, const Rat& z_lo, const Rat& z_hi) const {
    const int ai = static_cast<int>(-i);
    const GenericBoxParams p = state_.box(i);
    Scalar zcell(z_lo, z_hi);
    Scalar slope(pow2(state_.level(ai).n - state_.level(ai - 1).n));
    WallRange walls = box_wall_range_local(p, zcell, state_.precision_bits);
    Scalar grange = gamma_range(state_, ai, {i, z_lo, z_hi});
    Scalar gnext = gamma_range(state_, ai - 1, {i + 1, z_lo, z_hi});
    WallRange walls_next =
        box_wall_range_local(state_.box(i + 1), zcell, state_.precision_bits);
    Scalar num1 = walls_next.lower_range - gnext;               // < 0
    Scalar den1 = slope * (grange - walls.upper_range);         // < 0
    Scalar num2 = walls_next.upper_range - gnext;               // > 0
    Scalar den2 = slope * (grange - walls.lower_range);         // > 0
    Scalar out(Rat(1));
    auto fold = [&out](const Scalar& num, const Scalar& den, bool negative) {
        if (den.certainly_nonzero()) {
            out = Scalar::min(out, num / den);
            return true;
        }
        // ratio >= 1 certification without division (vanishing denominator
        // towards the outer corner)
        if (negative ? num.hi() <= den.lo() : num.lo() >= den.hi()) return true;
        return false;
    };
    if (!fold(num1, den1, true) || !fold(num2, den2, false))
        throw precision_error("kappa_tilde_range: ratio unresolved on cell");
    Rat lo = std::max(out.lo(), Rat(0));
    return Scalar(lo, std::max(lo, std::min(out.hi(), Rat(1)))).compressed(state_.precision_bits);
}

Dynamics::KappaEnvelope Dynamics::build_envelope(long i, bool right_side) const {
    const int ai = static_cast<int>(-i);
    const Rat delta = state_.level(ai).delta;
    const Rat alpha = state_.level(ai).alpha;
    const Rat target = pow2(-(state_.level(ai - 1).n + 4));

    struct RawCell {
        Rat from, to;  // measured outward from the delta edge, in [0, alpha-delta]
        Scalar range;
        bool resolved = false;
    };
    std::vector<RawCell> cells;
    const int initial = 64;
    Rat len = alpha - delta;
    for (int k = 0; k < initial; ++k)
        cells.push_back({Rat(len * k / initial), Rat(len * (k + 1) / initial), Scalar(), false});

    auto cell_range = [&](RawCell& c) {
        Rat a = right_side ? Rat(delta + c.from) : Rat(-(delta + c.to));
        Rat b = right_side ? Rat(delta + c.to) : Rat(-(delta + c.from));
        try {
            c.range = kappa_tilde_range(i, a, b);
            c.resolved = true;
        } catch (const precision_error&) {
            // sound fallback: kappa_tilde lands in [0, 1] by definition
            c.range = Scalar(Rat(0), Rat(1));
            c.resolved = false;
        }
    };
    for (auto& c : cells) cell_range(c);

    // refine toward the target by zooming into the running minimum: split the
    // cell with the smallest lower bound (the only one that can sharpen the
    // envelope floor). The successor curve can oscillate on scales far below
    // any workable cell width, so on budget exhaustion the envelope stays
    // sound but wide.
    const size_t cap = 2048;
    for (int round = 0; round < 4096 && cells.size() < cap; ++round) {
        Rat floor_lo(2), floor_hi(2);
        size_t best = cells.size();
        for (size_t k = 0; k < cells.size(); ++k) {
            floor_hi = std::min(floor_hi, Rat(cells[k].range.hi()));
            if (cells[k].range.lo() < floor_lo) {
                floor_lo = cells[k].range.lo();
                best = k;
            }
        }
        if (floor_hi - floor_lo <= target) break;
        // split the floor-defining cell; also split unresolved cells once
        // per round so corner certification can kick in
        std::vector<size_t> to_split{best};
        for (size_t k = 0; k < cells.size(); ++k)
            if (!cells[k].resolved && k != best) {
                to_split.push_back(k);
                break;
            }
        std::sort(to_split.rbegin(), to_split.rend());
        for (size_t k : to_split) {
            RawCell c = cells[k];
            if (c.to - c.from <= pow2(-200)) continue;
            Rat mid = (c.from + c.to) / 2;
            RawCell left{c.from, mid, Scalar(), false};
            RawCell right{mid, c.to, Scalar(), false};
            cell_range(left);
            cell_range(right);
            cells[k] = left;
            cells.insert(cells.begin() + static_cast<long>(k) + 1, right);
        }
    }

    KappaEnvelope env;
    Scalar run(Rat(1));
    for (auto& c : cells) {
        Rat a = right_side ? Rat(delta + c.from) : Rat(-(delta + c.to));
        Rat b = right_side ? Rat(delta + c.to) : Rat(-(delta + c.from));
        env.cells.push_back({a, b, c.range});
        run = Scalar::min(run, c.range);
        env.prefix_min.push_back(run);
    }
    return env;
}

const Dynamics::KappaEnvelope& Dynamics::envelope(long i, bool right_side) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(i, right_side);
    auto it = envelopes_.find(key);
    if (it == envelopes_.end()) it = envelopes_.emplace(key, build_envelope(i, right_side)).first;
    return it->second;
}

Scalar Dynamics::kappa(long i, const Angle& theta) const {
    if (i >= 0) throw domain_error("kappa: index must be negative");
    const GenericBoxParams p = state_.box(i);
    Scalar z = box_local(p, theta);
    if (z.abs().hi() > p.alpha || z.abs().lo() < p.delta)
        throw domain_error("kappa: angle outside the flange region");
    bool right_side = z.hi() > 0;
    const KappaEnvelope& env = envelope(i, right_side);
    // outward distance of theta from the delta edge
    Rat from = right_side ? z.lo() : -z.hi();
    Rat to = right_side ? z.hi() : -z.lo();
    // cells whose span theta may reach
    size_t kmin = env.cells.size() - 1, kmax = 0;
    for (size_t k = 0; k < env.cells.size(); ++k) {
        Rat c_from = right_side ? env.cells[k].z_lo : -env.cells[k].z_hi;
        Rat c_to = right_side ? env.cells[k].z_hi : -env.cells[k].z_lo;
        if (to >= c_from && from <= c_to) {
            kmin = std::min(kmin, k);
            kmax = std::max(kmax, k);
        }
    }
    Rat lower = env.prefix_min[kmax].lo();
    Rat upper(1);
    if (kmin > 0) upper = env.prefix_min[kmin - 1].hi();
    try {
        Scalar kt = kappa_tilde(i, theta);
        upper = std::min(upper, kt.hi());
    } catch (const precision_error&) {
        // near the outer corner the pointwise ratio may be unresolvable; the
        // prefix bound alone stays sound
    }
    lower = std::min(lower, upper);
    return Scalar(std::max(lower, Rat(0)), upper);
}

// ---------------------------------------------------------------- box map ----

Scalar Dynamics::g_apply(long i, const Angle& theta, const Scalar& x) const {
    const int ai = static_cast<int>(std::abs(i));
    const GenericBoxParams p = state_.box(i);
    FiberInterval fib = winged_bounds(state_, i, theta);
    if (x.lo() > fib.hi.hi() || x.hi() < fib.lo.lo())
        throw domain_error("g_apply: x outside the box fiber");
    Scalar z = box_local(p, theta);
    Angle rt = theta.rotated(1, state_.precision_bits);
    std::optional<Scalar> acc;
    auto add = [&acc](const Scalar& v) { acc = acc ? Scalar::hull(*acc, v) : v; };

    if (i >= 0) {
        if (static_cast<int>(i) + 1 > state_.depth())
            throw domain_error("g_apply: successor level not constructed");
        const Rat dn = state_.level(ai + 1).delta;
        const Rat an = state_.level(ai + 1).alpha;
        Scalar az = z.abs();
        Scalar slope(pow2(state_.level(ai).n - state_.level(ai + 1).n));
        if (az.lo() <= dn) {  // central piece
            Scalar v = state_.anchors(i + 1).a + slope * (state_.anchors(i).a - x);
            add(v);
        }
        if (az.hi() >= dn && az.lo() <= an) {  // two-piece region
            Scalar gi = gamma_eval(state_, static_cast<int>(i), theta).value;
            Scalar gn = gamma_eval(state_, static_cast<int>(i) + 1, rt).value;
            FiberInterval fn = box_boundary(state_.box(i + 1), rt, state_.precision_bits);
            std::optional<Scalar> piece;
            if (Scalar::lt(x, gi) != Cert::no) {
                Scalar xs = Scalar(x.lo(), std::min(x.hi(), gi.hi()));
                piece = segment_eval(fib.lo, fn.hi, gi, gn, xs);
            }
            if (Scalar::lt(gi, x) != Cert::no) {
                Scalar xs = Scalar(std::max(x.lo(), gi.lo()), x.hi());
                Scalar v = segment_eval(gi, gn, fib.hi, fn.lo, xs);
                piece = piece ? Scalar::hull(*piece, v) : v;
            }
            if (piece) add(*piece);
        }
        if (az.hi() >= an) {  // outer constant piece
            add(gamma_eval(state_, static_cast<int>(i) + 1, rt).value);
        }
    } else {
        const Rat d = p.delta, a = p.alpha;
        Scalar az = z.abs();
        Scalar slope(pow2(state_.level(ai).n - state_.level(ai - 1).n));
        if (az.lo() <= d) {
            Scalar v = state_.anchors(i + 1).a + slope * (state_.anchors(i).a - x);
            add(v);
        }
        if (az.hi() >= d && az.lo() <= a) {
            Scalar k = kappa(i, theta);
            Scalar gi = gamma_eval(state_, ai, theta).value;
            Scalar gn = gamma_eval(state_, ai - 1, rt).value;
            add(slope * k * (gi - x) + gn);
        }
        if (az.hi() >= a) {  // wing: constant
            add(gamma_eval(state_, ai - 1, rt).value);
        }
    }
    if (!acc) throw domain_error("g_apply: angle outside the winged footprint");
    return acc->compressed(state_.precision_bits);
}

// ------------------------------------------------------------------- maps ----

namespace {

struct Pinned {
    // evaluate the continuous non-increasing map pinned at (-2,2),(2,-2) with
    // a core on [lo, hi]
    Scalar lo_x, hi_x;    // core bounds
    Scalar lo_y, hi_y;    // map values at the core bounds
};

}  // namespace

MapValue Dynamics::fm(int m, const Angle& theta, const Scalar& x, const Rat& eps) const {
    if (x.lo() < -2 || x.hi() > 2) throw domain_error("fm: x outside [-2,2]");
    if (is_exact_point(x, -2)) return {Scalar(Rat(2)), MapValue::Status::certified};
    if (is_exact_point(x, 2)) return {Scalar(Rat(-2)), MapValue::Status::certified};
    if (m > table_.max_depth()) return fm(std::max(0, table_.max_depth()), theta, x, eps);

    MapValue out;
    if (m == 0) {
        WingLocation loc = locate(state_, table_, 0, theta);
        if (loc.kind == WingLocation::Kind::outside) {
            Angle rt = theta.rotated(1, state_.precision_bits);
            CurveValue g = gamma_limit(state_, rt, eps);
            if (g.status != CurveValue::Status::certified)
                out.status = MapValue::Status::horizon_limited;
            Scalar zero(Rat(0));
            std::optional<Scalar> acc;
            if (Scalar::lt(x, zero) != Cert::no) {
                Scalar xs = Scalar(x.lo(), std::min(x.hi(), Rat(0)));
                acc = segment_eval(Scalar(Rat(-2)), Scalar(Rat(2)), zero, g.value, xs);
            }
            if (Scalar::lt(zero, x) != Cert::no) {
                Scalar xs = Scalar(std::max(x.lo(), Rat(0)), x.hi());
                Scalar v = segment_eval(zero, g.value, Scalar(Rat(2)), Scalar(Rat(-2)), xs);
                acc = acc ? Scalar::hull(*acc, v) : v;
            }
            out.value = acc->compressed(state_.precision_bits);
            return out;
        }
        long b = loc.b;
        FiberInterval fib = winged_bounds(state_, b, theta);
        Scalar g_lo = g_apply(b, theta, fib.lo);
        Scalar g_hi = g_apply(b, theta, fib.hi);
        std::optional<Scalar> acc;
        if (Scalar::lt(x, fib.lo) != Cert::no) {
            Scalar xs = Scalar(x.lo(), std::min(x.hi(), fib.lo.hi()));
            Scalar v = segment_eval(Scalar(Rat(-2)), Scalar(Rat(2)), fib.lo, g_lo, xs);
            acc = acc ? Scalar::hull(*acc, v) : v;
        }
        if (Scalar::lt(x, fib.lo) != Cert::yes && Scalar::lt(fib.hi, x) != Cert::yes) {
            Scalar xs = Scalar(std::max(x.lo(), fib.lo.lo()), std::min(x.hi(), fib.hi.hi()));
            Scalar v = fib.degenerate ? g_lo : g_apply(b, theta, xs);
            acc = acc ? Scalar::hull(*acc, v) : v;
        }
        if (Scalar::lt(fib.hi, x) != Cert::no) {
            Scalar xs = Scalar(std::max(x.lo(), fib.hi.lo()), x.hi());
            Scalar v = segment_eval(fib.hi, g_hi, Scalar(Rat(2)), Scalar(Rat(-2)), xs);
            acc = acc ? Scalar::hull(*acc, v) : v;
        }
        out.value = acc->compressed(state_.precision_bits);
        return out;
    }

    WingLocation loc = locate(state_, table_, m, theta);
    if (loc.kind == WingLocation::Kind::outside) return fm(m - 1, theta, x, eps);

    Scalar core_lo, core_hi, y_core_lo, y_core_hi;
    bool constant_core = false;
    Scalar const_val(Rat(0));
    if (loc.kind == WingLocation::Kind::in_IB && !(loc.at_inner_boundary && loc.b < 0)) {
        FiberInterval fib = box_boundary(state_.box(loc.b), theta, state_.precision_bits);
        core_lo = fib.lo;
        core_hi = fib.hi;
        y_core_lo = g_apply(loc.b, theta, fib.lo);
        y_core_hi = g_apply(loc.b, theta, fib.hi);
    } else {
        WingInterval w = wing_bounds(state_, table_, m, theta);
        if (w.horizon_limited) out.status = MapValue::Status::horizon_limited;
        core_lo = w.lo;
        core_hi = w.hi;
        Angle rt = theta.rotated(1, state_.precision_bits);
        const_val = gamma_eval(state_, static_cast<int>(std::abs(loc.b)) - 1, rt).value;
        constant_core = true;
        y_core_lo = y_core_hi = const_val;
    }

    // outer conjugations of the previous map
    std::optional<Scalar> acc;
    if (Scalar::lt(x, core_lo) != Cert::no) {
        MapValue prev_at = fm(m - 1, theta, core_lo, eps);
        MapValue prev_x = fm(m - 1, theta, Scalar(x.lo(), std::min(x.hi(), core_lo.hi())), eps);
        out.status = std::max(out.status, std::max(prev_at.status, prev_x.status));
        Scalar den = Scalar(Rat(2)) - prev_at.value;
        if (!den.certainly_nonzero())
            throw precision_error("fm: conjugation denominator touches 0 (left)");
        Scalar s = (Scalar(Rat(2)) - y_core_lo) / den;
        Scalar v = s * (prev_x.value - Scalar(Rat(2))) + Scalar(Rat(2));
        acc = acc ? Scalar::hull(*acc, v) : v;
    }
    if (Scalar::lt(x, core_lo) != Cert::yes && Scalar::lt(core_hi, x) != Cert::yes) {
        Scalar xs = Scalar(std::max(x.lo(), core_lo.lo()), std::min(x.hi(), core_hi.hi()));
        Scalar v = constant_core ? const_val : g_apply(loc.b, theta, xs);
        acc = acc ? Scalar::hull(*acc, v) : v;
    }
    if (Scalar::lt(core_hi, x) != Cert::no) {
        MapValue prev_at = fm(m - 1, theta, core_hi, eps);
        MapValue prev_x = fm(m - 1, theta, Scalar(std::max(x.lo(), core_hi.lo()), x.hi()), eps);
        out.status = std::max(out.status, std::max(prev_at.status, prev_x.status));
        Scalar den = Scalar(Rat(2)) + prev_at.value;
        if (!den.certainly_nonzero())
            throw precision_error("fm: conjugation denominator touches 0 (right)");
        Scalar s = (Scalar(Rat(2)) + y_core_hi) / den;
        Scalar v = s * (prev_x.value + Scalar(Rat(2))) - Scalar(Rat(2));
        acc = acc ? Scalar::hull(*acc, v) : v;
    }
    if (!acc) throw domain_error("fm: evaluation produced no branch");
    out.value = acc->compressed(state_.precision_bits);
    return out;
}

namespace {

void push_unique(std::vector<Scalar>& xs, const Scalar& v) {
    for (const Scalar& u : xs)
        if (u.lo() == v.lo() && u.hi() == v.hi()) return;
    xs.push_back(v);
}

}  // namespace

FiberMapSpec Dynamics::fiber_map(int m, const Angle& theta, const Rat& eps) const {
    if (m > table_.max_depth()) m = std::max(0, table_.max_depth());
    // collect breakpoint abscissae level by level
    std::vector<Scalar> xs;
    xs.push_back(Scalar(Rat(-2)));
    xs.push_back(Scalar(Rat(2)));
    WingLocation loc0 = locate(state_, table_, 0, theta);
    if (loc0.kind == WingLocation::Kind::outside) {
        push_unique(xs, Scalar(Rat(0)));
    } else {
        FiberInterval fib = winged_bounds(state_, loc0.b, theta);
        push_unique(xs, fib.lo);
        push_unique(xs, fib.hi);
        if (loc0.b >= 0) {
            // interior knot of the two-piece region
            Scalar z = box_local(state_.box(loc0.b), theta).abs();
            const Rat dn = state_.level(static_cast<int>(loc0.b) + 1).delta;
            const Rat an = state_.level(static_cast<int>(loc0.b) + 1).alpha;
            if (z.lo() >= dn && z.hi() <= an)
                push_unique(xs, gamma_eval(state_, static_cast<int>(loc0.b), theta).value);
        }
    }
    for (int r = 1; r <= m; ++r) {
        WingLocation loc = locate(state_, table_, r, theta);
        if (loc.kind == WingLocation::Kind::outside) continue;
        Scalar core_lo, core_hi;
        std::optional<Scalar> interior;
        if (loc.kind == WingLocation::Kind::in_IB && !(loc.at_inner_boundary && loc.b < 0)) {
            FiberInterval fib = box_boundary(state_.box(loc.b), theta, state_.precision_bits);
            core_lo = fib.lo;
            core_hi = fib.hi;
            if (loc.b >= 0) {
                Scalar z = box_local(state_.box(loc.b), theta).abs();
                const Rat dn = state_.level(static_cast<int>(loc.b) + 1).delta;
                const Rat an = state_.level(static_cast<int>(loc.b) + 1).alpha;
                if (z.lo() >= dn && z.hi() <= an)
                    interior = gamma_eval(state_, static_cast<int>(loc.b), theta).value;
            }
        } else {
            WingInterval w = wing_bounds(state_, table_, r, theta);
            core_lo = w.lo;
            core_hi = w.hi;
        }
        // drop inherited breakpoints strictly inside the new core
        std::vector<Scalar> kept;
        for (const Scalar& u : xs) {
            if (Scalar::lt(core_lo, u) == Cert::yes && Scalar::lt(u, core_hi) == Cert::yes)
                continue;
            kept.push_back(u);
        }
        xs = std::move(kept);
        push_unique(xs, core_lo);
        push_unique(xs, core_hi);
        if (interior) push_unique(xs, *interior);
    }
    std::sort(xs.begin(), xs.end(),
              [](const Scalar& a, const Scalar& b) { return a.mid() < b.mid(); });
    FiberMapSpec spec;
    for (const Scalar& x : xs) {
        MapValue v = fm(m, theta, x, eps);
        if (v.status == MapValue::Status::horizon_limited) spec.horizon_limited = true;
        spec.knots.push_back({x, v.value});
    }
    return spec;
}

std::pair<Angle, MapValue> Dynamics::apply_T(int m, const Angle& theta, const Scalar& x,
                                             const Rat& eps) const {
    return {theta.rotated(1, state_.precision_bits), fm(m, theta, x, eps)};
}

Rat Dynamics::tail_after(int m) const {
    if (m < 0 || m > table_.max_depth()) throw domain_error("tail_after: stratum out of range");
    return Rat(4) * pow2(-table_.mu[static_cast<size_t>(m)]);
}

MapValue Dynamics::f_limit(const Angle& theta, const Scalar& x, const Rat& eps) const {
    if (eps <= 0) throw domain_error("f_limit: eps must be positive");
    if (is_exact_point(x, -2)) return {Scalar(Rat(2)), MapValue::Status::certified};
    if (is_exact_point(x, 2)) return {Scalar(Rat(-2)), MapValue::Status::certified};
    for (int m = 0; m <= table_.max_depth(); ++m) {
        Rat tail = tail_after(m);
        if (tail <= eps) {
            MapValue v = fm(m, theta, x, eps);
            v.value = v.value.widened(tail).compressed(state_.precision_bits);
            return v;
        }
    }
    int m = table_.max_depth();
    MapValue v = fm(m, theta, x, eps);
    v.value = v.value.widened(tail_after(m)).compressed(state_.precision_bits);
    v.status = MapValue::Status::horizon_limited;
    return v;
}

}  // namespace pcurve
