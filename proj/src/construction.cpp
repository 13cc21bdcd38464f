#include "pcurve/construction.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

namespace pcurve {

using json = nlohmann::ordered_json;

namespace {

constexpr long kNoBase = std::numeric_limits<long>::min();

Scalar clip(const Scalar& z, const Rat& lo, const Rat& hi) {
    return Scalar(std::max(z.lo(), lo), std::min(z.hi(), hi));
}

CurveValue::Status worse(CurveValue::Status a, CurveValue::Status b) {
    using S = CurveValue::Status;
    if (a == S::excluded || b == S::excluded) return S::excluded;
    if (a == S::horizon_limited || b == S::horizon_limited) return S::horizon_limited;
    return S::certified;
}

}  // namespace

const LevelSpec& ConstructionState::level(int j) const {
    if (j < 0 || j > depth()) throw domain_error("level index out of range");
    return levels[static_cast<size_t>(j)];
}

const AnchorTriple& ConstructionState::anchors(long ell) const {
    const LevelSpec& spec = level(static_cast<int>(ell < 0 ? -ell : ell));
    return ell < 0 ? spec.neg : spec.pos;
}

GenericBoxParams ConstructionState::box(long ell) const {
    const LevelSpec& spec = level(static_cast<int>(ell < 0 ? -ell : ell));
    const AnchorTriple& t = ell < 0 ? spec.neg : spec.pos;
    GenericBoxParams p;
    p.ell = ell;
    p.n = spec.n;
    p.alpha = spec.alpha;
    p.delta = spec.delta;
    p.a = t.a;
    p.a_plus = t.a_plus;
    p.a_minus = t.a_minus;
    p.center = star(ell);
    return p;
}

ArcInterval ConstructionState::basint(long ell) const {
    return ArcInterval::ball(star(ell), level(static_cast<int>(std::abs(ell))).alpha,
                             precision_bits);
}

Rat ConstructionState::wbasint_radius(long ell) const {
    if (ell >= 0) return level(static_cast<int>(ell)).alpha;
    return level(static_cast<int>(-ell) - 1).alpha;  // alpha_{|ell+1|}
}

ArcInterval ConstructionState::wbasint(long ell) const {
    return ArcInterval::ball(star(ell), wbasint_radius(ell), precision_bits);
}

ArcInterval ConstructionState::delta_ball(long ell) const {
    return ArcInterval::ball(star(ell), level(static_cast<int>(std::abs(ell))).delta,
                             precision_bits);
}

bool ConditionReport::all_true() const {
    for (const auto& c : clauses)
        if (c.status != Cert::yes) return false;
    return !clauses.empty();
}

Rat ConditionReport::min_margin() const {
    Rat m(1);
    for (const auto& c : clauses)
        if (!c.identity) m = std::min(m, c.margin);
    return m;
}

const ConditionClause* ConditionReport::first_failure() const {
    for (const auto& c : clauses)
        if (c.status != Cert::yes) return &c;
    return nullptr;
}

// ---------------------------------------------------------------- gamma ----

CurveValue gamma_eval(const ConstructionState& state, int j, const Angle& theta) {
    if (j <= -1) return {Scalar(Rat(0)), CurveValue::Status::certified};
    if (j > state.depth()) throw domain_error("gamma_eval: level not constructed");

    auto keyt = theta.key();
    auto key = std::make_tuple(j, std::get<0>(keyt), std::get<1>(keyt), std::get<2>(keyt),
                               std::get<3>(keyt));
    {
        std::lock_guard<std::mutex> lock(state.memo_mutex);
        auto it = state.gamma_memo.find(key);
        if (it != state.gamma_memo.end()) return it->second;
    }

    CurveValue out;
    // exact hit on an excluded center
    if (theta.has_tag() && theta.offset() == 0 && std::abs(theta.base()) <= j) {
        const GenericBoxParams p = state.box(theta.base());
        Scalar half(pow2(-p.n));
        out.value = Scalar::hull(p.a - half, p.a + half).compressed(state.precision_bits);
        out.status = CurveValue::Status::excluded;
    } else {
        bool resolved = false;
        for (long ell : (j == 0 ? std::vector<long>{0} : std::vector<long>{j, -j})) {
            const GenericBoxParams p = state.box(ell);
            Scalar z = box_local(p, theta);
            if (z.lo() > p.alpha || z.hi() < -p.alpha) continue;  // outside this box
            if (z.lo() >= -p.alpha && z.hi() <= p.alpha) {
                out.value = box_graph_range_local(p, z, state.precision_bits);
                out.status = (z.lo() <= 0 && z.hi() >= 0)
                                 ? CurveValue::Status::excluded  // cannot separate from ell*
                                 : CurveValue::Status::certified;
                resolved = true;
                break;
            }
            // straddles the box boundary: hull of the graph piece and the
            // previous level (they agree on the seam)
            Scalar inz = clip(z, -p.alpha, p.alpha);
            Scalar vbox = box_graph_range_local(p, inz, state.precision_bits);
            CurveValue rest = gamma_eval(state, j - 1, theta);
            out.value = Scalar::hull(vbox, rest.value).compressed(state.precision_bits);
            out.status = rest.status;
            resolved = true;
            break;
        }
        if (!resolved) out = gamma_eval(state, j - 1, theta);
    }

    std::lock_guard<std::mutex> lock(state.memo_mutex);
    state.gamma_memo.emplace(key, out);
    return out;
}

CurveValue gamma_limit(const ConstructionState& state, const Angle& theta, const Rat& eps) {
    if (eps <= 0) throw domain_error("gamma_limit: eps must be positive");
    // tail after level i: 2 * 2^-(i+1) = 2^-i
    for (int i = 0; i <= state.depth(); ++i) {
        Rat tail = pow2(-i);
        if (tail <= eps) {
            CurveValue v = gamma_eval(state, i, theta);
            v.value = v.value.widened(tail).compressed(state.precision_bits);
            return v;
        }
    }
    CurveValue v = gamma_eval(state, state.depth(), theta);
    v.value = v.value.widened(pow2(-state.depth())).compressed(state.precision_bits);
    v.status = worse(v.status, CurveValue::Status::horizon_limited);
    return v;
}

namespace {

// local coordinate interval of an arc relative to a box center
Scalar arc_local(const ConstructionState& state, const GenericBoxParams& p, const LocalArc& arc) {
    if (p.center.has_tag() && p.center.base() == arc.base) return Scalar(arc.lo, arc.hi);
    Scalar d = state.star(arc.base).rep() - p.center.rep();
    Rat f = rat_floor(d.lo() + rat(1, 2));
    return Scalar(d.lo() - f + arc.lo, d.hi() - f + arc.hi);
}

}  // namespace

Scalar gamma_range(const ConstructionState& state, int j, const LocalArc& arc) {
    if (j <= -1) return Scalar(Rat(0));
    std::optional<Scalar> acc;
    bool need_rest = true;
    for (long ell : (j == 0 ? std::vector<long>{0} : std::vector<long>{j, -j})) {
        const GenericBoxParams p = state.box(ell);
        Scalar z = arc_local(state, p, arc);
        if (z.lo() > p.alpha || z.hi() < -p.alpha) continue;
        Scalar inz = clip(z, -p.alpha, p.alpha);
        Scalar v = box_graph_range_local(p, inz, state.precision_bits);
        acc = acc ? Scalar::hull(*acc, v) : v;
        if (z.lo() >= -p.alpha && z.hi() <= p.alpha) {
            need_rest = false;  // arc entirely inside this box
            break;
        }
    }
    if (need_rest) {
        Scalar rest = gamma_range(state, j - 1, arc);
        acc = acc ? Scalar::hull(*acc, rest) : rest;
    }
    return acc->compressed(state.precision_bits);
}

Scalar gamma_deriv_range(const ConstructionState& state, int j, const LocalArc& arc) {
    if (j <= -1) return Scalar(Rat(0));
    std::optional<Scalar> acc;
    bool need_rest = true;
    for (long ell : (j == 0 ? std::vector<long>{0} : std::vector<long>{j, -j})) {
        const GenericBoxParams p = state.box(ell);
        Scalar z = arc_local(state, p, arc);
        if (z.lo() > p.alpha || z.hi() < -p.alpha) continue;
        Scalar inz = clip(z, -p.alpha, p.alpha);
        Scalar v = box_graph_deriv_local(p, inz, state.precision_bits);
        acc = acc ? Scalar::hull(*acc, v) : v;
        if (z.lo() >= -p.alpha && z.hi() <= p.alpha) {
            need_rest = false;
            break;
        }
    }
    if (need_rest) {
        Scalar rest = gamma_deriv_range(state, j - 1, arc);
        acc = acc ? Scalar::hull(*acc, rest) : rest;
    }
    return acc->compressed(state.precision_bits);
}

FiberInterval winged_bounds(const ConstructionState& state, long i, const Angle& theta) {
    const GenericBoxParams p = state.box(i);
    Rat cap = state.wbasint_radius(i);
    Scalar z = box_local(p, theta);
    if (z.lo() > cap || z.hi() < -cap) throw domain_error("winged_bounds: outside footprint");
    if (z.lo() < -cap || z.hi() > cap)
        throw precision_error("winged_bounds: enclosure straddles the footprint boundary");
    if (i >= 0) return box_boundary(p, theta, state.precision_bits);
    // negative index: box on the inner ball, degenerate wing outside
    if (z.lo() >= -p.alpha && z.hi() <= p.alpha) return box_boundary(p, theta, state.precision_bits);
    if (z.lo() > p.alpha || z.hi() < -p.alpha) {
        CurveValue v = gamma_eval(state, static_cast<int>(-i), theta);
        FiberInterval f;
        f.lo = f.hi = v.value;
        f.degenerate = true;
        return f;
    }
    // straddles the inner boundary: hull of both branches (they agree there)
    FiberInterval fb;
    WallRange w = box_wall_range_local(p, clip(z, -p.alpha, p.alpha), state.precision_bits);
    CurveValue v = gamma_eval(state, static_cast<int>(-i), theta);
    fb.lo = Scalar::hull(w.lower_range, v.value);
    fb.hi = Scalar::hull(w.upper_range, v.value);
    fb.degenerate = false;
    return fb;
}

// ----------------------------------------------------------- conditions ----

namespace {

struct ClauseBuilder {
    ConditionReport* report;
    void add(const std::string& id, Cert status, const Rat& margin, const std::string& witness = "",
             bool identity = false) {
        report->clauses.push_back({id, status, margin, identity, witness});
    }
    // fold a certified-positive quantity into a clause
    void positive(const std::string& id, const Rat& lower_bound, const std::string& witness = "") {
        add(id, lower_bound > 0 ? Cert::yes : Cert::undecided, lower_bound, witness);
    }
};

std::string ell_name(long ell) { return std::to_string(ell); }

// membership of ell* in a winged footprint, for witness scans
struct WitnessScan {
    std::optional<long> witness;
    Cert status = Cert::yes;  // yes: scan resolved (witness may be absent)
    Rat margin = Rat(1);
};

WitnessScan scan_center_container(const ConstructionState& state, const Angle& point, int upto) {
    WitnessScan out;
    for (int am = upto; am >= 0; --am) {
        for (long m : (am == 0 ? std::vector<long>{0} : std::vector<long>{am, -am})) {
            Cert c = state.wbasint(m).contains(point);
            if (c == Cert::yes) {
                if (out.witness) {  // second hit at the same |m|: not disjoint
                    out.status = Cert::no;
                    return out;
                }
                out.witness = m;
            } else if (c == Cert::undecided) {
                out.status = Cert::undecided;
                return out;
            }
        }
        if (out.witness) return out;
    }
    return out;
}

// maximal-|m| winged footprint that the arc meets; requires clean nesting
struct ArcNest {
    std::optional<long> witness;
    Cert status = Cert::yes;
    Rat margin = Rat(1);
    std::string detail;
};

ArcNest scan_arc_nest(const ConstructionState& state, const ArcInterval& arc, int upto) {
    ArcNest out;
    for (int am = upto; am >= 0; --am) {
        for (long m : (am == 0 ? std::vector<long>{0} : std::vector<long>{am, -am})) {
            ArcInterval host = state.wbasint(m);
            Rat sep(0);
            Cert dis = host.disjoint(arc, &sep);
            if (dis == Cert::yes) continue;
            if (dis == Cert::undecided) {
                out.status = Cert::undecided;
                out.detail = "overlap with footprint " + ell_name(m) + " undecided";
                return out;
            }
            if (out.witness) {
                out.status = Cert::no;
                out.detail = "meets both footprints " + ell_name(*out.witness) + " and " +
                             ell_name(m);
                return out;
            }
            // meets footprint m: demand clean containment in one component of
            // the open footprint minus the inner-arc boundary and the center
            Cert inside = host.contains_arc_strict(arc);
            Rat d_center = arc.distance_lower(state.star(m));
            Angle inner_lo = state.star(m).plus(-state.level(am).alpha, state.precision_bits);
            Angle inner_hi = state.star(m).plus(state.level(am).alpha, state.precision_bits);
            Rat d_lo = arc.distance_lower(inner_lo);
            Rat d_hi = arc.distance_lower(inner_hi);
            // containment margin: separation of arc endpoints from host ends
            Rat d_e1 = circle_gap(arc.start(), host.start()).lo();
            Rat d_e2 = circle_gap(arc.end(), host.end()).lo();
            Rat margin = std::min(std::min(d_center, std::min(d_lo, d_hi)), std::min(d_e1, d_e2));
            if (inside != Cert::yes || margin <= 0) {
                out.status = inside == Cert::no ? Cert::no : Cert::undecided;
                out.detail = "not cleanly inside footprint " + ell_name(m);
                return out;
            }
            out.witness = m;
            out.margin = margin;
        }
        if (out.witness) return out;
    }
    return out;
}

// maximal-|k| inner ball strictly containing the arc away from the center
ArcNest scan_inner_nest(const ConstructionState& state, const ArcInterval& arc, int upto) {
    ArcNest out;
    for (int ak = upto; ak >= 0; --ak) {
        for (long k : (ak == 0 ? std::vector<long>{0} : std::vector<long>{ak, -ak})) {
            ArcInterval ball = state.basint(k);
            Cert inside = ball.contains_arc_strict(arc);
            if (inside == Cert::undecided) {
                Cert dis = ball.disjoint(arc, nullptr);
                if (dis == Cert::yes) continue;
                out.status = Cert::undecided;
                out.detail = "relation to ball " + ell_name(k) + " undecided";
                return out;
            }
            if (inside == Cert::no) continue;
            Rat d_center = arc.distance_lower(state.star(k));
            if (d_center <= 0) {
                out.status = Cert::undecided;
                out.detail = "center of ball " + ell_name(k) + " not separated";
                return out;
            }
            out.witness = k;
            out.margin = d_center;
            return out;  // first hit from above is the maximal |k|
        }
    }
    return out;
}

// graph-of-previous-curve containment in the new box, flange corners via a
// slope comparison and the rest by geometric subdivision
void check_graph_in_box(const ConstructionState& state, int j, long ell, ClauseBuilder& cb) {
    const std::string id = "graph-in-box(" + ell_name(ell) + ")";
    const GenericBoxParams p = state.box(ell);
    Scalar scale(pow2(-p.n));
    try {
        // central ball: the previous curve must stay within the narrowest wall
        Scalar rng = gamma_range(state, j - 1, {ell, -p.delta, p.delta});
        Scalar wall = scale * Scalar(Rat(1) - p.delta);
        Rat m_up = (p.a + wall).lo() - rng.hi();
        Rat m_dn = rng.lo() - (p.a - wall).hi();
        Rat margin = std::min(m_up, m_dn);

        // flanges: subdivide geometrically toward each corner
        const int kPieces = 12;
        for (int side = 0; side < 2; ++side) {
            bool right = side == 0;
            const Scalar& corner_a = right ? p.a_plus : p.a_minus;
            // wall slopes measured from the corner inward
            Scalar len(p.alpha - p.delta);
            Scalar su = ((p.a + scale * Scalar(Rat(1) - p.delta)) - corner_a) / len;
            Scalar sl = ((p.a - scale * Scalar(Rat(1) - p.delta)) - corner_a) / len;

            // corner piece: |gamma'| must stay below both wall slopes
            Rat u1 = Rat((p.alpha - p.delta) / pow2(kPieces));
            Rat z_in = right ? Rat(p.alpha - u1) : Rat(-p.alpha);
            Rat z_out = right ? Rat(p.alpha) : Rat(-p.alpha + u1);
            Scalar dgr = gamma_deriv_range(state, j - 1, {ell, z_in, z_out});
            Rat slope_gap = std::min(su.lo(), Rat(-sl.hi())) - dgr.abs().hi();
            margin = std::min(margin, slope_gap);

            // geometric interior pieces: wall clearance at the near end
            Rat flange_len = Rat(p.alpha - p.delta);
            Rat u_lo = u1;
            for (int kp = 0; kp < kPieces && u_lo < flange_len; ++kp) {
                Rat u_hi = std::min(Rat(u_lo * 2), flange_len);
                Rat za = right ? Rat(p.alpha - u_hi) : Rat(-p.alpha + u_lo);
                Rat zb = right ? Rat(p.alpha - u_lo) : Rat(-p.alpha + u_hi);
                Scalar g = gamma_range(state, j - 1, {ell, za, zb});
                Scalar wall_up = corner_a + Scalar(u_lo) * su;
                Scalar wall_dn = corner_a + Scalar(u_lo) * sl;
                margin = std::min(margin, Rat(wall_up.lo() - g.hi()));
                margin = std::min(margin, Rat(g.lo() - wall_dn.hi()));
                u_lo = u_hi;
            }
        }
        cb.positive(id, margin);
    } catch (const precision_error& e) {
        cb.add(id, Cert::undecided, Rat(0), e.what());
    }
}

void check_level0(const ConstructionState& state, ConditionReport& report,
                  ClauseBuilder& cb) {
    const LevelSpec& l0 = state.level(0);
    // radii ordering
    Rat chain = std::min(l0.delta, std::min(Rat(l0.alpha - l0.delta), Rat(rat(1, 2) - l0.alpha)));
    cb.add("radii-chain-order", (l0.n == 1 && chain > 0) ? Cert::yes : Cert::no, chain,
           l0.n == 1 ? "" : "n0 != 1");

    // three arcs pairwise disjoint
    auto dis = certified_disjoint({state.wbasint(0), ArcInterval::ball(state.star(1), l0.alpha,
                                                                       state.precision_bits),
                                   state.wbasint(-1)});
    cb.add("arc-family-disjoint", dis.status, dis.margin);

    // 2*, -2* clear of the winged footprint of -1
    Rat clear = std::min(state.wbasint(-1).distance_lower(state.star(2)),
                         state.wbasint(-1).distance_lower(state.star(-2)));
    cb.positive("excluded-point-clearance", clear);

    // boundary points clear of the orbit up to the horizon
    Rat bd(1);
    for (int s = -1; s <= 1; s += 2) {
        Angle e = state.star(0).plus(s * l0.alpha, state.precision_bits);
        for (long i = -state.orbit_horizon; i <= state.orbit_horizon; ++i)
            bd = std::min(bd, circle_gap(e, state.star(i)).lo());
    }
    cb.positive("orbit-boundary-clearance", bd);
    cb.add("dyadic-radii", is_dyadic(l0.alpha) && is_dyadic(l0.delta) ? Cert::yes : Cert::no,
           Rat(1), "", true);

    bool anchors_zero = l0.pos.a.is_point() && l0.pos.a.lo() == 0 && l0.pos.a_plus.is_point() &&
                        l0.pos.a_plus.lo() == 0 && l0.pos.a_minus.is_point() &&
                        l0.pos.a_minus.lo() == 0;
    cb.add("anchor-values", anchors_zero ? Cert::yes : Cert::no, Rat(1), "", true);
    (void)report;
}

void check_level_j(const ConstructionState& state, int j, ConditionReport& report,
                   ClauseBuilder& cb) {
    const LevelSpec& cur = state.level(j);
    const LevelSpec& prev = state.level(j - 1);

    // chain: n_j > n_{j-1}, n_j > j, delta_j < alpha_j < 2^-n_j < delta_{j-1}
    Rat chain = std::min(std::min(cur.delta, Rat(cur.alpha - cur.delta)),
                         std::min(Rat(pow2(-cur.n) - cur.alpha), Rat(prev.delta - pow2(-cur.n))));
    bool n_ok = cur.n > prev.n && cur.n > j;
    cb.add("radii-chain-order", (n_ok && chain > 0) ? Cert::yes : Cert::no, chain,
           n_ok ? "" : "box scale exponent not increasing");
    cb.add("dyadic-radii", is_dyadic(cur.alpha) && is_dyadic(cur.delta) ? Cert::yes : Cert::no,
           Rat(1), "", true);

    // boundary points of both new balls clear of the orbit, up to the horizon
    Rat bd(1);
    for (long ell : {static_cast<long>(j), static_cast<long>(-j)}) {
        for (int s = -1; s <= 1; s += 2) {
            Angle e = state.star(ell).plus(s * cur.alpha, state.precision_bits);
            for (long i = -state.orbit_horizon; i <= state.orbit_horizon; ++i)
                bd = std::min(bd, circle_gap(e, state.star(i)).lo());
        }
    }
    cb.positive("orbit-boundary-clearance", bd);

    // four-arc family pairwise disjoint
    ArcInterval rot_j = ArcInterval::ball(state.star(j + 1), cur.alpha, state.precision_bits);
    ArcInterval wneg_next =
        ArcInterval::ball(state.star(-(j + 1)), cur.alpha, state.precision_bits);
    auto dis = certified_disjoint({state.wbasint(j), rot_j, state.wbasint(-j), wneg_next});
    cb.add("arc-family-disjoint", dis.status, dis.margin,
           dis.status == Cert::yes ? ""
                                   : "arcs " + std::to_string(dis.witness_a) + "," +
                                         std::to_string(dis.witness_b));

    // previous curve confined near the next centers
    for (long lp : {static_cast<long>(j + 1), static_cast<long>(-(j + 1))}) {
        CurveValue c = gamma_eval(state, j - 1, state.star(lp));
        Scalar rng = gamma_range(state, j - 1, {lp, -cur.alpha, cur.alpha});
        Rat half = pow2(-cur.n);
        Rat m_up = (c.value.lo() + half) - rng.hi();
        Rat m_dn = rng.lo() - (c.value.hi() - half);
        cb.positive("curve-range-inclusion(" + ell_name(lp) + ")", std::min(m_up, m_dn));
    }

    // excluded centers clear of the new arcs
    Rat clear(1);
    std::string clear_witness;
    auto point_clear = [&](const ArcInterval& arc, long skip, int up) {
        for (long i = -up; i <= up; ++i) {
            if (i == skip) continue;
            Rat d = arc.distance_lower(state.star(i));
            if (d < clear) {
                clear = d;
                clear_witness = "orbit point " + ell_name(i);
            }
        }
    };
    point_clear(state.wbasint(j), j, j + 1);
    point_clear(wneg_next, -(j + 1), j + 1);
    point_clear(rot_j, j + 1, j + 1);
    point_clear(state.wbasint(-j), -j, j + 1);
    point_clear(wneg_next, -(j + 1), j + 2);  // also j+2 and -(j+2)
    cb.positive("excluded-point-clearance", clear, clear_witness);

    // boundaries of the rotated earlier balls avoid the new balls
    Rat rotated_clear(1);
    for (int ak = 0; ak <= j - 1; ++ak) {
        for (long k : (ak == 0 ? std::vector<long>{0} : std::vector<long>{ak, -ak})) {
            Rat rad = state.level(ak).alpha;
            for (int s = -1; s <= 1; s += 2) {
                Angle e = state.star(k + 1).plus(s * rad, state.precision_bits);
                rotated_clear = std::min(rotated_clear, state.basint(j).distance_lower(e));
                rotated_clear = std::min(rotated_clear, state.basint(-j).distance_lower(e));
            }
        }
    }
    cb.positive("rotated-arc-boundary-clearance", rotated_clear);

    // the rotated new ball either avoids all earlier footprints or nests
    ArcNest rot_nest = scan_arc_nest(state, rot_j, j - 1);
    if (rot_nest.status != Cert::yes) {
        cb.add("rotated-arc-position", rot_nest.status, Rat(0), rot_nest.detail);
    } else if (!rot_nest.witness) {
        Rat m(1);
        for (int ak = 0; ak <= j - 1; ++ak)
            for (long k : (ak == 0 ? std::vector<long>{0} : std::vector<long>{ak, -ak})) {
                Rat sep(0);
                state.wbasint(k).disjoint(rot_j, &sep);
                m = std::min(m, sep);
            }
        cb.positive("rotated-arc-position", m, "clear of all footprints");
    } else {
        cb.positive("rotated-arc-position", rot_nest.margin,
                    "inside footprint " + ell_name(*rot_nest.witness));
    }

    // position of the two new footprints (diameter alpha_j): ell in {j, -(j+1)}
    for (long ell : {static_cast<long>(j), static_cast<long>(-(j + 1))}) {
        ArcInterval foot = ell == j ? state.wbasint(j) : wneg_next;
        std::string id = "new-footprint-position(" + ell_name(ell) + ")";
        WitnessScan host = scan_center_container(state, state.star(ell), j - 1);
        if (host.status != Cert::yes) {
            cb.add(id, host.status, Rat(0), "containing footprint scan unresolved");
            continue;
        }
        if (!host.witness) {
            // isolated: disjoint from every earlier footprint
            Rat m(1);
            Cert status = Cert::yes;
            for (int ai = 0; ai <= j - 1 && status == Cert::yes; ++ai)
                for (long i : (ai == 0 ? std::vector<long>{0} : std::vector<long>{ai, -ai})) {
                    Rat sep(0);
                    Cert c = state.wbasint(i).disjoint(foot, &sep);
                    if (c != Cert::yes) {
                        status = c;
                        break;
                    }
                    m = std::min(m, sep);
                }
            cb.add(id, status, status == Cert::yes ? m : Rat(0), "isolated");
            continue;
        }
        long m = *host.witness;
        int am = static_cast<int>(std::abs(m));
        // disjoint from footprints of index >= |m| (except m)
        Rat sep_all(1);
        Cert status = Cert::yes;
        for (int ai = am; ai <= j - 1 && status == Cert::yes; ++ai)
            for (long i : (ai == 0 ? std::vector<long>{0} : std::vector<long>{ai, -ai})) {
                if (i == m) continue;
                Rat sep(0);
                Cert c = state.wbasint(i).disjoint(foot, &sep);
                if (c != Cert::yes) {
                    status = c;
                    break;
                }
                sep_all = std::min(sep_all, sep);
            }
        if (status != Cert::yes) {
            cb.add(id, status, Rat(0), "sibling separation unresolved");
            continue;
        }
        // cleanly inside one component of the host minus boundary and center
        ArcInterval host_arc = state.wbasint(m);
        Cert inside = host_arc.contains_arc_strict(foot);
        Rat d_center = foot.distance_lower(state.star(m));
        Angle inner_lo = state.star(m).plus(-state.level(am).alpha, state.precision_bits);
        Angle inner_hi = state.star(m).plus(state.level(am).alpha, state.precision_bits);
        Rat d_bd = std::min(foot.distance_lower(inner_lo), foot.distance_lower(inner_hi));
        Rat d_host = std::min(circle_gap(foot.start(), host_arc.start()).lo(),
                              circle_gap(foot.end(), host_arc.end()).lo());
        Rat margin = std::min(std::min(sep_all, d_center), std::min(d_bd, d_host));
        cb.add(id, inside == Cert::yes && margin > 0 ? Cert::yes : inside, margin,
               "inside footprint " + ell_name(m));
    }

    // anchors and the two containments that define the new boxes
    for (long ell : {static_cast<long>(j), static_cast<long>(-j)}) {
        const AnchorTriple& t = state.anchors(ell);
        std::string id = "anchor-values(" + ell_name(ell) + ")";
        if (t.prov.branch == Provenance::Branch::isolated) {
            // all footprints of Z_j (minus ell) must avoid this one, and the
            // anchors are exactly zero
            Rat m(1);
            Cert status = Cert::yes;
            for (int ai = 0; ai <= j && status == Cert::yes; ++ai)
                for (long i : (ai == 0 ? std::vector<long>{0} : std::vector<long>{ai, -ai})) {
                    if (i == ell) continue;
                    Rat sep(0);
                    Cert c = state.wbasint(i).disjoint(state.wbasint(ell), &sep);
                    if (c != Cert::yes) {
                        status = c;
                        break;
                    }
                    m = std::min(m, sep);
                }
            bool zero = t.a.is_point() && t.a.lo() == 0 && t.a_plus.is_point() &&
                        t.a_plus.lo() == 0 && t.a_minus.is_point() && t.a_minus.lo() == 0;
            cb.add(id, status == Cert::yes && zero ? Cert::yes : (zero ? status : Cert::no),
                   status == Cert::yes ? m : Rat(0), zero ? "isolated, zero anchors"
                                                          : "nonzero anchors in isolated branch");
        } else {
            long m = t.prov.witness_m;
            // stored anchors re-derive from the previous curve
            CurveValue ca = gamma_eval(state, j - 1, state.star(ell));
            CurveValue cp = gamma_eval(state, j - 1,
                                       state.star(ell).plus(cur.alpha, state.precision_bits));
            CurveValue cm = gamma_eval(state, j - 1,
                                       state.star(ell).plus(-cur.alpha, state.precision_bits));
            bool ok = t.a.overlaps(ca.value) && t.a_plus.overlaps(cp.value) &&
                      t.a_minus.overlaps(cm.value);
            CurveValue deep = gamma_eval(state, static_cast<int>(std::abs(m)), state.star(ell));
            ok = ok && t.a.overlaps(deep.value);
            cb.add(id, ok ? Cert::yes : Cert::no, Rat(1),
                   "witness footprint " + ell_name(m), true);
        }
        check_graph_in_box(state, j, ell, cb);

        // deeper two-sided nesting of the whole box, when a ball holds it
        std::string nid = "box-nesting(" + ell_name(ell) + ")";
        ArcNest inner = scan_inner_nest(state, state.wbasint(ell), j - 1);
        if (inner.status != Cert::yes) {
            cb.add(nid, inner.status, Rat(0), inner.detail);
        } else if (!inner.witness) {
            cb.add(nid, Cert::yes, Rat(1), "no containing ball", true);
        } else {
            long k = *inner.witness;
            const GenericBoxParams pk = state.box(k);
            Scalar zk = arc_local(state, pk, {ell, -cur.alpha, cur.alpha});
            WallRange w = box_wall_range_local(pk, clip(zk, -pk.alpha, pk.alpha),
                                               state.precision_bits);
            Rat half = pow2(-cur.n);
            Rat up = w.upper_min.lo() - (state.anchors(ell).a.hi() + half);
            Rat dn = (state.anchors(ell).a.lo() - half) - w.lower_max.hi();
            Rat margin = std::min(std::min(up, dn), inner.margin);
            cb.positive(nid, margin, "inside ball " + ell_name(k));
        }
    }
    (void)report;
}

}  // namespace

ConditionReport check_conditions(const ConstructionState& state, int j,
                                 const Rat& required_margin) {
    if (j < 0 || j > state.depth()) throw domain_error("check_conditions: level out of range");
    ConditionReport report;
    report.j = j;
    ClauseBuilder cb{&report};
    if (j == 0)
        check_level0(state, report, cb);
    else
        check_level_j(state, j, report, cb);
    if (required_margin > 0) {
        for (auto& c : report.clauses) {
            if (!c.identity && c.status == Cert::yes && c.margin <= required_margin) {
                c.status = Cert::undecided;
                c.witness = "margin below the required threshold";
            }
        }
    }
    return report;
}

// -------------------------------------------------------------- building ----

namespace {

AnchorTriple make_anchors(const ConstructionState& state, int j, long ell, const Rat& alpha,
                          bool* resolved) {
    AnchorTriple t;
    *resolved = true;
    if (j == 0) {
        t.a = t.a_plus = t.a_minus = Scalar(Rat(0));
        t.prov.branch = Provenance::Branch::isolated;
        return t;
    }
    // is the new footprint disjoint from every other constructed footprint?
    ArcInterval foot = ArcInterval::ball(state.star(ell), ell >= 0 ? alpha
                                                                   : state.level(j - 1).alpha,
                                         state.precision_bits);
    bool isolated = true;
    for (int ai = 0; ai <= j && isolated; ++ai) {
        for (long i : (ai == 0 ? std::vector<long>{0} : std::vector<long>{ai, -ai})) {
            if (i == ell) continue;
            Cert c = state.wbasint(i).disjoint(foot, nullptr);
            if (c == Cert::undecided) *resolved = false;
            if (c != Cert::yes) isolated = false;
        }
    }
    if (!*resolved) return t;
    if (isolated) {
        t.a = t.a_plus = t.a_minus = Scalar(Rat(0));
        t.prov.branch = Provenance::Branch::isolated;
        return t;
    }
    ArcNest nest = scan_arc_nest(state, foot, j - 1);
    if (nest.status != Cert::yes || !nest.witness) {
        *resolved = false;
        return t;
    }
    t.prov.branch = Provenance::Branch::nested;
    t.prov.witness_m = *nest.witness;
    CurveValue a = gamma_eval(state, j - 1, state.star(ell));
    CurveValue ap = gamma_eval(state, j - 1, state.star(ell).plus(alpha, state.precision_bits));
    CurveValue am = gamma_eval(state, j - 1, state.star(ell).plus(-alpha, state.precision_bits));
    t.a = a.value.compressed(state.precision_bits);
    t.a_plus = ap.value.compressed(state.precision_bits);
    t.a_minus = am.value.compressed(state.precision_bits);
    ArcNest inner = scan_inner_nest(state, foot, static_cast<int>(std::abs(*nest.witness)));
    if (inner.status == Cert::yes && inner.witness) {
        t.prov.has_nest_k = true;
        t.prov.nest_k = *inner.witness;
    }
    return t;
}

}  // namespace

ConstructionState init_level0(const BuildConfig& config) {
    ConstructionState state;
    state.precision_bits = config.precision_bits;
    state.orbit_horizon = config.orbit_horizon > 0 ? config.orbit_horizon : 4 * config.depth;
    // the conditions of level j reference orbit points up to j+2
    if (state.orbit_horizon < config.depth + 2) state.orbit_horizon = config.depth + 2;
    if (state.orbit_horizon < 4) state.orbit_horizon = 4;

    Rat alpha = Rat(15) * pow2(-5);  // seed below 2^-n0 = 1/2
    for (int h = 0; h <= config.max_halvings; ++h) {
        LevelSpec l0;
        l0.j = 0;
        l0.n = 1;
        l0.alpha = alpha;
        l0.delta = alpha / 2;
        l0.pos.a = l0.pos.a_plus = l0.pos.a_minus = Scalar(Rat(0));
        l0.neg = l0.pos;
        state.levels.assign(1, l0);
        ConditionReport rep = check_conditions(state, 0, config.required_margin);
        if (rep.all_true()) return state;
        alpha /= 2;
    }
    throw construction_error("level 0: halving budget exhausted");
}

void extend_level(ConstructionState& state, int j, const BuildConfig& config) {
    if (j != state.depth() + 1) throw domain_error("extend_level: levels must grow in order");
    const LevelSpec prev = state.level(j - 1);
    int n = std::max(prev.n + 1, j + 1);
    while (pow2(-n) >= prev.delta) ++n;

    std::string last_failure = "no attempt";
    for (int bump = 0; bump <= config.max_n_bumps; ++bump, ++n) {
        Rat alpha = Rat(15) * pow2(-(n + 4));
        for (int h = 0; h <= config.max_halvings; ++h, alpha /= 2) {
            LevelSpec cand;
            cand.j = j;
            cand.n = n;
            cand.alpha = alpha;
            cand.delta = alpha / 2;
            bool ok_pos = false, ok_neg = false;
            state.levels.push_back(cand);  // radii visible to the anchor scan
            state.levels.back().pos = make_anchors(state, j, j, alpha, &ok_pos);
            state.levels.back().neg = make_anchors(state, j, -j, alpha, &ok_neg);
            if (!ok_pos || !ok_neg) {
                state.levels.pop_back();
                last_failure = "anchor witnesses unresolved";
                continue;
            }
            ConditionReport rep = check_conditions(state, j, config.required_margin);
            if (rep.all_true()) return;
            state.levels.pop_back();
            const ConditionClause* fail = rep.first_failure();
            last_failure = fail ? fail->id + ": " + fail->witness : "unknown";
            if (fail && fail->id.rfind("box-nesting", 0) == 0 && fail->status != Cert::yes)
                break;  // vertical clearance: grow n
        }
    }
    throw construction_error("level " + std::to_string(j) +
                             ": search budget exhausted; first failing condition: " +
                             last_failure);
}

ConstructionState build_state(const BuildConfig& config) {
    ConstructionState state = init_level0(config);
    for (int j = 1; j <= config.depth; ++j) extend_level(state, j, config);
    return state;
}

// ---------------------------------------------------------------- extras ----

std::vector<CurveSample> pseudo_curve_sample(const ConstructionState& state, int j,
                                             int grid_size) {
    if (j < 0 || j > state.depth()) throw domain_error("pseudo_curve_sample: level out of range");
    std::vector<CurveSample> out;
    out.reserve(static_cast<size_t>(grid_size) + 2 * j + 1);
    for (int k = 0; k < grid_size; ++k) {
        Angle theta = Angle::reduce(Scalar(rat(k, grid_size)));
        CurveValue v = gamma_eval(state, j, theta);
        if (v.status == CurveValue::Status::excluded) continue;
        out.push_back({theta, v.value, 0, false});
    }
    for (long i = -j; i <= j; ++i) {
        const GenericBoxParams p = state.box(i);
        Scalar half(pow2(-p.n));
        out.push_back({state.star(i), Scalar::hull(p.a - half, p.a + half), i, true});
    }
    return out;
}

// ------------------------------------------------------------ persistence ----

namespace {

std::string dyadic_pow2_string(const Rat& q) {
    if (!is_dyadic(q)) throw domain_error("dyadic_pow2_string: not dyadic");
    mpz_class den = q.get_den();
    unsigned long e = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
    return q.get_num().get_str() + "/2^" + std::to_string(e);
}

json scalar_to_json(const Scalar& s) {
    return json{{"lo", dyadic_to_decimal(s.lo())}, {"hi", dyadic_to_decimal(s.hi())}};
}

Scalar scalar_from_json(const json& v) {
    auto parse = [](const std::string& text) {
        // exact decimal -> rational
        auto dot = text.find('.');
        if (dot == std::string::npos) return Rat(text, 10);
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        unsigned long places = text.size() - dot - 1;
        mpz_class den(10);
        mpz_pow_ui(den.get_mpz_t(), den.get_mpz_t(), places);
        Rat q = Rat(mpz_class(digits, 10)) / Rat(den);
        q.canonicalize();
        return q;
    };
    return Scalar(parse(v.at("lo").get<std::string>()), parse(v.at("hi").get<std::string>()));
}

json anchors_to_json(const AnchorTriple& t) {
    json prov{{"branch", t.prov.branch == Provenance::Branch::isolated ? "isolated" : "nested"},
              {"witness", t.prov.witness_m}};
    if (t.prov.has_nest_k) prov["nest_k"] = t.prov.nest_k;
    return json{{"a", scalar_to_json(t.a)},
                {"a_plus", scalar_to_json(t.a_plus)},
                {"a_minus", scalar_to_json(t.a_minus)},
                {"provenance", prov}};
}

AnchorTriple anchors_from_json(const json& v) {
    AnchorTriple t;
    t.a = scalar_from_json(v.at("a"));
    t.a_plus = scalar_from_json(v.at("a_plus"));
    t.a_minus = scalar_from_json(v.at("a_minus"));
    const json& prov = v.at("provenance");
    t.prov.branch = prov.at("branch").get<std::string>() == "isolated"
                        ? Provenance::Branch::isolated
                        : Provenance::Branch::nested;
    t.prov.witness_m = prov.at("witness").get<long>();
    if (prov.contains("nest_k")) {
        t.prov.has_nest_k = true;
        t.prov.nest_k = prov.at("nest_k").get<long>();
    }
    return t;
}

}  // namespace

void save_state(const ConstructionState& state, const std::string& path) {
    json doc;
    doc["format"] = "pcurve-state-1";
    doc["omega_tag"] = "golden";
    doc["J"] = state.depth();
    doc["L"] = state.orbit_horizon;
    doc["precision_bits"] = state.precision_bits;
    json levels = json::array();
    for (const LevelSpec& l : state.levels) {
        json lv{{"j", l.j},
                {"n", l.n},
                {"alpha", dyadic_pow2_string(l.alpha)},
                {"delta", dyadic_pow2_string(l.delta)},
                {"pos", anchors_to_json(l.pos)},
                {"neg", anchors_to_json(l.neg)}};
        levels.push_back(lv);
    }
    doc["levels"] = levels;
    std::ofstream out(path);
    if (!out) throw domain_error("save_state: cannot open " + path);
    out << doc.dump(2) << "\n";
}

ConstructionState load_state(const std::string& path, bool recertify) {
    std::ifstream in(path);
    if (!in) throw domain_error("load_state: cannot open " + path);
    json doc = json::parse(in);
    if (doc.at("format").get<std::string>() != "pcurve-state-1")
        throw domain_error("load_state: unknown format");
    if (doc.at("omega_tag").get<std::string>() != "golden")
        throw domain_error("load_state: unknown rotation-number tag");
    ConstructionState state;
    state.precision_bits = doc.at("precision_bits").get<unsigned>();
    state.orbit_horizon = doc.at("L").get<int>();
    for (const json& lv : doc.at("levels")) {
        LevelSpec l;
        l.j = lv.at("j").get<int>();
        l.n = lv.at("n").get<int>();
        l.alpha = rat_from_string(lv.at("alpha").get<std::string>());
        l.delta = rat_from_string(lv.at("delta").get<std::string>());
        l.pos = anchors_from_json(lv.at("pos"));
        l.neg = anchors_from_json(lv.at("neg"));
        state.levels.push_back(l);
    }
    if (static_cast<int>(state.levels.size()) != doc.at("J").get<int>() + 1)
        throw domain_error("load_state: level count mismatch");
    if (recertify) {
        for (int j = 0; j <= state.depth(); ++j) {
            ConditionReport rep = check_conditions(state, j);
            if (!rep.all_true()) {
                const ConditionClause* fail = rep.first_failure();
                throw construction_error("load_state: level " + std::to_string(j) +
                                         " fails recertification at " +
                                         (fail ? fail->id : "unknown clause"));
            }
        }
    }
    return state;
}

}  // namespace pcurve
