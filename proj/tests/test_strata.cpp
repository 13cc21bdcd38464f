#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcurve/strata.hpp"

using namespace pcurve;

namespace {

const ConstructionState& state6() {
    static ConstructionState st = [] {
        BuildConfig cfg;
        cfg.depth = 6;
        return build_state(cfg);
    }();
    return st;
}

const DepthTable& table6() {
    static DepthTable t = build_depth_table(state6());
    return t;
}

// brute-force containment oracle on the footprint data: centers from the
// rotation enclosure, radii from the level table, checked with midpoint
// arithmetic at width far below every separation in the family
int oracle_depth(const ConstructionState& st, long ell) {
    auto center = [&](long i) { return st.star(i).rep().mid(); };
    auto radius = [&](long i) { return st.wbasint_radius(i); };
    int d = 0;
    for (long i = -st.depth(); i <= st.depth(); ++i) {
        if (i == ell || std::abs(i) >= std::abs(ell)) continue;
        Rat gap = center(ell) - center(i);
        Rat f = rat_floor(gap);
        gap -= f;
        if (gap > rat(1, 2)) gap = 1 - gap;
        if (gap + radius(ell) < radius(i)) ++d;
    }
    return d;
}

}  // namespace

TEST_CASE("depth table against the brute-force oracle") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    for (long ell = -st.depth(); ell <= st.depth(); ++ell) {
        CHECK(depth(st, t, ell) == oracle_depth(st, ell));
    }
    CHECK(depth(st, t, 0) == 0);
    CHECK(depth(st, t, 1) == 0);
    CHECK(depth(st, t, -1) == 0);
}

TEST_CASE("strata are disjoint and mu is strictly increasing") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    REQUIRE(t.max_depth() >= 1);  // the desk-scale family nests
    for (int m = 0; m <= t.max_depth(); ++m) {
        auto cls = depth_class(t, m);
        REQUIRE(cls.has_value());
        std::vector<ArcInterval> arcs;
        for (long i : *cls) arcs.push_back(st.wbasint(i));
        CHECK(certified_disjoint(arcs).status == Cert::yes);
        if (m > 0) CHECK(*mu(t, m) > *mu(t, m - 1));
    }
    CHECK(*mu(t, 0) == 0);
    CHECK(!depth_class(t, t.max_depth() + 1).has_value());
    CHECK(!mu(t, t.max_depth() + 1).has_value());
}

TEST_CASE("locate: centers, wings, outside") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    // centers sit in their own stratum footprint
    for (long i = -st.depth(); i <= st.depth(); ++i) {
        int m = depth(st, t, i);
        WingLocation loc = locate(st, t, m, st.star(i));
        CHECK(loc.kind == WingLocation::Kind::in_IB);
        CHECK(loc.b == i);
    }
    // a far point is outside stratum 0
    CHECK(locate(st, t, 0, Angle::reduce(Scalar(rat(1, 2)))).kind ==
          WingLocation::Kind::outside);
}

TEST_CASE("wing of box -1 carries the deep box of index 4") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    REQUIRE(depth(st, t, 4) == 1);
    // a point inside the inner ball of box 4 sits in the wing of box -1
    // and resolves its least essential depth there
    Angle theta = st.star(4).plus(st.level(4).alpha / 3, st.precision_bits);
    WingLocation loc = locate(st, t, 0, theta);
    CHECK(loc.kind == WingLocation::Kind::in_wing_interior);
    CHECK(loc.b == -1);
    CHECK(loc.led == 1);
    CHECK(loc.deep == 4);
    // the witness chain has strictly increasing indices
    CHECK(std::abs(loc.b) < std::abs(loc.deep));

    WingInterval w = wing_bounds(st, t, 0, theta);
    CHECK(!w.degenerate);
    FiberInterval deep = winged_bounds(st, 4, theta);
    CHECK(w.lo.overlaps(deep.lo));
    CHECK(w.hi.overlaps(deep.hi));
    // the deep fiber contains the shallow wing value
    Scalar shallow = gamma_eval(st, 1, theta).value;
    CHECK(shallow.hi() >= w.lo.lo());
    CHECK(shallow.lo() <= w.hi.hi());
}

TEST_CASE("flat wing points get the degenerate curve value") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    // just outside the inner ball of box -1, away from boxes 4 and -6
    Rat z = st.level(1).alpha * 5;  // inside the wing, outside deeper footprints
    Angle theta = st.star(-1).plus(z, st.precision_bits);
    WingLocation loc = locate(st, t, 0, theta);
    REQUIRE(loc.kind == WingLocation::Kind::in_wing_flat);
    WingInterval w = wing_bounds(st, t, 0, theta);
    CHECK(w.degenerate);
    CHECK(w.lo.overlaps(gamma_eval(st, 1, theta).value));
}

TEST_CASE("deep inner-ball boundary degenerates to the shallow value") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    Angle bd = st.star(4).plus(st.level(4).alpha, st.precision_bits);
    WingLocation loc = locate(st, t, 0, bd);
    CHECK(loc.kind == WingLocation::Kind::in_wing_flat);
    WingInterval w = wing_bounds(st, t, 0, bd);
    CHECK(w.degenerate);
    // lambda = tau = both curve levels
    CHECK(w.lo.overlaps(gamma_eval(st, 1, bd).value));
    CHECK(w.lo.overlaps(gamma_eval(st, 4, bd).value));
}

TEST_CASE("stratum footprints nest downward and avoid deeper centers") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    for (int m = 0; m + 1 <= t.max_depth(); ++m) {
        for (long deep_i : t.strata[static_cast<size_t>(m + 1)]) {
            // each deeper footprint lies inside some stratum-m footprint
            bool hosted = false;
            for (long i : t.strata[static_cast<size_t>(m)])
                if (st.wbasint(i).contains_arc(st.wbasint(deep_i)) == Cert::yes) hosted = true;
            CHECK(hosted);
        }
        for (long i : t.strata[static_cast<size_t>(m)]) {
            // stratum-m centers avoid every deeper footprint
            for (long deep_i : t.strata[static_cast<size_t>(m + 1)])
                CHECK(st.wbasint(deep_i).contains(st.star(i)) == Cert::no);
        }
    }
}

TEST_CASE("wing interval stability across strata on a shared component") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    // the wings of box -6 (stratum 1) sit inside a wing component of box -1
    // (stratum 0); on them the stratum-0 and stratum-1 wing intervals agree
    REQUIRE(depth(st, t, -6) == 1);
    Rat a6 = st.level(6).alpha;
    Rat rad6 = st.wbasint_radius(-6);
    for (int k = 1; k <= 6; ++k) {
        Rat z = a6 + (rad6 - a6) * k / 8;
        Angle theta = st.star(-6).plus(z, st.precision_bits);
        WingLocation l1 = locate(st, t, 1, theta);
        if (l1.kind != WingLocation::Kind::in_wing_flat) continue;
        WingInterval w1 = wing_bounds(st, t, 1, theta);
        WingInterval w0 = wing_bounds(st, t, 0, theta);
        CHECK(w0.lo.overlaps(w1.lo));
        CHECK(w0.hi.overlaps(w1.hi));
    }
}

TEST_CASE("wing profile jumps shrink under grid refinement") {
    const ConstructionState& st = state6();
    const DepthTable& t = table6();
    // one connected wing component of box -1 (the side carrying box 4)
    Rat lo = st.level(1).alpha, hi = st.wbasint_radius(-1);
    bool right_side = st.wbasint(-1).contains(st.star(4)) == Cert::yes &&
                      box_local(st.box(-1), st.star(4)).mid() > 0;
    auto lambda_at = [&](const Rat& z) {
        Angle theta = st.star(-1).plus(right_side ? z : -z, st.precision_bits);
        return wing_bounds(st, t, 0, theta).lo;
    };
    Rat prev_jump(-1);
    for (int levelk = 4; levelk <= 7; ++levelk) {
        int n = 1 << levelk;
        Rat jump(0);
        Scalar last = lambda_at(lo + (hi - lo) / (2 * n));
        for (int k = 1; k < n; ++k) {
            Scalar cur = lambda_at(lo + (hi - lo) * (2 * k + 1) / (2 * n));
            Rat d = (cur - last).abs().hi();
            jump = std::max(jump, d);
            last = cur;
        }
        if (prev_jump >= 0) CHECK(jump <= prev_jump + pow2(-30));
        prev_jump = jump;
    }
}
