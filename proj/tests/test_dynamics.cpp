#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcurve/dynamics.hpp"

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

const Dynamics& dyn6() {
    static Dynamics d(state6());
    return d;
}

const Rat kEps = pow2(-10);

}  // namespace

TEST_CASE("kappa_tilde: unit at the delta edge, inside (0,1]") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    for (long i : {-1L, -2L, -3L}) {
        const Rat d = st.level(-i).delta;
        for (const Rat& off : {d, Rat(-d)}) {
            Scalar kt = dyn.kappa_tilde(i, st.star(i).plus(off, st.precision_bits));
            CHECK(kt.contains(Rat(1)));
            CHECK(kt.width() <= pow2(-40));
        }
        const Rat a = st.level(-i).alpha;
        for (int k = 1; k <= 6; ++k) {
            Rat z = d + (a - d) * k / 8;
            Scalar kt = dyn.kappa_tilde(i, st.star(i).plus(z, st.precision_bits));
            CHECK(kt.lo() > 0);
            CHECK(kt.hi() <= 1);
        }
        CHECK_THROWS_AS(dyn.kappa_tilde(i, st.star(i)), domain_error);
    }
    CHECK_THROWS_AS(dyn6().kappa_tilde(1, state6().star(1)), domain_error);
}

TEST_CASE("kappa: running infimum below kappa_tilde, matching at the edge") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    for (long i : {-1L, -2L}) {
        const Rat d = st.level(-i).delta;
        const Rat a = st.level(-i).alpha;
        Scalar edge = dyn.kappa(i, st.star(i).plus(d, st.precision_bits));
        CHECK(edge.hi() >= Rat(1) - pow2(-30));
        Rat prev_lo(2);
        for (int k = 1; k <= 7; ++k) {
            Rat z = d + (a - d) * k / 9;
            Angle theta = st.star(i).plus(z, st.precision_bits);
            Scalar kp = dyn.kappa(i, theta);
            Scalar kt = dyn.kappa_tilde(i, theta);
            CHECK(kp.lo() >= 0);
            CHECK(kp.lo() <= kt.hi());   // kappa <= kappa_tilde
            CHECK(kp.lo() <= prev_lo);   // non-increasing away from the center
            prev_lo = kp.hi();
        }
    }
}

TEST_CASE("box maps carry fiber endpoints onto the next fiber (central ball)") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    for (long i = -(st.depth() - 1); i <= st.depth() - 2; ++i) {
        const Rat d = i >= 0 ? st.level(i + 1).delta : st.level(-i).delta;
        for (int k = -3; k <= 3; ++k) {
            Rat z = d * k / 4;
            Angle theta = st.star(i).plus(z, st.precision_bits);
            FiberInterval fib = winged_bounds(st, i, theta);
            Angle rot = theta.rotated(1, st.precision_bits);
            FiberInterval next = box_boundary(st.box(i + 1), rot, st.precision_bits);
            CHECK(dyn.g_apply(i, theta, fib.lo).overlaps(next.hi));
            CHECK(dyn.g_apply(i, theta, fib.hi).overlaps(next.lo));
        }
    }
}

TEST_CASE("box maps conjugate the curve: g(gamma_i) = gamma_{i+1} after rotation") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    for (long i = -(st.depth() - 1); i <= st.depth() - 1; ++i) {
        const Rat rad = st.wbasint_radius(i);
        for (int k = -7; k <= 7; ++k) {
            if (k == 0) continue;
            Rat z = rad * k / 8;
            Angle theta = st.star(i).plus(z, st.precision_bits);
            Scalar gi = gamma_eval(st, static_cast<int>(std::abs(i)), theta).value;
            Scalar img = dyn.g_apply(i, theta, gi);
            Scalar target =
                gamma_eval(st, static_cast<int>(std::abs(i + 1)),
                           theta.rotated(1, st.precision_bits))
                    .value;
            CHECK(img.overlaps(target));
            CHECK(img.width() <= pow2(-40));
        }
    }
}

TEST_CASE("outer region of a nonnegative box map is constant") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    long i = 0;
    Rat a_next = st.level(1).alpha;
    Rat z = (a_next + st.level(0).alpha) / 2;  // outside the next-level ball
    Angle theta = st.star(0).plus(z, st.precision_bits);
    FiberInterval fib = winged_bounds(st, i, theta);
    Scalar v1 = dyn.g_apply(i, theta, fib.lo);
    Scalar v2 = dyn.g_apply(i, theta, (fib.lo + fib.hi) * Scalar(rat(1, 2)));
    Scalar v3 = dyn.g_apply(i, theta, fib.hi);
    CHECK(v1.overlaps(v2));
    CHECK(v2.overlaps(v3));
}

TEST_CASE("f0 off the stratum: two affine pieces through the limit curve") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    Angle far = Angle::reduce(Scalar(rat(1, 2)));
    REQUIRE(locate(st, dyn.table(), 0, far).kind == WingLocation::Kind::outside);
    MapValue at0 = dyn.fm(0, far, Scalar(Rat(0)), kEps);
    CurveValue lim = gamma_limit(st, far.rotated(1, st.precision_bits), kEps);
    CHECK(at0.value.overlaps(lim.value));
    CHECK(dyn.fm(0, far, Scalar(Rat(-2)), kEps).value.lo() == 2);
    CHECK(dyn.fm(0, far, Scalar(Rat(2)), kEps).value.lo() == -2);
    // halfway points interpolate
    MapValue mid = dyn.fm(0, far, Scalar(Rat(-1)), kEps);
    Scalar expect = (Scalar(Rat(2)) + lim.value) * Scalar(rat(1, 2));
    CHECK(mid.value.overlaps(expect));
}

TEST_CASE("f0 at a footprint boundary: two pieces through the limit curve") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    // dep-0 footprint boundaries carry a degenerate fiber at height 0
    Angle bd = st.star(-2).plus(st.wbasint_radius(-2), st.precision_bits);
    FiberInterval fib = winged_bounds(st, -2, bd);
    CHECK(fib.degenerate);
    CHECK(fib.lo.contains(Rat(0)));
    MapValue at0 = dyn.fm(0, bd, fib.lo, kEps);
    CurveValue lim = gamma_limit(st, bd.rotated(1, st.precision_bits), kEps);
    CHECK(at0.value.overlaps(lim.value));
}

TEST_CASE("fiber maps pin the corners exactly and are non-increasing") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    std::vector<Angle> thetas = {Angle::reduce(Scalar(rat(1, 3))),
                                 st.star(0).plus(rat(1, 64), st.precision_bits),
                                 st.star(4).plus(st.level(4).alpha / 5, st.precision_bits),
                                 st.star(-5).plus(st.level(5).delta / 2, st.precision_bits),
                                 st.star(-1).plus(st.level(1).alpha * 3, st.precision_bits)};
    for (const Angle& theta : thetas) {
        for (int m = 0; m <= 4; ++m) {
            FiberMapSpec spec = dyn.fiber_map(m, theta, kEps);
            REQUIRE(spec.knots.size() >= 2);
            CHECK(spec.knots.size() <= static_cast<size_t>(3 + 2 * (m + 1)));
            CHECK(spec.knots.front().x.lo() == -2);
            CHECK(spec.knots.front().y.lo() == 2);
            CHECK(spec.knots.front().y.is_point());
            CHECK(spec.knots.back().x.lo() == 2);
            CHECK(spec.knots.back().y.lo() == -2);
            CHECK(spec.knots.back().y.is_point());
            for (size_t k = 0; k + 1 < spec.knots.size(); ++k)
                CHECK(spec.knots[k + 1].y.lo() <= spec.knots[k].y.hi());
            // spec evaluation agrees with the direct evaluator
            for (const Rat& x : {rat(-3, 2), rat(1, 5), rat(7, 4)}) {
                Scalar via_spec = fiber_eval(spec, Scalar(x));
                Scalar direct = dyn.fm(m, theta, Scalar(x), kEps).value;
                CHECK(via_spec.overlaps(direct));
            }
        }
    }
}

TEST_CASE("away from the deeper strata the maps coincide") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    Angle theta = st.star(2).plus(st.level(2).delta / 3, st.precision_bits);
    REQUIRE(locate(st, dyn.table(), 1, theta).kind == WingLocation::Kind::outside);
    FiberMapSpec f0 = dyn.fiber_map(0, theta, kEps);
    FiberMapSpec f1 = dyn.fiber_map(1, theta, kEps);
    REQUIRE(f0.knots.size() == f1.knots.size());
    for (size_t k = 0; k < f0.knots.size(); ++k) {
        CHECK(f0.knots[k].y.overlaps(f1.knots[k].y));
    }
}

TEST_CASE("center fibers are settled at their own stratum") {
    const Dynamics& dyn = dyn6();
    // 2 has depth 0; its fiber map never changes afterwards
    Angle c = state6().star(2);
    for (int m = 1; m <= 3; ++m) {
        FiberMapSpec fm_spec = dyn.fiber_map(m, c, kEps);
        for (const Knot& kn : fm_spec.knots) {
            Scalar a = dyn.fm(0, c, kn.x, kEps).value;
            Scalar b = dyn.fm(m, c, kn.x, kEps).value;
            CHECK(a.overlaps(b));
        }
    }
}

TEST_CASE("boundary circles swap under every map") {
    const Dynamics& dyn = dyn6();

    for (const Rat& t : {rat(1, 7), rat(2, 9), rat(13, 17)}) {
        Angle theta = Angle::reduce(Scalar(t));
        for (int m = 0; m <= 4; ++m) {
            auto [rot, up] = dyn.apply_T(m, theta, Scalar(Rat(2)), kEps);
            CHECK(up.value.is_point());
            CHECK(up.value.lo() == -2);
            auto [rot2, dn] = dyn.apply_T(m, theta, Scalar(Rat(-2)), kEps);
            CHECK(dn.value.lo() == 2);
            CHECK(circle_gap(rot, theta.rotated(1)).lo() == 0);
        }
    }
}

TEST_CASE("T agrees with the box map on winged-box points") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    // box 4 has depth 1: T_1 restricted to its winged box is G_4
    Angle theta = st.star(4).plus(st.level(4).delta / 2, st.precision_bits);
    FiberInterval fib = winged_bounds(st, 4, theta);
    Scalar x = (fib.lo + fib.hi) * Scalar(rat(1, 2));
    auto [rot, img] = dyn.apply_T(1, theta, x, kEps);
    Scalar direct = dyn.g_apply(4, theta, x);
    CHECK(img.value.overlaps(direct));
}

TEST_CASE("f_limit: exact boundary values and tail bookkeeping") {
    const Dynamics& dyn = dyn6();
    Angle theta = Angle::reduce(Scalar(rat(3, 11)));
    MapValue top = dyn.f_limit(theta, Scalar(Rat(2)), pow2(-10));
    CHECK(top.value.is_point());
    CHECK(top.value.lo() == -2);
    CHECK(top.status == MapValue::Status::certified);

    // the deepest constructed stratum caps the certifiable tail
    int mmax = dyn.table().max_depth();
    Rat coarse = dyn.tail_after(0);
    MapValue v_coarse = dyn.f_limit(theta, Scalar(Rat(0)), coarse);
    CHECK(v_coarse.status == MapValue::Status::certified);
    MapValue v_fine = dyn.f_limit(theta, Scalar(Rat(0)), pow2(-10));
    CHECK(v_fine.status == MapValue::Status::horizon_limited);
    CHECK(v_fine.value.width() >= 2 * dyn.tail_after(mmax));
    // limit enclosures at ordered points overlap or decrease
    MapValue a = dyn.f_limit(theta, Scalar(rat(-1, 2)), pow2(-4));
    MapValue b = dyn.f_limit(theta, Scalar(rat(1, 2)), pow2(-4));
    CHECK(b.value.lo() <= a.value.hi());
}

TEST_CASE("consecutive maps stay within the shallow-box bound on deep footprints") {
    const ConstructionState& st = state6();
    const Dynamics& dyn = dyn6();
    const DepthTable& t = dyn.table();
    REQUIRE(t.max_depth() >= 1);
    for (long i : t.strata[1]) {
        const Rat rad = st.wbasint_radius(i);
        for (int k = -5; k <= 5; ++k) {
            if (k == 0) continue;
            Rat z = rad * k / 6;
            Angle theta = st.star(i).plus(z, st.precision_bits);
            WingLocation host = locate(st, t, 0, theta);
            REQUIRE(host.kind != WingLocation::Kind::outside);
            Rat bound = Rat(2) * pow2(-static_cast<long>(std::abs(host.b))) + pow2(-40);
            FiberMapSpec fa = dyn.fiber_map(1, theta, kEps);
            FiberMapSpec fb = dyn.fiber_map(0, theta, kEps);
            Rat sup(0);
            auto feed = [&](const Scalar& x) {
                Scalar d =
                    (dyn.fm(1, theta, x, kEps).value - dyn.fm(0, theta, x, kEps).value).abs();
                sup = std::max(sup, d.hi());
            };
            for (const Knot& kn : fa.knots) feed(kn.x);
            for (const Knot& kn : fb.knots) feed(kn.x);
            CHECK(sup <= bound);
        }
    }
}
