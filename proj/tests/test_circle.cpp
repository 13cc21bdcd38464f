#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcurve/circle.hpp"

using namespace pcurve;

namespace {

Angle exact_angle(const Rat& r) { return Angle::reduce(Scalar(r)); }

// independent Fibonacci oracle
Rat fib_convergent(int k) {
    // returns F(k)/F(k+1)
    mpz_class a(1), b(1);
    for (int i = 2; i <= k; ++i) {
        mpz_class c = a + b;
        a = b;
        b = c;
    }
    Rat q = Rat(a) / Rat(b);
    q.canonicalize();
    return q;
}

}  // namespace

TEST_CASE("omega: containment forced by definition") {
    Scalar w = omega(2);
    CHECK(w.width() <= rat(1, 4));
    // 0.618... is between 0.61 and 0.62
    CHECK(w.lo() <= rat(62, 100));
    CHECK(w.hi() >= rat(61, 100));
}

TEST_CASE("omega at 60 bits against the convergent oracle") {
    Scalar w = omega(60);
    CHECK(w.width() <= pow2(-60));
    // oracle: consecutive convergents bracket omega
    Rat c40 = fib_convergent(40), c41 = fib_convergent(41);
    CHECK(w.lo() >= std::min(c40, c41));
    CHECK(w.hi() <= std::max(c40, c41));
    // decimal reference 0.6180339887498948
    CHECK(w.lo() <= Rat("6180339887498949") / Rat("10000000000000000"));
    CHECK(w.hi() >= Rat("6180339887498948") / Rat("10000000000000000"));
}

TEST_CASE("omega: nested refinement contract") {
    CHECK(omega(10).contains(omega(20)));
    CHECK(omega(20).contains(omega(60)));
}

TEST_CASE("orbit_point basics") {
    Angle zero = orbit_point(0, rat(1, 1000));
    CHECK(zero.rep().is_point());
    CHECK(zero.rep().lo() == 0);

    Angle one = orbit_point(1, pow2(-40));
    CHECK(one.width() <= pow2(-40));
    CHECK(omega(40).overlaps(one.rep()));

    Angle neg = orbit_point(-1, pow2(-40));
    // 1 - omega = 0.3819660113...
    CHECK(neg.rep().lo() <= Rat("3819660114") / Rat("10000000000"));
    CHECK(neg.rep().hi() >= Rat("3819660112") / Rat("10000000000"));
}

TEST_CASE("orbit points advance by rotation") {
    for (long ell = -12; ell <= 12; ++ell) {
        Angle a = orbit_point_bits(ell, 80);
        Angle b = orbit_point_bits(ell + 1, 80);
        Angle r = a.rotated(1, 80);
        CHECK(circle_gap(r, b).lo() == 0);
        CHECK(r.base() == b.base());
    }
}

TEST_CASE("orbit injectivity at desk scale") {
    const long horizon = 24;
    for (long i = -horizon; i <= horizon; ++i) {
        for (long j = i + 1; j <= horizon; ++j) {
            Angle a = orbit_point_bits(i, 90);
            Angle b = orbit_point_bits(j, 90);
            CHECK(circle_gap(a, b).lo() > 0);
        }
    }
}

TEST_CASE("arc_distance case split") {
    Angle a = exact_angle(rat(2, 10));
    Angle b = exact_angle(rat(5, 10));
    CHECK(arc_distance(a, b).contains(rat(3, 10)));
    CHECK(arc_distance(a, b).width() == 0);

    Angle c = exact_angle(rat(8, 10));
    Angle d = exact_angle(rat(1, 10));
    CHECK(arc_distance(c, d).contains(rat(3, 10)));

    CHECK(arc_distance(a, a).lo() == 0);
    CHECK(arc_distance(a, a).hi() == 0);

    // overlapping non-identical enclosures: branch undecidable
    Angle u = Angle::reduce(Scalar(rat(1, 10), rat(2, 10)));
    Angle v = Angle::reduce(Scalar(rat(15, 100), rat(25, 100)));
    CHECK_THROWS_AS(arc_distance(u, v), precision_error);
}

TEST_CASE("circle_gap symmetric separation") {
    Angle a = exact_angle(rat(95, 100));
    Angle b = exact_angle(rat(5, 100));
    Scalar g = circle_gap(a, b);
    CHECK(g.contains(rat(1, 10)));
    CHECK(g.width() == 0);
    CHECK(circle_gap(b, a).contains(rat(1, 10)));
}

TEST_CASE("balls and arcs") {
    Angle zero = exact_angle(Rat(0));
    ArcInterval b = ArcInterval::ball(zero, rat(1, 4));
    CHECK(b.length().contains(rat(1, 2)));
    CHECK(b.contains(exact_angle(rat(1, 8))) == Cert::yes);
    CHECK(b.contains(exact_angle(rat(7, 8))) == Cert::yes);  // wraps through 0
    CHECK(b.contains(exact_angle(rat(1, 2))) == Cert::no);
    CHECK(b.contains(exact_angle(rat(1, 4))) == Cert::yes);           // closed endpoint
    CHECK(b.contains_interior(exact_angle(rat(1, 4))) == Cert::no);   // open endpoint

    ArcInterval a = ArcInterval::arc(exact_angle(rat(9, 10)), exact_angle(rat(1, 10)));
    CHECK(a.length().contains(rat(2, 10)));

    ArcInterval degenerate = ArcInterval::ball(exact_angle(rat(1, 3)), Rat(0));
    CHECK(degenerate.length().hi() == 0);
    CHECK(degenerate.contains(exact_angle(rat(1, 3))) == Cert::yes);

    CHECK(ArcInterval::ball(zero, rat(1, 8)).contains_arc(ArcInterval::ball(zero, rat(1, 16))) ==
          Cert::yes);
    CHECK(ArcInterval::ball(zero, rat(1, 16)).contains_arc(ArcInterval::ball(zero, rat(1, 8))) ==
          Cert::no);
}

TEST_CASE("certified_disjoint") {
    auto arc01 = ArcInterval::arc(exact_angle(Rat(0)), exact_angle(rat(1, 10)));
    auto arc23 = ArcInterval::arc(exact_angle(rat(2, 10)), exact_angle(rat(3, 10)));
    auto res = certified_disjoint({arc01, arc23});
    CHECK(res.status == Cert::yes);
    CHECK(res.margin == rat(1, 10));

    auto overlap = ArcInterval::arc(exact_angle(rat(1, 20)), exact_angle(rat(3, 10)));
    CHECK(certified_disjoint({arc01, overlap}).status == Cert::no);

    // gap smaller than endpoint enclosure widths: undecided
    Angle fuzzy1 = Angle::reduce(Scalar(Rat(0), rat(1, 100)));
    Angle fuzzy2 = Angle::reduce(Scalar(rat(1, 200), rat(2, 100)));
    auto u = certified_disjoint(
        {ArcInterval::ball(fuzzy1, Rat(0)), ArcInterval::ball(fuzzy2, Rat(0))});
    CHECK(u.status == Cert::undecided);
}

TEST_CASE("cyl_distance") {
    CylPoint p{exact_angle(Rat(0)), Scalar(Rat(0))};
    CylPoint q{exact_angle(Rat(0)), Scalar(Rat(1))};
    CHECK(cyl_distance(p, q).contains(Rat(1)));

    CylPoint r{exact_angle(rat(1, 10)), Scalar(Rat(0))};
    CylPoint s{exact_angle(rat(4, 10)), Scalar(rat(1, 10))};
    CHECK(cyl_distance(r, s).contains(rat(3, 10)));

    CHECK(cyl_distance(p, p).hi() == 0);
    CylPoint bad{exact_angle(Rat(0)), Scalar(Rat(3))};
    CHECK_THROWS_AS(cyl_distance(p, bad), domain_error);
}

TEST_CASE("angle tags survive arithmetic") {
    Angle a = orbit_point_bits(5, 80);
    Angle b = a.plus(rat(1, 64), 80);
    CHECK(b.has_tag());
    CHECK(b.base() == 5);
    CHECK(b.offset() == rat(1, 64));
    Angle c = b.rotated(3, 80);
    CHECK(c.base() == 8);
    CHECK(c.offset() == rat(1, 64));
    CHECK(b.same_point_tag(a.plus(rat(1, 64), 80)));
    CHECK(!b.same_point_tag(a));
}
