#include "pcurve/circle.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace pcurve {

namespace {

// Consecutive Fibonacci convergents F(k)/F(k+1) bracket the golden-mean
// conjugate; the brackets are nested and shrink by 1/(F(k+1)F(k+2)).
Scalar golden_enclosure(unsigned bits) {
    mpz_class fa(1), fb(1), fc(2);  // F(1), F(2), F(3)
    Rat target = pow2(-static_cast<long>(bits));
    while (Rat(1) / Rat(fb * fc) > target) {
        mpz_class fd = fb + fc;
        fa = fb;
        fb = fc;
        fc = fd;
    }
    Rat c1 = Rat(fa) / Rat(fb);
    Rat c2 = Rat(fb) / Rat(fc);
    c1.canonicalize();
    c2.canonicalize();
    return Scalar(std::min(c1, c2), std::max(c1, c2));
}

const Scalar& cached_omega(unsigned bits) {
    static std::mutex mu;
    static std::map<unsigned, Scalar> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bits);
    if (it == cache.end()) it = cache.emplace(bits, golden_enclosure(bits)).first;
    return it->second;
}

unsigned bits_for_index(long ell, unsigned precision_bits) {
    unsigned extra = 2;
    unsigned long a = static_cast<unsigned long>(ell < 0 ? -ell : ell) + 1;
    while (a > 0) {
        ++extra;
        a >>= 1;
    }
    return precision_bits + extra;
}

const Scalar& cached_orbit_rep(long ell, unsigned precision_bits) {
    static std::mutex mu;
    static std::map<std::pair<long, unsigned>, Scalar> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(ell, precision_bits);
    auto it = cache.find(key);
    if (it == cache.end()) {
        Scalar v = ell == 0 ? Scalar(Rat(0))
                            : Scalar(Rat(ell)) * cached_omega(bits_for_index(ell, precision_bits));
        Rat f = rat_floor(v.lo());
        Scalar rep(v.lo() - f, v.hi() - f);
        it = cache.emplace(key, rep).first;
    }
    return it->second;
}

// Canonical-representative segments of an angle enclosure: the set
// {x mod 1 : x in rep} as one or two real intervals inside [0,1].
std::vector<Scalar> canonical_segments(const Angle& a) {
    const Scalar& r = a.rep();
    if (r.hi() < 1) return {r};
    return {Scalar(r.lo(), Rat(1)), Scalar(Rat(0), r.hi() - 1)};
}

Rat interval_min_dist(const Scalar& x, const Scalar& y) {
    Rat d = std::max(x.lo() - y.hi(), y.lo() - x.hi());
    return std::max(d, Rat(0));
}

Rat interval_max_dist(const Scalar& x, const Scalar& y) {
    return std::max(x.hi() - y.lo(), y.hi() - x.lo());
}

}  // namespace

Scalar omega(unsigned precision_bits) { return cached_omega(precision_bits); }

Angle Angle::reduce(const Scalar& s) {
    if (s.width() >= rat(1, 2)) throw precision_error("Angle: enclosure width >= 1/2");
    Rat f = rat_floor(s.lo());
    Angle a;
    a.rep_ = Scalar(s.lo() - f, s.hi() - f);
    return a;
}

Angle Angle::orbit(long ell, unsigned precision_bits) {
    Angle a;
    a.rep_ = cached_orbit_rep(ell, precision_bits);
    a.base_ = ell;
    a.offset_ = 0;
    return a;
}

Angle Angle::plus(const Rat& d, unsigned precision_bits) const {
    if (base_) {
        Angle a = Angle::reduce(cached_orbit_rep(*base_, precision_bits) + Scalar(offset_ + d));
        a.base_ = base_;
        a.offset_ = offset_ + d;
        return a;
    }
    return Angle::reduce(rep_ + Scalar(d));
}

Angle Angle::plus_interval(const Scalar& d) const { return Angle::reduce(rep_ + d); }

Angle Angle::rotated(long steps, unsigned precision_bits) const {
    if (base_) {
        Angle a = Angle::reduce(cached_orbit_rep(*base_ + steps, precision_bits) + Scalar(offset_));
        a.base_ = *base_ + steps;
        a.offset_ = offset_;
        return a;
    }
    return Angle::reduce(rep_ + Scalar(Rat(steps)) * cached_omega(bits_for_index(steps, kDefaultPrecision)));
}

bool Angle::same_point_tag(const Angle& o) const {
    if (base_ && o.base_) return *base_ == *o.base_ && offset_ == o.offset_;
    if (!base_ && !o.base_) return rep_.is_point() && o.rep_.is_point() && rep_.lo() == o.rep_.lo();
    return false;
}

Angle orbit_point(long ell, const Rat& max_width) {
    if (max_width <= 0) throw domain_error("orbit_point: max_width must be positive");
    unsigned bits = 2;
    while (pow2(-static_cast<long>(bits)) > max_width / 2) ++bits;
    return Angle::orbit(ell, bits);
}

Angle orbit_point_bits(long ell, unsigned precision_bits) {
    return Angle::orbit(ell, precision_bits);
}

Scalar arc_distance(const Angle& a, const Angle& b) {
    if (a.same_point_tag(b)) return Scalar(Rat(0));
    bool first = true;
    Scalar out(Rat(0));
    for (const Scalar& sa : canonical_segments(a)) {
        for (const Scalar& sb : canonical_segments(b)) {
            Scalar d(Rat(0));
            if (sa.hi() <= sb.lo()) {
                d = sb - sa;
            } else if (sb.hi() < sa.lo()) {
                d = sb + Scalar(Rat(1)) - sa;
            } else {
                throw precision_error("arc_distance: case split undecidable at this precision");
            }
            Rat lo = std::max(d.lo(), Rat(0));
            Rat hi = std::min(d.hi(), Rat(1));
            d = Scalar(lo, std::max(lo, hi));
            out = first ? d : Scalar::hull(out, d);
            first = false;
        }
    }
    return out;
}

Scalar circle_gap(const Angle& a, const Angle& b) {
    if (a.same_point_tag(b)) return Scalar(Rat(0));
    if (a.has_tag() && b.has_tag() && a.base() == b.base()) {
        // same orbit point, exact offsets: the enclosure of the center cancels
        Rat d = a.offset() - b.offset();
        if (d < 0) d = -d;
        Rat f = rat_floor(d);
        d -= f;               // d in [0,1)
        if (d > rat(1, 2)) d = 1 - d;
        return Scalar(d);
    }
    const Scalar& A = a.rep();
    const Scalar& B = b.rep();
    Rat lower, upper;
    bool first = true;
    for (long k = -1; k <= 1; ++k) {
        Scalar Bk = B + Scalar(Rat(k));
        Rat lo = interval_min_dist(A, Bk);
        Rat hi = interval_max_dist(A, Bk);
        if (first) {
            lower = lo;
            upper = hi;
            first = false;
        } else {
            lower = std::min(lower, lo);
            upper = std::min(upper, hi);
        }
    }
    upper = std::min(upper, rat(1, 2));
    lower = std::min(lower, upper);
    return Scalar(lower, upper);
}

ArcInterval ArcInterval::arc(const Angle& start, const Angle& end) {
    ArcInterval a;
    a.start_ = start;
    a.end_ = end;
    a.length_ = start.same_point_tag(end) ? Scalar(Rat(0)) : arc_distance(start, end);
    return a;
}

ArcInterval ArcInterval::ball(const Angle& center, const Rat& radius, unsigned precision_bits) {
    if (radius < 0 || radius >= rat(1, 2)) throw domain_error("ball: radius must be in [0, 1/2)");
    ArcInterval a;
    a.center_ = center;
    a.radius_ = radius;
    a.start_ = center.plus(-radius, precision_bits);
    a.end_ = center.plus(radius, precision_bits);
    a.length_ = Scalar(radius * 2);
    return a;
}

Cert ArcInterval::contains(const Angle& t) const {
    if (radius_) {
        Scalar g = circle_gap(center_, t);
        if (g.hi() <= *radius_) return Cert::yes;
        if (g.lo() > *radius_) return Cert::no;
        return Cert::undecided;
    }
    Scalar d = t.rep() - start_.rep();
    Rat f = rat_floor(d.lo());
    Scalar u(d.lo() - f, d.hi() - f);
    if (u.hi() < 1) {
        if (u.hi() <= length_.lo()) return Cert::yes;
        if (u.lo() > length_.hi()) return Cert::no;
        return Cert::undecided;
    }
    return Cert::undecided;
}

Cert ArcInterval::contains_interior(const Angle& t) const {
    if (radius_) {
        Scalar g = circle_gap(center_, t);
        if (g.hi() < *radius_) return Cert::yes;
        if (g.lo() >= *radius_) return Cert::no;
        return Cert::undecided;
    }
    Scalar d = t.rep() - start_.rep();
    Rat f = rat_floor(d.lo());
    Scalar u(d.lo() - f, d.hi() - f);
    if (u.hi() < 1) {
        if (u.hi() < length_.lo() && u.lo() > 0) return Cert::yes;
        if (u.lo() > length_.hi() || u.hi() < 0) return Cert::no;
        return Cert::undecided;
    }
    return Cert::undecided;
}

Cert ArcInterval::contains_arc(const ArcInterval& other) const {
    if (radius_ && other.radius_) {
        Scalar g = circle_gap(center_, other.center_);
        if (g.hi() + *other.radius_ <= *radius_) return Cert::yes;
        if (g.lo() + *other.radius_ > *radius_) return Cert::no;
        return Cert::undecided;
    }
    Scalar d = other.start_.rep() - start_.rep();
    Rat f = rat_floor(d.lo());
    Scalar u(d.lo() - f, d.hi() - f);
    if (u.hi() >= 1) return Cert::undecided;
    if (u.hi() + other.length_.hi() <= length_.lo()) return Cert::yes;
    if (u.lo() > length_.hi() || u.lo() + other.length_.lo() > length_.hi()) return Cert::no;
    return Cert::undecided;
}

Cert ArcInterval::contains_arc_strict(const ArcInterval& other) const {
    if (radius_ && other.radius_) {
        Scalar g = circle_gap(center_, other.center_);
        if (g.hi() + *other.radius_ < *radius_) return Cert::yes;
        if (g.lo() + *other.radius_ >= *radius_) return Cert::no;
        return Cert::undecided;
    }
    Scalar d = other.start_.rep() - start_.rep();
    Rat f = rat_floor(d.lo());
    Scalar u(d.lo() - f, d.hi() - f);
    if (u.hi() >= 1) return Cert::undecided;
    if (u.lo() > 0 && u.hi() + other.length_.hi() < length_.lo()) return Cert::yes;
    if (u.lo() > length_.hi() || u.lo() + other.length_.lo() >= length_.hi()) return Cert::no;
    return Cert::undecided;
}

Cert ArcInterval::disjoint(const ArcInterval& other, Rat* margin) const {
    if (radius_ && other.radius_) {
        Scalar g = circle_gap(center_, other.center_);
        Rat sum = *radius_ + *other.radius_;
        if (g.lo() > sum) {
            if (margin) *margin = g.lo() - sum;
            return Cert::yes;
        }
        if (g.hi() < sum) return Cert::no;
        return Cert::undecided;
    }
    Cert c1 = contains(other.start_);
    Cert c2 = other.contains(start_);
    Cert c3 = contains(other.end_);
    Cert c4 = other.contains(end_);
    if (c1 == Cert::yes || c2 == Cert::yes || c3 == Cert::yes || c4 == Cert::yes) return Cert::no;
    if (c1 == Cert::no && c2 == Cert::no && c3 == Cert::no && c4 == Cert::no) {
        if (margin) {
            Rat m = circle_gap(start_, other.start_).lo();
            m = std::min(m, circle_gap(start_, other.end_).lo());
            m = std::min(m, circle_gap(end_, other.start_).lo());
            m = std::min(m, circle_gap(end_, other.end_).lo());
            *margin = m;
        }
        return Cert::yes;
    }
    return Cert::undecided;
}

Rat ArcInterval::distance_lower(const Angle& t) const {
    if (radius_) {
        Rat d = circle_gap(center_, t).lo() - *radius_;
        return std::max(d, Rat(0));
    }
    if (contains(t) != Cert::no) return Rat(0);
    return std::min(circle_gap(start_, t).lo(), circle_gap(end_, t).lo());
}

ArcInterval ArcInterval::rotated(long steps, unsigned precision_bits) const {
    if (radius_) return ball(center_.rotated(steps, precision_bits), *radius_, precision_bits);
    return arc(start_.rotated(steps, precision_bits), end_.rotated(steps, precision_bits));
}

DisjointnessResult certified_disjoint(const std::vector<ArcInterval>& arcs) {
    DisjointnessResult res;
    res.status = Cert::yes;
    res.margin = Rat(1);
    for (size_t i = 0; i < arcs.size(); ++i) {
        for (size_t j = i + 1; j < arcs.size(); ++j) {
            Rat m(0);
            Cert c = arcs[i].disjoint(arcs[j], &m);
            if (c == Cert::no) {
                return {Cert::no, Rat(0), static_cast<int>(i), static_cast<int>(j)};
            }
            if (c == Cert::undecided) {
                res.status = Cert::undecided;
                res.witness_a = static_cast<int>(i);
                res.witness_b = static_cast<int>(j);
            } else if (res.status == Cert::yes) {
                res.margin = std::min(res.margin, m);
            }
        }
    }
    if (res.status != Cert::yes) res.margin = Rat(0);
    return res;
}

Scalar cyl_distance(const CylPoint& p, const CylPoint& q) {
    if (p.x.hi() > 2 || p.x.lo() < -2 || q.x.hi() > 2 || q.x.lo() < -2)
        throw domain_error("cyl_distance: coordinate outside [-2,2]");
    return Scalar::max(arc_distance(p.theta, q.theta), (p.x - q.x).abs());
}

}  // namespace pcurve
