#include "pcurve/boxes.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "pcurve/trig.hpp"

namespace pcurve {

namespace {

Rat max_abs(const Scalar& z) { return z.abs().hi(); }

Rat min_abs(const Scalar& z) { return z.abs().lo(); }

int osc_sign(long ell) { return (ell % 2 != 0) ? -1 : 1; }

// affine map through (x0,y0) and (x1,y1), evaluated on t; x0 != x1 exact

Scalar affine_through(const Rat& x0, const Scalar& y0, const Rat& x1, const Scalar& y1,
                      const Scalar& t) {
    Scalar slope = (y1 - y0) / Scalar(Rat(x1 - x0));
    return y0 + (t - Scalar(x0)) * slope;
}

struct LocalPiece {
    Scalar z;
    enum Kind { center, flange_left, flange_right } kind;
};

// Split a local interval into (at most three) pieces along the +-delta seams.
std::vector<LocalPiece> split_local(const GenericBoxParams& p, const Scalar& z) {
    // closed piece conditions: boundary points land in both adjacent pieces,
    // whose formulas agree on the seam
    std::vector<LocalPiece> out;
    Rat lo = z.lo(), hi = z.hi();
    Rat d = p.delta, nd = -p.delta;
    if (lo <= nd) {
        out.push_back({Scalar(lo, std::min(hi, nd)), LocalPiece::flange_left});
    }
    if (hi >= nd && lo <= d) {
        out.push_back({Scalar(std::max(lo, nd), std::min(hi, d)), LocalPiece::center});
    }
    if (hi >= d) {
        out.push_back({Scalar(std::max(lo, d), hi), LocalPiece::flange_right});
    }
    return out;
}

}  // namespace

Scalar beta(const Scalar& x) {
    if (x.lo() < -1 || x.hi() > 1) throw domain_error("beta: argument outside [-1,1]");
    return Scalar(Rat(1)) - x.abs();
}

namespace {

Scalar phi_uncached(const Scalar& x, unsigned bits) {
    Scalar b = Scalar(Rat(1)) - x.abs();
    Scalar s = Scalar(Rat(1)) / x;
    return ((b * b) * sin_pi(s, bits)).compressed(bits);
}

// point evaluations recur at the seam offsets of every box; cache them
const Scalar& phi_point_cached(const Rat& x, unsigned bits) {
    static std::mutex mu;
    static std::map<std::pair<Rat, unsigned>, Scalar> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(x, bits);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, phi_uncached(Scalar(x), bits)).first;
    return it->second;
}

}  // namespace

Scalar phi(const Scalar& x, unsigned bits) {
    if (x.lo() <= 0 && x.hi() >= 0) throw singularity_error("phi: enclosure contains 0");
    if (x.lo() < -1 || x.hi() > 1) throw domain_error("phi: argument outside [-1,1]");
    if (x.is_point()) return phi_point_cached(x.lo(), bits);
    return phi_uncached(x, bits);
}

Scalar phi_envelope(const Scalar& x, unsigned bits) {
    if (x.lo() < -1 || x.hi() > 1) throw domain_error("phi_envelope: argument outside [-1,1]");
    if (x.certainly_nonzero()) return phi(x, bits);
    Rat m = min_abs(x);
    Rat env = (1 - m) * (1 - m);
    return Scalar(-env, env);
}

Scalar phi_deriv(const Scalar& x, unsigned bits) {
    if (x.lo() <= 0 && x.hi() >= 0) throw singularity_error("phi_deriv: enclosure contains 0");
    Scalar xx = x.certainly_negative() ? -x : x;  // phi odd => phi' even
    Scalar b = Scalar(Rat(1)) - xx;  // 1 - |x|, positive interval
    Scalar s = Scalar(Rat(1)) / xx;
    Scalar pi = pi_enclosure(bits + 8);
    Scalar val = Scalar(Rat(-2)) * b * sin_pi(s, bits) - (b * b) * pi * cos_pi(s, bits) / (xx * xx);
    return val.compressed(bits);
}

Scalar box_local(const GenericBoxParams& p, const Angle& theta) {
    if (theta.has_tag() && p.center.has_tag() && theta.base() == p.center.base()) {
        return Scalar(theta.offset() - p.center.offset());
    }
    Scalar d = theta.rep() - p.center.rep();
    Rat f = rat_floor(d.lo() + rat(1, 2));
    return Scalar(d.lo() - f, d.hi() - f);
}

namespace {

Scalar graph_piece(const GenericBoxParams& p, const LocalPiece& piece, bool envelope, unsigned bits) {
    Scalar scale = Scalar(pow2(-p.n));
    int sg = osc_sign(p.ell);
    Scalar sscale = sg < 0 ? -scale : scale;
    switch (piece.kind) {
        case LocalPiece::center: {
            Scalar osc = envelope ? phi_envelope(piece.z, bits) : phi(piece.z, bits);
            return p.a + sscale * osc;
        }
        case LocalPiece::flange_right: {
            if (piece.z.is_point() && piece.z.lo() == p.alpha) return p.a_plus;
            Scalar seam = p.a + sscale * phi(Scalar(p.delta), bits);
            return affine_through(p.delta, seam, p.alpha, p.a_plus, piece.z);
        }
        case LocalPiece::flange_left: {
            if (piece.z.is_point() && piece.z.lo() == -p.alpha) return p.a_minus;
            Scalar seam = p.a + sscale * phi(Scalar(-p.delta), bits);
            return affine_through(-p.alpha, p.a_minus, -p.delta, seam, piece.z);
        }
    }
    throw domain_error("graph_piece: unreachable");
}

}  // namespace

Scalar box_graph(const GenericBoxParams& p, const Angle& theta, unsigned bits) {
    Scalar z = box_local(p, theta);
    if (z.lo() < -p.alpha || z.hi() > p.alpha) throw domain_error("box_graph: angle outside projection");
    if (z.is_point() && z.lo() == p.alpha) return p.a_plus;
    if (z.is_point() && z.lo() == -p.alpha) return p.a_minus;
    if (z.lo() <= 0 && z.hi() >= 0) throw singularity_error("box_graph: enclosure contains the center");
    std::optional<Scalar> out;
    for (const auto& piece : split_local(p, z)) {
        Scalar v = graph_piece(p, piece, false, bits);
        out = out ? Scalar::hull(*out, v) : v;
    }
    return out->compressed(bits);
}

Scalar box_graph_range_local(const GenericBoxParams& p, const Scalar& z, unsigned bits) {
    if (z.lo() < -p.alpha || z.hi() > p.alpha)
        throw domain_error("box_graph_range_local: interval outside projection");
    std::optional<Scalar> out;
    for (const auto& piece : split_local(p, z)) {
        Scalar v = graph_piece(p, piece, true, bits);
        out = out ? Scalar::hull(*out, v) : v;
    }
    if (!out) throw domain_error("box_graph_range_local: empty piece decomposition");
    return out->compressed(bits);
}

Scalar box_graph_deriv_local(const GenericBoxParams& p, const Scalar& z, unsigned bits) {
    if (z.lo() < -p.alpha || z.hi() > p.alpha)
        throw domain_error("box_graph_deriv_local: interval outside projection");
    if (z.lo() <= 0 && z.hi() >= 0)
        throw precision_error("box_graph_deriv_local: interval touches the center");
    Scalar scale = Scalar(pow2(-p.n));
    int sg = osc_sign(p.ell);
    Scalar sscale = sg < 0 ? -scale : scale;
    std::optional<Scalar> out;
    for (const auto& piece : split_local(p, z)) {
        Scalar v(Rat(0));
        switch (piece.kind) {
            case LocalPiece::center:
                v = sscale * phi_deriv(piece.z, bits);
                break;
            case LocalPiece::flange_right: {
                Scalar seam = p.a + sscale * phi(Scalar(p.delta), bits);
                v = (p.a_plus - seam) / Scalar(p.alpha - p.delta);
                break;
            }
            case LocalPiece::flange_left: {
                Scalar seam = p.a + sscale * phi(Scalar(-p.delta), bits);
                v = (seam - p.a_minus) / Scalar(p.alpha - p.delta);
                break;
            }
        }
        out = out ? Scalar::hull(*out, v) : v;
    }
    return out->compressed(bits);
}

namespace {

// Upper and lower wall of W over one piece, as (min-enclosure, range, ...).
void wall_piece(const GenericBoxParams& p, const LocalPiece& piece, unsigned bits, WallRange* acc,
                bool first) {
    Scalar scale = Scalar(pow2(-p.n));
    Scalar up_min, up_range, lo_max, lo_range;
    if (piece.kind == LocalPiece::center) {
        Rat bmin = 1 - max_abs(piece.z);  // beta range over the piece
        Rat bmax = 1 - min_abs(piece.z);
        Scalar beta_min(bmin), beta_max(bmax);
        up_min = p.a + scale * beta_min;
        up_range = p.a + scale * Scalar(bmin, bmax);
        lo_max = p.a - scale * beta_min;
        lo_range = p.a - scale * Scalar(bmin, bmax);
    } else {
        bool right = piece.kind == LocalPiece::flange_right;
        Rat edge = right ? p.delta : -p.delta;
        Rat corner = right ? p.alpha : -p.alpha;
        const Scalar& a_corner = right ? p.a_plus : p.a_minus;
        Scalar bd = Scalar(Rat(1) - p.delta);  // beta(+-delta)
        Scalar up_edge = p.a + scale * bd;
        Scalar lo_edge = p.a - scale * bd;
        Scalar u1 = affine_through(edge, up_edge, corner, a_corner, Scalar(piece.z.lo()));
        Scalar u2 = affine_through(edge, up_edge, corner, a_corner, Scalar(piece.z.hi()));
        Scalar l1 = affine_through(edge, lo_edge, corner, a_corner, Scalar(piece.z.lo()));
        Scalar l2 = affine_through(edge, lo_edge, corner, a_corner, Scalar(piece.z.hi()));
        up_min = Scalar::min(u1, u2);
        up_range = Scalar::hull(u1, u2);
        lo_max = Scalar::max(l1, l2);
        lo_range = Scalar::hull(l1, l2);
    }
    if (first) {
        acc->upper_min = up_min.compressed(bits);
        acc->upper_range = up_range.compressed(bits);
        acc->lower_max = lo_max.compressed(bits);
        acc->lower_range = lo_range.compressed(bits);
    } else {
        acc->upper_min = Scalar::min(acc->upper_min, up_min).compressed(bits);
        acc->upper_range = Scalar::hull(acc->upper_range, up_range).compressed(bits);
        acc->lower_max = Scalar::max(acc->lower_max, lo_max).compressed(bits);
        acc->lower_range = Scalar::hull(acc->lower_range, lo_range).compressed(bits);
    }
}

}  // namespace

WallRange box_wall_range_local(const GenericBoxParams& p, const Scalar& z, unsigned bits) {
    if (z.lo() < -p.alpha || z.hi() > p.alpha)
        throw domain_error("box_wall_range_local: interval outside projection");
    WallRange acc;
    bool first = true;
    for (const auto& piece : split_local(p, z)) {
        wall_piece(p, piece, bits, &acc, first);
        first = false;
    }
    return acc;
}

FiberInterval box_boundary(const GenericBoxParams& p, const Angle& theta, unsigned bits) {
    Scalar z = box_local(p, theta);
    if (z.lo() < -p.alpha || z.hi() > p.alpha)
        throw domain_error("box_boundary: angle outside projection");
    FiberInterval out;
    if (z.is_point() && z.lo() == p.alpha) {
        out.lo = out.hi = p.a_plus;
        out.degenerate = true;
        return out;
    }
    if (z.is_point() && z.lo() == -p.alpha) {
        out.lo = out.hi = p.a_minus;
        out.degenerate = true;
        return out;
    }
    WallRange w = box_wall_range_local(p, z, bits);
    out.lo = w.lower_range;
    out.hi = w.upper_range;
    out.degenerate = false;
    return out;
}

}  // namespace pcurve
