#ifndef PCURVE_CIRCLE_HPP
#define PCURVE_CIRCLE_HPP

#include <limits>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "pcurve/interval.hpp"

namespace pcurve {

/// The rotation number: the golden-mean conjugate (sqrt(5)-1)/2, enclosed by
/// consecutive continued-fraction convergents F(k)/F(k+1). Enclosures at
/// higher precision are nested.
Scalar omega(unsigned precision_bits);

/// A point on S^1 = R/Z. The enclosure `rep` satisfies rep.lo in [0,1) and
/// width < 1/2. Angles built from orbit points carry exact provenance
/// (theta = base* + offset with rational offset), which keeps corner and
/// boundary queries exact under rotation.
class Angle {
  public:
    Angle() : rep_(Rat(0)) {}
    /// Reduce an arbitrary enclosure mod 1 (exact shift by floor(lo)).
    static Angle reduce(const Scalar& s);

    const Scalar& rep() const { return rep_; }
    Rat width() const { return rep_.width(); }

    bool has_tag() const { return base_.has_value(); }
    long base() const { return *base_; }
    const Rat& offset() const { return offset_; }

    /// theta + d for an exact rational d; provenance preserved.
    Angle plus(const Rat& d, unsigned precision_bits = kDefaultPrecision) const;
    /// theta + enclosure; provenance dropped.
    Angle plus_interval(const Scalar& d) const;
    /// R_omega(theta); provenance index advances by `steps`.
    Angle rotated(long steps = 1, unsigned precision_bits = kDefaultPrecision) const;

    /// Exact structural identity: same tag, or identical point enclosures.
    bool same_point_tag(const Angle& o) const;

    /// Ordering key for memoization (exact on the enclosure + provenance).
    std::tuple<Rat, Rat, long, Rat> key() const {
        return {rep_.lo(), rep_.hi(), base_ ? *base_ : std::numeric_limits<long>::min(), offset_};
    }

    static Angle orbit(long ell, unsigned precision_bits);

  private:
    Scalar rep_;
    std::optional<long> base_;
    Rat offset_{0};
};

/// Certified enclosure of ell*omega mod 1, of width <= max_width.
Angle orbit_point(long ell, const Rat& max_width);
/// Same, choosing internal precision from bits.
Angle orbit_point_bits(long ell, unsigned precision_bits);

/// The directed arc distance d(a,b): b-a when a<=b, b+1-a otherwise (on
/// canonical representatives). Throws precision_error when the case split is
/// undecidable (overlapping non-identical enclosures).
Scalar arc_distance(const Angle& a, const Angle& b);

/// Enclosure of the symmetric circle distance min(d(a,b), d(b,a)) in [0,1/2].
/// Needs no case split; used for separations and margins.
Scalar circle_gap(const Angle& a, const Angle& b);

/// A closed arc [start, end] traversed in the natural direction;
/// length in [0,1). Balls keep their center and exact radius, which makes
/// membership and separation queries tight.
class ArcInterval {
  public:
    static ArcInterval arc(const Angle& start, const Angle& end);
    static ArcInterval ball(const Angle& center, const Rat& radius,
                            unsigned precision_bits = kDefaultPrecision);

    const Angle& start() const { return start_; }
    const Angle& end() const { return end_; }
    const Scalar& length() const { return length_; }
    bool is_ball() const { return radius_.has_value(); }
    const Angle& center() const { return center_; }
    const Rat& radius() const { return *radius_; }

    Cert contains(const Angle& t) const;
    /// Membership in the interior (both endpoints excluded).
    Cert contains_interior(const Angle& t) const;
    Cert contains_arc(const ArcInterval& other) const;
    /// other inside the interior of this.
    Cert contains_arc_strict(const ArcInterval& other) const;
    /// Disjointness with a certified separation lower bound in *margin.
    Cert disjoint(const ArcInterval& other, Rat* margin = nullptr) const;

    /// Certified lower bound for the circle distance from t to this arc
    /// (0 if membership cannot be excluded).
    Rat distance_lower(const Angle& t) const;

    ArcInterval rotated(long steps = 1, unsigned precision_bits = kDefaultPrecision) const;

  private:
    Angle start_, end_, center_;
    std::optional<Rat> radius_;
    Scalar length_{Rat(0)};
};

struct DisjointnessResult {
    Cert status;
    Rat margin;  // certified minimum pairwise separation when status == yes
    int witness_a = -1, witness_b = -1;
};

/// TRUE only if pairwise separation is certified strictly positive.
DisjointnessResult certified_disjoint(const std::vector<ArcInterval>& arcs);

/// Point of the cylinder Omega = S^1 x [-2,2].
struct CylPoint {
    Angle theta;
    Scalar x;
};

/// max(d_S1(theta,nu), |x-y|); coordinates must lie in [-2,2].
Scalar cyl_distance(const CylPoint& p, const CylPoint& q);

}  // namespace pcurve

#endif
