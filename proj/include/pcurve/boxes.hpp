#ifndef PCURVE_BOXES_HPP
#define PCURVE_BOXES_HPP

#include "pcurve/circle.hpp"
#include "pcurve/interval.hpp"

namespace pcurve {

/// beta(x) = 1 - |x| on [-1, 1].
Scalar beta(const Scalar& x);

/// phi(x) = (1-|x|)^2 sin(pi/x) on [-1,1] minus 0. The enclosure must
/// exclude 0; throws singularity_error otherwise.
Scalar phi(const Scalar& x, unsigned bits = kDefaultPrecision);

/// Enclosure of {phi(t) : t in x} valid even when 0 in x, via the envelope
/// |phi| <= (1 - min|t|)^2.
Scalar phi_envelope(const Scalar& x, unsigned bits = kDefaultPrecision);

/// Enclosure of phi' over an interval excluding 0.
Scalar phi_deriv(const Scalar& x, unsigned bits = kDefaultPrecision);

/// Parameters of one generic box W(ell*, n, alpha, delta, a, a+, a-).
struct GenericBoxParams {
    long ell = 0;       // orbit index; (-1)^ell fixes the oscillation sign
    int n = 1;          // half-height 2^-n
    Rat alpha, delta;   // dyadic radii, 0 < delta < alpha < 2^-n
    Scalar a, a_plus, a_minus;
    Angle center;       // enclosure of ell*
};

/// Fiber of a region over one angle.
struct FiberInterval {
    Scalar lo, hi;
    bool degenerate = false;  // structurally a single point
    Scalar hull() const { return Scalar(lo.lo(), hi.hi()); }
};

/// Local coordinate z = theta - ell* in [-alpha_cap, alpha_cap]; exact when
/// theta carries the same orbit tag. alpha_cap defaults to the box footprint.
Scalar box_local(const GenericBoxParams& p, const Angle& theta);

/// The graph map phi_{ell*} at theta in [ell*-alpha, ell*+alpha] - {ell*}.
Scalar box_graph(const GenericBoxParams& p, const Angle& theta, unsigned bits = kDefaultPrecision);

/// Graph value over a local interval z (subset of [-alpha, alpha]); falls
/// back to the fiber envelope when z straddles 0.
Scalar box_graph_range_local(const GenericBoxParams& p, const Scalar& z,
                             unsigned bits = kDefaultPrecision);

/// Enclosure of the graph slope over a local interval excluding 0.
Scalar box_graph_deriv_local(const GenericBoxParams& p, const Scalar& z,
                             unsigned bits = kDefaultPrecision);

/// The fiber of the closed region W over theta.
FiberInterval box_boundary(const GenericBoxParams& p, const Angle& theta,
                           unsigned bits = kDefaultPrecision);

/// Wall ranges over a local interval z: the fiber of W over the arc
/// {ell* + t : t in z} is [wall_lower, wall_upper] pointwise; these return
/// enclosures of the pointwise min of the upper wall and max of the lower
/// wall (for nesting checks) plus the plain ranges.
struct WallRange {
    Scalar upper_min, upper_range;
    Scalar lower_max, lower_range;
};
WallRange box_wall_range_local(const GenericBoxParams& p, const Scalar& z,
                               unsigned bits = kDefaultPrecision);

}  // namespace pcurve

#endif
