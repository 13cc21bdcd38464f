#ifndef PCURVE_TRIG_HPP
#define PCURVE_TRIG_HPP

#include "pcurve/interval.hpp"

namespace pcurve {

/// Enclosure of pi of width <= 2^-bits.
Scalar pi_enclosure(unsigned bits);

/// Enclosures of sin(pi*s) and cos(pi*s) for a rational interval s.
///
/// The reduction s mod 2 is exact rational arithmetic, so arguments of the
/// form 1/x with tiny dyadic x lose no precision. Values at integer and
/// half-integer s are exact (0, 1 or -1) when s is a point.
Scalar sin_pi(const Scalar& s, unsigned bits = kDefaultPrecision);
Scalar cos_pi(const Scalar& s, unsigned bits = kDefaultPrecision);

}  // namespace pcurve

#endif
