#ifndef PCURVE_INTERVAL_HPP
#define PCURVE_INTERVAL_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace pcurve {

using Rat = mpq_class;

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};
struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};
struct singularity_error : std::runtime_error {
    explicit singularity_error(const std::string& what) : std::runtime_error(what) {}
};
struct construction_error : std::runtime_error {
    explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

/// Tri-state result of a certified comparison. `undecided` means the
/// enclosures overlap and the predicate cannot be settled at the current
/// precision; callers refine or report.
enum class Cert { yes, no, undecided };

inline const char* cert_name(Cert c) {
    switch (c) {
        case Cert::yes: return "TRUE";
        case Cert::no: return "FALSE";
        default: return "UNDECIDED";
    }
}

/// Exact rational helpers.
Rat rat(long num, long den);
Rat rat_from_string(const std::string& s);  // "p/q", "p/2^q" or integer
Rat pow2(long e);                           // 2^e, e may be negative
bool is_dyadic(const Rat& q);               // denominator a power of two
Rat rat_floor(const Rat& q);                // exact floor as an integer rational
long rat_floor_long(const Rat& q);
std::string rat_to_string(const Rat& q);
/// Exact finite decimal string; requires a dyadic rational.
std::string dyadic_to_decimal(const Rat& q);
double rat_to_double(const Rat& q);

/// A real certified to lie in [lo, hi]; endpoints are exact rationals.
/// All operations are inclusion monotone: refining operands never loses
/// containment of the true value.
class Scalar {
  public:
    Scalar() : lo_(0), hi_(0) {}
    Scalar(const Rat& v) : lo_(v), hi_(v) {}  // NOLINT(google-explicit-constructor)
    Scalar(long v) : lo_(v), hi_(v) {}        // NOLINT(google-explicit-constructor)
    Scalar(const Rat& lo, const Rat& hi);

    static Scalar hull(const Scalar& a, const Scalar& b);

    const Rat& lo() const { return lo_; }
    const Rat& hi() const { return hi_; }
    Rat width() const { return hi_ - lo_; }
    Rat mid() const { return (lo_ + hi_) / 2; }
    bool is_point() const { return lo_ == hi_; }

    bool contains(const Rat& v) const { return lo_ <= v && v <= hi_; }
    bool contains(const Scalar& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool overlaps(const Scalar& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

    Scalar operator-() const { return Scalar(-hi_, -lo_); }
    Scalar abs() const;

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        return Scalar(a.lo_ + b.lo_, a.hi_ + b.hi_);
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        return Scalar(a.lo_ - b.hi_, a.hi_ - b.lo_);
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    /// Exact interval division; throws precision_error when 0 may lie in b.
    friend Scalar operator/(const Scalar& a, const Scalar& b);

    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

    /// Componentwise min/max (enclosures of min(x,y), max(x,y)).
    static Scalar min(const Scalar& a, const Scalar& b);
    static Scalar max(const Scalar& a, const Scalar& b);

    /// Certified order predicates on the represented reals.
    static Cert lt(const Scalar& a, const Scalar& b);
    static Cert le(const Scalar& a, const Scalar& b);
    static Cert eq_zero(const Scalar& a);

    bool certainly_positive() const { return lo_ > 0; }
    bool certainly_negative() const { return hi_ < 0; }
    bool certainly_nonzero() const { return lo_ > 0 || hi_ < 0; }

    /// Outward rounding of both endpoints to the dyadic grid 2^-bits.
    Scalar compressed(unsigned bits) const;
    /// Symmetric widening by a nonnegative rational.
    Scalar widened(const Rat& pad) const;

    std::string str() const;

  private:
    Rat lo_, hi_;
};

/// Default working precision (bits) for endpoint compression.
inline constexpr unsigned kDefaultPrecision = 120;

}  // namespace pcurve

#endif
