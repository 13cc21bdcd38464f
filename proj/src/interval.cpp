#include "pcurve/interval.hpp"

#include <algorithm>
#include <sstream>

namespace pcurve {

Rat rat(long num, long den) {
    if (den == 0) throw domain_error("rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

Rat rat_from_string(const std::string& s) {
    auto caret = s.find("/2^");
    if (caret != std::string::npos) {
        Rat num(s.substr(0, caret), 10);
        long e = std::stol(s.substr(caret + 3));
        Rat q = num * pow2(-e);
        q.canonicalize();
        return q;
    }
    Rat q(s, 10);
    q.canonicalize();
    return q;
}

Rat pow2(long e) {
    mpz_class z(1);
    mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
    Rat q;
    if (e >= 0)
        q = Rat(z);
    else {
        q = Rat(1);
        q /= Rat(z);
    }
    q.canonicalize();
    return q;
}

bool is_dyadic(const Rat& q) {
    mpz_class den = q.get_den();
    if (den == 1) return true;
    // power of two iff den & (den-1) == 0
    mpz_class m = den & (den - 1);
    return m == 0;
}

Rat rat_floor(const Rat& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return Rat(f);
}

long rat_floor_long(const Rat& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    if (!f.fits_slong_p()) throw domain_error("rat_floor_long: out of range");
    return f.get_si();
}

std::string rat_to_string(const Rat& q) { return q.get_str(); }

std::string dyadic_to_decimal(const Rat& q) {
    if (!is_dyadic(q)) throw domain_error("dyadic_to_decimal: not dyadic: " + q.get_str());
    mpz_class den = q.get_den();
    unsigned long e = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;  // den == 2^e
    if (e == 0) return q.get_num().get_str();
    // p/2^e = p*5^e / 10^e
    mpz_class five(5), p5;
    mpz_pow_ui(p5.get_mpz_t(), five.get_mpz_t(), e);
    mpz_class scaled = q.get_num() * p5;
    bool neg = scaled < 0;
    mpz_class mag = neg ? mpz_class(-scaled) : scaled;
    std::string digits = mag.get_str();
    if (digits.size() <= e) digits.insert(0, e + 1 - digits.size(), '0');
    digits.insert(digits.size() - e, ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
    return (neg ? "-" : "") + digits;
}

double rat_to_double(const Rat& q) { return q.get_d(); }

Scalar::Scalar(const Rat& lo, const Rat& hi) : lo_(lo), hi_(hi) {
    if (lo_ > hi_) throw domain_error("Scalar: lo > hi");
}

Scalar Scalar::hull(const Scalar& a, const Scalar& b) {
    return Scalar(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
}

Scalar Scalar::abs() const {
    if (lo_ >= 0) return *this;
    if (hi_ <= 0) return -*this;
    return Scalar(Rat(0), std::max(Rat(-lo_), hi_));
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    Rat p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
    return Scalar(std::min(std::min(p1, p2), std::min(p3, p4)),
                  std::max(std::max(p1, p2), std::max(p3, p4)));
}

Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.lo_ <= 0 && b.hi_ >= 0)
        throw precision_error("Scalar division: denominator enclosure touches 0");
    Rat p1 = a.lo_ / b.lo_, p2 = a.lo_ / b.hi_, p3 = a.hi_ / b.lo_, p4 = a.hi_ / b.hi_;
    return Scalar(std::min(std::min(p1, p2), std::min(p3, p4)),
                  std::max(std::max(p1, p2), std::max(p3, p4)));
}

Scalar Scalar::min(const Scalar& a, const Scalar& b) {
    return Scalar(std::min(a.lo_, b.lo_), std::min(a.hi_, b.hi_));
}

Scalar Scalar::max(const Scalar& a, const Scalar& b) {
    return Scalar(std::max(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
}

Cert Scalar::lt(const Scalar& a, const Scalar& b) {
    if (a.hi_ < b.lo_) return Cert::yes;
    if (a.lo_ >= b.hi_) return Cert::no;
    return Cert::undecided;
}

Cert Scalar::le(const Scalar& a, const Scalar& b) {
    if (a.hi_ <= b.lo_) return Cert::yes;
    if (a.lo_ > b.hi_) return Cert::no;
    return Cert::undecided;
}

Cert Scalar::eq_zero(const Scalar& a) {
    if (a.lo_ == 0 && a.hi_ == 0) return Cert::yes;
    if (a.lo_ > 0 || a.hi_ < 0) return Cert::no;
    return Cert::undecided;
}

Scalar Scalar::compressed(unsigned bits) const {
    if (lo_ == hi_) return *this;  // exact values stay exact
    Rat scale = pow2(static_cast<long>(bits));
    Rat slo = lo_ * scale, shi = hi_ * scale;
    mpz_class flo, chi;
    mpz_fdiv_q(flo.get_mpz_t(), slo.get_num().get_mpz_t(), slo.get_den().get_mpz_t());
    mpz_cdiv_q(chi.get_mpz_t(), shi.get_num().get_mpz_t(), shi.get_den().get_mpz_t());
    Rat nlo = Rat(flo) / scale, nhi = Rat(chi) / scale;
    nlo.canonicalize();
    nhi.canonicalize();
    return Scalar(nlo, nhi);
}

Scalar Scalar::widened(const Rat& pad) const {
    if (pad < 0) throw domain_error("Scalar::widened: negative pad");
    return Scalar(lo_ - pad, hi_ + pad);
}

std::string Scalar::str() const {
    std::ostringstream os;
    if (is_point())
        os << lo_.get_str();
    else
        os << "[" << lo_.get_str() << ", " << hi_.get_str() << "]";
    return os.str();
}

}  // namespace pcurve
