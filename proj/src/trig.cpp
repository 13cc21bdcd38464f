#include "pcurve/trig.hpp"

#include <map>
#include <mutex>

namespace pcurve {

namespace {

// atan(1/x) for integer x >= 2, via the alternating series; consecutive
// partial sums bracket the value.
Scalar atan_inv(long x, unsigned terms) {
    Rat inv = rat(1, x);
    Rat inv2 = inv * inv;
    Rat power = inv;  // inv^(2k+1)
    Rat sum(0);
    Rat prev(0);
    for (unsigned k = 0; k < terms; ++k) {
        Rat term = power / Rat(2 * k + 1);
        prev = sum;
        sum += (k % 2 == 0) ? term : -term;
        power *= inv2;
    }
    // terms strictly decrease, so the value lies between the last two sums
    return Scalar(std::min(prev, sum), std::max(prev, sum));
}

Scalar compute_pi(unsigned bits) {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239).
    // atan(1/5) terms shrink by 25x (~4.6 bits/term).
    unsigned t5 = bits / 4 + 8;
    unsigned t239 = bits / 15 + 6;
    Scalar a5 = atan_inv(5, t5);
    Scalar a239 = atan_inv(239, t239);
    Scalar pi = Scalar(16) * a5 - Scalar(4) * a239;
    return pi.compressed(bits + 4);
}

const Scalar& cached_pi(unsigned bits) {
    static std::mutex mu;
    static std::map<unsigned, Scalar> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bits);
    if (it == cache.end()) it = cache.emplace(bits, compute_pi(bits)).first;
    return it->second;
}

// sin on [0, pi/2] scaled: S(t) = sin(pi*t) for a point t in [0, 1/2].
// Returns an enclosure; exact for t = 0, 1/2.
Scalar sin_quarter(const Rat& t, unsigned bits) {
    if (t == 0) return Scalar(Rat(0));
    if (t == rat(1, 2)) return Scalar(Rat(1));
    Scalar x = cached_pi(bits + 8) * Scalar(t);  // x in (0, pi/2)
    // alternating Taylor; terms decrease from the start since x < 2
    Scalar sum(Rat(0));
    Scalar power = x;  // x^(2k+1)
    Scalar x2 = x * x;
    mpz_class fact(1);  // (2k+1)!
    unsigned K = bits / 2 + 12;
    for (unsigned k = 0; k < K; ++k) {
        Scalar term = power / Scalar(Rat(fact));
        sum = (k % 2 == 0) ? sum + term : sum - term;
        power = (power * x2).compressed(bits + 16);
        fact *= (2 * k + 2);
        fact *= (2 * k + 3);
        sum = sum.compressed(bits + 16);
    }
    // remainder: next term magnitude
    Scalar rem = (power / Scalar(Rat(fact))).abs();
    Scalar out = sum.widened(rem.hi());
    // clamp into [0,1]: sin(pi t) in [0,1] on [0,1/2]
    Rat lo = std::max(out.lo(), Rat(0));
    Rat hi = std::min(out.hi(), Rat(1));
    if (lo > hi) return out.compressed(bits);  // inconsistent clamp cannot happen; keep sound
    return Scalar(lo, hi).compressed(bits);
}

// sin(pi*t) for a point t in [0, 2): fold into the monotone quarter.
Scalar sin_point(const Rat& t, unsigned bits) {
    Rat half = rat(1, 2);
    if (t <= half) return sin_quarter(t, bits);
    if (t <= 1) return sin_quarter(1 - t, bits);
    if (t <= 1 + half) return -sin_quarter(t - 1, bits);
    return -sin_quarter(2 - t, bits);
}

}  // namespace

Scalar pi_enclosure(unsigned bits) { return cached_pi(bits); }

Scalar sin_pi(const Scalar& s, unsigned bits) {
    if (s.width() >= 2) return Scalar(Rat(-1), Rat(1));
    // shift so the low endpoint lands in [0,1); sin(pi(s+2k)) = sin(pi s),
    // sin(pi(s+1)) = -sin(pi s)
    Rat f = rat_floor(s.lo());
    long fl = rat_floor_long(f);
    Rat t1 = s.lo() - f, t2 = s.hi() - f;  // t1 in [0,1), t2 < 3
    bool flip = (fl % 2 != 0);
    // hull of endpoint values plus the half-integer extrema inside [t1,t2]
    Scalar out = Scalar::hull(sin_point(t1, bits), sin_point(t2 >= 2 ? t2 - 2 : t2, bits));
    Rat half = rat(1, 2);
    for (long k = 0; k < 3; ++k) {
        Rat ext = Rat(k) + half;  // 1/2, 3/2, 5/2
        if (t1 < ext && ext < t2) {
            out = Scalar::hull(out, Scalar(Rat(k % 2 == 0 ? 1 : -1)));
        }
    }
    return flip ? -out : out;
}

Scalar cos_pi(const Scalar& s, unsigned bits) {
    // cos(pi s) = sin(pi (s + 1/2))
    return sin_pi(s + Scalar(rat(1, 2)), bits);
}

}  // namespace pcurve
