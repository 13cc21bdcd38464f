#include "pcurve/metrics.hpp"

#include <algorithm>

namespace pcurve {

namespace {

// symmetric product distance for finite-set estimates
Scalar sym_distance(const CylPoint& p, const CylPoint& q) {
    return Scalar::max(circle_gap(p.theta, q.theta), (p.x - q.x).abs());
}

}  // namespace

MetricEstimate dinf_sampled(const ConstructionState& state, int jA, int jB, int grid_size) {
    if (jA < -1 || jA > state.depth() || jB < -1 || jB > state.depth())
        throw domain_error("dinf_sampled: level out of range");
    MetricEstimate est;
    est.grid = "uniform " + std::to_string(grid_size) + " plus oscillation extrema";
    Rat best_lo(0), best_hi(0);
    auto feed = [&](const Angle& theta) {
        CurveValue a = gamma_eval(state, jA, theta);
        CurveValue b = gamma_eval(state, jB, theta);
        if (a.status == CurveValue::Status::excluded || b.status == CurveValue::Status::excluded)
            return;
        Scalar d = (a.value - b.value).abs();
        if (d.lo() > best_lo) {
            best_lo = d.lo();
            best_hi = d.hi();
        }
        ++est.sample_count;
    };
    for (int k = 0; k < grid_size; ++k) feed(Angle::reduce(Scalar(rat(k, grid_size))));
    // extrema of the oscillation near each excluded center
    int maxj = std::max(jA, jB);
    for (long i = -maxj; i <= maxj; ++i) {
        const Rat delta = state.level(static_cast<int>(std::abs(i))).delta;
        long k0 = std::max<long>(1, rat_floor_long(Rat(1) / delta) + 1);
        for (long k = k0; k < k0 + std::max(4, grid_size / 16); ++k) {
            Rat z = rat(2, 2 * k + 1);
            feed(state.star(i).plus(z, state.precision_bits));
            feed(state.star(i).plus(-z, state.precision_bits));
        }
    }
    est.low = Scalar(best_lo, std::max(best_lo, best_hi));
    return est;
}

MetricEstimate hausdorff_sampled(const std::vector<CylPoint>& A, const std::vector<CylPoint>& B) {
    if (A.empty() || B.empty()) throw domain_error("hausdorff_sampled: empty point set");
    MetricEstimate est;
    est.grid = "finite sets " + std::to_string(A.size()) + " x " + std::to_string(B.size());
    est.sample_count = static_cast<long>(A.size() + B.size());
    auto directed = [](const std::vector<CylPoint>& from, const std::vector<CylPoint>& to) {
        Rat worst_lo(0), worst_hi(0);
        for (const CylPoint& p : from) {
            Rat min_lo(2), min_hi(2);
            for (const CylPoint& q : to) {
                Scalar d = sym_distance(p, q);
                min_lo = std::min(min_lo, d.lo());
                min_hi = std::min(min_hi, d.hi());
            }
            if (min_lo > worst_lo) worst_lo = min_lo;
            if (min_hi > worst_hi) worst_hi = min_hi;
        }
        return Scalar(worst_lo, std::max(worst_lo, worst_hi));
    };
    est.low = Scalar::max(directed(A, B), directed(B, A));
    return est;
}

}  // namespace pcurve
