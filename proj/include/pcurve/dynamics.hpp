#ifndef PCURVE_DYNAMICS_HPP
#define PCURVE_DYNAMICS_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "pcurve/construction.hpp"
#include "pcurve/strata.hpp"

namespace pcurve {

struct MapValue {
    Scalar value;
    enum class Status { certified, horizon_limited } status = Status::certified;
};

struct Knot {
    Scalar x, y;
};

/// A fiber map materialized on its breakpoints: continuous, piecewise affine,
/// non-increasing, pinned at (-2,2) and (2,-2). Evaluation between knots is
/// exact because every true breakpoint is listed.
struct FiberMapSpec {
    std::vector<Knot> knots;
    bool horizon_limited = false;
};

/// Piecewise-affine evaluation on a knot list.
Scalar fiber_eval(const FiberMapSpec& spec, const Scalar& x);

/// Evaluation session against one immutable state: depth table plus the
/// kappa envelopes and fiber-map memos.
class Dynamics {
  public:
    explicit Dynamics(const ConstructionState& state);

    const ConstructionState& state() const { return state_; }
    const DepthTable& table() const { return table_; }

    /// min{1, ratio1, ratio2} of the flange-compression display (i < 0).
    Scalar kappa_tilde(long i, const Angle& theta) const;
    /// Running infimum of kappa_tilde from the delta-ball edge outward.
    Scalar kappa(long i, const Angle& theta) const;

    /// The box map g_{i,theta}(x) on the fiber of the winged box of i.
    Scalar g_apply(long i, const Angle& theta, const Scalar& x) const;

    /// f_m(theta, x); eps bounds the limit-curve tail used off the stratum-0
    /// footprints.
    MapValue fm(int m, const Angle& theta, const Scalar& x, const Rat& eps) const;

    /// Knot list of f_{m,theta}.
    FiberMapSpec fiber_map(int m, const Angle& theta, const Rat& eps) const;

    /// T_m(theta, x) = (theta + omega, f_m(theta, x)).
    std::pair<Angle, MapValue> apply_T(int m, const Angle& theta, const Scalar& x,
                                       const Rat& eps) const;

    /// f(theta, x) within the certified tail 4*2^-mu_m of the smallest
    /// constructed stratum achieving tail <= eps; horizon_limited (with the
    /// deepest stratum's tail) when none does.
    MapValue f_limit(const Angle& theta, const Scalar& x, const Rat& eps) const;

    /// 4 * 2^-mu_m for a constructed stratum.
    Rat tail_after(int m) const;

  private:
    struct KappaCell {
        Rat z_lo, z_hi;
        Scalar range;
    };
    struct KappaEnvelope {
        std::vector<KappaCell> cells;         // ordered from the delta edge outward
        std::vector<Scalar> prefix_min;
    };

    const KappaEnvelope& envelope(long i, bool right_side) const;
    KappaEnvelope build_envelope(long i, bool right_side) const;
    Scalar kappa_tilde_range(long i, const Rat& z_lo, const Rat& z_hi) const;

    const ConstructionState& state_;
    DepthTable table_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<long, bool>, KappaEnvelope> envelopes_;
};

}  // namespace pcurve

#endif
