#ifndef PCURVE_STRATA_HPP
#define PCURVE_STRATA_HPP

#include <map>
#include <optional>
#include <vector>

#include "pcurve/construction.hpp"

namespace pcurve {

/// Depth stratification of the constructed winged footprints. dep(ell) counts
/// the constructed footprints properly containing footprint ell; stratum m
/// collects the indices of depth m. Built once per state, then immutable.
struct DepthTable {
    std::map<long, int> dep;                 // per index, |ell| <= J
    std::vector<std::vector<long>> strata;   // strata[m] = D_m among constructed
    std::vector<int> mu;                     // mu[m] = min |i| over strata[m]
    int max_depth() const { return static_cast<int>(strata.size()) - 1; }
};

/// Certified containment scan; throws precision_error if any pair is
/// undecidable at the state's precision (never guesses).
DepthTable build_depth_table(const ConstructionState& state);

/// Same, over indices |ell| <= max_abs_index only. The dynamics evaluator
/// uses max_abs_index = J-1 because the box map of index i needs the level
/// |i|+1 data.
DepthTable build_depth_table_limited(const ConstructionState& state, int max_abs_index);

int depth(const ConstructionState& state, const DepthTable& table, long ell);
std::optional<std::vector<long>> depth_class(const DepthTable& table, int m);
std::optional<int> mu(const DepthTable& table, int m);

/// Classification of an angle against stratum m.
///
/// in_wing_flat means: certified outside every *constructed* deeper covering
/// box, which is exactly the classification the truncated family defines; the
/// residue beyond the constructed depth is carried by the limit-map tails,
/// not by this classification. horizon_limited marks points still inside
/// deeper wings when the constructed strata run out.
struct WingLocation {
    enum class Kind { in_IB, in_wing_interior, in_wing_flat, outside, horizon_limited };
    Kind kind = Kind::outside;
    long b = 0;                      // b_m(theta) when not outside
    bool at_inner_boundary = false;  // exactly on Bd(basint(b)) (overlap set)
    int led = 0;                     // least essential depth (wing_interior)
    long deep = 0;                   // witness box of stratum led
};

WingLocation locate(const ConstructionState& state, const DepthTable& table, int m,
                    const Angle& theta);

/// [lambda_m(theta), tau_m(theta)] over the wings of stratum m.
struct WingInterval {
    Scalar lo, hi;
    bool degenerate = false;
    bool horizon_limited = false;
};

WingInterval wing_bounds(const ConstructionState& state, const DepthTable& table, int m,
                         const Angle& theta);

}  // namespace pcurve

#endif
