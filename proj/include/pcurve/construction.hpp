#ifndef PCURVE_CONSTRUCTION_HPP
#define PCURVE_CONSTRUCTION_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "pcurve/boxes.hpp"
#include "pcurve/circle.hpp"
#include "pcurve/interval.hpp"

namespace pcurve {

/// Which branch fixed the anchor values of a level, and its witnesses.
struct Provenance {
    enum class Branch { isolated, nested } branch = Branch::isolated;
    long witness_m = 0;      // containing winged arc (nested branch)
    bool has_nest_k = false; // deeper two-sided nesting witness present
    long nest_k = 0;
};

/// Anchor triple of one box: a, a+, a- with provenance.
struct AnchorTriple {
    Scalar a, a_plus, a_minus;
    Provenance prov;
};

/// Radii and anchors of construction level j (boxes +j and -j).
struct LevelSpec {
    int j = 0;
    int n = 1;
    Rat alpha, delta;  // dyadic, 0 < delta < alpha < 2^-n
    AnchorTriple pos, neg;  // ell = +j and ell = -j (equal when j = 0)
};

/// Arc {base* + t : t in [lo, hi]} in exact local coordinates.
struct LocalArc {
    long base = 0;
    Rat lo, hi;
};

struct BuildConfig {
    int depth = 6;
    int orbit_horizon = -1;  // defaults to 4 * depth
    unsigned precision_bits = kDefaultPrecision;
    int max_halvings = 200;
    int max_n_bumps = 48;
    Rat required_margin = pow2(-50);
};

struct ConditionClause {
    std::string id;
    Cert status = Cert::undecided;
    Rat margin;       // natural units; identity clauses report 1
    bool identity = false;
    std::string witness;
};

struct ConditionReport {
    int j = 0;
    std::vector<ConditionClause> clauses;
    bool all_true() const;
    Rat min_margin() const;  // over non-identity clauses
    const ConditionClause* first_failure() const;
};

struct CurveValue {
    Scalar value;
    enum class Status { certified, horizon_limited, excluded } status = Status::certified;
};

struct CurveSample {
    Angle theta;
    Scalar value;
    long fiber_index = 0;   // orbit index when this row is a vertical fiber
    bool is_fiber = false;
};

class ConstructionState {
  public:
    unsigned precision_bits = kDefaultPrecision;
    int orbit_horizon = 24;
    std::vector<LevelSpec> levels;

    int depth() const { return static_cast<int>(levels.size()) - 1; }
    const LevelSpec& level(int j) const;
    const AnchorTriple& anchors(long ell) const;

    Angle star(long ell) const { return Angle::orbit(ell, precision_bits); }
    GenericBoxParams box(long ell) const;
    ArcInterval basint(long ell) const;    // B(ell*, alpha_|ell|)
    ArcInterval wbasint(long ell) const;   // winged footprint
    ArcInterval delta_ball(long ell) const;
    Rat wbasint_radius(long ell) const;

    // gamma memo (idempotent; behaves as if absent)
    mutable std::mutex memo_mutex;
    mutable std::map<std::tuple<int, Rat, Rat, long, Rat>, CurveValue> gamma_memo;

    ConstructionState() = default;
    ConstructionState(const ConstructionState& o)
        : precision_bits(o.precision_bits), orbit_horizon(o.orbit_horizon), levels(o.levels) {}
    ConstructionState& operator=(const ConstructionState& o) {
        precision_bits = o.precision_bits;
        orbit_horizon = o.orbit_horizon;
        levels = o.levels;
        return *this;
    }
};

/// Level 0: n0 = 1, anchors 0; the radii are found by halving a dyadic seed
/// until every opening condition certifies with the required margin.
ConstructionState init_level0(const BuildConfig& config);

/// Append level j (boxes +-j). Search: seed alpha, halve until the arc
/// conditions certify; failures of the vertical box-nesting clause bump n.
void extend_level(ConstructionState& state, int j, const BuildConfig& config);

/// Build to config.depth.
ConstructionState build_state(const BuildConfig& config);

/// Certify every condition family of level j against the constructed state.
ConditionReport check_conditions(const ConstructionState& state, int j,
                                 const Rat& required_margin = Rat(0));

/// gamma_j(theta); j = -1 is the zero curve.
CurveValue gamma_eval(const ConstructionState& state, int j, const Angle& theta);

/// Enclosure of gamma(theta) = lim gamma_j(theta) with tail <= eps when the
/// constructed depth allows; horizon_limited otherwise (tail from the deepest
/// constructed level is still applied, so the enclosure remains certified).
CurveValue gamma_limit(const ConstructionState& state, const Angle& theta, const Rat& eps);

/// Certified enclosure of {gamma_j(theta) : theta in arc}.
Scalar gamma_range(const ConstructionState& state, int j, const LocalArc& arc);

/// Certified enclosure of the slope of gamma_j over an arc avoiding the
/// excluded centers; throws precision_error when a center cannot be excluded.
Scalar gamma_deriv_range(const ConstructionState& state, int j, const LocalArc& arc);

/// I_{i,theta} = [m_i(theta), M_i(theta)] over the winged footprint.
FiberInterval winged_bounds(const ConstructionState& state, long i, const Angle& theta);

/// Grid sample of the level-j curve plus the vertical fibers at the
/// excluded centers.
std::vector<CurveSample> pseudo_curve_sample(const ConstructionState& state, int j,
                                             int grid_size);

void save_state(const ConstructionState& state, const std::string& path);
ConstructionState load_state(const std::string& path, bool recertify = true);

}  // namespace pcurve

#endif
