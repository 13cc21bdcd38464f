#include "pcurve/strata.hpp"

#include <algorithm>

namespace pcurve {

DepthTable build_depth_table(const ConstructionState& state) {
    return build_depth_table_limited(state, state.depth());
}

DepthTable build_depth_table_limited(const ConstructionState& state, int max_abs_index) {
    DepthTable table;
    const int J = std::min(max_abs_index, state.depth());
    std::vector<long> indices;
    for (int a = 0; a <= J; ++a) {
        indices.push_back(a);
        if (a > 0) indices.push_back(-a);
    }
    if (indices.empty()) return table;
    for (long ell : indices) {
        int d = 0;
        ArcInterval mine = state.wbasint(ell);
        for (long i : indices) {
            if (i == ell || std::abs(i) >= std::abs(ell)) continue;  // only wider footprints
            ArcInterval host = state.wbasint(i);
            Cert inside = host.contains_arc(mine);
            if (inside == Cert::yes) {
                ++d;
                continue;
            }
            if (inside == Cert::no) continue;
            // distinguish "partially overlapping" (impossible in a certified
            // state) from plain undecided
            if (host.disjoint(mine, nullptr) == Cert::yes) continue;
            throw precision_error("build_depth_table: containment undecided for " +
                                  std::to_string(ell) + " in " + std::to_string(i));
        }
        table.dep[ell] = d;
    }
    int maxd = 0;
    for (const auto& [ell, d] : table.dep) maxd = std::max(maxd, d);
    table.strata.assign(static_cast<size_t>(maxd) + 1, {});
    for (long ell : indices) table.strata[static_cast<size_t>(table.dep[ell])].push_back(ell);
    for (const auto& stratum : table.strata) {
        int m = std::numeric_limits<int>::max();
        for (long i : stratum) m = std::min(m, static_cast<int>(std::abs(i)));
        table.mu.push_back(m);
    }
    return table;
}

int depth(const ConstructionState& state, const DepthTable& table, long ell) {
    if (std::abs(ell) > state.depth()) throw domain_error("depth: index beyond construction");
    return table.dep.at(ell);
}

std::optional<std::vector<long>> depth_class(const DepthTable& table, int m) {
    if (m < 0 || m > table.max_depth()) return std::nullopt;
    return table.strata[static_cast<size_t>(m)];
}

std::optional<int> mu(const DepthTable& table, int m) {
    if (m < 0 || m > table.max_depth()) return std::nullopt;
    return table.mu[static_cast<size_t>(m)];
}

namespace {

// membership of theta in the closed inner ball of box b, with the exact
// boundary detected structurally for tagged angles
enum class BallPos { inside, boundary, wing, straddle };

BallPos inner_position(const ConstructionState& state, long b, const Angle& theta) {
    const Rat alpha = state.level(static_cast<int>(std::abs(b))).alpha;
    Scalar z = box_local(state.box(b), theta);
    if (z.is_point()) {
        Rat az = z.abs().lo();
        if (az == alpha) return BallPos::boundary;
        return az < alpha ? BallPos::inside : BallPos::wing;
    }
    if (z.abs().hi() < alpha) return BallPos::inside;
    if (z.abs().lo() > alpha) return BallPos::wing;
    return BallPos::straddle;
}

}  // namespace

WingLocation locate(const ConstructionState& state, const DepthTable& table, int m,
                    const Angle& theta) {
    WingLocation loc;
    if (m < 0) throw domain_error("locate: negative stratum");
    if (m > table.max_depth()) return loc;  // empty stratum: outside

    // the unique footprint of stratum m containing theta
    std::optional<long> found;
    for (long i : table.strata[static_cast<size_t>(m)]) {
        Cert c = state.wbasint(i).contains(theta);
        if (c == Cert::yes) {
            found = i;
            break;
        }
        if (c == Cert::undecided)
            throw precision_error("locate: footprint membership straddles a boundary");
    }
    if (!found) return loc;  // outside
    loc.b = *found;

    BallPos pos = inner_position(state, loc.b, theta);
    if (pos == BallPos::straddle)
        throw precision_error("locate: enclosure straddles an inner-ball boundary");
    if (pos == BallPos::inside || pos == BallPos::boundary || loc.b >= 0) {
        loc.kind = WingLocation::Kind::in_IB;
        loc.at_inner_boundary = pos == BallPos::boundary;
        return loc;
    }

    // wing of a negative box: resolve the least essential depth
    for (int mm = m + 1; mm <= table.max_depth(); ++mm) {
        std::optional<long> host;
        for (long i : table.strata[static_cast<size_t>(mm)]) {
            Cert c = state.wbasint(i).contains(theta);
            if (c == Cert::yes) {
                host = i;
                break;
            }
            if (c == Cert::undecided)
                throw precision_error("locate: deep footprint membership straddles a boundary");
        }
        if (!host) {
            loc.kind = WingLocation::Kind::in_wing_flat;  // exits the constructed wing system
            return loc;
        }
        BallPos deep_pos = inner_position(state, *host, theta);
        if (deep_pos == BallPos::straddle)
            throw precision_error("locate: enclosure straddles a deep inner-ball boundary");
        if (deep_pos == BallPos::inside) {
            loc.kind = WingLocation::Kind::in_wing_interior;
            loc.led = mm;
            loc.deep = *host;
            return loc;
        }
        if (deep_pos == BallPos::boundary) {
            // covered by the closed inner ball but not its interior: the
            // deep fiber degenerates to the wing value
            loc.kind = WingLocation::Kind::in_wing_flat;
            return loc;
        }
        // still in a wing at stratum mm (host < 0): continue deeper
    }
    loc.kind = WingLocation::Kind::horizon_limited;
    return loc;
}

WingInterval wing_bounds(const ConstructionState& state, const DepthTable& table, int m,
                         const Angle& theta) {
    WingLocation loc = locate(state, table, m, theta);
    WingInterval out;
    switch (loc.kind) {
        case WingLocation::Kind::outside:
            throw domain_error("wing_bounds: angle outside stratum footprints");
        case WingLocation::Kind::in_IB:
            if (!loc.at_inner_boundary || loc.b >= 0)
                throw domain_error("wing_bounds: angle is not in a wing");
            [[fallthrough]];
        case WingLocation::Kind::in_wing_flat: {
            CurveValue v = gamma_eval(state, static_cast<int>(std::abs(loc.b)), theta);
            out.lo = out.hi = v.value;
            out.degenerate = true;
            return out;
        }
        case WingLocation::Kind::in_wing_interior: {
            FiberInterval f = winged_bounds(state, loc.deep, theta);
            out.lo = f.lo;
            out.hi = f.hi;
            out.degenerate = f.degenerate;
            return out;
        }
        case WingLocation::Kind::horizon_limited: {
            // a deeper (unconstructed) box may cover theta; its fiber both
            // contains the wing value and has diameter <= 2*2^-(J+2)
            CurveValue v = gamma_eval(state, static_cast<int>(std::abs(loc.b)), theta);
            Rat pad = pow2(-(state.depth() + 1));
            out.lo = (v.value - Scalar(pad)).compressed(state.precision_bits);
            out.hi = (v.value + Scalar(pad)).compressed(state.precision_bits);
            out.horizon_limited = true;
            return out;
        }
    }
    throw domain_error("wing_bounds: unreachable");
}

}  // namespace pcurve
