#ifndef PCURVE_METRICS_HPP
#define PCURVE_METRICS_HPP

#include <string>
#include <vector>

#include "pcurve/construction.hpp"

namespace pcurve {

/// A sampled metric estimate. `low` is a certified lower bound of the
/// supremum (it is a max over a finite subset); no upper bound is claimed.
struct MetricEstimate {
    Scalar low;
    long sample_count = 0;
    std::string grid;
};

/// Sampled sup |gamma_jA - gamma_jB| over a uniform grid plus targeted
/// samples at the oscillation extrema near the excluded centers.
MetricEstimate dinf_sampled(const ConstructionState& state, int jA, int jB, int grid_size);

/// Symmetric max-min distance between finite certified point sets, under the
/// product metric max(circle gap, |x - y|).
MetricEstimate hausdorff_sampled(const std::vector<CylPoint>& A, const std::vector<CylPoint>& B);

}  // namespace pcurve

#endif
