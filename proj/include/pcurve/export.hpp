#ifndef PCURVE_EXPORT_HPP
#define PCURVE_EXPORT_HPP

#include <string>

#include "pcurve/construction.hpp"
#include "pcurve/dynamics.hpp"

namespace pcurve {

/// CSV rows "theta_lo,theta_hi,value_lo,value_hi,tag" (header mandatory,
/// exact decimal strings); SVG 1.1 polylines. For fiber maps the first two
/// columns carry the fiber abscissa.
void export_curve(const ConstructionState& state, int level, int grid, const std::string& format,
                  const std::string& path);
void export_boxes(const ConstructionState& state, int depth, const std::string& format,
                  const std::string& path);
void export_map(const Dynamics& dyn, int m, const Angle& theta, const Rat& eps,
                const std::string& format, const std::string& path);
void export_orbit(const ConstructionState& state, int count, const std::string& format,
                  const std::string& path);

}  // namespace pcurve

#endif
