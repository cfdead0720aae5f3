#pragma once

#include <optional>
#include <span>
#include <string>

#include "fdtruss/fea.hpp"
#include "fdtruss/ground.hpp"
#include "fdtruss/pareto.hpp"

namespace fdtruss {

/// Region of model (or objective) space to draw.
struct Window {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;
};

/// SVG drawing of a realized design. Stroke width is proportional to area,
/// with the largest member drawn at 2% of the larger window extent. Members
/// below the topology readout threshold are omitted. Tension is blue,
/// compression red. Supports are triangles and loads arrows. The default
/// window encloses the drawn members, supports and loaded nodes.
std::string truss_svg(const GroundStructure& g, const TrussDesign& d,
                      std::optional<Window> window = std::nullopt);

/// Scatter plot of front points ('+') with optional reference points (dots).
std::string front_svg(std::span<const ParetoPoint> points,
                      std::span<const Objectives> reference = {},
                      std::optional<Window> window = std::nullopt);

} // namespace fdtruss
