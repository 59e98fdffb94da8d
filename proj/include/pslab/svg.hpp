#pragma once

#include <string>

#include <json.hpp>

namespace pslab {

// Dependency-free SVG renderers over report series data. Each throws
// InvalidArgument when the required series is missing.

// Flat-line diagnostic: level-sum value against the slab level k.
std::string render_stabilization_svg(const nlohmann::json& series);

// Essentiality defect against the number of adjoint terms, log y-scale.
std::string render_essentiality_svg(const nlohmann::json& series);

// d = 2 lattice map coloured by the slab index n(x).
std::string render_partition_svg(const nlohmann::json& series);

}  // namespace pslab
