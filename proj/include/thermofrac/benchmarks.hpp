#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "thermofrac/config.hpp"

namespace thermofrac {

/// Names accepted by example_config, in display order.
const std::vector<std::string>& example_names();

/// Built-in benchmark configuration. `scale` in (0, 1] multiplies the
/// phase-field length scale and every mesh size by 1/scale, so the mesh to
/// length-scale ratio is unchanged while the element count drops by about
/// scale^2. Throws InvalidArgument for an unknown name (the message lists the
/// valid ones) or a scale outside (0, 1].
RunConfig example_config(std::string_view name, double scale = 1.0);

/// Pre-crack tip in meters for the notched examples; NaN otherwise.
Vec2 example_notch_tip(std::string_view name);

}  // namespace thermofrac
