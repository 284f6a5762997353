#pragma once

#include <string>
#include <vector>

#include "dbi/raster.hpp"

namespace dbi {

/// Procedural grayscale test images in [0,255].
///   shapes  - piecewise smooth scene: disks and bars over a shaded backdrop
///   portrait - soft-edged ellipse, accents and a textured wrap
///   scene   - sky with clouds and sun over an undulating textured ground
///   waves   - smooth oscillating texture with an illumination ramp
///   rings   - concentric oscillation over shading, soft lower edge
///   blobs   - soft Gaussian bumps split by a step edge
///   ramp    - plain linear gradient
///   step    - vertical step edge
Raster synthetic_image(const std::string &kind, int width, int height);

std::vector<std::string> synthetic_kinds();

} // namespace dbi
