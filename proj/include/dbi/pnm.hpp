#pragma once

#include <string>

#include "dbi/raster.hpp"

namespace dbi {

/// 8-bit PGM (P2 or P5) into reals. Throws IoError on malformed headers or
/// maxval != 255.
Raster load_pgm(const std::string &path);

/// Writes 8-bit PGM, rounding and clamping values to [0,255].
/// binary selects P5 over P2.
void save_pgm(const std::string &path, const Raster &img, bool binary = true);

/// PBM masks (P1 or P4); a set mask bit is stored as PBM black (1).
Mask load_pbm(const std::string &path);
void save_pbm(const std::string &path, const Mask &mask, bool binary = true);

/// Exact raster sidecar: little-endian float64 dump with a small header.
/// Used next to the scaled PGM preview of density maps.
Raster load_raster_f64(const std::string &path);
void save_raster_f64(const std::string &path, const Raster &img);

} // namespace dbi
