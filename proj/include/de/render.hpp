#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "de/skeleton.hpp"

namespace de {

// 8-bit RGB raster with binary PPM (P6) output.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel

    Image() = default;
    Image(int w, int h);
    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
    void write_ppm(std::ostream& out) const;
};

// Draws skeleton edges and joint markers for each pose, one palette
// color per person. Centers missing from a pose are recomputed so the
// hub edges still draw.
Image render_poses(const std::vector<PersonPose>& poses,
                   const SkeletonSpec& skeleton, int width, int height);

}  // namespace de
