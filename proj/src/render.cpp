#include "de/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>

namespace de {
namespace {

struct Rgb {
    uint8_t r, g, b;
};

const Rgb kPalette[] = {
    {231, 76, 60},  {46, 204, 113}, {52, 152, 219}, {241, 196, 15},
    {155, 89, 182}, {230, 126, 34}, {26, 188, 156}, {236, 240, 241},
};

void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        img.set(x0, y0, c.r, c.g, c.b);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_marker(Image& img, int x, int y, Rgb c) {
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) img.set(x + dx, y + dy, c.r, c.g, c.b);
}

int px(double v) { return static_cast<int>(std::llround(v)); }

}  // namespace

Image::Image(int w, int h)
    : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

void Image::set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
    if (x < 0 || x >= width || y < 0 || y >= height) return;
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
}

void Image::write_ppm(std::ostream& out) const {
    out << "P6\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()),
              static_cast<std::streamsize>(rgb.size()));
}

Image render_poses(const std::vector<PersonPose>& poses,
                   const SkeletonSpec& skeleton, int width, int height) {
    Image img(width, height);
    const int center = skeleton.center_id();

    std::vector<std::pair<int, int>> edges = skeleton.hierarchy_edges();
    for (int f : skeleton.facial_ids()) edges.emplace_back(f, center);
    for (const auto& joint : skeleton.joints())
        if (joint.group == JointGroup::Root) edges.emplace_back(joint.id, center);

    for (std::size_t n = 0; n < poses.size(); ++n) {
        PersonPose pose = poses[n];
        fill_center(pose, skeleton);  // decoded poses arrive with the hub stripped
        const Rgb c = kPalette[n % (sizeof(kPalette) / sizeof(kPalette[0]))];
        for (const auto& [a, b] : edges) {
            const Keypoint& ka = pose.joints[static_cast<std::size_t>(a)];
            const Keypoint& kb = pose.joints[static_cast<std::size_t>(b)];
            if (!ka.visible || !kb.visible) continue;
            draw_line(img, px(ka.x), px(ka.y), px(kb.x), px(kb.y), c);
        }
        for (const auto& joint : skeleton.joints()) {
            const Keypoint& kp = pose.joints[static_cast<std::size_t>(joint.id)];
            if (!kp.visible) continue;
            draw_marker(img, px(kp.x), px(kp.y), c);
        }
    }
    return img;
}

}  // namespace de
