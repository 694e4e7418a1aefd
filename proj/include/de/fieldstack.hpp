#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "de/grid.hpp"

namespace de {

// Channel kinds as stored in the DEFS container (see docs/fieldstack.md).
enum class GridKind : std::uint8_t {
    Confidence = 0,
    Tag = 1,
    DispX = 2,
    DispY = 3,
    BasicDispX = 4,
    BasicDispY = 5,
};

// Per-joint-type field grids for one image. Vectors are indexed by joint
// id; an empty Grid marks a channel the encoder does not produce for that
// joint (tags exist only for root-group joints, displacements only for
// adjacency/facial joints, basic channels only for adjacency joints).
struct FieldStack {
    int width = 0;
    int height = 0;
    std::vector<Grid> conf;
    std::vector<Grid> tag;
    std::vector<Grid> disp_x;
    std::vector<Grid> disp_y;
    std::vector<Grid> basic_x;
    std::vector<Grid> basic_y;

    void resize_joints(int joint_count) {
        conf.resize(joint_count);
        tag.resize(joint_count);
        disp_x.resize(joint_count);
        disp_y.resize(joint_count);
        basic_x.resize(joint_count);
        basic_y.resize(joint_count);
    }

    int joint_count() const { return static_cast<int>(conf.size()); }

    // Normalization factor Z for displacement fields.
    double diag() const {
        return std::sqrt(static_cast<double>(width) * width +
                         static_cast<double>(height) * height);
    }

    Grid& channel(int joint_id, GridKind kind);
    const Grid& channel(int joint_id, GridKind kind) const;

    friend bool operator==(const FieldStack&, const FieldStack&) = default;
};

// DEFS binary container, little-endian on every platform.
void write_defs(const FieldStack& stack, std::ostream& out);
FieldStack read_defs(std::istream& in);

void write_defs_file(const FieldStack& stack, const std::string& path);
FieldStack read_defs_file(const std::string& path);

}  // namespace de
