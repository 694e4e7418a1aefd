#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace de {

// Dense row-major 2D float grid. x indexes columns, y indexes rows,
// (0,0) is the top-left pixel. A default-constructed grid is "absent"
// (empty()) and stands for a channel that was never encoded.
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, float fill = 0.0f)
        : width_(width),
          height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    float at(int x, int y) const {
        assert(in_bounds(x, y));
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    float& at(int x, int y) {
        assert(in_bounds(x, y));
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    // Reads outside the grid yield 0; border peak windows rely on this.
    float at_or_zero(int x, int y) const {
        return in_bounds(x, y) ? at(x, y) : 0.0f;
    }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

}  // namespace de
