#pragma once

#include "de/fieldstack.hpp"

namespace de::testsupport {

// Reference stack behind tests/data/golden.defs. Every value is a dyadic
// rational, so the float bytes are identical on any IEEE-754 platform.
inline FieldStack make_golden_stack() {
    FieldStack stack;
    stack.width = 6;
    stack.height = 4;
    stack.resize_joints(3);

    Grid conf0(6, 4), tag0(6, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x) {
            conf0.at(x, y) = static_cast<float>(x + 6 * y) / 32.0f;
            tag0.at(x, y) = static_cast<float>(x - y) * 0.5f;
        }
    stack.conf[0] = conf0;
    stack.tag[0] = tag0;

    Grid conf1(6, 4);
    conf1.at(0, 0) = 0.25f;
    conf1.at(3, 2) = 1.0f;
    Grid dx1(6, 4), dy1(6, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x) {
            dx1.at(x, y) = static_cast<float>(x + 1) * -0.125f;
            dy1.at(x, y) = static_cast<float>(y) * 0.0625f;
        }
    stack.conf[1] = conf1;
    stack.disp_x[1] = dx1;
    stack.disp_y[1] = dy1;

    stack.basic_x[2] = Grid(6, 4, 0.75f);
    stack.basic_y[2] = Grid(6, 4, -1.5f);
    return stack;
}

}  // namespace de::testsupport
