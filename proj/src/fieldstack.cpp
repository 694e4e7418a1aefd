#include "de/fieldstack.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "de/errors.hpp"

namespace de {
namespace {

constexpr char kMagic[4] = {'D', 'E', 'F', 'S'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::ostream& out, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(bytes, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {
        static_cast<char>(v & 0xff),
        static_cast<char>((v >> 8) & 0xff),
        static_cast<char>((v >> 16) & 0xff),
        static_cast<char>((v >> 24) & 0xff),
    };
    out.write(bytes, 4);
}

void put_f32(std::ostream& out, float v) {
    static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

bool get_bytes(std::istream& in, char* dst, std::streamsize n) {
    in.read(dst, n);
    return in.gcount() == n;
}

std::uint16_t get_u16(std::istream& in) {
    unsigned char b[2];
    if (!get_bytes(in, reinterpret_cast<char*>(b), 2))
        throw FormatError("defs: truncated file");
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!get_bytes(in, reinterpret_cast<char*>(b), 4))
        throw FormatError("defs: truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in) {
    const std::uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

void write_record(std::ostream& out, int joint_id, GridKind kind, const Grid& grid) {
    put_u16(out, static_cast<std::uint16_t>(joint_id));
    const char kind_byte = static_cast<char>(kind);
    out.write(&kind_byte, 1);
    put_u32(out, static_cast<std::uint32_t>(grid.width()));
    put_u32(out, static_cast<std::uint32_t>(grid.height()));
    for (float v : grid.data()) put_f32(out, v);
}

}  // namespace

Grid& FieldStack::channel(int joint_id, GridKind kind) {
    auto& vec = kind == GridKind::Confidence ? conf
                : kind == GridKind::Tag      ? tag
                : kind == GridKind::DispX    ? disp_x
                : kind == GridKind::DispY    ? disp_y
                : kind == GridKind::BasicDispX ? basic_x
                                               : basic_y;
    return vec[static_cast<std::size_t>(joint_id)];
}

const Grid& FieldStack::channel(int joint_id, GridKind kind) const {
    return const_cast<FieldStack*>(this)->channel(joint_id, kind);
}

void write_defs(const FieldStack& stack, std::ostream& out) {
    out.write(kMagic, 4);
    put_u16(out, kVersion);
    constexpr GridKind kinds[] = {GridKind::Confidence, GridKind::Tag,
                                  GridKind::DispX,      GridKind::DispY,
                                  GridKind::BasicDispX, GridKind::BasicDispY};
    for (int id = 0; id < stack.joint_count(); ++id) {
        for (GridKind kind : kinds) {
            const Grid& grid = stack.channel(id, kind);
            if (!grid.empty()) write_record(out, id, kind, grid);
        }
    }
    if (!out) throw FormatError("defs: write failed");
}

FieldStack read_defs(std::istream& in) {
    char magic[4];
    if (!get_bytes(in, magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("defs: bad magic");
    const std::uint16_t version = get_u16(in);
    if (version != kVersion)
        throw FormatError("defs: unsupported version " + std::to_string(version));

    FieldStack stack;
    while (true) {
        unsigned char head[2];
        in.read(reinterpret_cast<char*>(head), 2);
        if (in.gcount() == 0 && in.eof()) break;
        if (in.gcount() != 2) throw FormatError("defs: truncated record header");
        const int joint_id = head[0] | (head[1] << 8);

        char kind_byte;
        if (!get_bytes(in, &kind_byte, 1)) throw FormatError("defs: truncated record");
        const auto kind_raw = static_cast<std::uint8_t>(kind_byte);
        if (kind_raw > static_cast<std::uint8_t>(GridKind::BasicDispY))
            throw FormatError("defs: unknown channel kind " + std::to_string(kind_raw));
        const auto kind = static_cast<GridKind>(kind_raw);

        const auto w = static_cast<int>(get_u32(in));
        const auto h = static_cast<int>(get_u32(in));
        if (w <= 0 || h <= 0 || static_cast<long long>(w) * h > (1LL << 28))
            throw FormatError("defs: implausible grid dimensions");
        if (stack.width == 0) {
            stack.width = w;
            stack.height = h;
        } else if (w != stack.width || h != stack.height) {
            throw FormatError("defs: mixed grid dimensions");
        }

        if (joint_id >= stack.joint_count()) stack.resize_joints(joint_id + 1);
        Grid& grid = stack.channel(joint_id, kind);
        if (!grid.empty()) throw FormatError("defs: duplicate channel record");
        grid = Grid(w, h);
        for (float& v : grid.data()) v = get_f32(in);
    }
    if (stack.joint_count() == 0) throw FormatError("defs: no records");
    return stack;
}

void write_defs_file(const FieldStack& stack, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("defs: cannot open " + path + " for writing");
    write_defs(stack, out);
}

FieldStack read_defs_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("defs: cannot open " + path);
    return read_defs(in);
}

}  // namespace de
