// SPDX-License-Identifier: Apache-2.0
#include "paftrack/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace paftrack {

namespace {

constexpr char kMagic[4] = {'P', 'F', 'L', 'D'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 2 + 2 + 8 * 4;
constexpr std::uint32_t kMaxDim = 1 << 20;
constexpr std::uint32_t kMaxChannels = 4096;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_plane(std::string& out, const Plane& p) {
    for (float v : p.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
}

struct Reader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;

    [[noreturn]] void truncated(std::size_t want) const {
        throw IoError(IoError::Kind::truncated, "byte " + std::to_string(pos),
                      "expected " + std::to_string(want) + " more bytes, got " +
                          std::to_string(size - pos));
    }

    std::uint16_t u16() {
        if (size - pos < 2) truncated(2);
        const std::uint16_t v =
            static_cast<std::uint16_t>(data[pos]) | (static_cast<std::uint16_t>(data[pos + 1]) << 8);
        pos += 2;
        return v;
    }

    std::uint32_t u32() {
        if (size - pos < 4) truncated(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }

    void read_plane(Plane& p) {
        const std::size_t bytes = p.size() * 4;
        if (size - pos < bytes) truncated(bytes);
        for (float& v : p.values) {
            std::uint32_t bits = 0;
            for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(data[pos + i]) << (8 * i);
            v = std::bit_cast<float>(bits);
            pos += 4;
        }
    }
};

}  // namespace

std::string serialize_field_stack(const FieldStack& stack) {
    std::string out;
    out.append(kMagic, 4);
    put_u16(out, kVersion);
    put_u16(out, 0);  // reserved
    put_u32(out, static_cast<std::uint32_t>(stack.grid.width));
    put_u32(out, static_cast<std::uint32_t>(stack.grid.height));
    put_u32(out, static_cast<std::uint32_t>(stack.grid.scale_factor));
    put_u32(out, static_cast<std::uint32_t>(stack.visible.size()));
    put_u32(out, static_cast<std::uint32_t>(stack.occluded.size()));
    put_u32(out, static_cast<std::uint32_t>(stack.paf.size() / 2));
    put_u32(out, static_cast<std::uint32_t>(stack.taf.size() / 2));
    put_u32(out, 1);  // mask channel
    for (const Plane& p : stack.visible) put_plane(out, p);
    for (const Plane& p : stack.occluded) put_plane(out, p);
    for (const Plane& p : stack.paf) put_plane(out, p);
    for (const Plane& p : stack.taf) put_plane(out, p);
    put_plane(out, stack.mask);
    return out;
}

FieldStack parse_field_stack(const std::uint8_t* data, std::size_t size, std::size_t& offset) {
    Reader r{data, size, offset};
    if (r.size - r.pos < kHeaderSize)
        throw IoError(IoError::Kind::truncated, "byte " + std::to_string(r.pos),
                      "incomplete header: expected " + std::to_string(kHeaderSize) +
                          " bytes, got " + std::to_string(r.size - r.pos));
    if (std::memcmp(data + r.pos, kMagic, 4) != 0)
        throw IoError(IoError::Kind::bad_magic, "byte " + std::to_string(r.pos),
                      "bad magic, expected \"PFLD\"");
    r.pos += 4;
    const std::uint16_t version = r.u16();
    if (version != kVersion)
        throw IoError(IoError::Kind::bad_version, "byte " + std::to_string(r.pos - 2),
                      "unsupported version " + std::to_string(version));
    const std::uint16_t reserved = r.u16();
    if (reserved != 0)
        throw IoError(IoError::Kind::schema, "byte " + std::to_string(r.pos - 2),
                      "reserved field must be zero");
    const std::uint32_t width = r.u32();
    const std::uint32_t height = r.u32();
    const std::uint32_t scale = r.u32();
    const std::uint32_t n_visible = r.u32();
    const std::uint32_t n_occluded = r.u32();
    const std::uint32_t n_paf = r.u32();
    const std::uint32_t n_taf = r.u32();
    const std::uint32_t n_mask = r.u32();

    if (width == 0 || height == 0 || width > kMaxDim || height > kMaxDim || scale == 0)
        throw IoError(IoError::Kind::schema, "byte " + std::to_string(offset + 8),
                      "implausible grid dimensions " + std::to_string(width) + "x" +
                          std::to_string(height));
    if (n_visible > kMaxChannels || n_occluded > kMaxChannels || n_paf > kMaxChannels ||
        n_taf > kMaxChannels || n_mask > 1)
        throw IoError(IoError::Kind::schema, "byte " + std::to_string(offset + 20),
                      "implausible channel counts");

    const std::uint64_t planes = static_cast<std::uint64_t>(n_visible) + n_occluded +
                                 2ull * n_paf + 2ull * n_taf + n_mask;
    const std::uint64_t payload =
        planes * static_cast<std::uint64_t>(width) * height * 4ull;
    if (payload > r.size - r.pos)
        throw IoError(IoError::Kind::truncated, "byte " + std::to_string(r.pos),
                      "payload needs " + std::to_string(payload) + " bytes, got " +
                          std::to_string(r.size - r.pos));

    FieldStack stack;
    stack.grid = Grid{static_cast<int>(width), static_cast<int>(height), static_cast<int>(scale)};
    const int w = stack.grid.width;
    const int h = stack.grid.height;
    stack.visible.assign(n_visible, Plane(w, h));
    stack.occluded.assign(n_occluded, Plane(w, h));
    stack.paf.assign(2 * n_paf, Plane(w, h));
    stack.taf.assign(2 * n_taf, Plane(w, h));
    for (Plane& p : stack.visible) r.read_plane(p);
    for (Plane& p : stack.occluded) r.read_plane(p);
    for (Plane& p : stack.paf) r.read_plane(p);
    for (Plane& p : stack.taf) r.read_plane(p);
    stack.mask = Plane(w, h, 1.0f);
    if (n_mask == 1) r.read_plane(stack.mask);
    offset = r.pos;
    return stack;
}

std::vector<FieldStack> parse_field_stream(const std::uint8_t* data, std::size_t size) {
    std::vector<FieldStack> stacks;
    std::size_t offset = 0;
    while (offset < size) stacks.push_back(parse_field_stack(data, size, offset));
    return stacks;
}

void save_field_file(const std::string& path, const std::vector<FieldStack>& stacks) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(IoError::Kind::schema, path, "cannot open for writing");
    for (const FieldStack& stack : stacks) {
        const std::string bytes = serialize_field_stack(stack);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    if (!out) throw IoError(IoError::Kind::schema, path, "write failed");
}

std::vector<FieldStack> load_field_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::schema, path, "cannot open for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_field_stream(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
}

std::optional<FieldStack> read_field_stack(std::istream& in) {
    std::string header(kHeaderSize, '\0');
    in.read(header.data(), static_cast<std::streamsize>(kHeaderSize));
    const std::streamsize got = in.gcount();
    if (got == 0) return std::nullopt;
    if (static_cast<std::size_t>(got) < kHeaderSize)
        throw IoError(IoError::Kind::truncated, "byte 0",
                      "incomplete header: expected " + std::to_string(kHeaderSize) +
                          " bytes, got " + std::to_string(got));

    // Re-parse the header to size the payload, then pull the rest.
    const auto* hdr = reinterpret_cast<const std::uint8_t*>(header.data());
    auto u32_at = [&](std::size_t at) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(hdr[at + i]) << (8 * i);
        return v;
    };
    const std::uint64_t width = u32_at(8);
    const std::uint64_t height = u32_at(12);
    const std::uint64_t planes = static_cast<std::uint64_t>(u32_at(20)) + u32_at(24) +
                                 2ull * u32_at(28) + 2ull * u32_at(32) + u32_at(36);
    if (width == 0 || height == 0 || width > kMaxDim || height > kMaxDim ||
        planes > 6ull * kMaxChannels)
        throw IoError(IoError::Kind::schema, "byte 8", "implausible header");

    std::string bytes = header;
    const std::uint64_t payload = planes * width * height * 4ull;
    bytes.resize(kHeaderSize + payload);
    in.read(bytes.data() + kHeaderSize, static_cast<std::streamsize>(payload));
    if (static_cast<std::uint64_t>(in.gcount()) < payload)
        throw IoError(IoError::Kind::truncated, "byte " + std::to_string(kHeaderSize),
                      "payload needs " + std::to_string(payload) + " bytes, got " +
                          std::to_string(in.gcount()));

    std::size_t offset = 0;
    return parse_field_stack(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size(),
                             offset);
}

void write_field_stack(std::ostream& out, const FieldStack& stack) {
    const std::string bytes = serialize_field_stack(stack);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace paftrack
