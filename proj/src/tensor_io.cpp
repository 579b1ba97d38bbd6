#include "scroll/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "scroll/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "tensor i/o assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace scroll {

namespace {
constexpr char kMagic[4] = {'S', 'C', 'R', 'L'};
constexpr std::uint8_t kVersion = 1;
}  // namespace

void write_tensor(const std::string& path, const LatentCanvas& canvas) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write tensor file: " + path);
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), 1);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(canvas.height),
                                   static_cast<std::uint32_t>(canvas.width),
                                   static_cast<std::uint32_t>(canvas.channels)};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(canvas.data.data()),
              static_cast<std::streamsize>(canvas.data.size() * sizeof(float)));
    if (!out) throw IoError("failed writing tensor file: " + path);
}

LatentCanvas read_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tensor file: " + path);
    char magic[4] = {};
    std::uint8_t version = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 1);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not a tensor file: " + path);
    if (version != kVersion)
        throw IoError("unsupported tensor version in " + path);

    std::uint32_t dims[3] = {};
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw IoError("truncated tensor header: " + path);
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0 ||
        dims[0] > (1u << 20) || dims[1] > (1u << 20) || dims[2] > 1024)
        throw IoError("implausible tensor dims in " + path);

    LatentCanvas canvas(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                        static_cast<int>(dims[2]));
    in.read(reinterpret_cast<char*>(canvas.data.data()),
            static_cast<std::streamsize>(canvas.data.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(canvas.data.size() * sizeof(float)))
        throw IoError("truncated tensor data: " + path);
    return canvas;
}

}  // namespace scroll
