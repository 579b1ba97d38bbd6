#pragma once

#include <string>

#include "scroll/types.hpp"

namespace scroll {

// Raw tensor file: magic "SCRL", version u8 = 1, u32 little-endian
// height, width, channels, then height*width*channels little-endian
// f32 values, row-major, channel-innermost.
void write_tensor(const std::string& path, const LatentCanvas& canvas);
LatentCanvas read_tensor(const std::string& path);

}  // namespace scroll
