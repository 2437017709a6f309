#pragma once

#include <string>

#include "autostyle/error.hpp"
#include "autostyle/image.hpp"

namespace autostyle {

enum class ImageFormat { png, jpeg };

/// Sniffs the container from magic bytes (the extension is ignored) and
/// decodes to [0,1] samples. Alpha is composited over white; gray is
/// expanded to RGB.
RgbImage decode_image(const std::string& path);

/// Writes 8-bit samples quantized as round(v*255), half away from zero.
/// PNG output is lossless and byte-stable; `jpeg_quality` only affects JPEG.
void encode_image(const RgbImage& img, const std::string& path,
                  ImageFormat format, int jpeg_quality = 90);

/// Maps "png"/"jpeg"/"jpg" (case-sensitive) to a format.
/// Throws Errc::invalid_format otherwise.
ImageFormat parse_image_format(const std::string& name);

}  // namespace autostyle
