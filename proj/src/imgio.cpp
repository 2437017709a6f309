#include "autostyle/imgio.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <vector>

#include <jpeglib.h>
#include <png.h>

namespace autostyle {

namespace {

constexpr unsigned char kPngMagic[4] = {0x89, 'P', 'N', 'G'};
constexpr unsigned char kJpegMagic[3] = {0xFF, 0xD8, 0xFF};

struct FileHandle {
  FILE* f = nullptr;
  explicit FileHandle(FILE* handle) : f(handle) {}
  ~FileHandle() {
    if (f) std::fclose(f);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;
};

float to_unit(unsigned char v) { return float(v) * (1.0f / 255.0f); }

unsigned char to_byte(float v) {
  const float clamped = std::min(1.0f, std::max(0.0f, v));
  return static_cast<unsigned char>(std::lround(clamped * 255.0f));
}

RgbImage from_interleaved(int width, int height,
                          const std::vector<unsigned char>& rgb) {
  RgbImage img(width, height);
  const size_t n = img.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    img.r[i] = to_unit(rgb[3 * i + 0]);
    img.g[i] = to_unit(rgb[3 * i + 1]);
    img.b[i] = to_unit(rgb[3 * i + 2]);
  }
  return img;
}

std::vector<unsigned char> to_interleaved(const RgbImage& img) {
  const size_t n = img.pixel_count();
  std::vector<unsigned char> rgb(n * 3);
  for (size_t i = 0; i < n; ++i) {
    rgb[3 * i + 0] = to_byte(img.r[i]);
    rgb[3 * i + 1] = to_byte(img.g[i]);
    rgb[3 * i + 2] = to_byte(img.b[i]);
  }
  return rgb;
}

RgbImage decode_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw Error(Errc::corrupt_image, path + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
  png_color background = {255, 255, 255};
  if (!png_image_finish_read(&image, &background, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(Errc::corrupt_image, path + ": " + message);
  }
  return from_interleaved(int(image.width), int(image.height), buffer);
}

struct JpegErrorTrap {
  jpeg_error_mgr mgr;
  std::jmp_buf env;
  char message[JMSG_LENGTH_MAX] = {};
};

void jpeg_error_trap(j_common_ptr cinfo) {
  auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, trap->message);
  std::longjmp(trap->env, 1);
}

RgbImage decode_jpeg(const std::string& path, FILE* f) {
  jpeg_decompress_struct cinfo;
  JpegErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = jpeg_error_trap;

  std::vector<unsigned char> buffer;
  int width = 0, height = 0;
  if (setjmp(trap.env)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(Errc::corrupt_image, path + ": " + trap.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = int(cinfo.output_width);
  height = int(cinfo.output_height);
  buffer.resize(size_t(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    unsigned char* row = buffer.data() + size_t(cinfo.output_scanline) * width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_interleaved(width, height, buffer);
}

void encode_png(const RgbImage& img, const std::string& path) {
  const std::vector<unsigned char> rgb = to_interleaved(img);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = png_uint_32(img.width);
  image.height = png_uint_32(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, rgb.data(), 0, nullptr))
    throw Error(Errc::io_error, path + ": " + image.message);
}

void encode_jpeg(const RgbImage& img, const std::string& path, int quality) {
  FILE* raw = std::fopen(path.c_str(), "wb");
  if (!raw) throw Error(Errc::io_error, path + ": cannot open for writing");
  FileHandle file(raw);

  const std::vector<unsigned char> rgb = to_interleaved(img);
  jpeg_compress_struct cinfo;
  JpegErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = jpeg_error_trap;
  if (setjmp(trap.env)) {
    jpeg_destroy_compress(&cinfo);
    throw Error(Errc::io_error, path + ": " + trap.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, file.f);
  cinfo.image_width = JDIMENSION(img.width);
  cinfo.image_height = JDIMENSION(img.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, std::clamp(quality, 1, 100), TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    const unsigned char* row =
        rgb.data() + size_t(cinfo.next_scanline) * img.width * 3;
    JSAMPROW rows[1] = {const_cast<unsigned char*>(row)};
    jpeg_write_scanlines(&cinfo, rows, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

}  // namespace

RgbImage decode_image(const std::string& path) {
  FILE* raw = std::fopen(path.c_str(), "rb");
  if (!raw) {
    if (!std::filesystem::exists(path))
      throw Error(Errc::file_not_found, path + ": no such file");
    throw Error(Errc::io_error, path + ": cannot open for reading");
  }
  FileHandle file(raw);

  unsigned char magic[4] = {};
  const size_t got = std::fread(magic, 1, sizeof magic, file.f);
  std::rewind(file.f);
  if (got >= 4 && std::memcmp(magic, kPngMagic, 4) == 0) {
    // libpng reopens by path; close first so platforms with strict
    // sharing semantics don't see two handles.
    return decode_png(path);
  }
  if (got >= 3 && std::memcmp(magic, kJpegMagic, 3) == 0)
    return decode_jpeg(path, file.f);
  throw Error(Errc::unsupported_format,
              path + ": not a PNG or JPEG (unrecognized magic bytes)");
}

void encode_image(const RgbImage& img, const std::string& path,
                  ImageFormat format, int jpeg_quality) {
  if (img.width < 1 || img.height < 1)
    throw Error(Errc::io_error, path + ": refusing to write empty image");
  switch (format) {
    case ImageFormat::png:
      encode_png(img, path);
      return;
    case ImageFormat::jpeg:
      encode_jpeg(img, path, jpeg_quality);
      return;
  }
  throw Error(Errc::invalid_format, "unknown image format enum value");
}

ImageFormat parse_image_format(const std::string& name) {
  if (name == "png") return ImageFormat::png;
  if (name == "jpeg" || name == "jpg") return ImageFormat::jpeg;
  throw Error(Errc::invalid_format, "unknown image format: " + name);
}

}  // namespace autostyle
