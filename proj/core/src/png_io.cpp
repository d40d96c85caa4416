#include "vdsr/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>

#include "vdsr/errors.hpp"
#include "vdsr/fileutil.hpp"

namespace vdsr {

namespace {

struct ImageGuard {
  png_image* img;
  ~ImageGuard() { png_image_free(img); }
};

RgbImage finish_read(png_image& image, const std::string& what) {
  ImageGuard guard{&image};
  image.format = PNG_FORMAT_RGB;
  const std::size_t h = image.height, w = image.width;
  if (h == 0 || w == 0) {
    throw FormatError(what + ": empty image");
  }
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr) == 0) {
    throw FormatError(what + ": " + image.message);
  }
  ImagePlane r(h, w), g(h, w), b(h, w);
  auto rs = r.samples(), gs = g.samples(), bs = b.samples();
  for (std::size_t i = 0; i < h * w; ++i) {
    rs[i] = from_u8(buf[3 * i]);
    gs[i] = from_u8(buf[3 * i + 1]);
    bs[i] = from_u8(buf[3 * i + 2]);
  }
  return RgbImage(std::move(r), std::move(g), std::move(b));
}

std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& pixels, std::size_t h,
                                 std::size_t w, png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr) == 0) {
    throw Error(std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr) == 0) {
    throw Error(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  write_file_atomic(path, [&](std::ostream& os) {
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  });
}

}  // namespace

double from_u8(std::uint8_t v) noexcept { return static_cast<double>(v) / 255.0; }

std::uint8_t to_u8(double v) noexcept {
  const double s = std::round(v * 255.0);
  if (!(s > 0.0)) return 0;
  if (s >= 255.0) return 255;
  return static_cast<std::uint8_t>(s);
}

RgbImage read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path.string() + ": " + msg);
  }
  return finish_read(image, path.string());
}

RgbImage decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("PNG decode: " + msg);
  }
  return finish_read(image, "PNG decode");
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  const std::size_t n = img.height() * img.width();
  std::vector<std::uint8_t> px(3 * n);
  auto r = img.r.samples(), g = img.g.samples(), b = img.b.samples();
  for (std::size_t i = 0; i < n; ++i) {
    px[3 * i] = to_u8(r[i]);
    px[3 * i + 1] = to_u8(g[i]);
    px[3 * i + 2] = to_u8(b[i]);
  }
  return encode(px, img.height(), img.width(), PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_png(const ImagePlane& gray) {
  std::vector<std::uint8_t> px(gray.size());
  std::transform(gray.samples().begin(), gray.samples().end(), px.begin(), to_u8);
  return encode(px, gray.height(), gray.width(), PNG_FORMAT_GRAY);
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
  write_bytes(path, encode_png(img));
}

void write_png(const std::filesystem::path& path, const ImagePlane& gray) {
  write_bytes(path, encode_png(gray));
}

}  // namespace vdsr
