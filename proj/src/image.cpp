#include "cvdshift/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cvdshift {

Image::Image(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels)
{
    if (width <= 0 || height <= 0)
        throw ImageError("image dimensions must be positive");
    if (channels != 3 && channels != 4)
        throw ImageError("image must have 3 or 4 channels");
    data_.assign(pixel_count() * static_cast<std::size_t>(channels), 0);
    if (channels == 4)
        for (std::size_t i = 3; i < data_.size(); i += 4)
            data_[i] = 255;
}

Image::Image(int width, int height, SRgb8 fill) : Image(width, height, 3)
{
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill.r;
        data_[i + 1] = fill.g;
        data_[i + 2] = fill.b;
    }
}

std::size_t Image::offset(int x, int y) const
{
    if (x < 0 || y < 0 || x >= width_ || y >= height_)
        throw std::out_of_range("pixel coordinate outside image");
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x))
         * static_cast<std::size_t>(channels_);
}

SRgb8 Image::pixel(int x, int y) const
{
    const auto o = offset(x, y);
    return {data_[o], data_[o + 1], data_[o + 2]};
}

void Image::set_pixel(int x, int y, SRgb8 c)
{
    const auto o = offset(x, y);
    data_[o] = c.r;
    data_[o + 1] = c.g;
    data_[o + 2] = c.b;
}

std::uint8_t Image::alpha(int x, int y) const
{
    return has_alpha() ? data_[offset(x, y) + 3] : std::uint8_t{255};
}

namespace {

struct PngReadSource {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

[[noreturn]] void png_throw(png_structp png, png_const_charp msg)
{
    auto* what = static_cast<std::string*>(png_get_error_ptr(png));
    *what = msg;
    png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

void png_read_span(png_structp png, png_bytep out, png_size_t count)
{
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->pos + count > src->bytes.size())
        png_error(png, "unexpected end of PNG data");
    std::memcpy(out, src->bytes.data() + src->pos, count);
    src->pos += count;
}

void png_write_vector(png_structp png, png_bytep in, png_size_t count)
{
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), in, in + count);
}

void png_flush_noop(png_structp) {}

// libpng reports errors by longjmp; these helpers keep every setjmp frame
// free of C++ objects so no destructor is skipped.
bool png_read_header(png_structp png, png_infop info, PngReadSource* src)
{
    if (setjmp(png_jmpbuf(png)))
        return false;
    png_set_read_fn(png, src, png_read_span);
    png_read_info(png, info);

    const auto color_type = png_get_color_type(png, info);
    const auto bit_depth = png_get_bit_depth(png, info);
    if (bit_depth == 16)
        png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    return true;
}

bool png_read_pixels(png_structp png, png_bytepp rows)
{
    if (setjmp(png_jmpbuf(png)))
        return false;
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    return true;
}

bool png_write_all(png_structp png, png_infop info, const Image* img, std::vector<std::uint8_t>* out, png_bytepp rows)
{
    if (setjmp(png_jmpbuf(png)))
        return false;
    png_set_write_fn(png, out, png_write_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img->width()), static_cast<png_uint_32>(img->height()), 8,
                 img->has_alpha() ? PNG_COLOR_TYPE_RGB_ALPHA : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    return true;
}

}  // namespace

Image decode_png(std::span<const std::uint8_t> bytes, const std::string& source)
{
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw ImageError(source + ": not a PNG file");

    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_throw, png_warn);
    if (!png)
        throw ImageError(source + ": cannot allocate PNG reader");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw ImageError(source + ": cannot allocate PNG reader");
    }

    PngReadSource src{bytes, 0};
    if (!png_read_header(png, info, &src)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageError(source + ": malformed PNG (" + error + ")");
    }

    const int channels = png_get_channels(png, info);
    const auto width = static_cast<int>(png_get_image_width(png, info));
    const auto height = static_cast<int>(png_get_image_height(png, info));
    if (channels != 3 && channels != 4) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageError(source + ": unsupported PNG channel layout");
    }

    Image img(width, height, channels);
    auto data = img.bytes();
    const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (std::size_t y = 0; y < rows.size(); ++y)
        rows[y] = data.data() + y * stride;

    const bool ok = png_read_pixels(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    if (!ok)
        throw ImageError(source + ": malformed PNG (" + error + ")");
    return img;
}

std::vector<std::uint8_t> encode_png(const Image& img)
{
    if (img.empty())
        throw ImageError("cannot encode an empty image");

    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_throw, png_warn);
    if (!png)
        throw ImageError("cannot allocate PNG writer");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw ImageError("cannot allocate PNG writer");
    }

    std::vector<std::uint8_t> out;
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
    auto* base = const_cast<std::uint8_t*>(img.bytes().data());
    const std::size_t stride = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.channels());
    for (std::size_t y = 0; y < rows.size(); ++y)
        rows[y] = base + y * stride;

    const bool ok = png_write_all(png, info, &img, &out, rows.data());
    png_destroy_write_struct(&png, &info);
    if (!ok)
        throw ImageError("PNG encoding failed: " + error);
    return out;
}

std::vector<std::uint8_t> encode_ppm(const Image& img)
{
    const std::string header =
        "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.pixel_count() * 3);
    const auto data = img.bytes();
    const auto ch = static_cast<std::size_t>(img.channels());
    for (std::size_t i = 0; i < data.size(); i += ch)
        out.insert(out.end(), data.begin() + static_cast<std::ptrdiff_t>(i),
                   data.begin() + static_cast<std::ptrdiff_t>(i + 3));
    return out;
}

Image decode_ppm(std::span<const std::uint8_t> bytes, const std::string& source)
{
    std::size_t pos = 0;
    const auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n')
                    ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    const auto read_int = [&]() -> long {
        skip_space();
        long v = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            if (++digits > 9)
                throw ImageError(source + ": malformed PPM header");
        }
        if (digits == 0)
            throw ImageError(source + ": malformed PPM header");
        return v;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6')
        throw ImageError(source + ": not a binary PPM (P6) file");
    pos = 2;
    const long width = read_int();
    const long height = read_int();
    const long maxval = read_int();
    if (maxval != 255)
        throw ImageError(source + ": only 8-bit PPM is supported");
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        throw ImageError(source + ": malformed PPM header");
    ++pos;
    if (width <= 0 || height <= 0)
        throw ImageError(source + ": malformed PPM dimensions");
    const auto needed = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
    if (bytes.size() - pos < needed)
        throw ImageError(source + ": truncated PPM pixel data");

    Image img(static_cast<int>(width), static_cast<int>(height), 3);
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), needed, img.bytes().begin());
    return img;
}

Image read_image(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageError(path.string() + ": cannot open file");
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6')
        return decode_ppm(bytes, path.string());
    return decode_png(bytes, path.string());
}

void write_image(const Image& img, const std::filesystem::path& path)
{
    const auto ext = path.extension().string();
    const auto bytes = (ext == ".ppm" || ext == ".PPM") ? encode_ppm(img) : encode_png(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ImageError(path.string() + ": cannot open file for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw ImageError(path.string() + ": write failed");
}

}  // namespace cvdshift
