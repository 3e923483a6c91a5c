#pragma once

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "visim/color.hpp"
#include "visim/frame.hpp"

namespace visim {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

struct ImageInfo {
    int width = 0;
    int height = 0;
};

namespace detail {

inline bool has_png_signature(const Bytes& data) {
    return data.size() >= 8 && png_sig_cmp(data.data(), 0, 8) == 0;
}

inline bool has_ppm_signature(const Bytes& data) {
    return data.size() >= 2 && data[0] == 'P' && data[1] == '6';
}

struct PngReadCursor {
    const Bytes* data;
    std::size_t offset;
};

inline void png_read_from_memory(png_structp png, png_bytep out, png_size_t length) {
    auto* cursor = static_cast<PngReadCursor*>(png_get_io_ptr(png));
    if (cursor->offset + length > cursor->data->size()) png_error(png, "truncated PNG stream");
    std::memcpy(out, cursor->data->data() + cursor->offset, length);
    cursor->offset += length;
}

inline void png_write_to_memory(png_structp png, png_bytep in, png_size_t length) {
    auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
    out->insert(out->end(), in, in + length);
}

inline void png_flush_noop(png_structp) {}

inline void png_error_to_exception(png_structp png, png_const_charp message) {
    auto* msg = static_cast<std::string*>(png_get_error_ptr(png));
    if (msg) *msg = message;
    png_longjmp(png, 1);
}

inline void png_warning_ignore(png_structp, png_const_charp) {}

/// Reads a PNG header, and optionally the 8-bit RGB pixels.
inline ImageInfo decode_png(const Bytes& data, std::vector<std::uint8_t>* rgb) {
    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error,
                                             png_error_to_exception, png_warning_ignore);
    if (!png) throw ImageIoError("libpng: cannot create read struct");
    png_infop info = png_create_info_struct(png);
    ImageInfo result;
    std::vector<png_bytep> rows;
    PngReadCursor cursor{&data, 0};
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageIoError("PNG decode error: " + error);
    }
    png_set_read_fn(png, &cursor, png_read_from_memory);
    png_read_info(png, info);
    result.width = static_cast<int>(png_get_image_width(png, info));
    result.height = static_cast<int>(png_get_image_height(png, info));
    if (rgb) {
        const int color_type = png_get_color_type(png, info);
        const int bit_depth = png_get_bit_depth(png, info);
        if (bit_depth == 16) png_set_strip_16(png);
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
        png_set_interlace_handling(png);
        png_read_update_info(png, info);
        const std::size_t stride = png_get_rowbytes(png, info);
        if (stride != static_cast<std::size_t>(result.width) * 3) png_error(png, "unexpected row layout");
        rgb->assign(stride * result.height, 0);
        rows.resize(result.height);
        for (int y = 0; y < result.height; ++y) rows[y] = rgb->data() + stride * y;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return result;
}

inline ImageInfo decode_ppm(const Bytes& data, std::vector<std::uint8_t>* rgb) {
    std::size_t pos = 2;
    auto next_token = [&]() -> long {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(data[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        long v = 0;
        bool any = false;
        while (pos < data.size() && std::isdigit(data[pos])) {
            v = v * 10 + (data[pos++] - '0');
            any = true;
            if (v > 1'000'000) throw ImageIoError("PPM header value out of range");
        }
        if (!any) throw ImageIoError("malformed PPM header");
        return v;
    };
    ImageInfo info;
    info.width = static_cast<int>(next_token());
    info.height = static_cast<int>(next_token());
    const long maxval = next_token();
    if (maxval != 255) throw ImageIoError("only 8-bit PPM (maxval 255) is supported");
    ++pos;  // single whitespace before raster
    const std::size_t need = static_cast<std::size_t>(info.width) * info.height * 3;
    if (info.width < 1 || info.height < 1) throw ImageIoError("PPM has empty dimensions");
    if (rgb) {
        if (pos + need > data.size()) throw ImageIoError("truncated PPM raster");
        rgb->assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                    data.begin() + static_cast<std::ptrdiff_t>(pos + need));
    }
    return info;
}

}  // namespace detail

/// Dimensions of an encoded PNG or PPM without decoding the raster.
inline ImageInfo probe_image(const Bytes& data) {
    if (detail::has_png_signature(data)) return detail::decode_png(data, nullptr);
    if (detail::has_ppm_signature(data)) return detail::decode_ppm(data, nullptr);
    throw ImageIoError("unrecognized image format (expected PNG or binary PPM)");
}

/// Decodes 8-bit sRGB PNG (RGB/RGBA/gray) or P6 PPM into a linear frame.
inline Frame decode_image(const Bytes& data) {
    std::vector<std::uint8_t> rgb;
    ImageInfo info;
    if (detail::has_png_signature(data))
        info = detail::decode_png(data, &rgb);
    else if (detail::has_ppm_signature(data))
        info = detail::decode_ppm(data, &rgb);
    else
        throw ImageIoError("unrecognized image format (expected PNG or binary PPM)");
    Frame frame(info.width, info.height);
    auto values = frame.values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = srgb8_to_linear(rgb[i]);
    return frame;
}

inline std::vector<std::uint8_t> to_srgb8(const Frame& frame) {
    std::vector<std::uint8_t> out(frame.values().size());
    auto values = frame.values();
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = linear_to_srgb8(values[i]);
    return out;
}

/// 8-bit sRGB PNG, fixed compression settings so output is byte-stable.
inline Bytes encode_png(const Frame& frame) {
    const auto rgb = to_srgb8(frame);
    Bytes out;
    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error,
                                              detail::png_error_to_exception,
                                              detail::png_warning_ignore);
    if (!png) throw ImageIoError("libpng: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    std::vector<png_const_bytep> rows(frame.height());
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw ImageIoError("PNG encode error: " + error);
    }
    png_set_write_fn(png, &out, detail::png_write_to_memory, detail::png_flush_noop);
    png_set_IHDR(png, info, frame.width(), frame.height(), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(frame.width()) * 3;
    for (int y = 0; y < frame.height(); ++y) rows[y] = rgb.data() + stride * y;
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

inline Bytes encode_ppm(const Frame& frame) {
    const std::string header = "P6\n" + std::to_string(frame.width()) + " " +
                               std::to_string(frame.height()) + "\n255\n";
    Bytes out(header.begin(), header.end());
    const auto rgb = to_srgb8(frame);
    out.insert(out.end(), rgb.begin(), rgb.end());
    return out;
}

inline Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw ImageIoError("short write to " + path.string());
}

inline Frame read_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

/// Writes PNG, or PPM when the extension is .ppm.
inline void write_image(const std::filesystem::path& path, const Frame& frame) {
    const auto ext = path.extension().string();
    write_file(path, ext == ".ppm" ? encode_ppm(frame) : encode_png(frame));
}

}  // namespace visim
