#pragma once

#include <csetjmp>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "occlusion/camera/image.hpp"
#include "occlusion/error.hpp"

namespace occlusion {

enum class ImageFormat { Jpeg, Png };

inline constexpr int kDefaultJpegQuality = 95;

inline std::string_view to_string(ImageFormat f) noexcept { return f == ImageFormat::Jpeg ? "jpeg" : "png"; }

inline ImageFormat parse_image_format(std::string_view s) {
    if (s == "jpeg" || s == "jpg") return ImageFormat::Jpeg;
    if (s == "png") return ImageFormat::Png;
    throw ParameterError("unknown image format '" + std::string(s) + "'");
}

namespace detail {

inline bool is_jpeg(std::span<const std::byte> b) {
    return b.size() >= 3 && b[0] == std::byte{0xFF} && b[1] == std::byte{0xD8} && b[2] == std::byte{0xFF};
}

inline bool is_png(std::span<const std::byte> b) {
    static constexpr unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

struct JpegErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit_to_jump(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Corrupt-data warnings (level -1) are escalated: a truncated stream must
// not decode to a silently grey-filled image.
inline void jpeg_emit_message_strict(j_common_ptr cinfo, int msg_level) {
    if (msg_level < 0) jpeg_error_exit_to_jump(cinfo);
}

// Decodes into `components` channels (1 = grey, 3 = RGB).
inline std::vector<std::uint8_t> decode_jpeg(std::span<const std::byte> bytes, int components, int& width,
                                             int& height) {
    jpeg_decompress_struct cinfo{};
    JpegErrorManager err{};
    std::vector<std::uint8_t> pixels;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit_to_jump;
    err.pub.emit_message = jpeg_emit_message_strict;
    err.message[0] = '\0';
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError(std::string("JPEG decode failed: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, reinterpret_cast<unsigned char*>(const_cast<std::byte*>(bytes.data())),
                 static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);
    if (cinfo.output_components != components) {
        std::snprintf(err.message, sizeof err.message, "unsupported JPEG colour layout");
        std::longjmp(err.jump, 1);
    }
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    pixels.resize(static_cast<std::size_t>(width) * height * components);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * components;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return pixels;
}

inline std::vector<std::byte> encode_jpeg(const ImageBuffer& img, int quality) {
    jpeg_compress_struct cinfo{};
    JpegErrorManager err{};
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit_to_jump;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        std::free(buffer);
        throw DecodeError(std::string("JPEG encode failed: ") + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width());
    cinfo.image_height = static_cast<JDIMENSION>(img.height());
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    const auto px = img.bytes();
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<std::uint8_t*>(px.data()) +
                       static_cast<std::size_t>(cinfo.next_scanline) * img.width() * 3;
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::vector<std::byte> out(size);
    std::memcpy(out.data(), buffer, size);
    std::free(buffer);
    return out;
}

inline std::vector<std::uint8_t> decode_png(std::span<const std::byte> bytes, png_uint_32 format, int& width,
                                            int& height, bool* had_alpha = nullptr) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw DecodeError(std::string("PNG decode failed: ") + image.message);
    if (had_alpha) *had_alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    if (image.width == 0 || image.height == 0 || image.width > (1u << 15) || image.height > (1u << 15)) {
        png_image_free(&image);
        throw DecodeError("PNG dimensions out of range");
    }
    image.format = format;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("PNG decode failed: " + msg);
    }
    width = static_cast<int>(image.width);
    height = static_cast<int>(image.height);
    return pixels;
}

}  // namespace detail

// Decodes JPEG or PNG (sniffed from the signature) into 8-bit RGB.
inline ImageBuffer read_image(std::span<const std::byte> bytes) {
    int w = 0, h = 0;
    if (detail::is_jpeg(bytes)) {
        auto px = detail::decode_jpeg(bytes, 3, w, h);
        return ImageBuffer(w, h, std::move(px));
    }
    if (detail::is_png(bytes)) {
        auto px = detail::decode_png(bytes, PNG_FORMAT_RGB, w, h);
        return ImageBuffer(w, h, std::move(px));
    }
    throw DecodeError(bytes.empty() ? "empty image stream" : "unrecognized image signature");
}

// Single-channel mask texture. PNGs with transparency use their alpha
// channel; anything else uses grey level / 255.
inline AlphaMask read_alpha_image(std::span<const std::byte> bytes) {
    int w = 0, h = 0;
    std::vector<std::uint8_t> grey;
    if (detail::is_jpeg(bytes)) {
        grey = detail::decode_jpeg(bytes, 1, w, h);
    } else if (detail::is_png(bytes)) {
        bool had_alpha = false;
        auto ga = detail::decode_png(bytes, PNG_FORMAT_GA, w, h, &had_alpha);
        grey.resize(ga.size() / 2);
        for (std::size_t i = 0; i < grey.size(); ++i) grey[i] = had_alpha ? ga[2 * i + 1] : ga[2 * i];
    } else {
        throw DecodeError(bytes.empty() ? "empty image stream" : "unrecognized image signature");
    }
    AlphaMask mask(w, h);
    auto v = mask.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = grey[i] / 255.0f;
    return mask;
}

inline std::vector<std::byte> write_image(const ImageBuffer& img, ImageFormat format,
                                          int quality = kDefaultJpegQuality) {
    if (img.empty()) throw ShapeError("cannot encode an empty image");
    if (format == ImageFormat::Jpeg) {
        if (quality < 1 || quality > 100) throw ParameterError("JPEG quality must lie in [1, 100]");
        return detail::encode_jpeg(img, quality);
    }
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.bytes().data(), 0, nullptr))
        throw DecodeError(std::string("PNG encode failed: ") + image.message);
    std::vector<std::byte> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.bytes().data(), 0, nullptr))
        throw DecodeError(std::string("PNG encode failed: ") + image.message);
    out.resize(size);
    return out;
}

}  // namespace occlusion
