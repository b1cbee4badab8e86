#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slicevis {

/// Lower-case hex SHA-256 of a byte buffer or a file's contents.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary and renames it into place.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, std::string_view text);

// ---------------------------------------------------------------------------
// NPY v1.0
// ---------------------------------------------------------------------------

enum class NpyDtype : std::uint8_t { u1, f4 };

struct NpyArray {
    NpyDtype dtype = NpyDtype::u1;
    std::vector<std::size_t> shape;
    std::vector<std::uint8_t> payload;  ///< raw little-endian C-order bytes

    std::size_t element_count() const noexcept;
};

/// Complete file image: magic, version 1.0, padded header dict, payload.
std::vector<std::uint8_t> npy_encode(const NpyArray& array);
/// Parses versions 1.0 and 2.0 of dtypes |u1 and <f4 in C order. Throws
/// IntegrityError describing the first problem (bad magic, truncation, ...).
NpyArray npy_decode(std::span<const std::uint8_t> bytes);

NpyArray npy_u8(std::vector<std::size_t> shape, std::vector<std::uint8_t> data);
NpyArray npy_f32(std::vector<std::size_t> shape, std::span<const float> data);

// ---------------------------------------------------------------------------
// PNG (8-bit RGB, unfiltered, zlib level 9)
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> png_encode_rgb(std::size_t width, std::size_t height,
                                         std::span<const std::uint8_t> rgb);

}  // namespace slicevis
