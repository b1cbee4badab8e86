#include "slicevis/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>

#include <openssl/evp.h>
#include <png.h>

#include "slicevis/error.hpp"

namespace slicevis {

namespace fs = std::filesystem;

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest computation failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 15]);
    }
    return out;
}

std::string sha256_hex(std::string_view text) {
    return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
    const fs::path tmp = path.string() + ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

void write_file(const fs::path& path, std::string_view text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::uint8_t, 6> kNpyMagic{0x93, 'N', 'U', 'M', 'P', 'Y'};

std::size_t dtype_size(NpyDtype d) noexcept { return d == NpyDtype::u1 ? 1 : 4; }
const char* dtype_descr(NpyDtype d) noexcept { return d == NpyDtype::u1 ? "|u1" : "<f4"; }

}  // namespace

std::size_t NpyArray::element_count() const noexcept {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

NpyArray npy_u8(std::vector<std::size_t> shape, std::vector<std::uint8_t> data) {
    NpyArray a{NpyDtype::u1, std::move(shape), std::move(data)};
    if (a.payload.size() != a.element_count())
        throw Error("npy: payload size does not match shape");
    return a;
}

NpyArray npy_f32(std::vector<std::size_t> shape, std::span<const float> data) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    NpyArray a{NpyDtype::f4, std::move(shape), {}};
    if (data.size() != a.element_count()) throw Error("npy: payload size does not match shape");
    a.payload.resize(data.size() * sizeof(float));
    std::memcpy(a.payload.data(), data.data(), a.payload.size());
    return a;
}

std::vector<std::uint8_t> npy_encode(const NpyArray& a) {
    if (a.payload.size() != a.element_count() * dtype_size(a.dtype))
        throw Error("npy: payload size does not match shape");
    std::string shape = "(";
    for (std::size_t i = 0; i < a.shape.size(); ++i) {
        shape += std::to_string(a.shape[i]);
        if (a.shape.size() == 1 || i + 1 < a.shape.size()) shape += ",";
        if (i + 1 < a.shape.size()) shape += " ";
    }
    shape += ")";
    std::string header = std::string("{'descr': '") + dtype_descr(a.dtype) +
                         "', 'fortran_order': False, 'shape': " + shape + ", }";
    // magic(6) + version(2) + length(2) + header + '\n' is a multiple of 64.
    const std::size_t unpadded = 10 + header.size() + 1;
    header.append((64 - unpadded % 64) % 64, ' ');
    header.push_back('\n');
    if (header.size() > 0xFFFF) throw Error("npy: header too long for version 1.0");

    std::vector<std::uint8_t> out(kNpyMagic.begin(), kNpyMagic.end());
    out.push_back(1);
    out.push_back(0);
    out.push_back(static_cast<std::uint8_t>(header.size() & 0xFF));
    out.push_back(static_cast<std::uint8_t>(header.size() >> 8));
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), a.payload.begin(), a.payload.end());
    return out;
}

NpyArray npy_decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 10 || !std::equal(kNpyMagic.begin(), kNpyMagic.end(), bytes.begin()))
        throw IntegrityError("npy: bad magic");
    const std::uint8_t major = bytes[6];
    std::size_t header_len = 0;
    std::size_t offset = 0;
    if (major == 1) {
        header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8);
        offset = 10;
    } else if (major == 2) {
        if (bytes.size() < 12) throw IntegrityError("npy: truncated header");
        header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8) |
                     (static_cast<std::size_t>(bytes[10]) << 16) |
                     (static_cast<std::size_t>(bytes[11]) << 24);
        offset = 12;
    } else {
        throw IntegrityError("npy: unsupported version " + std::to_string(major));
    }
    if (bytes.size() < offset + header_len) throw IntegrityError("npy: truncated header");
    const std::string header(reinterpret_cast<const char*>(bytes.data() + offset), header_len);

    static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
    static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
    static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
    std::smatch m;
    NpyArray a;
    if (!std::regex_search(header, m, descr_re)) throw IntegrityError("npy: header lacks descr");
    if (m[1] == "|u1" || m[1] == "<u1" || m[1] == "u1")
        a.dtype = NpyDtype::u1;
    else if (m[1] == "<f4")
        a.dtype = NpyDtype::f4;
    else
        throw IntegrityError("npy: unsupported dtype '" + m[1].str() + "'");
    if (!std::regex_search(header, m, order_re) || m[1] != "False")
        throw IntegrityError("npy: only C-order arrays are supported");
    if (!std::regex_search(header, m, shape_re)) throw IntegrityError("npy: header lacks shape");
    static const std::regex dim_re(R"(\d+)");
    const std::string dims = m[1].str();
    for (std::sregex_iterator it(dims.begin(), dims.end(), dim_re), end; it != end; ++it)
        a.shape.push_back(std::stoull(it->str()));

    const std::size_t expected = a.element_count() * dtype_size(a.dtype);
    const std::size_t available = bytes.size() - offset - header_len;
    if (available != expected)
        throw IntegrityError("npy: payload holds " + std::to_string(available) +
                             " bytes, shape requires " + std::to_string(expected));
    a.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset + header_len),
                     bytes.end());
    return a;
}

// ---------------------------------------------------------------------------

namespace {

void append_png_bytes(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

}  // namespace

std::vector<std::uint8_t> png_encode_rgb(std::size_t width, std::size_t height,
                                         std::span<const std::uint8_t> rgb) {
    if (rgb.size() != width * height * 3) throw Error("png: pixel buffer does not match size");
    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: cannot create writer");
    }
    // libpng reports errors by longjmp; nothing with a destructor is
    // created between here and the end of the writes.
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: encoding failed");
    }
    {
        png_set_write_fn(png, &out, append_png_bytes, nullptr);
        png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                     8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
        png_set_compression_level(png, 9);
        png_write_info(png, info);
        for (std::size_t y = 0; y < height; ++y)
            png_write_row(png, const_cast<png_bytep>(rgb.data() + y * width * 3));
        png_write_end(png, nullptr);
    }
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace slicevis
