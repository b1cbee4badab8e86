#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace slicevis {

/// n x n RGB patch of real intensities, stored channel-last in row-major
/// order: index = (y * n + x) * 3 + c. Row 0 is the top of the image.
class ImagePatch {
public:
    static constexpr std::size_t kChannels = 3;

    ImagePatch() = default;
    explicit ImagePatch(std::size_t n);

    std::size_t side() const noexcept { return n_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& at(std::size_t x, std::size_t y, std::size_t c) noexcept {
        return data_[(y * n_ + x) * kChannels + c];
    }
    double at(std::size_t x, std::size_t y, std::size_t c) const noexcept {
        return data_[(y * n_ + x) * kChannels + c];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const ImagePatch&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// A single channel plane used while composing an encoding.
class Plane {
public:
    explicit Plane(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t side() const noexcept { return n_; }
    double& operator()(std::size_t x, std::size_t y) noexcept { return data_[y * n_ + x]; }
    double operator()(std::size_t x, std::size_t y) const noexcept { return data_[y * n_ + x]; }
    std::span<const double> data() const noexcept { return data_; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

/// Clamps each value to [0, 1]. Throws EncodingError naming `encoder` if any
/// value is not finite.
ImagePatch finalize_patch(const std::array<Plane, 3>& raw, std::string_view encoder);
ImagePatch finalize_patch(ImagePatch raw, std::string_view encoder);

/// round(v * 255) for v in [0, 1].
std::uint8_t quantize(double v) noexcept;

}  // namespace slicevis
