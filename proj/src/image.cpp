#include "slicevis/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slicevis/error.hpp"

namespace slicevis {

ImagePatch::ImagePatch(std::size_t n) : n_(n), data_(n * n * kChannels, 0.0) {
    if (n < 4) throw ConfigError("image_side: must be >= 4");
}

ImagePatch finalize_patch(ImagePatch raw, std::string_view encoder) {
    for (double& v : raw.data()) {
        if (!std::isfinite(v))
            throw EncodingError(std::string(encoder) + ": non-finite intensity in patch");
        v = std::clamp(v, 0.0, 1.0);
    }
    return raw;
}

ImagePatch finalize_patch(const std::array<Plane, 3>& raw, std::string_view encoder) {
    const std::size_t n = raw[0].side();
    ImagePatch patch(n);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) patch.at(x, y, c) = raw[c](x, y);
    return finalize_patch(std::move(patch), encoder);
}

std::uint8_t quantize(double v) noexcept {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace slicevis
