#include "cvdshift/rotation.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace cvdshift {

RotationAngle RotationAngle::normalized() const
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(rad_, two_pi);
    if (r < 0.0)
        r += two_pi;
    if (r >= two_pi)
        r = 0.0;
    return RotationAngle(r);
}

RotationTransform rotation_matrix(RotationAngle theta)
{
    const double u = 1.0 / std::sqrt(3.0);
    const double c = std::cos(theta.radians());
    const double s = std::sin(theta.radians());
    const double k = u * u * (1.0 - c);
    const double us = u * s;

    RotationTransform t;
    t.m.m = {c + k,  k - us, k + us,
             k + us, c + k,  k - us,
             k - us, k + us, c + k};
    return t;
}

LinearRgb rotate_color(const LinearRgb& c, RotationAngle theta)
{
    return rotation_matrix(theta).apply(c);
}

LinearRgb clip_to_gamut(const LinearRgb& c)
{
    return {std::clamp(c.r, 0.0, 1.0), std::clamp(c.g, 0.0, 1.0), std::clamp(c.b, 0.0, 1.0)};
}

namespace {

// Fixed-point linear light: 1.0 is kOne.
constexpr int kFracBits = 16;
constexpr std::int32_t kOne = (1 << kFracBits) - 1;

/// srgb_encode of every fixed-point linear level.
const std::array<std::uint8_t, kOne + 1>& fixed_point_encoder()
{
    static const auto table = [] {
        std::array<std::uint8_t, kOne + 1> t{};
        for (std::int32_t i = 0; i <= kOne; ++i)
            t[static_cast<std::size_t>(i)] = srgb_encode({i / double(kOne), 0.0, 0.0}).r;
        return t;
    }();
    return table;
}

}  // namespace

Image rotate_image(const Image& img, RotationAngle theta)
{
    Image out = img;
    if (img.empty())
        return out;

    // Each output channel is a sum of three per-code contributions, so the
    // decode and the matrix fold into one table per input channel. The three
    // output rows ride in 21-bit fields of one word; entries lie in
    // [-1/3, 1], so a bias of kOne/3 keeps every field and every three-term
    // sum non-negative and below 2^19.
    constexpr std::int64_t kBias = kOne / 3 + 1;
    constexpr int kField = 21;
    constexpr std::int64_t kMask = (std::int64_t{1} << kField) - 1;
    const auto mat = rotation_matrix(theta).m;
    std::array<std::array<std::int64_t, 256>, 3> packed{};
    for (int code = 0; code < 256; ++code) {
        const double lin = srgb_eotf(code / 255.0) * kOne;
        for (int col = 0; col < 3; ++col) {
            std::int64_t word = 0;
            for (int row = 0; row < 3; ++row) {
                const auto v = static_cast<std::int64_t>(std::lround(mat(row, col) * lin)) + kBias;
                word |= v << (kField * row);
            }
            packed[static_cast<std::size_t>(col)][static_cast<std::size_t>(code)] = word;
        }
    }
    const auto& encoder = fixed_point_encoder();

    const std::uint8_t* const src = img.bytes().data();
    std::uint8_t* const dst = out.bytes().data();
    const auto ch = static_cast<std::size_t>(img.channels());

    detail::parallel_for(img.pixel_count(), [src, dst, ch, &packed, &encoder](std::size_t begin, std::size_t end) {
        const auto field = [&](std::int64_t sum, int row) {
            const std::int64_t v = ((sum >> (kField * row)) & kMask) - 3 * kBias;
            return encoder[static_cast<std::size_t>(std::clamp<std::int64_t>(v, 0, kOne))];
        };
        const std::uint8_t* in = src + begin * ch;
        std::uint8_t* o = dst + begin * ch;
        for (std::size_t p = begin; p < end; ++p, in += ch, o += ch) {
            const std::int64_t sum = packed[0][in[0]] + packed[1][in[1]] + packed[2][in[2]];
            const std::uint8_t e0 = field(sum, 0);
            const std::uint8_t e1 = field(sum, 1);
            const std::uint8_t e2 = field(sum, 2);
            o[0] = e0;
            o[1] = e1;
            o[2] = e2;
        }
    });
    return out;
}

std::vector<TrajectorySample> shift_trajectory(const LinearRgb& c, int samples)
{
    if (samples < 2)
        throw std::invalid_argument("shift_trajectory: need at least 2 samples");
    if (c.r + c.g + c.b <= 0.0)
        throw std::domain_error("shift_trajectory: color has no chromaticity");

    std::vector<TrajectorySample> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const auto theta = RotationAngle::radians(2.0 * std::numbers::pi * i / samples);
        const auto raw = rotate_color(c, theta);
        const auto clipped = clip_to_gamut(raw);
        out.push_back({theta, linear_to_xy(clipped), clipped, raw, !in_gamut(raw)});
    }
    return out;
}

}  // namespace cvdshift
