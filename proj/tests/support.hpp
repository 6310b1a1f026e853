#pragma once

#include "cvdshift/colorspace.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace testing_support {

/// Seeded generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed = 0x5eedULL) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    cvdshift::LinearRgb linear_rgb(double lo = 0.0, double hi = 1.0)
    {
        return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
    }

    cvdshift::SRgb8 srgb8()
    {
        return {static_cast<std::uint8_t>(integer(0, 255)), static_cast<std::uint8_t>(integer(0, 255)),
                static_cast<std::uint8_t>(integer(0, 255))};
    }

    /// Radians in [-4pi, 4pi].
    double angle() { return uniform(-4.0 * M_PI, 4.0 * M_PI); }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Independent reference formulas, written from the published standards and
// kept separate from the library code paths under test.
namespace oracle {

inline double srgb_eotf(double v)
{
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

/// The 4-digit sRGB to XYZ matrix printed in IEC 61966-2-1.
inline constexpr double kRgbToXyz[3][3] = {
    {0.4124, 0.3576, 0.1805},
    {0.2126, 0.7152, 0.0722},
    {0.0193, 0.1192, 0.9505},
};

inline void rgb_to_xyz(double r, double g, double b, double out[3])
{
    for (int i = 0; i < 3; ++i)
        out[i] = kRgbToXyz[i][0] * r + kRgbToXyz[i][1] * g + kRgbToXyz[i][2] * b;
}

inline double lab_f(double t)
{
    constexpr double d = 6.0 / 29.0;
    return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
}

/// CIELAB relative to the D65 white (0.95047, 1, 1.08883).
inline cvdshift::Lab lab(double x, double y, double z)
{
    const double fx = lab_f(x / 0.95047);
    const double fy = lab_f(y / 1.0);
    const double fz = lab_f(z / 1.08883);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline double distance(const cvdshift::Lab& a, const cvdshift::Lab& b)
{
    return std::hypot(a.L - b.L, a.a - b.a, a.b - b.b);
}

}  // namespace oracle

}  // namespace testing_support
