#pragma once

#include "cvdshift/colorspace.hpp"
#include "cvdshift/image.hpp"

#include <numbers>
#include <vector>

namespace cvdshift {

/// Rotation angle about the gray axis. Stored in radians.
class RotationAngle {
public:
    constexpr RotationAngle() = default;

    static constexpr RotationAngle radians(double rad) { return RotationAngle(rad); }
    static constexpr RotationAngle degrees(double deg) { return RotationAngle(deg * std::numbers::pi / 180.0); }

    constexpr double radians() const { return rad_; }
    constexpr double degrees() const { return rad_ * 180.0 / std::numbers::pi; }

    /// Same angle folded into [0, 2*pi).
    RotationAngle normalized() const;

private:
    constexpr explicit RotationAngle(double rad) : rad_(rad) {}
    double rad_ = 0.0;
};

/// Orthogonal 3x3 map that fixes (1,1,1).
struct RotationTransform {
    Mat3 m = Mat3::identity();

    LinearRgb apply(const LinearRgb& c) const { return to_linear(m * to_array(c)); }
};

/// Axis-angle rotation about normalized (1,1,1). Positive angles carry red
/// toward green: 120 degrees maps (1,0,0) to (0,1,0).
RotationTransform rotation_matrix(RotationAngle theta);

/// Unclipped; the result may leave [0,1]^3.
LinearRgb rotate_color(const LinearRgb& c, RotationAngle theta);

/// Per-channel clamp to [0,1].
LinearRgb clip_to_gamut(const LinearRgb& c);

/// decode -> rotate -> clip -> encode for every pixel. Alpha is copied untouched.
/// Rows are split across hardware threads.
Image rotate_image(const Image& img, RotationAngle theta);

struct TrajectorySample {
    RotationAngle theta;
    XyChromaticity xy;      ///< chromaticity of the clipped color
    LinearRgb color;        ///< clipped
    LinearRgb unclipped;
    bool clipped = false;
};

/// Chromaticity trail of clip(rotate(c, theta)) at `samples` angles evenly
/// spaced over [0, 2*pi). Throws std::invalid_argument for samples < 2 and
/// std::domain_error for black input (no chromaticity).
std::vector<TrajectorySample> shift_trajectory(const LinearRgb& c, int samples);

}  // namespace cvdshift
