#pragma once

#include <array>
#include <cstdint>

namespace cvdshift {

/// Display-encoded sRGB, one 8-bit code per channel.
struct SRgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const SRgb8&, const SRgb8&) = default;
};

/// Scene-linear sRGB. Values outside [0,1] are allowed (unclipped rotation output).
struct LinearRgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    friend bool operator==(const LinearRgb&, const LinearRgb&) = default;
};

/// CIE 1931 tristimulus values, Y of the D65 white normalized to 1.
struct Xyz {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct XyChromaticity {
    double x = 0.0;
    double y = 0.0;
};

/// Cone excitations, normalized so D65 white is (1,1,1).
struct Lms {
    double l = 0.0;
    double m = 0.0;
    double s = 0.0;
};

/// CIELAB relative to D65.
struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// Color difference in just-noticeable-difference units.
struct Jnd {
    double value = 0.0;
};

/// CIELAB dE76 units per JND.
inline constexpr double kDeltaEPerJnd = 2.3;

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{};

    double operator()(int row, int col) const { return m[static_cast<std::size_t>(row * 3 + col)]; }
    double& operator()(int row, int col) { return m[static_cast<std::size_t>(row * 3 + col)]; }

    static Mat3 identity();
    Mat3 transposed() const;
    Mat3 inverse() const;
    double determinant() const;
};

Mat3 operator*(const Mat3& a, const Mat3& b);
std::array<double, 3> operator*(const Mat3& a, const std::array<double, 3>& v);

inline std::array<double, 3> to_array(const LinearRgb& c) { return {c.r, c.g, c.b}; }
inline LinearRgb to_linear(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

// IEC 61966-2-1 transfer functions on a single normalized channel.
double srgb_eotf(double encoded);
double srgb_oetf(double linear);

LinearRgb srgb_decode(SRgb8 c);

/// Throws std::domain_error when a channel is outside [0,1] or not finite.
SRgb8 srgb_encode(const LinearRgb& c);

/// Table-driven channel codec for per-pixel loops. Produces exactly the
/// codes of srgb_decode/srgb_encode.
class SrgbCodec {
public:
    SrgbCodec();

    float decode(std::uint8_t code) const { return decode_[code]; }

    /// Input must already be clipped to [0,1].
    std::uint8_t encode(float linear) const
    {
        const auto bin = static_cast<std::size_t>(linear * static_cast<float>(kBins - 1));
        const std::uint8_t code = bin_code_[bin];
        return static_cast<std::uint8_t>(code + (linear >= upper_[code]) - (linear < lower_[code]));
    }

    static const SrgbCodec& instance();

private:
    static constexpr std::size_t kBins = 16384;
    std::array<float, 256> decode_{};
    // Smallest floats at or above the linear values where the code moves up
    // from k (upper_) or up to k (lower_).
    std::array<float, 256> upper_{};
    std::array<float, 256> lower_{};
    std::array<std::uint8_t, kBins> bin_code_{};
};

/// sRGB primaries with a D65 white; linear (1,1,1) maps to Y = 1.
const Mat3& linear_to_xyz_matrix();
const Mat3& xyz_to_lms_matrix();
const Mat3& linear_to_lms_matrix();
const Mat3& lms_to_linear_matrix();

Xyz linear_to_xyz(const LinearRgb& c);
LinearRgb xyz_to_linear(const Xyz& c);

/// Throws std::domain_error when x + y + z is not positive.
XyChromaticity xyz_to_xy(const Xyz& c);
XyChromaticity linear_to_xy(const LinearRgb& c);

/// xyY to XYZ. Throws std::domain_error for y == 0.
Xyz xy_to_xyz(const XyChromaticity& xy, double luminance);

Xyz d65_white();

Lms linear_to_lms(const LinearRgb& c);
LinearRgb lms_to_linear(const Lms& c);
Lms xyz_to_lms(const Xyz& c);

Lab xyz_to_lab(const Xyz& c);
Xyz lab_to_xyz(const Lab& c);
Lab lab_from_linear(const LinearRgb& c);
LinearRgb linear_from_lab(const Lab& c);

double delta_e76(const Lab& a, const Lab& b);
double delta_e76(const LinearRgb& a, const LinearRgb& b);

/// Throws std::domain_error for a negative or non-finite difference.
Jnd delta_e_to_jnd(double delta_e);

bool is_finite(const LinearRgb& c);
bool in_gamut(const LinearRgb& c, double tolerance = 0.0);

}  // namespace cvdshift
