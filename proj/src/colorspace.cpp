#include "cvdshift/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cvdshift {

Mat3 Mat3::identity()
{
    Mat3 r;
    r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
    return r;
}

Mat3 Mat3::transposed() const
{
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = (*this)(j, i);
    return r;
}

double Mat3::determinant() const
{
    const auto& a = *this;
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
         - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
         + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Mat3 Mat3::inverse() const
{
    const auto& a = *this;
    const double det = determinant();
    if (det == 0.0 || !std::isfinite(det))
        throw std::domain_error("Mat3::inverse: singular matrix");
    Mat3 r;
    r(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / det;
    r(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / det;
    r(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / det;
    r(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / det;
    r(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / det;
    r(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / det;
    r(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / det;
    r(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / det;
    r(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / det;
    return r;
}

Mat3 operator*(const Mat3& a, const Mat3& b)
{
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
    return r;
}

std::array<double, 3> operator*(const Mat3& a, const std::array<double, 3>& v)
{
    return {a(0, 0) * v[0] + a(0, 1) * v[1] + a(0, 2) * v[2],
            a(1, 0) * v[0] + a(1, 1) * v[1] + a(1, 2) * v[2],
            a(2, 0) * v[0] + a(2, 1) * v[1] + a(2, 2) * v[2]};
}

double srgb_eotf(double v)
{
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double srgb_oetf(double v)
{
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

LinearRgb srgb_decode(SRgb8 c)
{
    return {srgb_eotf(c.r / 255.0), srgb_eotf(c.g / 255.0), srgb_eotf(c.b / 255.0)};
}

namespace {

std::uint8_t encode_channel(double v)
{
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw std::domain_error("srgb_encode: channel value " + std::to_string(v) + " outside [0,1]");
    return static_cast<std::uint8_t>(std::lround(255.0 * srgb_oetf(v)));
}

}  // namespace

SRgb8 srgb_encode(const LinearRgb& c)
{
    return {encode_channel(c.r), encode_channel(c.g), encode_channel(c.b)};
}

SrgbCodec::SrgbCodec()
{
    std::array<double, 255> thresholds{};
    for (int k = 0; k < 256; ++k)
        decode_[static_cast<std::size_t>(k)] = static_cast<float>(srgb_eotf(k / 255.0));
    for (std::size_t k = 0; k < 255; ++k) {
        thresholds[k] = srgb_eotf((static_cast<double>(k) + 0.5) / 255.0);
        float t = static_cast<float>(thresholds[k]);
        if (static_cast<double>(t) < thresholds[k])
            t = std::nextafter(t, 2.0f);
        upper_[k] = t;
        lower_[k + 1] = t;
    }
    upper_[255] = std::numeric_limits<float>::infinity();
    lower_[0] = -std::numeric_limits<float>::infinity();

    // Bins are narrower than the narrowest code interval, so the code at a
    // bin's start is off by at most one anywhere inside the bin.
    std::size_t code = 0;
    for (std::size_t bin = 0; bin < kBins; ++bin) {
        const float start = static_cast<float>(bin) / static_cast<float>(kBins - 1);
        while (code < 255 && start >= upper_[code])
            ++code;
        bin_code_[bin] = static_cast<std::uint8_t>(code);
    }
}

const SrgbCodec& SrgbCodec::instance()
{
    static const SrgbCodec codec;
    return codec;
}

namespace {

Xyz xy_white(double x, double y) { return {x / y, 1.0, (1.0 - x - y) / y}; }

Mat3 build_linear_to_xyz()
{
    // Columns are the primaries' XYZ scaled so that (1,1,1) lands on D65 with Y = 1.
    const std::array<XyChromaticity, 3> primaries{{{0.64, 0.33}, {0.30, 0.60}, {0.15, 0.06}}};
    Mat3 p;
    for (int j = 0; j < 3; ++j) {
        const auto& c = primaries[static_cast<std::size_t>(j)];
        p(0, j) = c.x / c.y;
        p(1, j) = 1.0;
        p(2, j) = (1.0 - c.x - c.y) / c.y;
    }
    const Xyz w = xy_white(0.3127, 0.3290);
    const auto scale = p.inverse() * std::array<double, 3>{w.x, w.y, w.z};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            p(i, j) *= scale[static_cast<std::size_t>(j)];
    return p;
}

Mat3 build_xyz_to_lms()
{
    // Smith-Pokorny cone fundamentals (Judd-Vos XYZ), rows rescaled so D65 -> (1,1,1).
    Mat3 sp;
    sp.m = {0.15514, 0.54312, -0.03286,
            -0.15514, 0.45684, 0.03286,
            0.0, 0.0, 0.00801};
    const Mat3& rgb = linear_to_xyz_matrix();
    const auto white = rgb * std::array<double, 3>{1.0, 1.0, 1.0};
    const auto response = sp * white;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            sp(i, j) /= response[static_cast<std::size_t>(i)];
    return sp;
}

}  // namespace

const Mat3& linear_to_xyz_matrix()
{
    static const Mat3 m = build_linear_to_xyz();
    return m;
}

const Mat3& xyz_to_lms_matrix()
{
    static const Mat3 m = build_xyz_to_lms();
    return m;
}

const Mat3& linear_to_lms_matrix()
{
    static const Mat3 m = xyz_to_lms_matrix() * linear_to_xyz_matrix();
    return m;
}

const Mat3& lms_to_linear_matrix()
{
    static const Mat3 m = linear_to_lms_matrix().inverse();
    return m;
}

namespace {

const Mat3& xyz_to_linear_matrix()
{
    static const Mat3 m = linear_to_xyz_matrix().inverse();
    return m;
}

}  // namespace

Xyz linear_to_xyz(const LinearRgb& c)
{
    const auto v = linear_to_xyz_matrix() * to_array(c);
    return {v[0], v[1], v[2]};
}

LinearRgb xyz_to_linear(const Xyz& c)
{
    return to_linear(xyz_to_linear_matrix() * std::array<double, 3>{c.x, c.y, c.z});
}

XyChromaticity xyz_to_xy(const Xyz& c)
{
    const double sum = c.x + c.y + c.z;
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw std::domain_error("xyz_to_xy: tristimulus sum must be positive");
    return {c.x / sum, c.y / sum};
}

XyChromaticity linear_to_xy(const LinearRgb& c) { return xyz_to_xy(linear_to_xyz(c)); }

Xyz xy_to_xyz(const XyChromaticity& xy, double luminance)
{
    if (xy.y == 0.0)
        throw std::domain_error("xy_to_xyz: y must be non-zero");
    return {xy.x / xy.y * luminance, luminance, (1.0 - xy.x - xy.y) / xy.y * luminance};
}

Xyz d65_white() { return linear_to_xyz({1.0, 1.0, 1.0}); }

Lms xyz_to_lms(const Xyz& c)
{
    const auto v = xyz_to_lms_matrix() * std::array<double, 3>{c.x, c.y, c.z};
    return {v[0], v[1], v[2]};
}

Lms linear_to_lms(const LinearRgb& c)
{
    const auto v = linear_to_lms_matrix() * to_array(c);
    return {v[0], v[1], v[2]};
}

LinearRgb lms_to_linear(const Lms& c)
{
    return to_linear(lms_to_linear_matrix() * std::array<double, 3>{c.l, c.m, c.s});
}

namespace {

constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t)
{
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double f)
{
    return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0);
}

}  // namespace

Lab xyz_to_lab(const Xyz& c)
{
    static const Xyz white = d65_white();
    const double fx = lab_f(c.x / white.x);
    const double fy = lab_f(c.y / white.y);
    const double fz = lab_f(c.z / white.z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Xyz lab_to_xyz(const Lab& c)
{
    static const Xyz white = d65_white();
    const double fy = (c.L + 16.0) / 116.0;
    const double fx = fy + c.a / 500.0;
    const double fz = fy - c.b / 200.0;
    return {white.x * lab_f_inv(fx), white.y * lab_f_inv(fy), white.z * lab_f_inv(fz)};
}

Lab lab_from_linear(const LinearRgb& c) { return xyz_to_lab(linear_to_xyz(c)); }

LinearRgb linear_from_lab(const Lab& c) { return xyz_to_linear(lab_to_xyz(c)); }

double delta_e76(const Lab& a, const Lab& b)
{
    return std::hypot(a.L - b.L, a.a - b.a, a.b - b.b);
}

double delta_e76(const LinearRgb& a, const LinearRgb& b)
{
    return delta_e76(lab_from_linear(a), lab_from_linear(b));
}

Jnd delta_e_to_jnd(double delta_e)
{
    if (!std::isfinite(delta_e) || delta_e < 0.0)
        throw std::domain_error("delta_e_to_jnd: color difference must be a non-negative number");
    return {delta_e / kDeltaEPerJnd};
}

bool is_finite(const LinearRgb& c)
{
    return std::isfinite(c.r) && std::isfinite(c.g) && std::isfinite(c.b);
}

bool in_gamut(const LinearRgb& c, double tolerance)
{
    const auto ok = [tolerance](double v) { return v >= -tolerance && v <= 1.0 + tolerance; };
    return ok(c.r) && ok(c.g) && ok(c.b);
}

}  // namespace cvdshift
