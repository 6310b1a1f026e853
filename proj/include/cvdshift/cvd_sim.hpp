#pragma once

#include "cvdshift/colorspace.hpp"
#include "cvdshift/image.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvdshift {

/// Dichromacy class, named by the missing cone.
enum class CvdType { Protan, Deutan, Tritan };

inline constexpr std::array<CvdType, 3> kAllCvdTypes{CvdType::Protan, CvdType::Deutan, CvdType::Tritan};

std::string_view to_string(CvdType t);
/// Accepts protan/deutan/tritan (also the -opia/-anope spellings). Throws std::invalid_argument.
CvdType parse_cvd_type(std::string_view text);

/// Index of the missing cone in (L, M, S).
int missing_cone(CvdType t);

struct ConfusionLine {
    XyChromaticity base;
    XyChromaticity copunctal;
    XyChromaticity direction;  ///< unit vector from base toward copunctal

    XyChromaticity at(double t) const { return {base.x + t * direction.x, base.y + t * direction.y}; }
};

struct IsochromeAnchors {
    std::array<double, 2> wavelength_nm{};
    std::array<XyChromaticity, 2> xy{};
    std::array<Lms, 2> lms{};
};

struct SpectralSample {
    double wavelength_nm;
    double xbar;
    double ybar;
    double zbar;
};

/// Embedded CIE 1931 2-degree table, 380..780 nm in 5 nm steps.
std::span<const SpectralSample> cie1931_table();

/// Linearly interpolated color matching functions. Throws std::out_of_range
/// outside the table.
Xyz spectral_xyz(double wavelength_nm);
XyChromaticity spectral_chromaticity(double wavelength_nm);

/// 475/575 nm for Protan and Deutan, 485/660 nm for Tritan.
IsochromeAnchors isochrome_anchors(CvdType t);

/// Replaces the missing cone's excitation so the result lies on the
/// half-plane spanned by the white point and the anchor on the same side
/// of the white/missing-axis plane. Unclipped.
Lms project_to_dichromat(const Lms& c, CvdType t);

/// What a dichromat of type `t` perceives, as a trichromat-equivalent
/// color, clipped to [0,1]^3.
LinearRgb simulate_dichromat(const LinearRgb& c, CvdType t);

/// simulate_dichromat applied to every pixel of an 8-bit image. Alpha is copied untouched.
Image simulate_image(const Image& img, CvdType t);

/// Chromaticity of the missing cone's axis, where all confusion lines of
/// that type meet.
XyChromaticity copunctal_point(CvdType t);

/// Linear RGB direction that changes only the missing cone's excitation.
LinearRgb confusion_axis(CvdType t);

/// Throws std::domain_error if base has no chromaticity or sits on the copunctal point.
ConfusionLine confusion_line(const LinearRgb& base, CvdType t);

class GamutError : public std::runtime_error {
public:
    GamutError(const std::string& what, int achievable)
        : std::runtime_error(what), achievable_(achievable)
    {}
    /// Largest sample count that fits in gamut (0 if none).
    int achievable() const { return achievable_; }

private:
    int achievable_;
};

/// `count` dichromat metamers of `base` on its confusion line, ordered along
/// the missing-cone axis, with adjacent pairs `spacing` dE76 apart and
/// centered on base (base itself is the middle sample for odd counts).
/// Throws std::invalid_argument for count < 2 or spacing <= 0 and GamutError
/// when the samples do not fit in [0,1]^3.
std::vector<LinearRgb> sample_confusion_line(const LinearRgb& base, CvdType t, double spacing, int count);

}  // namespace cvdshift
