#pragma once

#include "cvdshift/colorspace.hpp"
#include "cvdshift/cvd_sim.hpp"
#include "cvdshift/rotation.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace cvdshift {

struct DiscriminabilitySample {
    double theta_deg = 0.0;
    Jnd jnd;
};

/// How the dichromat-perceived difference of a color pair evolves as both
/// colors rotate together.
struct DiscriminabilityCurve {
    LinearRgb first;
    LinearRgb second;
    std::vector<DiscriminabilitySample> samples;
};

struct PeakDiscriminability {
    double theta_deg = 0.0;
    Jnd jnd;
};

/// JND between the type-t percepts of clip(R a) and clip(R b).
Jnd perceived_difference(const LinearRgb& a, const LinearRgb& b, CvdType t, const RotationTransform& rotation);

/// Angle grid k * angle_step_deg for k = 0 .. ceil(360 / step) - 1.
std::vector<double> angle_grid(double angle_step_deg);

DiscriminabilityCurve discriminability_curve(const LinearRgb& first, const LinearRgb& second, CvdType t,
                                             double angle_step_deg = 1.0);

/// Samples `count` colors on base's type-t confusion line at `spacing` dE76
/// and returns one curve per adjacent pair. Sampling errors propagate.
std::vector<DiscriminabilityCurve> discriminability_curves(const LinearRgb& base, CvdType t, double spacing,
                                                           int count, double angle_step_deg = 1.0);

/// Largest sample; ties resolve to the smallest angle. Throws std::invalid_argument on an empty curve.
PeakDiscriminability max_discriminability(const DiscriminabilityCurve& curve);

struct ThresholdEllipse {
    XyChromaticity center;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double orientation = 0.0;  ///< radians in [0, pi), major axis from +x
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Direct least-squares ellipse fit (Fitzgibbon, Pilu & Fisher, in the
/// numerically stable Halir-Flusser form). Needs at least 5 points that are
/// not collinear; throws FitError otherwise or when no elliptical conic fits.
ThresholdEllipse fit_ellipse(std::span<const XyChromaticity> points);

double ellipse_area(const ThresholdEllipse& e);

/// Point on the ellipse at parameter t.
XyChromaticity ellipse_point(const ThresholdEllipse& e, double t);

}  // namespace cvdshift
