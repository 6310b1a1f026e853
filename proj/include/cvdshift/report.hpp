#pragma once

#include "cvdshift/analysis.hpp"
#include "cvdshift/naming.hpp"
#include "cvdshift/psychophysics.hpp"
#include "cvdshift/rotation.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Text serializations shared by the command-line tool and the HTTP service,
// so both paths emit identical bytes for identical inputs.
namespace cvdshift::report {

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// "r,g,b" with integer channels in 0..255.
SRgb8 parse_rgb_triplet(std::string_view text);

struct Fig9Request {
    SRgb8 base{136, 136, 136};
    CvdType cvd = CvdType::Protan;
    double spacing_delta_e = 5.0;
    int count = 13;
    double angle_step_deg = 1.0;
};

struct Fig9Result {
    Fig9Request request;
    std::vector<DiscriminabilityCurve> curves;
    std::vector<PeakDiscriminability> peaks;
};

/// Throws std::invalid_argument for bad parameters and GamutError when the
/// samples leave the gamut.
Fig9Result run_fig9(const Fig9Request& req);

/// `pair_index,theta_deg,jnd`, one row per pair and angle.
std::string fig9_csv(const Fig9Result& r);
/// Per-pair theta_star, jnd_max and jnd_at_zero; `include_curves` adds the
/// sampled jnd arrays.
std::string fig9_json(const Fig9Result& r, bool include_curves);

/// Threshold points, header `x,y`.
std::vector<XyChromaticity> parse_points_csv(std::string_view csv, const std::string& source = "<memory>");
std::string ellipse_json(const ThresholdEllipse& e);

std::string study_csv(const std::vector<ThresholdRecord>& records);
std::string study_json(const SimulatedObserver& o, const StudyConfig& cfg, const std::vector<EllipseSummary>& s);

std::string trajectory_csv(const std::vector<TrajectorySample>& samples);
std::string trajectory_json(const std::vector<TrajectorySample>& samples);

/// {name, variant, distance}, plus `nearest` when runner-ups are given.
std::string name_json(const ColorName& best, const std::vector<ColorName>& nearest = {});
std::string dictionary_json(const ColorDictionary& dict);

}  // namespace cvdshift::report
