#pragma once

#include "cvdshift/analysis.hpp"
#include "cvdshift/colorspace.hpp"
#include "cvdshift/cvd_sim.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cvdshift {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Stimulus geometry

/// The four discrimination lines of the study: the three dichromat confusion
/// lines and the line orthogonal to the protan one.
enum class SamplingLine { Protan, Deutan, Tritan, ProtanOrthogonal };
enum class LineDirection { Positive, Negative };
enum class Phase { WithShift, WithoutShift };

inline constexpr std::array<SamplingLine, 4> kAllSamplingLines{SamplingLine::Protan, SamplingLine::Deutan,
                                                               SamplingLine::Tritan, SamplingLine::ProtanOrthogonal};

std::string_view to_string(SamplingLine l);
std::string_view to_string(LineDirection d);
std::string_view to_string(Phase p);

struct BaseColor {
    std::string name;
    SRgb8 srgb;

    LinearRgb linear() const { return srgb_decode(srgb); }
};

/// blue, green, red and gray study stimuli.
std::span<const BaseColor> study_base_colors();

/// Unit linear-RGB direction of a sampling line at `base`. Confusion lines
/// move only the missing cone; the orthogonal line keeps L* fixed and runs
/// perpendicular to the protan line in a*b*.
LinearRgb line_direction(const LinearRgb& base, SamplingLine line, LineDirection dir);

/// Point on the ray base + s * direction whose dE76 from base equals `distance`.
LinearRgb color_at_distance(const LinearRgb& base, const LinearRgb& direction, double distance);

/// Largest dE76 reachable along the ray while staying in gamut.
double max_distance_in_gamut(const LinearRgb& base, const LinearRgb& direction);

// ---------------------------------------------------------------------------
// Staircase

enum class Move { None, Up, Down };

struct StaircaseSchedule {
    double start_distance = 15.0;
    double coarse_step = 2.0;
    double fine_step = 1.0;
    int reversals_before_fine = 2;
    int reversals_to_finish = 6;
    int reversals_averaged = 3;
};

class StaircaseError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// 1-up-2-down staircase over the odd patch's dE76 distance from base.
struct StaircaseState {
    LinearRgb base;
    LinearRgb direction;
    double current_distance = 0.0;
    double max_distance = 0.0;  ///< gamut bound along the line
    double step = 0.0;
    int consecutive_correct = 0;
    std::vector<double> reversals;
    Move last_move = Move::None;
    bool finished = false;
    StaircaseSchedule schedule;

    static StaircaseState start(const LinearRgb& base, const LinearRgb& direction, StaircaseSchedule schedule = {});

    LinearRgb odd_color() const { return color_at_distance(base, direction, current_distance); }
};

/// Throws StaircaseError when the staircase already finished.
StaircaseState staircase_step(const StaircaseState& s, bool correct);

/// Mean of the last `reversals_averaged` reversals. Throws StaircaseError if unfinished.
double threshold_estimate(const StaircaseState& s);

// ---------------------------------------------------------------------------
// Trials and observer

struct TrialLayout {
    std::array<LinearRgb, 4> patches;
    int odd_position = 0;

    /// Throws std::out_of_range for a position outside 0..3.
    static TrialLayout make(const LinearRgb& base, const LinearRgb& odd, int odd_position);
    const LinearRgb& base() const { return patches[static_cast<std::size_t>(odd_position == 0 ? 1 : 0)]; }
    const LinearRgb& odd() const { return patches[static_cast<std::size_t>(odd_position)]; }
};

/// Deterministic-threshold dichromat: sees the odd patch whenever the best
/// available simulated difference exceeds tau, guesses otherwise.
class SimulatedObserver {
public:
    /// Throws std::invalid_argument unless tau > 0 and lapse in [0,1].
    SimulatedObserver(CvdType cvd, double tau_jnd, double lapse_rate, double angle_step_deg = 1.0);

    CvdType cvd() const { return cvd_; }
    double tau_jnd() const { return tau_; }
    double lapse_rate() const { return lapse_; }

    /// Largest perceived JND between the two colors over the allowed angles
    /// (theta = 0 only without shift).
    Jnd best_difference(const LinearRgb& base, const LinearRgb& odd, bool shift_allowed) const;

private:
    CvdType cvd_;
    double tau_;
    double lapse_;
    std::vector<RotationTransform> rotations_;
};

int observer_decide(const SimulatedObserver& o, const TrialLayout& layout, bool shift_allowed, Rng& rng);

// ---------------------------------------------------------------------------
// Study

struct SequenceSpec {
    std::size_t base_index = 0;
    SamplingLine line = SamplingLine::Protan;
    LineDirection direction = LineDirection::Positive;
    Phase phase = Phase::WithShift;
};

struct StudyConfig {
    std::vector<BaseColor> bases;
    std::vector<SequenceSpec> sequences;  ///< with-shift section first, shuffled within each section
    std::uint64_t seed = 0;
};

StudyConfig make_study_config(std::uint64_t seed);

struct SequenceResult {
    double threshold_delta_e = 0.0;
    int trials = 0;
    bool gamut_limited = false;
};

SequenceResult run_sequence_detailed(const SimulatedObserver& o, const LinearRgb& base, SamplingLine line,
                                     LineDirection direction, bool shift_allowed, Rng& rng,
                                     StaircaseSchedule schedule = {});

double run_sequence(const SimulatedObserver& o, const LinearRgb& base, SamplingLine line, LineDirection direction,
                    bool shift_allowed, Rng& rng);

struct ThresholdRecord {
    std::string base_name;
    std::size_t base_index = 0;
    SamplingLine line = SamplingLine::Protan;
    LineDirection direction = LineDirection::Positive;
    Phase phase = Phase::WithShift;
    double threshold_delta_e = 0.0;
    XyChromaticity threshold_xy;  ///< chromaticity of the threshold color
};

/// Runs every sequence; sequence i draws from its own stream seeded from
/// (cfg.seed, i), so results do not depend on execution order.
std::vector<ThresholdRecord> run_study(const SimulatedObserver& o, const StudyConfig& cfg);

struct EllipseSummary {
    std::string base_name;
    Phase phase = Phase::WithShift;
    ThresholdEllipse ellipse;
    double area = 0.0;
};

/// One ellipse per (base, phase) through the 8 directional threshold points.
std::vector<EllipseSummary> summarize_study(const std::vector<ThresholdRecord>& records);

/// Random Lab direction at exactly `distance` dE76, rejecting out-of-gamut
/// draws. Throws std::domain_error when no in-gamut draw is found.
LinearRgb perturb_color(const LinearRgb& c, double distance, Rng& rng);

/// Independent, deterministic stream for sequence `index` of a study.
std::uint64_t sequence_seed(std::uint64_t master, std::uint64_t index);

}  // namespace cvdshift
