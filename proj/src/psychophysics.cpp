#include "cvdshift/psychophysics.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace cvdshift {

std::string_view to_string(SamplingLine l)
{
    switch (l) {
    case SamplingLine::Protan: return "protan";
    case SamplingLine::Deutan: return "deutan";
    case SamplingLine::Tritan: return "tritan";
    case SamplingLine::ProtanOrthogonal: return "protan_orthogonal";
    }
    return "unknown";
}

std::string_view to_string(LineDirection d) { return d == LineDirection::Positive ? "positive" : "negative"; }

std::string_view to_string(Phase p) { return p == Phase::WithShift ? "with_shift" : "without_shift"; }

std::span<const BaseColor> study_base_colors()
{
    static const std::array<BaseColor, 4> bases{{
        {"blue", {86, 95, 214}},
        {"green", {100, 204, 102}},
        {"red", {184, 74, 74}},
        {"gray", {136, 136, 136}},
    }};
    return bases;
}

namespace {

std::array<double, 3> lab_array(const LinearRgb& c)
{
    const auto l = lab_from_linear(c);
    return {l.L, l.a, l.b};
}

LinearRgb normalized(const LinearRgb& v)
{
    const double len = std::sqrt(v.r * v.r + v.g * v.g + v.b * v.b);
    return {v.r / len, v.g / len, v.b / len};
}

LinearRgb along(const LinearRgb& base, const LinearRgb& dir, double s)
{
    return {base.r + s * dir.r, base.g + s * dir.g, base.b + s * dir.b};
}

/// d Lab / d linearRGB at c, central differences.
Mat3 lab_jacobian(const LinearRgb& c)
{
    constexpr double h = 1e-6;
    Mat3 j;
    for (int col = 0; col < 3; ++col) {
        auto plus = to_array(c);
        auto minus = to_array(c);
        plus[static_cast<std::size_t>(col)] += h;
        minus[static_cast<std::size_t>(col)] -= h;
        const auto lp = lab_array(to_linear(plus));
        const auto lm = lab_array(to_linear(minus));
        for (int row = 0; row < 3; ++row)
            j(row, col) = (lp[static_cast<std::size_t>(row)] - lm[static_cast<std::size_t>(row)]) / (2.0 * h);
    }
    return j;
}

}  // namespace

LinearRgb line_direction(const LinearRgb& base, SamplingLine line, LineDirection dir)
{
    LinearRgb v;
    switch (line) {
    case SamplingLine::Protan: v = confusion_axis(CvdType::Protan); break;
    case SamplingLine::Deutan: v = confusion_axis(CvdType::Deutan); break;
    case SamplingLine::Tritan: v = confusion_axis(CvdType::Tritan); break;
    case SamplingLine::ProtanOrthogonal: {
        const Mat3 jac = lab_jacobian(base);
        const auto protan_lab = jac * to_array(confusion_axis(CvdType::Protan));
        const std::array<double, 3> perpendicular{0.0, -protan_lab[2], protan_lab[1]};
        v = to_linear(jac.inverse() * perpendicular);
        break;
    }
    }
    v = normalized(v);
    if (dir == LineDirection::Negative)
        v = {-v.r, -v.g, -v.b};
    return v;
}

LinearRgb color_at_distance(const LinearRgb& base, const LinearRgb& direction, double distance)
{
    if (!(distance >= 0.0) || !std::isfinite(distance))
        throw std::domain_error("color_at_distance: distance must be non-negative");
    if (distance == 0.0)
        return base;
    const Lab origin = lab_from_linear(base);
    const auto dist = [&](double s) { return delta_e76(origin, lab_from_linear(along(base, direction, s))); };
    double lo = 0.0;
    double hi = 1e-3;
    for (int i = 0; i < 64 && dist(hi) < distance; ++i) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (dist(mid) < distance ? lo : hi) = mid;
    }
    return along(base, direction, 0.5 * (lo + hi));
}

double max_distance_in_gamut(const LinearRgb& base, const LinearRgb& direction)
{
    double s_max = std::numeric_limits<double>::infinity();
    const auto limit = [&](double value, double slope) {
        if (slope > 0.0)
            s_max = std::min(s_max, (1.0 - value) / slope);
        else if (slope < 0.0)
            s_max = std::min(s_max, -value / slope);
    };
    limit(base.r, direction.r);
    limit(base.g, direction.g);
    limit(base.b, direction.b);
    if (!std::isfinite(s_max) || s_max <= 0.0)
        return 0.0;
    return delta_e76(base, along(base, direction, s_max));
}

StaircaseState StaircaseState::start(const LinearRgb& base, const LinearRgb& direction, StaircaseSchedule schedule)
{
    StaircaseState s;
    s.base = base;
    s.direction = direction;
    s.schedule = schedule;
    s.max_distance = max_distance_in_gamut(base, direction);
    s.current_distance = std::min(schedule.start_distance, s.max_distance);
    s.step = schedule.coarse_step;
    return s;
}

StaircaseState staircase_step(const StaircaseState& s, bool correct)
{
    if (s.finished)
        throw StaircaseError("staircase_step: staircase already finished");

    StaircaseState next = s;
    Move move = Move::None;
    if (correct) {
        if (++next.consecutive_correct == 2) {
            move = Move::Down;
            next.consecutive_correct = 0;
        }
    } else {
        next.consecutive_correct = 0;
        move = Move::Up;
    }
    if (move == Move::None)
        return next;

    if (next.last_move != Move::None && move != next.last_move)
        next.reversals.push_back(next.current_distance);
    next.last_move = move;

    if (static_cast<int>(next.reversals.size()) >= next.schedule.reversals_to_finish) {
        next.finished = true;
        return next;
    }
    if (static_cast<int>(next.reversals.size()) >= next.schedule.reversals_before_fine)
        next.step = next.schedule.fine_step;

    if (move == Move::Down)
        next.current_distance = std::max(0.0, next.current_distance - next.step);
    else
        next.current_distance = std::min(next.max_distance, next.current_distance + next.step);
    return next;
}

double threshold_estimate(const StaircaseState& s)
{
    if (!s.finished)
        throw StaircaseError("threshold_estimate: staircase has not finished");
    const auto n = static_cast<std::size_t>(s.schedule.reversals_averaged);
    double sum = 0.0;
    for (std::size_t i = s.reversals.size() - n; i < s.reversals.size(); ++i)
        sum += s.reversals[i];
    return sum / static_cast<double>(n);
}

TrialLayout TrialLayout::make(const LinearRgb& base, const LinearRgb& odd, int odd_position)
{
    if (odd_position < 0 || odd_position > 3)
        throw std::out_of_range("TrialLayout: odd position must be in 0..3");
    TrialLayout t;
    t.patches.fill(base);
    t.patches[static_cast<std::size_t>(odd_position)] = odd;
    t.odd_position = odd_position;
    return t;
}

SimulatedObserver::SimulatedObserver(CvdType cvd, double tau_jnd, double lapse_rate, double angle_step_deg)
    : cvd_(cvd), tau_(tau_jnd), lapse_(lapse_rate)
{
    if (!(tau_jnd > 0.0) || !std::isfinite(tau_jnd))
        throw std::invalid_argument("SimulatedObserver: threshold must be positive");
    if (!(lapse_rate >= 0.0 && lapse_rate <= 1.0))
        throw std::invalid_argument("SimulatedObserver: lapse rate must be in [0,1]");
    for (double deg : angle_grid(angle_step_deg))
        rotations_.push_back(rotation_matrix(RotationAngle::degrees(deg)));
}

Jnd SimulatedObserver::best_difference(const LinearRgb& base, const LinearRgb& odd, bool shift_allowed) const
{
    if (!shift_allowed)
        return perceived_difference(base, odd, cvd_, rotations_.front());
    double best = 0.0;
    for (const auto& rot : rotations_)
        best = std::max(best, perceived_difference(base, odd, cvd_, rot).value);
    return {best};
}

int observer_decide(const SimulatedObserver& o, const TrialLayout& layout, bool shift_allowed, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> position(0, 3);
    const bool lapse = unit(rng) < o.lapse_rate();
    if (!lapse && o.best_difference(layout.base(), layout.odd(), shift_allowed).value > o.tau_jnd())
        return layout.odd_position;
    return position(rng);
}

SequenceResult run_sequence_detailed(const SimulatedObserver& o, const LinearRgb& base, SamplingLine line,
                                     LineDirection direction, bool shift_allowed, Rng& rng,
                                     StaircaseSchedule schedule)
{
    constexpr int kMaxTrials = 20000;
    auto state = StaircaseState::start(base, line_direction(base, line, direction), schedule);
    std::uniform_int_distribution<int> position(0, 3);
    SequenceResult result;
    while (!state.finished) {
        if (++result.trials > kMaxTrials)
            throw std::runtime_error("run_sequence: staircase did not converge");
        const int odd_at = position(rng);
        const auto layout = TrialLayout::make(base, state.odd_color(), odd_at);
        const int choice = observer_decide(o, layout, shift_allowed, rng);
        state = staircase_step(state, choice == odd_at);
    }
    result.threshold_delta_e = threshold_estimate(state);
    result.gamut_limited = result.threshold_delta_e >= state.max_distance - schedule.fine_step;
    return result;
}

double run_sequence(const SimulatedObserver& o, const LinearRgb& base, SamplingLine line, LineDirection direction,
                    bool shift_allowed, Rng& rng)
{
    return run_sequence_detailed(o, base, line, direction, shift_allowed, rng).threshold_delta_e;
}

StudyConfig make_study_config(std::uint64_t seed)
{
    StudyConfig cfg;
    const auto bases = study_base_colors();
    cfg.bases.assign(bases.begin(), bases.end());
    cfg.seed = seed;

    Rng rng(seed);
    for (Phase phase : {Phase::WithShift, Phase::WithoutShift}) {
        std::vector<SequenceSpec> section;
        for (std::size_t b = 0; b < cfg.bases.size(); ++b)
            for (SamplingLine line : kAllSamplingLines)
                for (LineDirection dir : {LineDirection::Positive, LineDirection::Negative})
                    section.push_back({b, line, dir, phase});
        std::shuffle(section.begin(), section.end(), rng);
        cfg.sequences.insert(cfg.sequences.end(), section.begin(), section.end());
    }
    return cfg;
}

std::uint64_t sequence_seed(std::uint64_t master, std::uint64_t index)
{
    // splitmix64 finalizer over a golden-ratio stride.
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<ThresholdRecord> run_study(const SimulatedObserver& o, const StudyConfig& cfg)
{
    std::vector<ThresholdRecord> records(cfg.sequences.size());
    detail::parallel_for(
        cfg.sequences.size(),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const auto& spec = cfg.sequences[i];
                const auto& base = cfg.bases.at(spec.base_index);
                const auto base_lin = base.linear();
                Rng rng(sequence_seed(cfg.seed, i));
                const double threshold =
                    run_sequence(o, base_lin, spec.line, spec.direction, spec.phase == Phase::WithShift, rng);
                const auto dir = line_direction(base_lin, spec.line, spec.direction);
                const auto at_threshold = color_at_distance(base_lin, dir, threshold);
                records[i] = {base.name, spec.base_index, spec.line, spec.direction, spec.phase, threshold,
                              linear_to_xy(at_threshold)};
            }
        },
        1);
    return records;
}

std::vector<EllipseSummary> summarize_study(const std::vector<ThresholdRecord>& records)
{
    std::map<std::pair<std::size_t, int>, std::vector<const ThresholdRecord*>> groups;
    for (const auto& r : records)
        groups[{r.base_index, static_cast<int>(r.phase)}].push_back(&r);

    std::vector<EllipseSummary> out;
    for (const auto& [key, group] : groups) {
        std::vector<XyChromaticity> points;
        points.reserve(group.size());
        for (const auto* r : group)
            points.push_back(r->threshold_xy);
        EllipseSummary s;
        s.base_name = group.front()->base_name;
        s.phase = group.front()->phase;
        s.ellipse = fit_ellipse(points);
        s.area = ellipse_area(s.ellipse);
        out.push_back(std::move(s));
    }
    return out;
}

LinearRgb perturb_color(const LinearRgb& c, double distance, Rng& rng)
{
    if (!in_gamut(c))
        throw std::domain_error("perturb_color: input color outside gamut");
    if (!(distance >= 0.0) || !std::isfinite(distance))
        throw std::domain_error("perturb_color: distance must be non-negative");
    if (distance == 0.0)
        return c;

    constexpr int kMaxDraws = 10000;
    const Lab origin = lab_from_linear(c);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < kMaxDraws; ++i) {
        double u[3] = {normal(rng), normal(rng), normal(rng)};
        const double len = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        if (len < 1e-12)
            continue;
        const Lab target{origin.L + distance * u[0] / len, origin.a + distance * u[1] / len,
                         origin.b + distance * u[2] / len};
        const auto candidate = linear_from_lab(target);
        if (in_gamut(candidate))
            return candidate;
    }
    throw std::domain_error("perturb_color: no in-gamut color at the requested distance");
}

}  // namespace cvdshift
