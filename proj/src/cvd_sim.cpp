#include "cvdshift/cvd_sim.hpp"

#include "cvdshift/rotation.hpp"
#include "embedded_data.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace cvdshift {

std::string_view to_string(CvdType t)
{
    switch (t) {
    case CvdType::Protan: return "protan";
    case CvdType::Deutan: return "deutan";
    case CvdType::Tritan: return "tritan";
    }
    return "unknown";
}

CvdType parse_cvd_type(std::string_view text)
{
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "protan" || s == "protanopia" || s == "protanope")
        return CvdType::Protan;
    if (s == "deutan" || s == "deuteranopia" || s == "deuteranope")
        return CvdType::Deutan;
    if (s == "tritan" || s == "tritanopia" || s == "tritanope")
        return CvdType::Tritan;
    throw std::invalid_argument("unknown CVD type '" + std::string(text) + "' (expected protan, deutan or tritan)");
}

int missing_cone(CvdType t)
{
    switch (t) {
    case CvdType::Protan: return 0;
    case CvdType::Deutan: return 1;
    case CvdType::Tritan: return 2;
    }
    return 0;
}

namespace {

std::vector<SpectralSample> parse_cmf_table(std::string_view csv)
{
    std::vector<SpectralSample> rows;
    std::istringstream in{std::string(csv)};
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        SpectralSample s{};
        char comma = 0;
        std::istringstream fields(line);
        fields >> s.wavelength_nm >> comma >> s.xbar >> comma >> s.ybar >> comma >> s.zbar;
        if (!fields)
            throw std::runtime_error("embedded CIE 1931 table is malformed: " + line);
        rows.push_back(s);
    }
    return rows;
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> as_array(const Lms& c) { return {c.l, c.m, c.s}; }

struct Projection {
    int missing = 0;
    std::array<double, 3> separator{};  // positive side -> first anchor's plane
    std::array<std::array<double, 3>, 2> normals{};
};

Projection build_projection(CvdType t)
{
    const auto anchors = isochrome_anchors(t);
    const std::array<double, 3> white{1.0, 1.0, 1.0};
    Projection p;
    p.missing = missing_cone(t);
    std::array<double, 3> axis{};
    axis[static_cast<std::size_t>(p.missing)] = 1.0;
    p.separator = cross(white, axis);
    const auto first = as_array(anchors.lms[0]);
    if (dot(p.separator, first) < 0.0)
        for (auto& v : p.separator)
            v = -v;
    p.normals[0] = cross(white, first);
    p.normals[1] = cross(white, as_array(anchors.lms[1]));
    return p;
}

const Projection& projection(CvdType t)
{
    static const std::array<Projection, 3> table{build_projection(CvdType::Protan), build_projection(CvdType::Deutan),
                                                 build_projection(CvdType::Tritan)};
    return table[static_cast<std::size_t>(missing_cone(t))];
}

}  // namespace

std::span<const SpectralSample> cie1931_table()
{
    static const std::vector<SpectralSample> table = parse_cmf_table(data::cie1931_csv());
    return table;
}

Xyz spectral_xyz(double wavelength_nm)
{
    const auto table = cie1931_table();
    if (table.empty() || wavelength_nm < table.front().wavelength_nm || wavelength_nm > table.back().wavelength_nm)
        throw std::out_of_range("wavelength outside the CIE 1931 table");
    auto hi = std::lower_bound(table.begin(), table.end(), wavelength_nm,
                               [](const SpectralSample& s, double nm) { return s.wavelength_nm < nm; });
    if (hi->wavelength_nm == wavelength_nm)
        return {hi->xbar, hi->ybar, hi->zbar};
    const auto lo = std::prev(hi);
    const double f = (wavelength_nm - lo->wavelength_nm) / (hi->wavelength_nm - lo->wavelength_nm);
    return {lo->xbar + f * (hi->xbar - lo->xbar), lo->ybar + f * (hi->ybar - lo->ybar),
            lo->zbar + f * (hi->zbar - lo->zbar)};
}

XyChromaticity spectral_chromaticity(double wavelength_nm) { return xyz_to_xy(spectral_xyz(wavelength_nm)); }

IsochromeAnchors isochrome_anchors(CvdType t)
{
    IsochromeAnchors a;
    a.wavelength_nm = t == CvdType::Tritan ? std::array<double, 2>{485.0, 660.0} : std::array<double, 2>{475.0, 575.0};
    for (std::size_t i = 0; i < 2; ++i) {
        const auto xyz = spectral_xyz(a.wavelength_nm[i]);
        a.xy[i] = xyz_to_xy(xyz);
        a.lms[i] = xyz_to_lms(xyz);
    }
    return a;
}

Lms project_to_dichromat(const Lms& c, CvdType t)
{
    const auto& p = projection(t);
    auto q = as_array(c);
    const auto& n = dot(q, p.separator) >= 0.0 ? p.normals[0] : p.normals[1];
    const auto k = static_cast<std::size_t>(p.missing);
    const auto i = (k + 1) % 3;
    const auto j = (k + 2) % 3;
    q[k] = -(n[i] * q[i] + n[j] * q[j]) / n[k];
    return {q[0], q[1], q[2]};
}

LinearRgb simulate_dichromat(const LinearRgb& c, CvdType t)
{
    const auto p = lms_to_linear(project_to_dichromat(linear_to_lms(c), t));
    if (in_gamut(p))
        return p;
    // Pull toward the neutral of equal luminance: the mix stays on the
    // dichromat half-plane, so a second pass leaves the result unchanged.
    const auto y = linear_to_xyz(p).y;
    const double g = std::clamp(y, 0.0, 1.0);
    double scale = 1.0;
    for (double v : {p.r, p.g, p.b}) {
        if (v > 1.0)
            scale = std::min(scale, (1.0 - g) / (v - g));
        else if (v < 0.0)
            scale = std::min(scale, g / (g - v));
    }
    const LinearRgb mixed{g + scale * (p.r - g), g + scale * (p.g - g), g + scale * (p.b - g)};
    return clip_to_gamut(mixed);
}

Image simulate_image(const Image& img, CvdType t)
{
    Image out = img;
    const auto& codec = SrgbCodec::instance();
    const auto src = img.bytes();
    auto dst = out.bytes();
    const auto ch = static_cast<std::size_t>(img.channels());
    detail::parallel_for(img.pixel_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const std::size_t o = p * ch;
            const LinearRgb c{codec.decode(src[o]), codec.decode(src[o + 1]), codec.decode(src[o + 2])};
            const auto s = simulate_dichromat(c, t);
            dst[o] = codec.encode(static_cast<float>(s.r));
            dst[o + 1] = codec.encode(static_cast<float>(s.g));
            dst[o + 2] = codec.encode(static_cast<float>(s.b));
        }
    });
    return out;
}

XyChromaticity copunctal_point(CvdType t)
{
    const auto xyz = linear_to_xyz(confusion_axis(t));
    const double sum = xyz.x + xyz.y + xyz.z;
    return {xyz.x / sum, xyz.y / sum};
}

LinearRgb confusion_axis(CvdType t)
{
    const auto& inv = lms_to_linear_matrix();
    const int k = missing_cone(t);
    return {inv(0, k), inv(1, k), inv(2, k)};
}

ConfusionLine confusion_line(const LinearRgb& base, CvdType t)
{
    const auto b = linear_to_xy(base);
    const auto cp = copunctal_point(t);
    const double dx = cp.x - b.x;
    const double dy = cp.y - b.y;
    const double len = std::hypot(dx, dy);
    if (len < 1e-12)
        throw std::domain_error("confusion_line: base chromaticity coincides with the copunctal point");
    return {b, cp, {dx / len, dy / len}};
}

namespace {

class MetamerLine {
public:
    MetamerLine(const LinearRgb& base, CvdType t) : base_(base), axis_(confusion_axis(t))
    {
        const double len = std::sqrt(axis_.r * axis_.r + axis_.g * axis_.g + axis_.b * axis_.b);
        axis_ = {axis_.r / len, axis_.g / len, axis_.b / len};
    }

    LinearRgb at(double s) const { return {base_.r + s * axis_.r, base_.g + s * axis_.g, base_.b + s * axis_.b}; }
    Lab lab(double s) const { return lab_from_linear(at(s)); }

    /// Position `sign * h` past `from` with dE76(at(from), at(result)) == target.
    double step(double from, double sign, double target) const
    {
        const Lab origin = lab(from);
        const auto dist = [&](double h) { return delta_e76(origin, lab(from + sign * h)); };
        double lo = 0.0;
        double hi = 1e-3;
        for (int i = 0; i < 64 && dist(hi) < target; ++i) {
            lo = hi;
            hi *= 2.0;
        }
        if (dist(hi) < target)
            throw std::runtime_error("sample_confusion_line: spacing unreachable along the confusion line");
        for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
            const double mid = 0.5 * (lo + hi);
            (dist(mid) < target ? lo : hi) = mid;
        }
        return from + sign * 0.5 * (lo + hi);
    }

    /// Half-offset h with dE76(at(-h'), at(+h'')) == target, where both ends
    /// are h dE76 from base.
    std::pair<double, double> straddle(double target) const
    {
        const auto pair_at = [&](double h) { return std::pair{step(0.0, -1.0, h), step(0.0, 1.0, h)}; };
        const auto pair_dist = [&](double h) {
            const auto [a, b] = pair_at(h);
            return delta_e76(lab(a), lab(b));
        };
        double lo = 0.0;
        double hi = target;
        while (pair_dist(hi) < target)
            hi *= 2.0;
        for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
            const double mid = 0.5 * (lo + hi);
            (pair_dist(mid) < target ? lo : hi) = mid;
        }
        return pair_at(0.5 * (lo + hi));
    }

private:
    LinearRgb base_;
    LinearRgb axis_;
};

constexpr double kGamutTolerance = 1e-9;

std::optional<std::vector<LinearRgb>> try_sample(const MetamerLine& line, double spacing, int count)
{
    std::vector<double> positions;
    positions.reserve(static_cast<std::size_t>(count));
    if (count % 2 == 1) {
        std::vector<double> up{0.0};
        std::vector<double> down{0.0};
        for (int i = 0; i < count / 2; ++i) {
            up.push_back(line.step(up.back(), 1.0, spacing));
            down.push_back(line.step(down.back(), -1.0, spacing));
        }
        positions.assign(down.rbegin(), down.rend());
        positions.insert(positions.end(), up.begin() + 1, up.end());
    } else {
        const auto [inner_lo, inner_hi] = line.straddle(spacing);
        std::vector<double> up{inner_hi};
        std::vector<double> down{inner_lo};
        for (int i = 1; i < count / 2; ++i) {
            up.push_back(line.step(up.back(), 1.0, spacing));
            down.push_back(line.step(down.back(), -1.0, spacing));
        }
        positions.assign(down.rbegin(), down.rend());
        positions.insert(positions.end(), up.begin(), up.end());
    }

    std::vector<LinearRgb> out;
    out.reserve(positions.size());
    for (double s : positions) {
        const auto c = line.at(s);
        if (!in_gamut(c, kGamutTolerance))
            return std::nullopt;
        out.push_back(clip_to_gamut(c));
    }
    return out;
}

}  // namespace

std::vector<LinearRgb> sample_confusion_line(const LinearRgb& base, CvdType t, double spacing, int count)
{
    if (count < 2)
        throw std::invalid_argument("sample_confusion_line: count must be at least 2");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("sample_confusion_line: spacing must be positive");
    if (!in_gamut(base, kGamutTolerance))
        throw std::domain_error("sample_confusion_line: base color outside gamut");

    const MetamerLine line(base, t);
    if (auto samples = try_sample(line, spacing, count))
        return *std::move(samples);

    int achievable = 0;
    for (int n = count - 1; n >= 2; --n) {
        if (try_sample(line, spacing, n)) {
            achievable = n;
            break;
        }
    }
    throw GamutError("sample_confusion_line: " + std::to_string(count) + " samples at " + std::to_string(spacing)
                         + " dE do not fit in gamut; at most " + std::to_string(achievable) + " fit",
                     achievable);
}

}  // namespace cvdshift
