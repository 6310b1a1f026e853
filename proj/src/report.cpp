#include "cvdshift/report.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace cvdshift::report {

using nlohmann::ordered_json;

namespace {

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view text, double& out)
{
    text = trim(text);
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

ordered_json rgb_json(SRgb8 c) { return ordered_json::array({c.r, c.g, c.b}); }

}  // namespace

SRgb8 parse_rgb_triplet(std::string_view text)
{
    int ch[3];
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const auto comma = text.find(',', start);
        if ((i < 2) != (comma != std::string_view::npos))
            throw ParseError("expected r,g,b but got '" + std::string(text) + "'");
        const auto field = trim(text.substr(start, i < 2 ? comma - start : std::string_view::npos));
        const auto* end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, ch[i]);
        if (field.empty() || ec != std::errc{} || ptr != end || ch[i] < 0 || ch[i] > 255)
            throw ParseError("channel '" + std::string(field) + "' is not an integer in 0..255");
        start = comma + 1;
    }
    return {static_cast<std::uint8_t>(ch[0]), static_cast<std::uint8_t>(ch[1]), static_cast<std::uint8_t>(ch[2])};
}

Fig9Result run_fig9(const Fig9Request& req)
{
    Fig9Result r{req, discriminability_curves(srgb_decode(req.base), req.cvd, req.spacing_delta_e, req.count,
                                              req.angle_step_deg),
                 {}};
    for (const auto& c : r.curves)
        r.peaks.push_back(max_discriminability(c));
    return r;
}

std::string fig9_csv(const Fig9Result& r)
{
    std::string out = "pair_index,theta_deg,jnd\n";
    for (std::size_t i = 0; i < r.curves.size(); ++i)
        for (const auto& s : r.curves[i].samples)
            out += std::to_string(i) + "," + fmt("%.6g", s.theta_deg) + "," + fmt("%.6f", s.jnd.value) + "\n";
    return out;
}

std::string fig9_json(const Fig9Result& r, bool include_curves)
{
    ordered_json j;
    j["base"] = rgb_json(r.request.base);
    j["cvd"] = to_string(r.request.cvd);
    j["spacing_delta_e"] = r.request.spacing_delta_e;
    j["count"] = r.request.count;
    j["angle_step_deg"] = r.request.angle_step_deg;
    ordered_json pairs = ordered_json::array();
    double global = 0.0;
    for (std::size_t i = 0; i < r.curves.size(); ++i) {
        ordered_json p;
        p["pair_index"] = i;
        p["first"] = rgb_json(srgb_encode(r.curves[i].first));
        p["second"] = rgb_json(srgb_encode(r.curves[i].second));
        p["theta_star"] = r.peaks[i].theta_deg;
        p["jnd_max"] = r.peaks[i].jnd.value;
        p["jnd_at_zero"] = r.curves[i].samples.front().jnd.value;
        if (include_curves) {
            ordered_json jnd = ordered_json::array();
            for (const auto& s : r.curves[i].samples)
                jnd.push_back(s.jnd.value);
            p["jnd"] = std::move(jnd);
        }
        global = std::max(global, r.peaks[i].jnd.value);
        pairs.push_back(std::move(p));
    }
    j["global_jnd_max"] = global;
    j["pairs"] = std::move(pairs);
    return j.dump(2) + "\n";
}

std::vector<XyChromaticity> parse_points_csv(std::string_view csv, const std::string& source)
{
    std::vector<XyChromaticity> pts;
    bool header_seen = false;
    std::size_t row = 0;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto nl = csv.find('\n', pos);
        const auto line = trim(csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? csv.size() + 1 : nl + 1;
        ++row;
        if (line.empty())
            continue;
        if (!header_seen) {
            if (line != "x,y")
                throw ParseError(source + ": row " + std::to_string(row) + ": expected header 'x,y'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        XyChromaticity p;
        if (comma == std::string_view::npos || !parse_double(line.substr(0, comma), p.x)
            || !parse_double(line.substr(comma + 1), p.y))
            throw ParseError(source + ": row " + std::to_string(row) + ": expected two numbers");
        pts.push_back(p);
    }
    if (!header_seen)
        throw ParseError(source + ": empty points file");
    return pts;
}

std::string ellipse_json(const ThresholdEllipse& e)
{
    ordered_json j;
    j["center"] = {{"x", e.center.x}, {"y", e.center.y}};
    j["semi_major"] = e.semi_major;
    j["semi_minor"] = e.semi_minor;
    j["orientation_rad"] = e.orientation;
    j["orientation_deg"] = e.orientation * 180.0 / std::numbers::pi;
    j["area"] = ellipse_area(e);
    return j.dump(2) + "\n";
}

std::string study_csv(const std::vector<ThresholdRecord>& records)
{
    std::string out = "base_name,line,direction,phase,threshold_delta_e\n";
    for (const auto& r : records) {
        out += r.base_name;
        out += ",";
        out += to_string(r.line);
        out += ",";
        out += to_string(r.direction);
        out += ",";
        out += to_string(r.phase);
        out += "," + fmt("%.6f", r.threshold_delta_e) + "\n";
    }
    return out;
}

std::string study_json(const SimulatedObserver& o, const StudyConfig& cfg, const std::vector<EllipseSummary>& s)
{
    ordered_json j;
    j["cvd"] = to_string(o.cvd());
    j["tau_jnd"] = o.tau_jnd();
    j["lapse"] = o.lapse_rate();
    j["seed"] = cfg.seed;
    j["sequences"] = cfg.sequences.size();
    ordered_json ellipses = ordered_json::array();
    for (const auto& e : s) {
        ordered_json item = ordered_json::parse(ellipse_json(e.ellipse));
        item["base_name"] = e.base_name;
        item["phase"] = to_string(e.phase);
        ellipses.push_back(std::move(item));
    }
    j["ellipses"] = std::move(ellipses);
    return j.dump(2) + "\n";
}

std::string trajectory_csv(const std::vector<TrajectorySample>& samples)
{
    std::string out = "theta_deg,x,y,r,g,b\n";
    for (const auto& s : samples) {
        const auto c = srgb_encode(s.color);
        out += fmt("%.6g", s.theta.degrees()) + "," + fmt("%.6f", s.xy.x) + "," + fmt("%.6f", s.xy.y) + ","
               + std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b) + "\n";
    }
    return out;
}

std::string trajectory_json(const std::vector<TrajectorySample>& samples)
{
    ordered_json arr = ordered_json::array();
    for (const auto& s : samples) {
        const auto c = srgb_encode(s.color);
        arr.push_back({{"theta_deg", s.theta.degrees()},
                       {"x", s.xy.x},
                       {"y", s.xy.y},
                       {"r", c.r},
                       {"g", c.g},
                       {"b", c.b},
                       {"clipped", s.clipped}});
    }
    return arr.dump(2) + "\n";
}

std::string name_json(const ColorName& best, const std::vector<ColorName>& nearest)
{
    ordered_json j;
    j["name"] = best.name;
    j["variant"] = to_string(best.variant);
    j["distance"] = best.distance;
    if (!nearest.empty()) {
        ordered_json arr = ordered_json::array();
        for (const auto& n : nearest)
            arr.push_back({{"name", n.name}, {"variant", to_string(n.variant)}, {"distance", n.distance}});
        j["nearest"] = std::move(arr);
    }
    return j.dump(2) + "\n";
}

std::string dictionary_json(const ColorDictionary& dict)
{
    ordered_json arr = ordered_json::array();
    for (const auto& e : dict.entries())
        arr.push_back({{"name", e.name}, {"variant", to_string(e.variant)}, {"rgb", rgb_json(e.color)}});
    return arr.dump(2) + "\n";
}

}  // namespace cvdshift::report
