#include "cvdshift/naming.hpp"

#include "embedded_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace cvdshift {

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::Base: return "base";
    case Variant::Light: return "light";
    case Variant::Dark: return "dark";
    }
    return "base";
}

std::string DictionaryEntry::family() const
{
    for (std::string_view prefix : {"light-", "dark-"})
        if (name.starts_with(prefix))
            return name.substr(prefix.size());
    return name;
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void row_error(const std::string& source, std::size_t row, const std::string& what)
{
    throw DictionaryError(source + ": row " + std::to_string(row) + ": " + what);
}

std::uint8_t parse_channel(std::string_view field, const std::string& source, std::size_t row)
{
    int v = -1;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end || v < 0 || v > 255)
        row_error(source, row, "channel value '" + std::string(field) + "' is not an integer in 0..255");
    return static_cast<std::uint8_t>(v);
}

Variant parse_variant(std::string_view field, const std::string& source, std::size_t row)
{
    if (field == "base")
        return Variant::Base;
    if (field == "light")
        return Variant::Light;
    if (field == "dark")
        return Variant::Dark;
    row_error(source, row, "variant '" + std::string(field) + "' must be base, light or dark");
}

}  // namespace

ColorDictionary ColorDictionary::parse(std::string_view csv, const std::string& source)
{
    ColorDictionary dict;
    std::set<std::string> names;
    std::set<std::tuple<int, int, int>> colors;

    std::size_t row = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto nl = csv.find('\n', pos);
        const auto raw = csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? csv.size() + 1 : nl + 1;
        ++row;
        const auto line = trim(raw);
        if (line.empty())
            continue;

        if (!header_seen) {
            if (line != "name,variant,r,g,b")
                row_error(source, row, "expected header 'name,variant,r,g,b'");
            header_seen = true;
            continue;
        }

        const auto fields = split_fields(line);
        if (fields.size() != 5)
            row_error(source, row, "expected 5 fields, found " + std::to_string(fields.size()));
        if (fields[0].empty())
            row_error(source, row, "empty name");

        DictionaryEntry e;
        e.name = std::string(fields[0]);
        e.variant = parse_variant(fields[1], source, row);
        e.color = {parse_channel(fields[2], source, row), parse_channel(fields[3], source, row),
                   parse_channel(fields[4], source, row)};
        e.lab = lab_from_linear(srgb_decode(e.color));

        if (!names.insert(e.name).second)
            row_error(source, row, "duplicate name '" + e.name + "'");
        if (!colors.insert({e.color.r, e.color.g, e.color.b}).second)
            row_error(source, row, "duplicate sRGB value for '" + e.name + "'");
        dict.entries_.push_back(std::move(e));
    }

    if (!header_seen)
        throw DictionaryError(source + ": empty dictionary file");
    if (dict.entries_.size() != kExpectedEntries)
        throw DictionaryError(source + ": expected " + std::to_string(kExpectedEntries) + " entries, found "
                              + std::to_string(dict.entries_.size()));
    return dict;
}

ColorDictionary ColorDictionary::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DictionaryError(path.string() + ": cannot open dictionary file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.string());
}

const ColorDictionary& ColorDictionary::builtin()
{
    static const ColorDictionary dict = parse(data::dictionary_csv(), "<builtin dictionary>");
    return dict;
}

namespace {

ColorName make_name(const ColorDictionary& dict, std::size_t i, double distance)
{
    return {dict[i].name, dict[i].variant, distance, i};
}

}  // namespace

ColorName name_color(const LinearRgb& c, const ColorDictionary& dict)
{
    const Lab q = lab_from_linear(c);
    std::size_t best = 0;
    double best_d = delta_e76(q, dict[0].lab);
    for (std::size_t i = 1; i < dict.size(); ++i) {
        const double d = delta_e76(q, dict[i].lab);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return make_name(dict, best, best_d);
}

std::vector<ColorName> nearest_k(const LinearRgb& c, const ColorDictionary& dict, std::size_t k)
{
    if (k < 1 || k > dict.size())
        throw std::invalid_argument("nearest_k: k must be between 1 and " + std::to_string(dict.size()));
    const Lab q = lab_from_linear(c);
    std::vector<double> dist(dict.size());
    for (std::size_t i = 0; i < dict.size(); ++i)
        dist[i] = delta_e76(q, dict[i].lab);
    std::vector<std::size_t> order(dict.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    std::vector<ColorName> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        out.push_back(make_name(dict, order[i], dist[order[i]]));
    return out;
}

}  // namespace cvdshift
