#pragma once

#include "cvdshift/colorspace.hpp"

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvdshift {

enum class Variant { Base, Light, Dark };

std::string_view to_string(Variant v);

struct DictionaryEntry {
    std::string name;  ///< full keyword, e.g. "light-blue"
    Variant variant = Variant::Base;
    SRgb8 color;
    Lab lab;  ///< cached from color

    /// Name with any "light-"/"dark-" prefix removed.
    std::string family() const;
};

class DictionaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable 57-entry color-name table.
///
/// CSV layout: header `name,variant,r,g,b`, one entry per row, sRGB 8-bit
/// codes. Loading validates the entry count, name and color uniqueness, and
/// every field; errors name the offending row.
class ColorDictionary {
public:
    static constexpr std::size_t kExpectedEntries = 57;

    static ColorDictionary parse(std::string_view csv, const std::string& source = "<memory>");
    static ColorDictionary load(const std::filesystem::path& path);
    /// The table compiled into the library.
    static const ColorDictionary& builtin();

    const std::vector<DictionaryEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    const DictionaryEntry& operator[](std::size_t i) const { return entries_[i]; }

private:
    std::vector<DictionaryEntry> entries_;
};

struct ColorName {
    std::string name;
    Variant variant = Variant::Base;
    double distance = 0.0;  ///< dE76 to the query
    std::size_t index = 0;  ///< position in the dictionary
};

/// Nearest entry by dE76; ties go to the earlier entry.
ColorName name_color(const LinearRgb& c, const ColorDictionary& dict);

/// The k nearest entries, ascending by distance (stable in dictionary order).
/// Throws std::invalid_argument unless 1 <= k <= dict.size().
std::vector<ColorName> nearest_k(const LinearRgb& c, const ColorDictionary& dict, std::size_t k);

}  // namespace cvdshift
