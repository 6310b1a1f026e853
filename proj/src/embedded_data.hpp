#pragma once

#include <string_view>

namespace cvdshift::data {

/// Default color-name table, CSV `name,variant,r,g,b`.
std::string_view dictionary_csv();

/// CIE 1931 2-degree color matching functions, CSV `wavelength_nm,xbar,ybar,zbar`.
std::string_view cie1931_csv();

}  // namespace cvdshift::data
