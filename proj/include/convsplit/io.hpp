#pragma once

#include <string>

#include "convsplit/grid.hpp"

namespace convsplit {

std::string format_sci(double v, int precision = 12);

/// CSV dump: index, coordinate(s), value — one node per line.
void write_field_csv(const GridFunction& f, const std::string& path);

/// Flat binary dump: little-endian 64-bit floats, row-major.
void write_field_binary(const GridFunction& f, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace convsplit
