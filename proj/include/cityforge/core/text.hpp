#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cityforge {

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

/// Fixed notation with `decimals` digits (round half away from zero).
std::string format_fixed(double v, int decimals);

std::string lowercase(std::string_view s);

/// Splits on whitespace.
std::vector<std::string> split_words(std::string_view s);

std::string trim(std::string_view s);

/// Reads a whole file; throws cityforge::Error when it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace cityforge
