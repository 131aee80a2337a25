#pragma once

#include "thybal/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace thybal::csv {

/// Shortest round-trip scientific notation, e.g. "4.0000000000000001e-08".
std::string format_double(double value);

/// RFC 4180 field quoting: fields containing a comma, quote or line break
/// are wrapped in quotes with inner quotes doubled.
std::string quote(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

/// `t_s,value` with one line per sample.
std::string waveform_to_csv(const Waveform& wave);

void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace thybal::csv
