#include "thybal/csv.hpp"

#include "thybal/errors.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

namespace thybal::csv {

std::string format_double(double value)
{
    // 17 significant digits round-trips every double.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

std::string quote(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_row(const std::vector<std::string>& fields)
{
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            line += ',';
        line += quote(fields[i]);
    }
    line += "\r\n";
    return line;
}

std::string waveform_to_csv(const Waveform& wave)
{
    std::string out = join_row({"t_s", "value"});
    for (std::size_t i = 0; i < wave.size(); ++i)
        out += join_row({format_double(wave.t[i]), format_double(wave.y[i])});
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out)
        throw IoError("failed writing " + path.string());
}

}  // namespace thybal::csv
