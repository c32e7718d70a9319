#include "lilbound/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "lilbound/errors.hpp"

namespace lilbound {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool try_parse(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text == "inf" || text == "+inf") {
        out = INFINITY;
        return true;
    }
    if (text == "-inf") {
        out = -INFINITY;
        return true;
    }
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

double parse_double(std::string_view text) {
    double value = 0.0;
    if (!try_parse(text, value)) throw DomainError("not a number: '" + std::string(text) + "'");
    return value;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path,
                                                  std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path.string() + "'");
    std::vector<std::vector<double>> data(columns);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        std::vector<double> row(fields.size());
        bool numeric = fields.size() == columns;
        for (std::size_t i = 0; numeric && i < fields.size(); ++i) numeric = try_parse(fields[i], row[i]);
        if (!numeric) {
            if (line_no == 1) continue;  // header
            std::ostringstream msg;
            msg << path.string() << ":" << line_no << ": expected " << columns << " numeric column(s)";
            throw DomainError(msg.str());
        }
        for (std::size_t i = 0; i < columns; ++i) data[i].push_back(row[i]);
    }
    return data;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot rename '" + tmp.string() + "': " + ec.message());
}

}  // namespace lilbound
