#include "teamflow/io_util.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "teamflow/error.hpp"

namespace teamflow::io {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw Error(ErrorCode::Internal, "cannot format double");
    return std::string(buf, ptr);
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string read_text(const std::filesystem::path& path) {
    gzFile file = gzopen(path.c_str(), "rb");
    if (file == nullptr) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::string out;
    char buf[1 << 16];
    int n = 0;
    while ((n = gzread(file, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(file);
    if (failed) throw Error(ErrorCode::IoFailure, "read error in " + path.string());
    return out;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

void write_gzip(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    gzFile f = gzopen(path.c_str(), "wb9");
    if (f == nullptr) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    std::size_t done = 0;
    while (done < content.size()) {
        const auto chunk = static_cast<unsigned>(std::min<std::size_t>(content.size() - done, 1u << 20));
        if (gzwrite(f, content.data() + done, chunk) != static_cast<int>(chunk)) {
            gzclose(f);
            throw Error(ErrorCode::IoFailure, "gzip write failed for " + path.string());
        }
        done += chunk;
    }
    if (gzclose(f) != Z_OK) throw Error(ErrorCode::IoFailure, "gzip close failed for " + path.string());
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(ErrorCode::MalformedRecord, "missing CSV column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text, std::string_view source_name) {
    CsvTable table;
    std::size_t line_number = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw Error(ErrorCode::MalformedRecord,
                        std::string(source_name) + ":" + std::to_string(line_number) + ": expected " +
                            std::to_string(table.header.size()) + " fields, got " +
                            std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) {
        throw Error(ErrorCode::MalformedRecord, std::string(source_name) + ": empty CSV (no header)");
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    return parse_csv(read_text(path), path.string());
}

std::string render_csv(const CsvTable& table) {
    std::ostringstream out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
    return out.str();
}

long long parse_int(std::string_view text, std::string_view what) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::MalformedRecord,
                    "invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

double parse_double(std::string_view text, std::string_view what) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::MalformedRecord,
                    "invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace teamflow::io
