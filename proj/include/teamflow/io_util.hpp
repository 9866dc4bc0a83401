#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace teamflow::io {

// Shortest round-trip decimal representation; stable across runs and platforms.
std::string format_double(double value);

std::vector<std::string> split(std::string_view line, char sep);

// Reads a whole file as text, transparently decompressing gzip input.
std::string read_text(const std::filesystem::path& path);

// Writes atomically enough for our purposes: truncate then write.
void write_text(const std::filesystem::path& path, std::string_view content);
void write_gzip(const std::filesystem::path& path, std::string_view content);

// Minimal CSV table: a header row and string cells. Fields never contain
// commas or quotes in any artifact we produce.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index of `name`; throws MalformedRecord when absent.
    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, std::string_view source_name = "<memory>");
std::string render_csv(const CsvTable& table);

long long parse_int(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);

}  // namespace teamflow::io
