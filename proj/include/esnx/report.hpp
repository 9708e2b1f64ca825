#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace esnx {

struct Series {
    std::string name;
    std::vector<double> x, y;
};

struct GridData {
    std::string name;
    std::vector<double> xs, ys;   // axis coordinates
    std::vector<double> values;   // row-major, values[iy * xs.size() + ix]
};

struct TernaryData {
    std::string name;
    std::vector<std::array<double, 3>> points;  // barycentric, sum 1
    std::vector<double> values;
};

// One emitted figure/table: everything needed to reproduce the numbers bit-exactly
// travels in `metadata` (full parameter echo, seed, library version).
struct FigureData {
    std::string command;
    std::string label;
    nlohmann::ordered_json metadata;
    std::vector<Series> series;
    std::vector<GridData> grids;
    std::vector<TernaryData> ternaries;
};

// shortest-round-trip decimal at 17 significant digits
std::string format_g17(double v);

std::string to_csv(const FigureData& fig);
std::string to_json(const FigureData& fig);
// SVG is a rendering of the same series; it embeds the FNV-1a hash of the CSV bytes
std::string to_svg(const FigureData& fig);

std::uint64_t fnv1a(const std::string& bytes);

// temp file in the target directory, then rename
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace esnx
