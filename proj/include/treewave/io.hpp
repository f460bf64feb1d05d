#pragma once

// Output plumbing: CSV with shortest round-trip numbers, the JSON twins, and
// the run manifest listing every written file with its SHA-256 digest.

#include "treewave/analysis.hpp"
#include "treewave/lde_sim.hpp"
#include "treewave/tree_sim.hpp"
#include "treewave/wave_solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace treewave {

inline constexpr const char* version = "0.1.0";

/// Shortest decimal that parses back to the same double; "nan", "inf", "-inf".
std::string format_double(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row(std::vector<std::string> fields);
    std::size_t rows() const noexcept { return rows_.size(); }
    /// Header plus rows, comma separated, LF terminated.
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string sha256_hex(std::string_view bytes);

struct OutputFile {
    std::string name;
    std::string sha256;
    std::size_t bytes;
};

/// Writes files into one directory and remembers their digests.
class OutputSink {
public:
    explicit OutputSink(std::filesystem::path dir);

    void write(const std::string& name, const std::string& content);
    const std::vector<OutputFile>& files() const noexcept { return files_; }
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<OutputFile> files_;
};

struct RunManifest {
    std::string command;
    nlohmann::json params = nlohmann::json::object();
    std::string tool_version = version;
    double wall_seconds = 0.0;
    std::vector<OutputFile> outputs;

    nlohmann::json to_json() const;
};

/// Serialized JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

CsvTable trajectory_csv(const std::vector<TrajectoryRow>& rows);
nlohmann::json speed_json(const SpeedEstimate& e);

CsvTable profile_csv(const WaveSolution& w);
/// Everything of a solution except the profile values.
nlohmann::json solution_json(const WaveSolution& w);

/// One row per (sample, layer).
CsvTable layer_csv(const std::vector<LayerSample>& samples);

CsvTable region_csv(const std::vector<RegionPoint>& points);
CsvTable boundary_csv(const std::vector<BoundaryCurve>& curves);
CsvTable convergence_csv(const ConvergenceStudy& s);
nlohmann::json convergence_json(const ConvergenceStudy& s);
nlohmann::json corollary_json(const CorollaryReport& r);

} // namespace treewave
