#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace afcxpm::cli {

/// Locale-independent decimal with `digits` significant digits.
std::string format_number(double v, int digits = 15);

/// Write through a sibling temp file and rename, so readers never see a
/// partial file. Creates the parent directory.
void atomic_write(const std::filesystem::path& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

/// Comment lines carry the schema version, tool version and the compact
/// resolved scenario; then the header and rows.
std::string render_csv(const CsvTable& table, const nlohmann::json& scenario);

/// `payload` fields plus schema_version, version and the scenario.
nlohmann::json with_provenance(nlohmann::json payload, const nlohmann::json& scenario);

}  // namespace afcxpm::cli
