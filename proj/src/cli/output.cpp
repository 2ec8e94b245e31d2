#include "afcxpm/cli/output.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "afcxpm/errors.hpp"
#include "afcxpm/version.hpp"

namespace afcxpm::cli {

std::string format_number(double v, int digits)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        out.close();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot move output into place at '" + path.string() + "'");
    }
}

void CsvTable::add_row(std::vector<std::string> row)
{
    if (row.size() != header.size()) throw Error("csv row width does not match header");
    rows.push_back(std::move(row));
}

std::string render_csv(const CsvTable& table, const nlohmann::json& scenario)
{
    std::string out;
    out += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    out += std::string("# afcxpm_version=") + kVersion + "\n";
    out += "# scenario=" + scenario.dump() + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
    return out;
}

nlohmann::json with_provenance(nlohmann::json payload, const nlohmann::json& scenario)
{
    payload["schema_version"] = kSchemaVersion;
    payload["version"] = kVersion;
    payload["scenario"] = scenario;
    return payload;
}

}  // namespace afcxpm::cli
