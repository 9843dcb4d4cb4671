#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace polaron {

// Every file starts with the artifact version and the config hash: CSV
// files as a leading '#' comment line, JSON files as top-level fields.
struct Stamp {
    std::string config_hash;
    std::string kind;  // what the file holds, e.g. "sweep"
};

// Round-trip decimal text; inf and nan spelled out.
std::string format_real(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);
    void add(std::vector<std::string> row);
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::string render(const Stamp& stamp) const;
    void write(const std::filesystem::path& path, const Stamp& stamp) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

void write_json(const std::filesystem::path& path, const Stamp& stamp, const nlohmann::ordered_json& body);

// Reads the '#' header of a CSV written by CsvTable: (version, hash, kind).
std::vector<std::string> read_stamp(const std::filesystem::path& path);

}  // namespace polaron
