#include "polaron/report.hpp"

#include "polaron/config.hpp"
#include "polaron/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace polaron {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != columns_.size()) throw NumericalError("CSV row width does not match the header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::render(const Stamp& stamp) const {
    std::ostringstream os;
    os << "# artifact_version=" << artifact_version << " config_hash=" << stamp.config_hash
       << " kind=" << stamp.kind << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << "\n";
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
    return os.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << text;
}

}  // namespace

void CsvTable::write(const std::filesystem::path& path, const Stamp& stamp) const { write_text(path, render(stamp)); }

void write_json(const std::filesystem::path& path, const Stamp& stamp, const nlohmann::ordered_json& body) {
    nlohmann::ordered_json j;
    j["artifact_version"] = artifact_version;
    j["config_hash"] = stamp.config_hash;
    j["kind"] = stamp.kind;
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    write_text(path, j.dump(2) + "\n");
}

std::vector<std::string> read_stamp(const std::filesystem::path& path) {
    std::ifstream f(path);
    std::string line;
    if (!f || !std::getline(f, line) || line.rfind("# ", 0) != 0) throw ConfigError("missing stamp in " + path.string());
    std::vector<std::string> out;
    std::istringstream is(line.substr(2));
    std::string kv;
    while (is >> kv) {
        const auto eq = kv.find('=');
        out.push_back(eq == std::string::npos ? kv : kv.substr(eq + 1));
    }
    return out;
}

}  // namespace polaron
