#include "binfac/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace binfac {

namespace {

std::string real6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

ReportFormat parse_report_format(const std::string& name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "markdown" || name == "md") return ReportFormat::Markdown;
    throw ConfigError("unknown report format '" + name + "' (expected csv or markdown)");
}

std::string render_report(std::span<const ResourceReport> rows, ReportFormat format) {
    if (rows.empty()) throw ConfigError("render_report: no rows");
    std::string out;
    if (format == ReportFormat::Csv) {
        out = "config,memory_bits,flop_equivalents,sparsity,error_rate\n";
        for (const ResourceReport& r : rows) {
            out += r.config_label;
            out += ',';
            out += std::to_string(r.memory_bits);
            out += ',';
            out += real6(r.flop_equivalents);
            out += ',';
            out += real6(r.sparsity);
            out += ',';
            out += real6(r.error_rate);
            out += '\n';
        }
    } else {
        out = "| config | memory_bits | memory_mbit | flop_equivalents | sparsity | error_rate |\n"
              "|---|---|---|---|---|---|\n";
        for (const ResourceReport& r : rows) {
            out += "| " + r.config_label;
            out += " | " + std::to_string(r.memory_bits);
            out += " | " + real6(static_cast<double>(r.memory_bits) / 1e6);
            out += " | " + real6(r.flop_equivalents);
            out += " | " + real6(r.sparsity);
            out += " | " + real6(r.error_rate);
            out += " |\n";
        }
    }
    return out;
}

void write_report(std::span<const ResourceReport> rows, ReportFormat format,
                  const std::string& path) {
    const std::string text = render_report(rows, format);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp);
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!f) throw IoError("write failure on " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move report into place at " + path);
    }
}

} // namespace binfac
