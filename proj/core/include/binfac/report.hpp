#pragma once

#include <span>
#include <string>

#include "binfac/resource_metrics.hpp"

namespace binfac {

enum class ReportFormat { Csv, Markdown };

ReportFormat parse_report_format(const std::string& name); // "csv" | "markdown"

// CSV schema: header `config,memory_bits,flop_equivalents,sparsity,error_rate`,
// one row per report in input order, reals with 6 significant digits.
// The markdown variant adds a memory_mbit column (bits / 1e6). Output is
// byte-identical for identical rows.
std::string render_report(std::span<const ResourceReport> rows, ReportFormat format);

// Renders and writes atomically; unwritable paths throw IoError.
void write_report(std::span<const ResourceReport> rows, ReportFormat format,
                  const std::string& path);

} // namespace binfac
