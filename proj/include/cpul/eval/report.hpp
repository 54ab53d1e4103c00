#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cpul/eval/experiment.hpp"

namespace cpul::eval {

enum class ResultFormat { csv, json };

// 4 significant digits, "%.4g" style.
std::string format_sig(double v);
// "91.23 (0.56)".
std::string format_mean_std(double mean, double std);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Columns: dataset, method, alpha, picp_mean, picp_std, length_mean,
// length_std, n_repeats. A non-empty manifest hash adds a leading
// "# manifest <hash>" line (csv) or a "manifest" field (json).
std::string results_csv(const std::vector<MethodResult>& results, const std::string& manifest = "");
std::string results_json(const std::vector<MethodResult>& results, const std::string& manifest = "");
// Human-readable table with "mean (std)" cells.
std::string results_report(const std::vector<MethodResult>& results, const std::string& manifest = "");
// Per-method curves over alpha: method, alpha, picp_mean, length_mean.
std::string plot_data_csv(const std::vector<MethodResult>& results, const std::string& manifest = "");

// Throws cpul::Error on empty results or an unwritable path.
void emit_results(const std::vector<MethodResult>& results, ResultFormat format,
                  const std::string& path, const std::string& manifest = "");

// Writes `text` to `path`, throwing cpul::Error on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cpul::eval
