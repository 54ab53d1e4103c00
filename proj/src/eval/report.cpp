#include "cpul/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cpul/error.hpp"
#include "json.hpp"

namespace cpul::eval {
namespace {

void require_results(const std::vector<MethodResult>& results) {
  if (results.empty()) throw Error("no results to emit");
}

}  // namespace

std::string format_sig(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string format_mean_std(double mean, double std) {
  return format_sig(mean) + " (" + format_sig(std) + ")";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string results_csv(const std::vector<MethodResult>& results, const std::string& manifest) {
  require_results(results);
  std::ostringstream out;
  if (!manifest.empty()) out << "# manifest " << manifest << '\n';
  out << "dataset,method,alpha,picp_mean,picp_std,length_mean,length_std,n_repeats\n";
  for (const auto& r : results) {
    out << r.dataset << ',' << r.method << ',' << format_sig(r.alpha) << ','
        << format_sig(r.picp_mean) << ',' << format_sig(r.picp_std) << ','
        << format_sig(r.length_mean) << ',' << format_sig(r.length_std) << ',' << r.n_repeats
        << '\n';
  }
  return out.str();
}

std::string results_json(const std::vector<MethodResult>& results, const std::string& manifest) {
  require_results(results);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["method"] = r.method;
    j["alpha"] = format_sig(r.alpha);
    j["picp_mean"] = format_sig(r.picp_mean);
    j["picp_std"] = format_sig(r.picp_std);
    j["length_mean"] = format_sig(r.length_mean);
    j["length_std"] = format_sig(r.length_std);
    j["n_repeats"] = r.n_repeats;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  if (!manifest.empty()) doc["manifest"] = manifest;
  doc["results"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string results_report(const std::vector<MethodResult>& results, const std::string& manifest) {
  require_results(results);
  std::ostringstream out;
  if (!manifest.empty()) out << "manifest " << manifest << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-10s %-6s %-20s %-20s\n", "dataset", "method", "alpha",
                "PICP (%)", "Length (%)");
  out << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-12s %-10s %-6s %-20s %-20s\n", r.dataset.c_str(),
                  r.method.c_str(), format_sig(r.alpha).c_str(),
                  format_mean_std(r.picp_mean, r.picp_std).c_str(),
                  format_mean_std(r.length_mean, r.length_std).c_str());
    out << line;
  }
  return out.str();
}

std::string plot_data_csv(const std::vector<MethodResult>& results, const std::string& manifest) {
  require_results(results);
  // Stable order: first appearance of each method, then alpha ascending.
  std::vector<std::string> order;
  for (const auto& r : results) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  std::ostringstream out;
  if (!manifest.empty()) out << "# manifest " << manifest << '\n';
  out << "dataset,method,alpha,picp_mean,length_mean\n";
  for (const auto& m : order) {
    std::vector<const MethodResult*> rows;
    for (const auto& r : results) {
      if (r.method == m) rows.push_back(&r);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto* a, const auto* b) { return a->alpha < b->alpha; });
    for (const auto* r : rows) {
      out << r->dataset << ',' << r->method << ',' << format_sig(r->alpha) << ','
          << format_sig(r->picp_mean) << ',' << format_sig(r->length_mean) << '\n';
    }
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) throw Error("write failed for '" + path + "'");
}

void emit_results(const std::vector<MethodResult>& results, ResultFormat format,
                  const std::string& path, const std::string& manifest) {
  write_text_file(path, format == ResultFormat::csv ? results_csv(results, manifest)
                                                    : results_json(results, manifest));
}

}  // namespace cpul::eval
