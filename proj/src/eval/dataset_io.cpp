#include "cpul/eval/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cpul/error.hpp"

namespace cpul::eval {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error("dataset line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

DatasetWriter::DatasetWriter(const std::string& path, std::size_t n_features)
    : path_(path), n_features_(n_features), out_(path, std::ios::binary) {
  if (!out_) throw Error("cannot write '" + path + "'");
  out_ << "id";
  for (std::size_t k = 1; k <= n_features; ++k) out_ << ",d_" << k;
  out_ << ",y,b_lo,b_hi\n";
}

void DatasetWriter::write(std::size_t id, const std::vector<double>& features, double y,
                          double b_lo, double b_hi) {
  if (features.size() != n_features_) throw Error("dataset row has wrong feature count");
  out_ << id;
  for (double f : features) out_ << ',' << num(f);
  out_ << ',' << num(y) << ',' << num(b_lo) << ',' << num(b_hi) << '\n';
  if (!out_) throw Error("write failed for '" + path_ + "'");
}

void DatasetWriter::close() {
  out_.close();
  if (!out_) throw Error("write failed for '" + path_ + "'");
}

std::vector<BoundedSample> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("dataset '" + path + "' is empty");
  const auto header = split_csv(line);
  if (header.size() < 4 || header.front() != "id" || header[header.size() - 3] != "y" ||
      header[header.size() - 2] != "b_lo" || header.back() != "b_hi") {
    throw Error("dataset '" + path + "' has an unexpected header");
  }
  const std::size_t n_features = header.size() - 4;
  std::vector<BoundedSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw Error("dataset line " + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " columns");
    }
    BoundedSample s;
    for (std::size_t k = 0; k < n_features; ++k) s.features.push_back(parse_number(cells[1 + k], line_no));
    s.y = parse_number(cells[1 + n_features], line_no);
    s.b_lo = parse_number(cells[2 + n_features], line_no);
    s.b_hi = parse_number(cells[3 + n_features], line_no);
    validate_sample(s, out.size(), 1e-8 * std::max(1.0, std::abs(s.y)));
    s.b_lo = std::min(s.b_lo, s.y);
    s.b_hi = std::max(s.b_hi, s.y);
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error("dataset '" + path + "' has no rows");
  return out;
}

}  // namespace cpul::eval
