#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "cpul/interval.hpp"

namespace cpul::eval {

// Comma-separated dataset file: header "id,d_1,...,d_D,y,b_lo,b_hi", one row
// per sample, numbers in round-trip precision. Rows are written as they come.
class DatasetWriter {
 public:
  DatasetWriter(const std::string& path, std::size_t n_features);
  void write(std::size_t id, const std::vector<double>& features, double y, double b_lo,
             double b_hi);
  void close();

 private:
  std::string path_;
  std::size_t n_features_;
  std::ofstream out_;
};

// Reads a dataset file. Throws cpul::Error on malformed rows or a violated
// bound sandwich (slack 1e-8 * max(1, |y|); violations inside the slack are
// snapped onto y).
std::vector<BoundedSample> read_dataset(const std::string& path);

}  // namespace cpul::eval
