#pragma once

#include <string>

#include "cpul/dispatch/grid_case.hpp"

namespace cpul::dispatch {

// JSON document keyed by the GridCase field names; matrices are arrays of
// rows. Output is byte-stable for a given case.
std::string case_to_json(const GridCase& grid);
// Throws cpul::Error on malformed documents or invariant violations.
GridCase case_from_json(const std::string& text);

void save_case(const GridCase& grid, const std::string& path);
GridCase load_case(const std::string& path);

}  // namespace cpul::dispatch
