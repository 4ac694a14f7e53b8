#pragma once

#include <string>

#include "wmf/types.hpp"

namespace wmf {

struct LoadedCsv {
    Dataset data;        // X, y, column names
    std::string response;
    bool binary = false;  // y values all in {0,1}
};

// Parses a headered, comma-separated file. `response` picks the response
// column by name; empty means the column named "y", or the last column when
// no "y" exists. Binary responses are flagged for the GLM pipeline.
LoadedCsv load_csv(const std::string& path, const std::string& response = "");

// Inverse of load_csv: header from column names (x1.. when unnamed), values
// with 17 significant digits so reloading is bit-exact.
void save_csv(const std::string& path, const Dataset& data,
              const std::string& response_name = "y");

// Shortest-faithful serialization used by every writer in the project.
std::string format_double(double v);

} // namespace wmf
