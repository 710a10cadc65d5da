#pragma once

#include <string>
#include <vector>

namespace levydiv::cli {

// "min:max:count[:lin|log]", a comma list "a,b,c", or one number.
// Numbers may be written inf.
std::vector<double> parse_grid(const std::string& text);
double parse_number(const std::string& text);

}  // namespace levydiv::cli
