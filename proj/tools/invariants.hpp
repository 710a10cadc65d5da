#pragma once

#include <iosfwd>

#include "levydiv/levy_model.hpp"

namespace levydiv::cli {

// Runs quick self-checks on a model (roots, quadrature against closed forms,
// smooth fit and verification at the optimal threshold for lambda).
// Prints one line per check; returns the number of failures.
int check_invariants(const ModelSpec& m, double lambda, std::ostream& out);

}  // namespace levydiv::cli
