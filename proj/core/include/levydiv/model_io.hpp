#pragma once

#include <string>

#include "levydiv/levy_model.hpp"

namespace levydiv {

// JSON model file: {side, drift, sigma, delta, q, jumps: {kappa, terms: [{p, rho, k}]}}.
// q defaults to 0.05, side to spectrally-negative, k to 1.  Unknown keys are
// rejected so that unsupported jump families fail loudly.
ModelSpec parse_model(const std::string& json_text);
ModelSpec load_model(const std::string& path);

// Canonical JSON with 17 significant digits; parse_model(print_model(m)) == m.
std::string print_model(const ModelSpec& m);

std::string side_name(Side s);

}  // namespace levydiv
