#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "divisim/distributions.hpp"
#include "divisim/riskfactor.hpp"

namespace divisim::presets {

/// Heavy-tailed reference marginals of the crossed example.
Distribution paretoTarget();     // Pareto(3/4)
Distribution logNormalTarget();  // LogNormal(0, 2)

/// Bundled fit records, keyed "pareto-gamma", "pareto-ggc20",
/// "lognormal-gamma", "lognormal-ggc20". Each is a Distribution record.
std::string_view fixtureRecord(std::string_view key);
Distribution fixture(std::string_view key);

/// Named model presets: "paper-4b" (Gamma-convolution approximants) and
/// "paper-4b-gamma" (single-Gamma approximants). Both reinject the true
/// Pareto / LogNormal marginals.
std::vector<std::string> modelNames();
bool isModelName(std::string_view name);
ModelSpec model(std::string_view name);

/// The crossed model over arbitrary approximants with the reference targets.
ModelSpec crossedSpec(const Distribution& xApprox, const Distribution& yApprox);

}  // namespace divisim::presets
