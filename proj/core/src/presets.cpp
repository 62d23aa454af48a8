#include "divisim/presets.hpp"

#include <fmt/format.h>

#include "divisim/errors.hpp"
#include "divisim/io.hpp"
#include "presets_data.hpp"

namespace divisim::presets {

Distribution paretoTarget() { return Distribution::pareto(0.75); }
Distribution logNormalTarget() { return Distribution::logNormal(0.0, 2.0); }

std::string_view fixtureRecord(std::string_view key) {
  if (key == "pareto-gamma") return detail::kParetoGamma;
  if (key == "pareto-ggc20") return detail::kParetoGgc20;
  if (key == "lognormal-gamma") return detail::kLogNormalGamma;
  if (key == "lognormal-ggc20") return detail::kLogNormalGgc20;
  fail(ErrorCode::ParseError, fmt::format("unknown fixture \"{}\"", key));
}

Distribution fixture(std::string_view key) { return io::distributionFromJson(fixtureRecord(key)); }

std::vector<std::string> modelNames() { return {"paper-4b", "paper-4b-gamma"}; }

bool isModelName(std::string_view name) { return name == "paper-4b" || name == "paper-4b-gamma"; }

ModelSpec crossedSpec(const Distribution& xApprox, const Distribution& yApprox) {
  return ModelSpec{crossedModel(xApprox, yApprox),
                   MarginalReinjection{{paretoTarget(), logNormalTarget()}}};
}

ModelSpec model(std::string_view name) {
  if (name == "paper-4b") return crossedSpec(fixture("pareto-ggc20"), fixture("lognormal-ggc20"));
  if (name == "paper-4b-gamma") return crossedSpec(fixture("pareto-gamma"), fixture("lognormal-gamma"));
  fail(ErrorCode::ParseError, fmt::format("unknown model preset \"{}\"", name));
}

}  // namespace divisim::presets
