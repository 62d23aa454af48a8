#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divisim/diagnostics.hpp"
#include "divisim/distributions.hpp"
#include "divisim/fitting.hpp"
#include "divisim/riskfactor.hpp"

namespace divisim::io {

// Distribution records, e.g. {"family":"gamma","shape":2,"scale":3} or
// {"family":"ggc","atoms":[[a1,s1],[a2,s2]]}. Unknown fields are rejected.
std::string toJson(const Distribution& d);
Distribution distributionFromJson(std::string_view text);

/// {"fitted":<record>,"objective":..,"iterations":..,"converged":..,"grid":[..]}
std::string toJson(const FitReport& report);
FitReport fitReportFromJson(std::string_view text);

/// {"marginals":[..],"beta":[[..]],"reinject":[<record>|null,..],"names":[..]}
/// "reinject" and "names" are optional.
ModelSpec modelFromJson(std::string_view text);
std::string toJson(const ModelSpec& spec, bool pretty = true);

/// Single numeric column with an optional "x" header line.
std::vector<double> readSampleCsv(std::istream& in);
std::vector<double> readSampleCsv(const std::filesystem::path& path);

void writeCsv(std::ostream& out, const SampleMatrix& s);
void writeCsv(std::ostream& out, const QqTable& table);
void writeCsv(std::ostream& out, const KdeCurve& curve);
void writeColumnsCsv(std::ostream& out, std::span<const std::string> names,
                     std::span<const std::vector<double>> columns);

/// Shortest round-trip decimal form of v.
std::string formatNumber(double v);

std::string readFile(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over path.
void writeFileAtomic(const std::filesystem::path& path, std::string_view content);

}  // namespace divisim::io
