#include "divisim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "divisim/errors.hpp"

namespace divisim::io {

namespace {

using Json = nlohmann::ordered_json;

// Integral values print without a trailing ".0".
Json number(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 9007199254740992.0) {
    return Json(static_cast<std::int64_t>(v));
  }
  return Json(v);
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

void rejectUnknown(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) fail(ErrorCode::ParseError, fmt::format("{} must be an object", where));
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(ErrorCode::ParseError, fmt::format("unknown field \"{}\" in {}", key, where));
  }
}

double numberField(const Json& j, const char* key, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::ParseError, fmt::format("missing field \"{}\" in {}", key, where));
  if (!it->is_number()) fail(ErrorCode::ParseError, fmt::format("field \"{}\" in {} must be a number", key, where));
  return it->get<double>();
}

Json toJsonValue(const Distribution& d) {
  Json j;
  j["family"] = std::string(familyName(d.family()));
  switch (d.family()) {
    case Family::DegenerateZero: break;
    case Family::Gamma: {
      const auto& p = *d.get_if<GammaParams>();
      j["shape"] = number(p.shape);
      j["scale"] = number(p.scale);
      break;
    }
    case Family::Gaussian: {
      const auto& p = *d.get_if<GaussianParams>();
      j["mean"] = number(p.mean);
      j["variance"] = number(p.variance);
      break;
    }
    case Family::Poisson: j["rate"] = number(d.get_if<PoissonParams>()->rate); break;
    case Family::CompoundPoisson: {
      const auto& p = *d.get_if<CompoundPoissonParams>();
      j["rate"] = number(p.rate);
      j["severity"] = toJsonValue(*p.severity);
      break;
    }
    case Family::NegativeBinomial: {
      const auto& p = *d.get_if<NegativeBinomialParams>();
      j["size"] = number(p.size);
      j["prob"] = number(p.prob);
      break;
    }
    case Family::Pareto: j["shape"] = number(d.get_if<ParetoParams>()->shape); break;
    case Family::LogNormal: {
      const auto& p = *d.get_if<LogNormalParams>();
      j["log_mean"] = number(p.logMean);
      j["log_sd"] = number(p.logSd);
      break;
    }
    case Family::GammaConvolution: {
      Json atoms = Json::array();
      for (const auto& a : d.get_if<GammaConvolutionParams>()->measure.atoms()) {
        atoms.push_back(Json::array({number(a.shape), number(a.scale)}));
      }
      j["atoms"] = std::move(atoms);
      break;
    }
  }
  return j;
}

Distribution fromJsonValue(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "distribution record must be an object");
  auto it = j.find("family");
  if (it == j.end() || !it->is_string()) fail(ErrorCode::ParseError, "distribution record needs a \"family\" string");
  const std::string family = it->get<std::string>();
  const std::string where = fmt::format("{} record", family);

  if (family == "zero") {
    rejectUnknown(j, {"family"}, where);
    return Distribution::zero();
  }
  if (family == "gamma") {
    rejectUnknown(j, {"family", "shape", "scale"}, where);
    return Distribution::gamma(numberField(j, "shape", where), numberField(j, "scale", where));
  }
  if (family == "gaussian") {
    rejectUnknown(j, {"family", "mean", "variance"}, where);
    return Distribution::gaussian(numberField(j, "mean", where), numberField(j, "variance", where));
  }
  if (family == "poisson") {
    rejectUnknown(j, {"family", "rate"}, where);
    return Distribution::poisson(numberField(j, "rate", where));
  }
  if (family == "compound_poisson") {
    rejectUnknown(j, {"family", "rate", "severity"}, where);
    auto sev = j.find("severity");
    if (sev == j.end()) fail(ErrorCode::ParseError, "compound_poisson record needs \"severity\"");
    return Distribution::compoundPoisson(numberField(j, "rate", where), fromJsonValue(*sev));
  }
  if (family == "negative_binomial") {
    rejectUnknown(j, {"family", "size", "prob"}, where);
    return Distribution::negativeBinomial(numberField(j, "size", where), numberField(j, "prob", where));
  }
  if (family == "geometric") {
    rejectUnknown(j, {"family", "prob"}, where);
    return Distribution::geometric(numberField(j, "prob", where));
  }
  if (family == "pareto") {
    rejectUnknown(j, {"family", "shape"}, where);
    return Distribution::pareto(numberField(j, "shape", where));
  }
  if (family == "lognormal") {
    rejectUnknown(j, {"family", "log_mean", "log_sd"}, where);
    return Distribution::logNormal(numberField(j, "log_mean", where), numberField(j, "log_sd", where));
  }
  if (family == "ggc") {
    rejectUnknown(j, {"family", "atoms"}, where);
    auto atomsIt = j.find("atoms");
    if (atomsIt == j.end() || !atomsIt->is_array()) fail(ErrorCode::ParseError, "ggc record needs an \"atoms\" array");
    std::vector<ThorinAtom> atoms;
    for (const auto& a : *atomsIt) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
        fail(ErrorCode::ParseError, "each ggc atom must be a [shape, scale] pair");
      }
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return Distribution::gammaConvolution(std::move(atoms));
  }
  fail(ErrorCode::ParseError, fmt::format("unknown family \"{}\"", family));
}

}  // namespace

std::string toJson(const Distribution& d) { return toJsonValue(d).dump(); }

Distribution distributionFromJson(std::string_view text) { return fromJsonValue(parse(text)); }

std::string toJson(const FitReport& report) {
  Json j;
  j["fitted"] = toJsonValue(report.fitted);
  j["objective"] = report.objectiveValue;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  Json grid = Json::array();
  for (double t : report.gridUsed) grid.push_back(t);
  j["grid"] = std::move(grid);
  return j.dump(2);
}

FitReport fitReportFromJson(std::string_view text) {
  const Json j = parse(text);
  rejectUnknown(j, {"fitted", "objective", "iterations", "converged", "grid"}, "fit report");
  FitReport report;
  if (!j.contains("fitted")) fail(ErrorCode::ParseError, "fit report needs \"fitted\"");
  report.fitted = fromJsonValue(j.at("fitted"));
  report.objectiveValue = numberField(j, "objective", "fit report");
  report.iterations = static_cast<std::size_t>(numberField(j, "iterations", "fit report"));
  report.converged = j.value("converged", false);
  if (j.contains("grid")) {
    for (const auto& t : j.at("grid")) report.gridUsed.push_back(t.get<double>());
  }
  return report;
}

ModelSpec modelFromJson(std::string_view text) {
  const Json j = parse(text);
  rejectUnknown(j, {"marginals", "beta", "reinject", "names"}, "model");
  if (!j.contains("marginals") || !j.at("marginals").is_array()) {
    fail(ErrorCode::ParseError, "model needs a \"marginals\" array");
  }
  if (!j.contains("beta") || !j.at("beta").is_array()) fail(ErrorCode::ParseError, "model needs a \"beta\" matrix");

  std::vector<Distribution> marginals;
  for (const auto& m : j.at("marginals")) marginals.push_back(fromJsonValue(m));

  std::vector<std::vector<double>> rows;
  for (const auto& row : j.at("beta")) {
    if (!row.is_array()) fail(ErrorCode::ParseError, "each beta row must be an array");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) fail(ErrorCode::ParseError, "beta entries must be numbers");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }

  std::vector<std::string> names;
  if (j.contains("names")) {
    for (const auto& n : j.at("names")) {
      if (!n.is_string()) fail(ErrorCode::ParseError, "names must be strings");
      names.push_back(n.get<std::string>());
    }
  }

  MarginalReinjection reinjection;
  if (j.contains("reinject") && !j.at("reinject").is_null()) {
    for (const auto& r : j.at("reinject")) {
      if (r.is_null()) {
        reinjection.targets.emplace_back(std::nullopt);
      } else {
        reinjection.targets.emplace_back(fromJsonValue(r));
      }
    }
    if (reinjection.targets.size() != marginals.size()) {
      fail(ErrorCode::DimensionMismatch,
           fmt::format("{} reinjection entries for {} marginals", reinjection.targets.size(), marginals.size()));
    }
  }

  return ModelSpec{buildModel(std::move(marginals), BetaMatrix::fromRows(rows), std::move(names)),
                   std::move(reinjection)};
}

std::string toJson(const ModelSpec& spec, bool pretty) {
  const auto& model = spec.model;
  Json j;
  Json marginals = Json::array();
  for (const auto& m : model.marginals()) marginals.push_back(toJsonValue(m));
  j["marginals"] = std::move(marginals);
  Json beta = Json::array();
  for (std::size_t i = 0; i < model.beta().rows(); ++i) {
    Json row = Json::array();
    for (double b : model.beta().row(i)) row.push_back(number(b));
    beta.push_back(std::move(row));
  }
  j["beta"] = std::move(beta);
  if (!spec.reinjection.targets.empty()) {
    Json reinject = Json::array();
    for (const auto& t : spec.reinjection.targets) reinject.push_back(t ? toJsonValue(*t) : Json(nullptr));
    j["reinject"] = std::move(reinject);
  }
  j["names"] = model.columnNames();
  return pretty ? j.dump(2) : j.dump();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string csvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string formatNumber(double v) { return fmt::format("{}", v); }

std::vector<double> readSampleCsv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t lineNo = 0;
  bool sawData = false;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string_view field = trim(line);
    if (field.empty()) continue;
    if (field.find(',') != std::string_view::npos) {
      fail(ErrorCode::ParseError, fmt::format("line {}: expected a single column", lineNo));
    }
    if (!sawData && (field == "x" || field == "\"x\"")) {
      sawData = true;
      continue;
    }
    sawData = true;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      fail(ErrorCode::ParseError, fmt::format("line {}: \"{}\" is not a number", lineNo, field));
    }
    values.push_back(v);
  }
  return values;
}

std::vector<double> readSampleCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, fmt::format("cannot open {}", path.string()));
  return readSampleCsv(in);
}

void writeCsv(std::ostream& out, const SampleMatrix& s) {
  std::string buf;
  for (std::size_t c = 0; c < s.cols(); ++c) {
    if (c) buf += ',';
    buf += csvField(s.columnNames()[c]);
  }
  buf += "\r\n";
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.cols(); ++c) {
      if (c) buf += ',';
      buf += formatNumber(s(r, c));
    }
    buf += "\r\n";
  }
  out << buf;
}

void writeCsv(std::ostream& out, const QqTable& table) {
  std::string buf = "p,q_empirical,q_model\r\n";
  for (const auto& row : table.rows) {
    buf += fmt::format("{},{},{}\r\n", row.p, row.empirical, row.model);
  }
  out << buf;
}

void writeCsv(std::ostream& out, const KdeCurve& curve) {
  std::string buf = "x,density\r\n";
  for (const auto& p : curve.points) buf += fmt::format("{},{}\r\n", p.x, p.density);
  out << buf;
}

void writeColumnsCsv(std::ostream& out, std::span<const std::string> names,
                     std::span<const std::vector<double>> columns) {
  if (names.size() != columns.size()) fail(ErrorCode::DimensionMismatch, "one name per column required");
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) fail(ErrorCode::DimensionMismatch, "columns differ in length");
  }
  std::string buf;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) buf += ',';
    buf += csvField(names[c]);
  }
  buf += "\r\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) buf += ',';
      buf += formatNumber(columns[c][r]);
    }
    buf += "\r\n";
  }
  out << buf;
}

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFileAtomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::ParseError, fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorCode::ParseError, fmt::format("write to {} failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::ParseError, fmt::format("cannot move output into {}", path.string()));
  }
}

}  // namespace divisim::io
