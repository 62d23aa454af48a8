// Acceptance suite: one PASS/FAIL line per criterion, with the measured values.
// Exit status is the number of failed criteria (capped at 1 for ctest).

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "divisim/diagnostics.hpp"
#include "divisim/divisibility.hpp"
#include "divisim/fitting.hpp"
#include "divisim/io.hpp"
#include "divisim/presets.hpp"
#include "divisim/riskfactor.hpp"

using namespace divisim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

constexpr std::uint64_t kSeed = 42;
constexpr double kLevels[] = {0.5, 0.9, 0.99, 0.999};

double poissonPmf(double lambda, int k) { return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0)); }

Outcome pieceLaw() {
  const std::vector<Distribution> families = {
      Distribution::gamma(2.0, 3.0),
      Distribution::gaussian(2.0, 4.0),
      Distribution::poisson(10.0),
      Distribution::compoundPoisson(3.0, Distribution::gamma(1.0, 1.0)),
      Distribution::negativeBinomial(2.0, 0.4),
      Distribution::gammaConvolution({{1.0, 1.0}, {2.0, 5.0}, {0.3, 40.0}}),
      Distribution::zero()};
  double worst = 0.0;
  for (const auto& d : families)
    for (double b : {0.1, 0.5, 0.9})
      for (double t : {0.1, 1.0, 10.0})
        worst = std::max(worst, std::fabs(logLaplace(piece(d, b), t) - b * logLaplace(d, t)));
  return {worst <= 1e-12, fmt::format("max |psi_piece - beta psi| = {:.3g} (bound 1e-12)", worst)};
}

Outcome poissonOracle() {
  const auto halves = partition(Distribution::poisson(2.0), PiecePartition::equal(2));
  const double l1 = halves[0].get_if<PoissonParams>()->rate, l2 = halves[1].get_if<PoissonParams>()->rate;
  double worst = 0.0;
  for (int m = 0; m <= 40; ++m) {
    double conv = 0.0;
    for (int k = 0; k <= m; ++k) conv += poissonPmf(l1, k) * poissonPmf(l2, m - k);
    worst = std::max(worst, std::fabs(conv - poissonPmf(2.0, m)));
  }
  return {worst <= 1e-10, fmt::format("max pmf error on 0..40 = {:.3g} (bound 1e-10)", worst)};
}

Outcome reconstruction() {
  const std::size_t n = 100'000;
  const double crit = 1.63 * std::sqrt(2.0 / n);
  bool ok = true;
  std::string detail;
  const std::vector<std::pair<const char*, Distribution>> cases = {
      {"gamma", Distribution::gamma(2, 1)},
      {"poisson", Distribution::poisson(4)},
      {"compound_poisson", Distribution::compoundPoisson(3, Distribution::gamma(1, 1))}};
  for (const auto& [name, d] : cases) {
    int failures = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      std::vector<double> summed(n, 0.0);
      for (const auto& p : partition(d, PiecePartition::equal(4))) {
        const auto x = sample(p, rng, n);
        for (std::size_t k = 0; k < n; ++k) summed[k] += x[k];
      }
      const double ks = ksStatistic(summed, sample(d, rng, n));
      worst = std::max(worst, ks);
      if (ks >= crit) ++failures;
    }
    ok = ok && failures <= 1;
    detail += fmt::format("{} {}/5 fail (max KS {:.4f}); ", name, failures, worst);
  }
  detail += fmt::format("critical {:.4f}", crit);
  return {ok, detail};
}

Outcome shiftedMoments() {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 3.0})
    for (double s : {0.5, 1.0, 5.0}) {
      const auto r = fitGammaShiftedMoments({std::pow(1 + s, -a), a * s * std::pow(1 + s, -a - 1)});
      const auto& g = *r.fitted.get_if<GammaParams>();
      worst = std::max({worst, std::fabs(g.shape / a - 1), std::fabs(g.scale / s - 1)});
    }
  return {worst <= 1e-8, fmt::format("max relative error {:.3g} (bound 1e-8)", worst)};
}

Outcome gammaMle() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const auto r = fitGammaMle(sample(Distribution::gamma(2, 1), rng, 1'000'000));
    const auto& g = *r.fitted.get_if<GammaParams>();
    worst = std::max({worst, std::fabs(g.shape / 2 - 1), std::fabs(g.scale - 1)});
  }
  return {worst <= 0.02, fmt::format("max relative parameter error over 5 seeds {:.4f} (bound 0.02)", worst)};
}

// Evaluates the fits written by `reproduce figN --seed 42` with 10^6 draws
// from the same streams the pipeline uses.
struct TailCheck {
  std::vector<double> ggcErr;
  double gammaErr999 = 0.0;
};

TailCheck tailErrors(const fs::path& dir, const std::string& fig, const Distribution& target) {
  const auto gamma = io::fitReportFromJson(io::readFile(dir / (fig + "_fit_gamma.json"))).fitted;
  const auto ggc = io::fitReportFromJson(io::readFile(dir / (fig + "_fit_ggc.json"))).fitted;
  Rng rg = Rng::derive(kSeed, 2);
  Rng rc = Rng::derive(kSeed, 3);
  auto yg = sample(gamma, rg, 1'000'000);
  auto yc = sample(ggc, rc, 1'000'000);
  std::sort(yg.begin(), yg.end());
  std::sort(yc.begin(), yc.end());
  TailCheck t;
  for (double p : kLevels) t.ggcErr.push_back(empiricalQuantileSorted(yc, p) / quantile(target, p) - 1.0);
  t.gammaErr999 = empiricalQuantileSorted(yg, 0.999) / quantile(target, 0.999) - 1.0;
  return t;
}

Outcome tailCriterion(const fs::path& dir, const std::string& fig, const Distribution& target, bool gammaMustFail) {
  const auto t = tailErrors(dir, fig, target);
  bool ok = true;
  std::string detail = "ggc rel err";
  for (std::size_t i = 0; i < t.ggcErr.size(); ++i) {
    ok = ok && std::fabs(t.ggcErr[i]) <= 0.10;
    detail += fmt::format(" q{}={:+.2f}%", kLevels[i], 100 * t.ggcErr[i]);
  }
  detail += fmt::format("; gamma-mle q0.999={:+.2f}%", 100 * t.gammaErr999);
  if (gammaMustFail) {
    const bool violates = std::fabs(t.gammaErr999) > 0.10;
    ok = ok && violates;
    detail += violates ? " (violates, as required)" : " (inside the 10% band: required violation missing)";
  }
  return {ok, detail};
}

Outcome pipeline4b() {
  const std::size_t n = 10'000;
  const MarginalReinjection truth{{presets::paretoTarget(), presets::logNormalTarget()}};
  double tauGgc = 0.0, tauGamma = 0.0;
  std::vector<double> sums[2];
  const char* names[2] = {"paper-4b", "paper-4b-gamma"};
  for (int m = 0; m < 2; ++m) {
    const auto spec = presets::model(names[m]);
    Rng rng = Rng::derive(kSeed, m == 0 ? 10 : 11);
    const auto pieces = samplePieces(spec.model, n, rng);
    const double tau = kendallTau(pieces.piece(0, 1), pieces.piece(1, 1));
    (m == 0 ? tauGgc : tauGamma) = tau;
    sums[m] = aggregate(reinjectMarginals(sumPieces(spec.model, pieces), truth));
  }
  const double ks = ksStatistic(sums[0], sums[1]);
  const bool ok = tauGgc == 1.0 && tauGamma == 1.0 && ks <= 0.05;
  return {ok, fmt::format("tau(X_0.8, Y_0.2): ggc={} gamma={}; KS(X+Y ggc vs gamma)={:.4f} (bound 0.05)", tauGgc,
                          tauGamma, ks)};
}

Outcome determinism(const fs::path& first, const fs::path& second) {
  std::vector<std::string> differing;
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(first)) {
    const auto other = second / e.path().filename();
    ++compared;
    if (!fs::exists(other) || io::readFile(e.path()) != io::readFile(other)) {
      differing.push_back(e.path().filename().string());
    }
  }
  const bool ok = compared > 0 && differing.empty();
  std::string detail = fmt::format("{} files compared", compared);
  if (!differing.empty()) detail += ", differing: " + fmt::format("{}", fmt::join(differing, ", "));
  return {ok, detail};
}

bool reproduce(const std::string& fig, const fs::path& dir) {
  cli::ReproduceArgs a;
  a.figure = fig;
  a.seed = kSeed;
  a.outDir = dir;
  std::ostringstream out, err;
  const int code = cli::cmdReproduce(a, out, err);
  if (code != cli::kOk) fmt::print("reproduce {} exited {}: {}", fig, code, err.str());
  return code == cli::kOk;
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "divisim_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  int failed = 0;
  const auto report = [&failed](int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    fmt::print("[{}] {}. {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail, secs);
    std::fflush(stdout);
  };

  report(1, "piece-law exactness", pieceLaw);
  report(2, "Poisson convolution oracle", poissonOracle);
  report(3, "reconstruction from quarter pieces", reconstruction);
  report(4, "shifted-moment solver", shiftedMoments);
  report(5, "Gamma MLE consistency", gammaMle);
  report(6, "Pareto(3/4) GGC-20 tail fit", [&] {
    if (!reproduce("fig1", root / "run1")) return Outcome{false, "reproduce fig1 failed"};
    return tailCriterion(root / "run1", "fig1", presets::paretoTarget(), true);
  });
  report(7, "LogNormal(0,2) GGC-20 tail fit", [&] {
    if (!reproduce("fig2", root / "fig2")) return Outcome{false, "reproduce fig2 failed"};
    return tailCriterion(root / "fig2", "fig2", presets::logNormalTarget(), false);
  });
  report(8, "crossed-model pipeline", pipeline4b);
  report(9, "reproduce fig1 determinism", [&] {
    if (!fs::exists(root / "run1") && !reproduce("fig1", root / "run1")) return Outcome{false, "first run failed"};
    if (!reproduce("fig1", root / "run2")) return Outcome{false, "second run failed"};
    return determinism(root / "run1", root / "run2");
  });

  fmt::print("{} of 9 criteria passed\n", 9 - failed);
  fs::remove_all(root);
  return failed == 0 ? 0 : 1;
}
