#include "commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "divisim/diagnostics.hpp"
#include "divisim/distributions.hpp"
#include "divisim/divisibility.hpp"
#include "divisim/errors.hpp"
#include "divisim/fitting.hpp"
#include "divisim/io.hpp"
#include "divisim/presets.hpp"
#include "divisim/random.hpp"
#include "divisim/riskfactor.hpp"

namespace divisim::cli {
namespace fs = std::filesystem;

namespace {

int exitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotParametricallyDivisible:
    case ErrorCode::UnsupportedTransform:
    case ErrorCode::UnsupportedDensity:
    case ErrorCode::UnsupportedQuantile:
    case ErrorCode::UnsupportedCdf:
      return kUnsupported;
    case ErrorCode::NotConverged:
      return kNotConverged;
    default:
      return kInputError;
  }
}

// Runs body and turns library failures into an exit code plus one stderr line.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exitCodeFor(e.code());
  } catch (const fs::filesystem_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kInputError;
  }
}

void emit(const std::optional<fs::path>& path, std::string_view content, std::ostream& out) {
  if (path) {
    io::writeFileAtomic(*path, content);
  } else {
    out << content;
  }
}

ModelSpec loadModel(const std::string& ref) {
  std::error_code ec;
  if (fs::is_regular_file(ref, ec)) return io::modelFromJson(io::readFile(ref));
  if (presets::isModelName(ref)) return presets::model(ref);
  fail(ErrorCode::ParseError, fmt::format("cannot open model \"{}\"", ref));
}

Distribution loadDistribution(const std::string& ref) {
  const auto first = ref.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && ref[first] == '{') return io::distributionFromJson(ref);
  return io::distributionFromJson(io::readFile(ref));
}

std::vector<double> parseBetaList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) fail(ErrorCode::ParseError, fmt::format("bad beta \"{}\"", item));
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorCode::ParseError, "empty beta list");
  return out;
}

std::string csvOf(const SampleMatrix& s) {
  std::ostringstream os;
  io::writeCsv(os, s);
  return os.str();
}

std::string csvOf(const QqTable& t) {
  std::ostringstream os;
  io::writeCsv(os, t);
  return os.str();
}

std::string csvOf(const KdeCurve& c) {
  std::ostringstream os;
  io::writeCsv(os, c);
  return os.str();
}

// Files written by one reproduce run; removed again if the run fails.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, std::string_view content) {
    const fs::path p = dir_ / name;
    io::writeFileAtomic(p, content);
    written_.push_back(p);
  }
  void rollback() noexcept {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }
  const std::vector<fs::path>& written() const noexcept { return written_; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::vector<double> linearGrid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

constexpr std::size_t kKdePoints = 256;
constexpr std::size_t kAtoms = 20;
constexpr double kLevels[] = {0.5, 0.9, 0.99, 0.999};

// Stream ids below the run seed.
enum Stream : std::uint64_t {
  kTargetSample = 1,
  kGammaDraws = 2,
  kGgcDraws = 3,
  kModelGgc = 10,
  kModelGamma = 11,
};

struct Approximants {
  FitReport gamma;
  FitReport ggc;
  std::vector<double> sample;
};

Approximants fitBoth(const Distribution& target, const FigureSizes& sizes, std::uint64_t seed,
                     std::size_t threads, std::ostream& err) {
  Rng rng = Rng::derive(seed, kTargetSample);
  Approximants a;
  a.sample = sample(target, rng, sizes.fit);
  a.gamma = fitGammaMle(a.sample);
  GgcFitOptions opts;
  opts.threads = threads;
  a.ggc = fitGammaConvolution(a.sample, kAtoms, std::nullopt, seed, opts);
  fmt::print(err, "fit {}: gamma-mle residual {:.3g}, ggc objective {:.3g} after {} iterations\n",
             familyName(target.family()), a.gamma.objectiveValue, a.ggc.objectiveValue, a.ggc.iterations);
  return a;
}

std::string quantileLine(const char* label, std::span<const double> sorted, const Distribution& target) {
  std::string s = fmt::format("{:>6}", label);
  for (double p : kLevels) {
    const double q = quantile(target, p);
    s += fmt::format("  q{}={:+.1f}%", p, 100.0 * (empiricalQuantileSorted(sorted, p) / q - 1.0));
  }
  return s;
}

// fig1 / fig2: a heavy-tailed target, its two approximants, densities and QQ tables.
int marginalFigure(const std::string& fig, const Distribution& target, const ReproduceArgs& args,
                   OutputSet& files, std::ostream& out, std::ostream& err) {
  const FigureSizes sizes = figureSizes(args.budget);
  Approximants a = fitBoth(target, sizes, args.seed, args.threads, err);

  Rng rg = Rng::derive(args.seed, kGammaDraws);
  Rng rc = Rng::derive(args.seed, kGgcDraws);
  std::vector<double> gammaDraws = sample(a.gamma.fitted, rg, sizes.fit);
  std::vector<double> ggcDraws = sample(a.ggc.fitted, rc, sizes.fit);

  const std::size_t nd = std::min(sizes.display, sizes.fit);
  const std::vector<double> levels = plottingPositions(nd);
  const QqTable qqGamma =
      qqAgainstAnalytic(std::span<const double>(gammaDraws).first(nd), target, levels);
  const QqTable qqGgc = qqAgainstAnalytic(std::span<const double>(ggcDraws).first(nd), target, levels);

  const std::vector<double> grid = linearGrid(0.0, quantile(target, 0.95), kKdePoints);
  const KdeCurve kSample = kde(a.sample, grid);
  const KdeCurve kGamma = kde(gammaDraws, grid);
  const KdeCurve kGgc = kde(ggcDraws, grid);
  std::vector<double> truth(grid.size()), c1(grid.size()), c2(grid.size()), c3(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    truth[i] = density(target, grid[i]);
    c1[i] = kSample.points[i].density;
    c2[i] = kGamma.points[i].density;
    c3[i] = kGgc.points[i].density;
  }
  const std::vector<std::string> names = {"x", "target", "sample", "gamma", "ggc"};
  const std::vector<std::vector<double>> cols = {grid, truth, c1, c2, c3};
  std::ostringstream kdeCsv;
  io::writeColumnsCsv(kdeCsv, names, cols);

  SampleMatrix shown(nd, {"x"});
  shown.setColumn(0, std::span<const double>(a.sample).first(nd));

  files.write(fig + "_sample.csv", csvOf(shown));
  files.write(fig + "_fit_gamma.json", io::toJson(a.gamma) + "\n");
  files.write(fig + "_fit_ggc.json", io::toJson(a.ggc) + "\n");
  files.write(fig + "_kde.csv", kdeCsv.str());
  files.write(fig + "_qq_gamma.csv", csvOf(qqGamma));
  files.write(fig + "_qq_ggc.csv", csvOf(qqGgc));

  std::sort(gammaDraws.begin(), gammaDraws.end());
  std::sort(ggcDraws.begin(), ggcDraws.end());
  fmt::print(out, "{} quantile error vs {}:\n{}\n{}\n", fig, familyName(target.family()),
             quantileLine("gamma", gammaDraws, target), quantileLine("ggc", ggcDraws, target));
  return a.ggc.converged ? kOk : kNotConverged;
}

struct CrossedRun {
  SampleMatrix gamma;
  SampleMatrix ggc;
  bool converged = true;
};

CrossedRun crossedSamples(const ReproduceArgs& args, std::ostream& err) {
  const FigureSizes sizes = figureSizes(args.budget);
  ModelSpec ggcSpec = presets::model("paper-4b");
  ModelSpec gammaSpec = presets::model("paper-4b-gamma");
  CrossedRun run;
  if (args.refit) {
    Approximants x = fitBoth(presets::paretoTarget(), sizes, args.seed, args.threads, err);
    Approximants y = fitBoth(presets::logNormalTarget(), sizes, args.seed, args.threads, err);
    ggcSpec = presets::crossedSpec(x.ggc.fitted, y.ggc.fitted);
    gammaSpec = presets::crossedSpec(x.gamma.fitted, y.gamma.fitted);
    run.converged = x.ggc.converged && y.ggc.converged;
  }
  const SamplingOptions opts{args.threads};
  Rng rc = Rng::derive(args.seed, kModelGgc);
  Rng rg = Rng::derive(args.seed, kModelGamma);
  run.ggc = sampleModel(ggcSpec.model, sizes.display, rc, opts);
  run.gamma = sampleModel(gammaSpec.model, sizes.display, rg, opts);
  return run;
}

// fig3: the crossed model under both approximants, raw and on the copula scale.
int dependenceFigure(const ReproduceArgs& args, OutputSet& files, std::ostream& out, std::ostream& err) {
  const CrossedRun run = crossedSamples(args, err);
  files.write("fig3_gamma.csv", csvOf(run.gamma));
  files.write("fig3_gamma_pseudo.csv", csvOf(pseudoObservations(run.gamma)));
  files.write("fig3_ggc.csv", csvOf(run.ggc));
  files.write("fig3_ggc_pseudo.csv", csvOf(pseudoObservations(run.ggc)));
  fmt::print(out, "fig3 kendall tau(X, Y): gamma={:.4f} ggc={:.4f}\n",
             kendallTau(run.gamma.column(0), run.gamma.column(1)),
             kendallTau(run.ggc.column(0), run.ggc.column(1)));
  return run.converged ? kOk : kNotConverged;
}

// fig4: density of X + Y after reinjecting the true marginals.
int sumFigure(const ReproduceArgs& args, OutputSet& files, std::ostream& out, std::ostream& err) {
  const CrossedRun run = crossedSamples(args, err);
  const MarginalReinjection truth{{presets::paretoTarget(), presets::logNormalTarget()}};
  const std::vector<double> sGamma = aggregate(reinjectMarginals(run.gamma, truth));
  const std::vector<double> sGgc = aggregate(reinjectMarginals(run.ggc, truth));

  std::vector<double> pooled = sGamma;
  pooled.insert(pooled.end(), sGgc.begin(), sGgc.end());
  const std::vector<double> grid = linearGrid(0.0, empiricalQuantile(pooled, 0.95), kKdePoints);
  files.write("fig4_kde_gamma.csv", csvOf(kde(sGamma, grid)));
  files.write("fig4_kde_ggc.csv", csvOf(kde(sGgc, grid)));
  fmt::print(out, "fig4 KS distance between X+Y samples (gamma vs ggc): {:.4f}\n", ksStatistic(sGamma, sGgc));
  return run.converged ? kOk : kNotConverged;
}

}  // namespace

FigureSizes figureSizes(double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    fail(ErrorCode::DomainError, fmt::format("budget {} must be positive", budget));
  }
  const auto scaled = [budget](double base) {
    return static_cast<std::size_t>(std::max(1.0, std::round(base * budget)));
  };
  return {scaled(1e6), scaled(1e4)};
}

int cmdFit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<double> x = io::readSampleCsv(args.input);
    FitReport report = [&] {
      if (args.family == "gamma-mle") return fitGammaMle(x);
      if (args.family == "gamma-shifted") return fitGammaShiftedMoments(estimateShiftedMoments(x));
      if (args.family == "ggc") {
        GgcFitOptions opts;
        opts.threads = args.threads;
        return fitGammaConvolution(x, args.atoms, std::nullopt, args.seed, opts);
      }
      fail(ErrorCode::ParseError, fmt::format("unknown family \"{}\"", args.family));
    }();
    fmt::print(err, "{}: objective {:.6g}, {} iterations, {}\n", args.family, report.objectiveValue,
               report.iterations, report.converged ? "converged" : "not converged");
    emit(args.out, io::toJson(report) + "\n", out);
    if (!report.converged) {
      fmt::print(err, "error: NotConverged: report written anyway\n");
      return static_cast<int>(kNotConverged);
    }
    return static_cast<int>(kOk);
  });
}

int cmdDivide(const DivideArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Distribution d = loadDistribution(args.dist);
    const std::vector<double> betas = parseBetaList(args.beta);
    std::vector<Distribution> pieces;
    if (betas.size() == 1) {
      pieces.push_back(piece(d, betas.front()));
    } else {
      pieces = partition(d, PiecePartition(betas));
    }
    std::string text;
    for (const auto& p : pieces) text += io::toJson(p) + "\n";
    emit(args.out, text, out);
    return static_cast<int>(kOk);
  });
}

int cmdSample(const SampleArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ModelSpec spec = loadModel(args.model);
    Rng rng(args.seed);
    SampleMatrix s = sampleModel(spec.model, args.n, rng, SamplingOptions{args.threads});
    if (args.reinject) s = reinjectMarginals(s, spec.reinjection);
    emit(args.out, csvOf(s), out);
    return static_cast<int>(kOk);
  });
}

int cmdValidate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    out << io::toJson(loadModel(args.model), true) << "\n";
    return static_cast<int>(kOk);
  });
}

int cmdReproduce(const ReproduceArgs& args, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kFigures = {"fig1", "fig2", "fig3", "fig4"};
  if (std::find(kFigures.begin(), kFigures.end(), args.figure) == kFigures.end()) {
    fmt::print(err, "error: unknown figure \"{}\" (expected fig1, fig2, fig3 or fig4)\n", args.figure);
    return kInputError;
  }
  OutputSet files(args.outDir);
  const int rc = guarded(err, [&] {
    std::error_code ec;
    fs::create_directories(args.outDir, ec);
    if (ec) fail(ErrorCode::ParseError, fmt::format("cannot create {}: {}", args.outDir.string(), ec.message()));
    if (args.figure == "fig1") return marginalFigure("fig1", presets::paretoTarget(), args, files, out, err);
    if (args.figure == "fig2") return marginalFigure("fig2", presets::logNormalTarget(), args, files, out, err);
    if (args.figure == "fig3") return dependenceFigure(args, files, out, err);
    return sumFigure(args, files, out, err);
  });
  if (rc != kOk && rc != kNotConverged) {
    files.rollback();
    return rc;
  }
  for (const auto& p : files.written()) fmt::print(out, "wrote {}\n", p.string());
  return rc;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divisible-distribution toolkit: fit, divide, sample and reproduce"};
  app.name(argv.empty() ? "divisim" : fs::path(argv.front()).filename().string());
  app.require_subcommand(1, 1);

  std::uint64_t seed = 0;
  const auto addSeed = [&seed](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed (default: $DIVISIM_SEED, else 0)")->envname("DIVISIM_SEED");
  };

  FitArgs fit;
  std::string fitOut;
  auto* fitCmd = app.add_subcommand("fit", "Fit an approximant to a one-column CSV sample");
  fitCmd->add_option("input", fit.input, "Sample CSV")->required();
  fitCmd->add_option("--family", fit.family, "gamma-mle | gamma-shifted | ggc")
      ->check(CLI::IsMember({"gamma-mle", "gamma-shifted", "ggc"}));
  fitCmd->add_option("--atoms", fit.atoms, "Gamma atoms of a ggc fit")->check(CLI::PositiveNumber);
  fitCmd->add_option("--out", fitOut, "Output JSON (default stdout)");
  fitCmd->add_option("--threads", fit.threads, "Worker threads")->check(CLI::PositiveNumber);
  addSeed(fitCmd);

  DivideArgs divide;
  std::string divideOut;
  auto* divideCmd = app.add_subcommand("divide", "Compute beta-pieces of a distribution record");
  divideCmd->add_option("dist", divide.dist, "Record file or inline JSON")->required();
  divideCmd->add_option("--beta", divide.beta, "Piece weight or comma-separated partition")->required();
  divideCmd->add_option("--out", divideOut, "Output file (default stdout)");

  SampleArgs smp;
  std::string sampleOut;
  auto* sampleCmd = app.add_subcommand("sample", "Sample a risk factor model");
  sampleCmd->add_option("--model", smp.model, "Model file or preset name")->required();
  sampleCmd->add_option("--n", smp.n, "Scenarios");
  sampleCmd->add_option("--out", sampleOut, "Output CSV (default stdout)");
  sampleCmd->add_flag("--reinject", smp.reinject, "Reinject the model's target marginals");
  sampleCmd->add_option("--threads", smp.threads, "Worker threads")->check(CLI::PositiveNumber);
  addSeed(sampleCmd);

  ReproduceArgs rep;
  auto* repCmd = app.add_subcommand("reproduce", "Write the CSV data behind a figure");
  repCmd->add_option("figure", rep.figure, "fig1 | fig2 | fig3 | fig4")->required();
  repCmd->add_option("--out", rep.outDir, "Output directory");
  repCmd->add_option("--budget", rep.budget, "Scale factor on all sample sizes")->check(CLI::PositiveNumber);
  repCmd->add_flag("--refit", rep.refit, "Refit approximants instead of using bundled fits");
  repCmd->add_option("--threads", rep.threads, "Worker threads")->check(CLI::PositiveNumber);
  addSeed(repCmd);

  ValidateArgs val;
  auto* valCmd = app.add_subcommand("validate", "Check a model file and print its normalized form");
  valCmd->add_option("model", val.model, "Model file or preset name")->required();

  std::vector<std::string> rest(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : kInputError;
  }

  const auto optPath = [](const std::string& s) -> std::optional<fs::path> {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
  };
  if (*fitCmd) {
    fit.seed = seed;
    fit.out = optPath(fitOut);
    return cmdFit(fit, out, err);
  }
  if (*divideCmd) {
    divide.out = optPath(divideOut);
    return cmdDivide(divide, out, err);
  }
  if (*sampleCmd) {
    smp.seed = seed;
    smp.out = optPath(sampleOut);
    return cmdSample(smp, out, err);
  }
  if (*repCmd) {
    rep.seed = seed;
    return cmdReproduce(rep, out, err);
  }
  return cmdValidate(val, out, err);
}

}  // namespace divisim::cli
