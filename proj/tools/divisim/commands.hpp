#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace divisim::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kUnsupported = 2,
  kNotConverged = 3,
};

struct FitArgs {
  std::filesystem::path input;
  std::string family = "ggc";  // gamma-mle | gamma-shifted | ggc
  std::size_t atoms = 20;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;  // stdout when unset
  std::size_t threads = 1;
};

struct DivideArgs {
  std::string dist;  // record file path or inline JSON
  std::string beta;  // "0.5" or "0.2,0.8"
  std::optional<std::filesystem::path> out;
};

struct SampleArgs {
  std::string model;  // model file path or preset name
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;
  bool reinject = false;
  std::size_t threads = 1;
};

struct ReproduceArgs {
  std::string figure;
  std::uint64_t seed = 0;
  std::filesystem::path outDir = ".";
  double budget = 1.0;
  bool refit = false;
  std::size_t threads = 1;
};

struct ValidateArgs {
  std::string model;
};

int cmdFit(const FitArgs& args, std::ostream& out, std::ostream& err);
int cmdDivide(const DivideArgs& args, std::ostream& out, std::ostream& err);
int cmdSample(const SampleArgs& args, std::ostream& out, std::ostream& err);
int cmdReproduce(const ReproduceArgs& args, std::ostream& out, std::ostream& err);
int cmdValidate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

/// Full command line, argv[0] included.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Sample sizes used by reproduce at a given budget.
struct FigureSizes {
  std::size_t fit;
  std::size_t display;
};
FigureSizes figureSizes(double budget);

}  // namespace divisim::cli
