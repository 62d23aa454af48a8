#include <gtest/gtest.h>

#include <charconv>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "divisim/errors.hpp"
#include "divisim/io.hpp"

using namespace divisim;
namespace fs = std::filesystem;

namespace {

ErrorCode codeOf(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::DomainError;
}

}  // namespace

TEST(Records, Format) {
  EXPECT_EQ(io::toJson(Distribution::gamma(2, 3)), R"({"family":"gamma","shape":2,"scale":3})");
  EXPECT_EQ(io::toJson(Distribution::zero()), R"({"family":"zero"})");
  EXPECT_EQ(io::toJson(Distribution::gammaConvolution({{0.5, 1}, {1, 5}})),
            R"({"family":"ggc","atoms":[[0.5,1],[1,5]]})");
  EXPECT_EQ(io::toJson(Distribution::logNormal(0, 2)), R"({"family":"lognormal","log_mean":0,"log_sd":2})");
}

TEST(Records, RoundTrip) {
  for (const auto& d :
       {Distribution::zero(), Distribution::gamma(0.1 + 0.2, 1e-300), Distribution::gaussian(-1.5, 2.25),
        Distribution::poisson(3.3), Distribution::compoundPoisson(2.0, Distribution::gamma(1.0 / 3, 7.0)),
        Distribution::negativeBinomial(2.5, 0.123456789), Distribution::pareto(0.75),
        Distribution::logNormal(0.1, 2.0), Distribution::gammaConvolution({{0.1, 0.2}, {1.0 / 7, 9e9}})}) {
    EXPECT_EQ(io::distributionFromJson(io::toJson(d)), d) << io::toJson(d);
  }
}

TEST(Records, GeometricInput) {
  EXPECT_EQ(io::distributionFromJson(R"({"family":"geometric","prob":0.25})"), Distribution::geometric(0.25));
}

TEST(Records, Rejections) {
  EXPECT_EQ(codeOf([] { io::distributionFromJson(R"({"family":"gamma","shape":2,"scale":3,"rate":1})"); }),
            ErrorCode::ParseError);
  EXPECT_EQ(codeOf([] { io::distributionFromJson(R"({"family":"weibull"})"); }), ErrorCode::ParseError);
  EXPECT_EQ(codeOf([] { io::distributionFromJson(R"({"family":"gamma","shape":2})"); }), ErrorCode::ParseError);
  EXPECT_EQ(codeOf([] { io::distributionFromJson("{not json"); }), ErrorCode::ParseError);
  EXPECT_EQ(codeOf([] { io::distributionFromJson(R"({"family":"gamma","shape":-2,"scale":3})"); }),
            ErrorCode::DomainError);
  EXPECT_EQ(codeOf([] { io::distributionFromJson(R"({"family":"ggc","atoms":[[1]]})"); }), ErrorCode::ParseError);
}

TEST(FitReports, RoundTrip) {
  FitReport r{Distribution::gammaConvolution({{0.5, 2}, {1, 9}}), 1.25e-9, 42, true, {0.1, 1.0, 10.0}, {}};
  const auto back = io::fitReportFromJson(io::toJson(r));
  EXPECT_EQ(back.fitted, r.fitted);
  EXPECT_EQ(back.objectiveValue, r.objectiveValue);
  EXPECT_EQ(back.iterations, 42u);
  EXPECT_TRUE(back.converged);
  EXPECT_EQ(back.gridUsed, r.gridUsed);
}

TEST(Models, ParseAndNormalize) {
  const auto spec = io::modelFromJson(R"({
    "marginals": [{"family":"gamma","shape":1,"scale":1}, {"family":"poisson","rate":2}],
    "beta": [[0.5, 0.5], [0, 1]],
    "reinject": [null, {"family":"pareto","shape":0.75}]
  })");
  EXPECT_EQ(spec.model.dimension(), 2u);
  EXPECT_EQ(spec.model.columnNames(), (std::vector<std::string>{"X1", "X2"}));
  ASSERT_EQ(spec.reinjection.targets.size(), 2u);
  EXPECT_FALSE(spec.reinjection.targets[0].has_value());
  const auto again = io::modelFromJson(io::toJson(spec, false));
  EXPECT_EQ(io::toJson(again, false), io::toJson(spec, false));
}

TEST(Models, Diagnostics) {
  try {
    io::modelFromJson(R"({"marginals":[{"family":"gamma","shape":1,"scale":1}],"beta":[[0.5,0.4]]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RowSumViolation);
    EXPECT_STREQ(e.what(), "RowSumViolation row 1 (sum=0.9)");
  }
  EXPECT_EQ(codeOf([] { io::modelFromJson(R"({"marginals":[],"beta":[],"extra":1})"); }), ErrorCode::ParseError);
  EXPECT_EQ(codeOf([] {
              io::modelFromJson(
                  R"({"marginals":[{"family":"gamma","shape":1,"scale":1}],"beta":[[1]],"reinject":[null,null]})");
            }),
            ErrorCode::DimensionMismatch);
}

TEST(Csv, ReadSample) {
  std::istringstream a("x\n1.5\n2\n\n3e-2\n");
  EXPECT_EQ(io::readSampleCsv(a), (std::vector<double>{1.5, 2, 0.03}));
  std::istringstream b("4\r\n5\r\n");
  EXPECT_EQ(io::readSampleCsv(b), (std::vector<double>{4, 5}));
  std::istringstream empty("");
  EXPECT_TRUE(io::readSampleCsv(empty).empty());
  std::istringstream two("1,2\n");
  EXPECT_EQ(codeOf([&] { io::readSampleCsv(two); }), ErrorCode::ParseError);
  std::istringstream word("x\nabc\n");
  EXPECT_EQ(codeOf([&] { io::readSampleCsv(word); }), ErrorCode::ParseError);
}

TEST(Csv, WriteTables) {
  SampleMatrix s(2, {"X", "a,b"});
  s(0, 0) = 0.1;
  s(0, 1) = 2;
  s(1, 0) = 1e-20;
  s(1, 1) = -3.5;
  std::ostringstream o;
  io::writeCsv(o, s);
  EXPECT_EQ(o.str(), "X,\"a,b\"\r\n0.1,2\r\n1e-20,-3.5\r\n");

  std::ostringstream q;
  io::writeCsv(q, QqTable{{{0.5, 1.25, 1.0}}});
  EXPECT_EQ(q.str(), "p,q_empirical,q_model\r\n0.5,1.25,1\r\n");

  std::ostringstream k;
  io::writeCsv(k, KdeCurve{{{0.0, 0.25}}, 1.0});
  EXPECT_EQ(k.str(), "x,density\r\n0,0.25\r\n");

  std::ostringstream h;
  io::writeCsv(h, SampleMatrix(0, {"X", "Y"}));
  EXPECT_EQ(h.str(), "X,Y\r\n");
}

TEST(Csv, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, 123456789.125}) {
    // from_chars, not stod: stod reports ERANGE on subnormals.
    const auto text = io::formatNumber(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    EXPECT_EQ(back, v) << text;
  }
}

TEST(Files, AtomicWrite) {
  const fs::path dir = fs::temp_directory_path() / "divisim_io_test";
  fs::create_directories(dir);
  const fs::path p = dir / "out.txt";
  io::writeFileAtomic(p, "hello\n");
  EXPECT_EQ(io::readFile(p), "hello\n");
  io::writeFileAtomic(p, "again");
  EXPECT_EQ(io::readFile(p), "again");
  EXPECT_FALSE(fs::exists(dir / "out.txt.tmp"));
  EXPECT_EQ(codeOf([&] { io::writeFileAtomic(dir / "missing" / "x.txt", "x"); }), ErrorCode::ParseError);
  EXPECT_EQ(codeOf([&] { io::readFile(dir / "nope"); }), ErrorCode::ParseError);
  fs::remove_all(dir);
}
