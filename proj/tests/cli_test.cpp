#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stagediff/cli.hpp"

using namespace stagediff;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "stagediff");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, DiffInfix) {
  const CliResult r = run({"diff", "--expr", "2*(x1*exp(x2))", "--wrt", "1", "--emit", "infix"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2 * exp(x2)\n");
}

TEST(Cli, DiffHigherOrder) {
  const CliResult r = run({"diff", "--expr", "exp(3*x0)", "--wrt", "0", "--order", "4", "--emit", "infix"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "81 * exp(3 * x0)\n");
}

TEST(Cli, DiffRaw) {
  const CliResult r = run({"diff", "--expr", "2*(x1*exp(x2))", "--wrt", "1", "--raw"});
  EXPECT_EQ(r.out, "0 * (x1 * exp(x2)) + 2 * (1 * exp(x2) + x1 * (exp(x2) * 0))\n");
}

TEST(Cli, DiffEmitCodeAndTree) {
  CliResult r = run({"diff", "--expr", "2*(x1*exp(x2))", "--wrt", "1", "--emit", "code"});
  EXPECT_EQ(r.out, "function d_dx1 arity 3 inputs x[0..3)\nt0 = exp(x[2]);\nt1 = 2 * t0;\nreturn t1;\n");
  r = run({"diff", "--expr", "x0*x0", "--wrt", "0", "--emit", "tree"});
  EXPECT_EQ(r.out, "add\n  Var 0\n  Var 0\n");
}

TEST(Cli, DiffExplain) {
  const CliResult r = run({"diff", "--expr", "2*(x1*exp(x2))", "--wrt", "1", "--explain"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "2 * exp(x2)");
  EXPECT_NE(r.out.find("# mul-zero @ /0\n"), std::string::npos);
  EXPECT_NE(r.out.find("# mul-one @ /1/1/0\n"), std::string::npos);
  EXPECT_NE(r.out.find("# add-zero @ /\n"), std::string::npos);
}

TEST(Cli, VerifyMvF) {
  const CliResult r = run({"verify", "--expr", "x0*tan(x1*x2)/(tan(x1*x2)-x3)"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("symbolic vs dual"), std::string::npos);
  EXPECT_NE(r.out.find("(tol 1e-12) ok"), std::string::npos);
}

TEST(Cli, VerifyDeterministicForSeed) {
  const CliResult a = run({"verify", "--expr", "sin(x0)*exp(x1)/x2", "--seed", "9", "--points", "20"});
  const CliResult b = run({"verify", "--expr", "sin(x0)*exp(x1)/x2", "--seed", "9", "--points", "20"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, SeedFromEnvironment) {
  ::setenv("STAGEDIFF_SEED", "9", 1);
  const CliResult a = run({"verify", "--expr", "sin(x0)*exp(x1)/x2", "--points", "20"});
  ::unsetenv("STAGEDIFF_SEED");
  const CliResult b = run({"verify", "--expr", "sin(x0)*exp(x1)/x2", "--seed", "9", "--points", "20"});
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"diff"}).code, 2);
  EXPECT_EQ(run({"diff", "--expr", "x0 +"}).code, 2);
  EXPECT_EQ(run({"diff", "--expr", "x0", "--emit", "pdf"}).code, 2);
  EXPECT_EQ(run({"bench", "--case", "nope", "--out", "/tmp/x.csv"}).code, 2);
  EXPECT_EQ(run({"bench", "--case", "mv_f", "--impl", "adolc", "--out", "/tmp/x.csv"}).code, 2);
  EXPECT_EQ(run({"bench", "--case", "sumexp_order", "--order", "3", "--impl", "dual", "--out", "/tmp/x.csv"}).code,
            2);
  EXPECT_EQ(run({"gen-time", "--case", "mv_f", "--n-list", "10"}).code, 2);
  const CliResult r = run({"diff", "--expr", "foo(x0)"});
  EXPECT_NE(r.err.find("unknown function"), std::string::npos);
}

TEST(Cli, Help) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, BenchAppendsCsv) {
  const auto path = std::filesystem::temp_directory_path() / "stagediff_cli_bench.csv";
  std::filesystem::remove(path);
  const CliResult r = run({"bench", "--case", "mv_f", "--wrt", "0", "--iters", "1000", "--impl", "staged,hand", "--out",
                     path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "case,params,impl,iters,elapsed_ms,checksum,staged");
  EXPECT_EQ(row1.rfind("mv_f,wrt=0,staged,1000,", 0), 0u);
  EXPECT_EQ(row1.substr(row1.size() - 5), ",true");
  EXPECT_EQ(row2.rfind("mv_f,wrt=0,hand,1000,", 0), 0u);
  std::filesystem::remove(path);
}

TEST(Cli, BenchAllSkipsUnsupported) {
  const auto path = std::filesystem::temp_directory_path() / "stagediff_cli_all.csv";
  std::filesystem::remove(path);
  const CliResult r = run({"bench", "--case", "sumexp_order", "--order", "2", "--iters", "100", "--out", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("skipping dual"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, GenTime) {
  const CliResult r = run({"gen-time", "--case", "sumexp_terms", "--n-list", "10,20", "--repeats", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("n,elapsed_ms,result_nodes\n10,", 0), 0u);
  EXPECT_NE(r.out.find("\n20,"), std::string::npos);
}
