#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stagediff/bench.hpp"

using namespace stagediff;

namespace {

std::filesystem::path temp_csv(const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() / ("stagediff_" + name + ".csv");
  std::filesystem::remove(path);
  return path;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST(Bench, StagedSumExpOrderOne) {
  BenchCase c;
  c.kind = CaseKind::SumExpOrder;
  c.order = 1;
  c.iters = 1'000'000;
  const BenchResult r = run_benchmark(c, Impl::Staged);
  EXPECT_TRUE(r.staged);
  EXPECT_TRUE(std::isfinite(r.checksum));
  EXPECT_GE(r.elapsed_ms, 0.0);
  EXPECT_EQ(r.case_name, "sumexp_order");
  EXPECT_EQ(r.params, "N=1");
  EXPECT_EQ(r.iters, 1'000'000u);
}

TEST(Bench, ChecksumFollowsLoopDefinition) {
  BenchCase c;
  c.kind = CaseKind::SumExpTerms;
  c.terms = 2;
  c.iters = 1000;
  const BenchResult r = run_benchmark(c, Impl::Staged);
  double x0 = 0.0, sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    x0 -= 0.1;
    sum += std::exp(x0) + 2.0 * std::exp(2.0 * x0);
  }
  EXPECT_EQ(std::bit_cast<std::uint64_t>(r.checksum), std::bit_cast<std::uint64_t>(sum));
}

TEST(Bench, StagedAndHandAgreeBitwise) {
  for (CaseKind kind : {CaseKind::MvF, CaseKind::MvG}) {
    for (unsigned wrt = 0; wrt < 4; ++wrt) {
      BenchCase c;
      c.kind = kind;
      c.wrt = wrt;
      c.iters = 10'000;
      BenchRunner runner(c);
      const BenchResult s = runner.run(Impl::Staged);
      const BenchResult h = runner.run(Impl::Hand);
      EXPECT_EQ(std::bit_cast<std::uint64_t>(s.checksum), std::bit_cast<std::uint64_t>(h.checksum))
          << to_string(kind) << " wrt " << wrt;
      EXPECT_TRUE(checksums_agree(s, h));
    }
  }
}

TEST(Bench, AllImplementationsAgreeOnGradients) {
  for (CaseKind kind : {CaseKind::Nehmeier1, CaseKind::Nehmeier2, CaseKind::Nehmeier3}) {
    BenchCase c;
    c.kind = kind;
    c.iters = 10'000;
    BenchRunner runner(c);
    ASSERT_EQ(runner.derivatives().size(), 2u);
    const BenchResult s = runner.run(Impl::Staged);
    for (Impl impl : {Impl::Hand, Impl::Interpreted, Impl::Dual}) {
      EXPECT_TRUE(checksums_agree(s, runner.run(impl))) << to_string(kind) << ' ' << to_string(impl);
    }
    EXPECT_TRUE(checksums_agree(s, runner.run(Impl::Fd), 1e-5)) << to_string(kind);
  }
}

TEST(Bench, HigherOrderHandAndStaged) {
  for (unsigned n : {2u, 7u, 15u}) {
    BenchCase c;
    c.kind = CaseKind::SumExpOrder;
    c.order = n;
    c.iters = 1000;
    BenchRunner runner(c);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(runner.run(Impl::Staged).checksum),
              std::bit_cast<std::uint64_t>(runner.run(Impl::Hand).checksum))
        << n;
  }
}

TEST(Bench, UnsupportedCombinations) {
  BenchCase c;
  c.kind = CaseKind::SumExpOrder;
  c.order = 3;
  c.iters = 10;
  BenchRunner runner(c);
  EXPECT_FALSE(runner.supports(Impl::Dual));
  EXPECT_FALSE(runner.supports(Impl::Fd));
  EXPECT_TRUE(runner.supports(Impl::Interpreted));
  EXPECT_THROW(runner.run(Impl::Dual), UnsupportedBenchmark);

  c.order = 12;
  EXPECT_FALSE(BenchRunner(c).supports(Impl::Interpreted));
}

TEST(Bench, Validation) {
  BenchCase c;
  c.iters = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.iters = 1;
  c.order = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.order = 40;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = BenchCase{};
  c.kind = CaseKind::MvF;
  c.wrt = 4;
  EXPECT_THROW(BenchRunner{c}, std::invalid_argument);
  c = BenchCase{};
  c.kind = CaseKind::SumExpTerms;
  c.terms = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Bench, Names) {
  EXPECT_EQ(parse_case("nehmeier2"), CaseKind::Nehmeier2);
  EXPECT_EQ(parse_case("rosenbrock"), std::nullopt);
  EXPECT_EQ(parse_impl("fd"), Impl::Fd);
  EXPECT_EQ(parse_impl("adolc"), std::nullopt);
  for (Impl i : kAllImpls) EXPECT_EQ(parse_impl(to_string(i)), i);
  BenchCase c;
  c.kind = CaseKind::SumExpTerms;
  c.terms = 20;
  EXPECT_EQ(params_string(c), "n=20");
  c.kind = CaseKind::MvG;
  c.wrt = 2;
  EXPECT_EQ(params_string(c), "wrt=2");
  c.kind = CaseKind::Nehmeier1;
  EXPECT_EQ(params_string(c), "grad");
}

TEST(Csv, HeaderWrittenOnce) {
  const auto path = temp_csv("header");
  BenchResult r;
  r.case_name = "mv_f";
  r.params = "wrt=0";
  r.impl = Impl::Hand;
  r.iters = 10;
  r.elapsed_ms = 1.5;
  r.checksum = 2.25;
  append_csv(path, std::span(&r, 1));
  append_csv(path, std::span(&r, 1));
  const auto lines = read_lines(path);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "case,params,impl,iters,elapsed_ms,checksum,staged");
  EXPECT_EQ(lines[1], "mv_f,wrt=0,hand,10,1.5,2.25,false");
  EXPECT_EQ(lines[2], lines[1]);
  std::filesystem::remove(path);
}

TEST(Csv, ChecksumPrintedExactly) {
  BenchResult r;
  r.case_name = "c";
  r.params = "N=1";
  r.checksum = 0.1 + 0.2;
  r.staged = true;
  EXPECT_EQ(to_csv_row(r), "c,N=1,staged,0,0,0.30000000000000004,true");
}

TEST(GenTime, ProducesOneSamplePerN) {
  const unsigned ns[] = {5, 10};
  const auto samples = measure_generation_time(ns, 1);
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].terms, 5u);
  EXPECT_GT(samples[1].result_nodes, samples[0].result_nodes);
  EXPECT_GT(samples[0].elapsed_ms, 0.0);
}
