#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using coh::test::data_path;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = coh::cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, RunPrintsTheAnswer) {
  auto r = run({"run", "--fuel", "1000", data_path("twice.eff")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "121\n");
  EXPECT_EQ(run({"run", data_path("nested.eff")}).out, "10\n");
  EXPECT_EQ(run({"run", "--fuel", "10", "-e", "(fix f x. f x) 1"}).code, coh::cli::kInconclusive);
  EXPECT_EQ(run({"run", "-e", "S0 k. 1"}).code, coh::cli::kTypeError);
}

TEST(Cli, EvalPrintsCounts) {
  auto r = run({"eval", "--fuel", "100", data_path("apply_top.tgt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "() (beta=2, iota=3)\n");
  auto t = run({"eval", "--trace", "-e", "[id o id]1"});
  EXPECT_EQ(t.out, "  iota comp [id][id]1\n  iota id [id]1\n  iota id 1\n1 (beta=0, iota=3)\n");
  EXPECT_EQ(run({"eval", "--fuel", "5", "-e", "(fix f x. f x) 1"}).code, coh::cli::kInconclusive);
}

TEST(Cli, CheckRejectsShiftAtPureType) {
  auto r = run({"check", "--calculus", "eff", "--type", "nat", "-e", "S0 k. 1"});
  EXPECT_EQ(r.code, coh::cli::kTypeError);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, CheckPrintsSkeleton) {
  auto r = run({"check", "-c", "eff", "-t", "nat", "--env", data_path("reset.env"), data_path("reset.eff")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, coh::test::data_file("reset.drv"));
}

TEST(Cli, TranslateSuppliedDerivation) {
  auto r = run({"translate", "-c", "eff", "-t", "[nat, nat, nat]", "--derivation", data_path("loop_d2.drv"),
                data_path("loop.eff")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "\\k. [lift id](fix f x. f x) (\\g. [lift id]1 (\\y. g y k))\n");
  auto bad = run({"translate", "-t", "nat", "--derivation", data_path("apply_top.drv"), data_path("apply_top.stlc")});
  EXPECT_EQ(bad.code, coh::cli::kTypeError);
}

TEST(Cli, DeriveListsSkeletons) {
  auto r = run({"derive", "-c", "eff", "-t", "[nat,nat,nat]", "--budget", "2", "-e", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "(T-Sub (T-Const) (S-Lift (S-Refl)))");
  EXPECT_GE(std::count(r.out.begin(), r.out.end(), '\n'), 2);
}

TEST(Cli, Erase) {
  auto r = run({"erase", "-e", "[lift id]1"});
  EXPECT_EQ(r.out, "(\\a. \\k. (\\a. a) (k a)) 1\n");
}

TEST(Cli, CohereIsDeterministic) {
  std::vector<std::string> args{"cohere", "-c", "eff", "--type", "[nat,nat,nat]", "--seed", "3", "--contexts", "3",
                                "--fuel", "2000", data_path("loop.eff")};
  auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("summary: Coherent"), std::string::npos);
  args.push_back("--json");
  auto j = run(args);
  EXPECT_NE(j.out.find("\"summary\": \"Coherent\""), std::string::npos);
}

TEST(Cli, CohereWithSuppliedDerivations) {
  auto r = run({"cohere", "-t", "((nat -> top) -> nat -> nat) -> nat -> nat", "--derivation",
                data_path("fixpoint_d1.drv"), "--derivation", data_path("fixpoint_d2.drv"),
                data_path("fixpoint.stlc")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("derivation 1:"), std::string::npos);
}

TEST(Cli, ParseAndUsageErrors) {
  EXPECT_EQ(run({"check", "-t", "nat", "-e", "(\\x. x"}).code, coh::cli::kParseError);
  EXPECT_EQ(run({"check", "-t", "nat -> ", "-e", "1"}).code, coh::cli::kParseError);
  EXPECT_EQ(run({"frobnicate"}).code, coh::cli::kParseError);
  EXPECT_EQ(run({"check", "-e", "1"}).code, coh::cli::kParseError);
  EXPECT_EQ(run({"check", "-c", "lisp", "-t", "nat", "-e", "1"}).code, coh::cli::kParseError);
  EXPECT_EQ(run({"eval", "/nonexistent/file"}).code, coh::cli::kParseError);
  EXPECT_EQ(run({"cohere", "-t", "nat", "--contexts", "0", "-e", "1"}).code, coh::cli::kParseError);
}

TEST(Cli, Help) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("cohere"), std::string::npos);
}
