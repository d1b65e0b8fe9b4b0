#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("hsda_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  std::string write(const std::string& file, const std::string& text) const {
    const fs::path p = dir / file;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& file) const { return (dir / file).string(); }
};

int run(const std::string& args, const Scratch& s) {
  const std::string cmd = std::string(HSDA_CLI_PATH) + " " + args + " > " + s.path("stdout.txt") + " 2> " +
                          s.path("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, SolveWritesTraceAndSummary) {
  Scratch s("solve");
  const auto cfg = s.write("a.cfg", "problem.name=wtoy\nalgorithm.name=hsda\nalgorithm.eps=3e-3\n");
  EXPECT_EQ(run("solve --config " + cfg + " --out " + s.path("out"), s), 0) << slurp(s.path("stderr.txt"));
  EXPECT_TRUE(fs::exists(s.path("out/wtoy_hsda.csv")));
  EXPECT_TRUE(fs::exists(s.path("out/wtoy_hsda.json")));
  EXPECT_NE(slurp(s.path("stdout.txt")).find("v_threshold"), std::string::npos);
}

TEST(Cli, SeveralConfigsRunTogether) {
  Scratch s("multi");
  const auto a = s.write("a.cfg", "algorithm.name=hsda\nalgorithm.eps=3e-3\n");
  const auto b = s.write("b.cfg", "algorithm.name=ihsda\nalgorithm.eps=3e-3\n");
  const auto c = s.write("c.cfg", "algorithm.name=gda\n");
  EXPECT_EQ(run("solve --config " + a + " --config " + b + " --config " + c + " --out " + s.path("out"), s), 0)
      << slurp(s.path("stderr.txt"));
  for (const char* name : {"wtoy_hsda", "wtoy_ihsda", "wtoy_gda"}) {
    EXPECT_TRUE(fs::exists(s.path(std::string("out/") + name + ".csv"))) << name;
  }
  EXPECT_EQ(run("compare --out " + s.path("merged.csv") + " " + s.path("out/wtoy_hsda.csv") + " " +
                    s.path("out/wtoy_ihsda.csv") + " " + s.path("out/wtoy_gda.csv"),
                s),
            0)
      << slurp(s.path("stderr.txt"));
  const std::string merged = slurp(s.path("merged.csv"));
  EXPECT_EQ(merged.rfind("t,hsda.f_gap", 0), 0u);
  EXPECT_NE(merged.find("gda.wall_ms"), std::string::npos);
}

TEST(Cli, SetOverridesAndSeed) {
  Scratch s("set");
  const auto cfg = s.write("q.cfg", "problem.name=quadratic\nproblem.n=4\nproblem.m=2\ninit.x=random\n");
  EXPECT_EQ(run("solve --config " + cfg + " --set algorithm.max_outer=3 --set output.name=q --seed 5 --out " +
                    s.path("out"),
                s),
            0)
      << slurp(s.path("stderr.txt"));
  const std::string js = slurp(s.path("out/q.json"));
  EXPECT_NE(js.find("\"seed\": \"5\""), std::string::npos);
  EXPECT_NE(js.find("\"algorithm.max_outer\": \"3\""), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  Scratch s("bad");
  const auto bad = s.write("bad.cfg", "problem.name=wtoy\nalgorithm.nonsense=1\n");
  EXPECT_EQ(run("solve --config " + bad + " --out " + s.path("out"), s), 2);
  EXPECT_EQ(run("solve --config " + s.path("missing.cfg") + " --out " + s.path("out"), s), 2);
  const auto ok = s.write("ok.cfg", "algorithm.max_outer=1\n");
  EXPECT_EQ(run("solve --config " + ok + " --config " + ok + " --out " + s.path("out"), s), 2);
  EXPECT_EQ(run("solve --config " + ok + " --set algorithm.eps=7 --out " + s.path("out"), s), 2);
  EXPECT_EQ(run("", s), 2);
  EXPECT_EQ(run("solve --out " + s.path("out"), s), 2);
  EXPECT_EQ(run("compare --out " + s.path("m.csv") + " " + s.path("out/none.csv"), s), 2);
}

TEST(Cli, MismatchedProblemsExitTwo) {
  Scratch s("mismatch");
  const auto a = s.write("a.cfg", "algorithm.max_outer=2\noutput.name=a\n");
  const auto b = s.write("b.cfg", "algorithm.max_outer=2\nproblem.L_w=4\noutput.name=b\n");
  ASSERT_EQ(run("solve --config " + a + " --config " + b + " --out " + s.path("out"), s), 0);
  EXPECT_EQ(run("compare --out " + s.path("m.csv") + " " + s.path("out/a.csv") + " " + s.path("out/b.csv"), s), 2);
  EXPECT_NE(slurp(s.path("stderr.txt")).find("mismatched"), std::string::npos);
}

TEST(Cli, DriverFailureExitThree) {
  Scratch s("driver");
  const auto cfg = s.write("g.cfg", "algorithm.name=gda\nalgorithm.step_y=100\n");
  EXPECT_EQ(run("solve --config " + cfg + " --out " + s.path("out"), s), 3);
  EXPECT_TRUE(fs::exists(s.path("out/wtoy_gda.json")));
}

TEST(Cli, FdCheckReport) {
  Scratch s("fd");
  EXPECT_EQ(run("fdcheck --problem wtoy --points 5", s), 0) << slurp(s.path("stderr.txt"));
  EXPECT_NE(slurp(s.path("stdout.txt")).find("max_grad_err"), std::string::npos);
  EXPECT_EQ(run("fdcheck --problem robust_regression --points 2", s), 2);
  EXPECT_EQ(run("fdcheck --problem wtoy --step 0", s), 2);
}

TEST(Cli, HelpExitsZero) {
  Scratch s("help");
  EXPECT_EQ(run("--help", s), 0);
  EXPECT_NE(slurp(s.path("stdout.txt")).find("solve"), std::string::npos);
}

}  // namespace
