#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(EQNORM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = fs::temp_directory_path() / ("eqnorm_cli_" + name + ".cfg");
  std::ofstream(p) << text;
  return p;
}

const char* kGood =
    "model = spins\nspins.n = 4\nwindow.e = -1\nwindow.delta_e = 2\n"
    "observable.name = sx_total\nobservable.scale = 2\ndynamics.n_points = 20\n";

TEST(Cli, SuccessExitsZero) {
  const auto out = fs::temp_directory_path() / "eqnorm_cli_ok";
  fs::remove_all(out);
  const auto cfg = write_config("good", kGood);
  EXPECT_EQ(run("run " + cfg.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "timeseries.csv"));
  EXPECT_EQ(run("certify " + cfg.string() + " --out " + out.string() + " --seed 5"), 0);
  fs::remove_all(out);
}

TEST(Cli, BadInputExitsTwo) {
  const auto out = fs::temp_directory_path() / "eqnorm_cli_bad";
  const auto bad = write_config("bad", "model = spins\nnot an assignment\n");
  EXPECT_EQ(run("run " + bad.string() + " --out " + out.string()), 2);
  const auto empty = write_config(
      "empty", "model = spins\nspins.n = 4\nwindow.e = 40\nwindow.delta_e = 1\n"
               "observable.name = sx_total\nobservable.scale = 2\n");
  EXPECT_EQ(run("certify " + empty.string() + " --out " + out.string()), 2);
  EXPECT_EQ(run("run /nonexistent/config.cfg --out " + out.string()), 2);
  EXPECT_EQ(run("scan nonsense " + bad.string()), 2);
  EXPECT_EQ(run(""), 2);
  const auto good = write_config("good2", kGood);
  EXPECT_EQ(run("certify " + good.string() + " --out /proc/eqnorm_unwritable"), 1);
  fs::remove_all(out);
}

}  // namespace
