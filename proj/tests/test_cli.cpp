// Copyright 2026 The nmrev Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(NMREV_CLI_PATH) + " " + args + " 2>&1";
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  const int status = pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  const std::string s = slurp(p);
  return s.substr(0, s.find('\n'));
}

std::string config(const std::string& name) { return std::string(NMREV_CONFIG_DIR) + "/" + name; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nmrev_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, TrackingWritesTables) {
  const CliResult r = run_cli("--config " + config("track_steady.cfg") + " --grid 2000 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("min_fidelity = "), std::string::npos);
  EXPECT_EQ(first_line(dir_ / "states.csv"), "t,r_x,r_y,r_z,fidelity");
  EXPECT_EQ(first_line(dir_ / "controls.csv"), "t,omega_x,omega_y,n");
  EXPECT_EQ(first_line(dir_ / "env.csv"), "t,gamma0,s0");
  std::ifstream in(dir_ / "states.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2001);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const fs::path a = dir_ / "a", b = dir_ / "b";
  const std::string base = "--config " + config("invert_pure.cfg") + " --grid 1000 --out ";
  ASSERT_EQ(run_cli(base + a.string()).code, 0);
  ASSERT_EQ(run_cli(base + b.string()).code, 0);
  for (const char* f : {"states.csv", "controls.csv", "env.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST_F(CliTest, OverridesApply) {
  const CliResult r = run_cli("--config " + config("track_steady.cfg") + " --override t_final=2 --override grid=100 --out " +
                              dir_.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("t_final = 2\n"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "states.csv").find("\n2,"), std::string::npos);
}

TEST_F(CliTest, EnvScanWritesOneFilePerWidth) {
  const CliResult r = run_cli("--config " + config("env_scan.cfg") + " --grid 100 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* l : {"0.1", "0.5", "2", "10", "20"}) {
    EXPECT_TRUE(fs::exists(dir_ / ("env_lambda_" + std::string(l) + ".csv"))) << l;
  }
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run_cli("--out " + dir_.string()).code, 2);
  EXPECT_EQ(run_cli("--config /nonexistent.cfg").code, 2);
  EXPECT_EQ(run_cli("--config " + config("track_steady.cfg") + " --override lambda=-1 --out " + dir_.string()).code, 2);
  EXPECT_EQ(run_cli("--config " + config("track_steady.cfg") + " --override bogus=1 --out " + dir_.string()).code, 2);
  EXPECT_EQ(run_cli("--no-such-flag").code, 2);
  EXPECT_FALSE(fs::exists(dir_));
}

TEST_F(CliTest, NumericalFailureLeavesNoFiles) {
  // A fixed detuning leaves s0(t_f / 2) != 0, so the r_z = 0 crossing cannot be regularized.
  const CliResult r = run_cli("--config " + config("invert_pure.cfg") + " --override drive_detuning=0.1 --grid 1000 --out " +
                              dir_.string());
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_NE(r.output.find("non-removable"), std::string::npos);
  for (const char* f : {"states.csv", "controls.csv", "env.csv", "states.csv.tmp"}) EXPECT_FALSE(fs::exists(dir_ / f));
}

TEST_F(CliTest, SelfcheckPassesAndDetectsFault) {
  const CliResult ok = run_cli("--selfcheck");
  EXPECT_EQ(ok.code, 0) << ok.output;
  EXPECT_EQ(ok.output.find("FAIL"), std::string::npos);
  const CliResult bad = run_cli("--selfcheck --inject-fault");
  EXPECT_EQ(bad.code, 1) << bad.output;
  EXPECT_NE(bad.output.find("FAIL liouvillian-equivalence"), std::string::npos);
}
