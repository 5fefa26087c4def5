#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / ("umbilic_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" UMBILIC_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

}  // namespace

TEST(Cli, FieldsList) {
  const fs::path out = scratch() / "fields.csv";
  ASSERT_EQ(run("fields list --out " + out.string()), 0);
  const auto lines = data_lines(slurp(out));
  ASSERT_GE(lines.size(), 13u);
  EXPECT_EQ(lines[0].rfind("name,formula", 0), 0u);
}

TEST(Cli, VerifyThm2Table) {
  const fs::path out = scratch() / "t2.csv";
  ASSERT_EQ(run("verify thm2 --field asym_bump --X 0 --Y 1.5708 --radii 2,4,8 --out " + out.string()), 0);
  const std::string text = slurp(out);
  const auto lines = data_lines(text);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "r,I_area,I_flux,majorant");
  EXPECT_EQ(lines[1].rfind("2,", 0), 0u);
  EXPECT_NE(text.find("# quantity:"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("invert graph --field sphere_cap --r0 0.9"), 3);
  EXPECT_EQ(run("invert graph --field sphere_cap --r0 0.7"), 0);
  EXPECT_EQ(run("pipeline thm1 --body axial:eps=0.3"), 3);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("verify"), 1);
  EXPECT_EQ(run("verify thm2 --nope 1"), 1);
  EXPECT_EQ(run("verify thm2 --radii 4,2"), 1);
  EXPECT_EQ(run("curvature map --field nope"), 1);
  EXPECT_EQ(run("curvature map --region 1,0,0,1"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, ConfigFileAndOverride) {
  const fs::path dir = scratch();
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# bundle\nfield = gaussian_bump\nradii=1,2,3\n";
  }
  const fs::path a = dir / "a.csv", b = dir / "b.csv";
  ASSERT_EQ(run("decay --config " + (dir / "run.cfg").string() + " --out " + a.string()), 0);
  EXPECT_EQ(data_lines(slurp(a)).size(), 4u);
  ASSERT_EQ(run("--config " + (dir / "run.cfg").string() + " decay --radii 5 --out " + b.string()), 0);
  const auto lines = data_lines(slurp(b));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1].rfind("5,", 0), 0u);
  EXPECT_EQ(run("decay --config " + (dir / "missing.cfg").string()), 1);
}

TEST(Cli, SvgOutput) {
  const fs::path dir = scratch();
  ASSERT_EQ(run("contour --n 31 --out " + (dir / "c.csv").string() + " --svg " + (dir / "c.svg").string()), 0);
  const std::string svg = slurp(dir / "c.svg");
  EXPECT_NE(svg.find("<path d=\"M"), std::string::npos);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
}

TEST(Cli, ThreadCountDoesNotChangeBytes) {
  const fs::path dir = scratch();
  for (const std::string cmd : {"curvature map --n 61", "umbilic scan", "verify thm3 --radii 2,4"}) {
    ASSERT_EQ(run(cmd + " --out " + (dir / "t1.csv").string(), "UMBILIC_THREADS=1"), 0);
    ASSERT_EQ(run(cmd + " --out " + (dir / "t4.csv").string(), "UMBILIC_THREADS=4"), 0);
    EXPECT_EQ(slurp(dir / "t1.csv"), slurp(dir / "t4.csv")) << cmd;
  }
}
