#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

std::string g_dir;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string out_path = g_dir + "/out" + std::to_string(counter++) + ".txt";
  std::string cmd = std::string(RADS_CLI_PATH) + " " + args + " >" + out_path + " 2>&1";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

struct Setup {
  Setup() {
    g_dir = (std::filesystem::temp_directory_path() / "rads_cli_tests").string();
    std::filesystem::remove_all(g_dir);
    std::filesystem::create_directories(g_dir);
    write_file(g_dir + "/pstar.pat",
               "0 1\n0 2\n0 7\n0 8\n0 9\n1 3\n1 4\n2 5\n2 6\n1 2\n3 4\n4 5\n5 6\n8 9\n");
    write_file(g_dir + "/triangle.pat", "0 1\n1 2\n2 0\n");
    write_file(g_dir + "/k4.adj", "0 1 2 3\n1 0 2 3\n2 0 1 3\n3 0 1 2\n");
    write_file(g_dir + "/open.adj", "0 1 3\n1 0\n3 0\n");
    write_file(g_dir + "/bad.pat", "0 1\n2 3\n");
  }
};
Setup g_setup;

}  // namespace

TEST_CASE("plan prints the selected plan with its scores") {
  auto r = run_cli("plan --pattern " + g_dir + "/pstar.pat");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("unit 0: piv=0") != std::string::npos);
  CHECK(r.out.find("unit 2:") != std::string::npos);
  CHECK(r.out.find("score: 3.16667") != std::string::npos);
  CHECK(r.out.find("matching order: 0 1 2 8 9 7 3 4 5 6") != std::string::npos);

  auto tri = run_cli("plan --pattern " + g_dir + "/triangle.pat");
  CHECK(tri.exit_code == 0);
  CHECK(tri.out.find("unit 0:") != std::string::npos);
  CHECK(tri.out.find("unit 1:") == std::string::npos);

  auto bad = run_cli("plan --pattern " + g_dir + "/bad.pat");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("oracle counts and streams") {
  auto r = run_cli("oracle --pattern " + g_dir + "/triangle.pat --graph " + g_dir + "/k4.adj");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "4\n");

  auto res = run_cli("oracle --pattern " + g_dir + "/triangle.pat --graph " + g_dir +
                     "/k4.adj --emit results");
  CHECK(res.exit_code == 0);
  std::set<std::string> lines;
  std::istringstream in(res.out);
  std::string line;
  while (std::getline(in, line)) lines.insert(line);
  CHECK(lines == std::set<std::string>{"0 1 2", "0 1 3", "0 2 3", "1 2 3"});
}

TEST_CASE("partition then run matches the oracle") {
  auto part = run_cli("partition --graph " + g_dir + "/k4.adj --machines 2 --out " + g_dir +
                      "/parts_k4");
  CHECK(part.exit_code == 0);

  auto run = run_cli("run --pattern " + g_dir + "/triangle.pat --parts " + g_dir + "/parts_k4");
  CHECK(run.exit_code == 0);
  CHECK(run.out.find("4\n") != std::string::npos);

  auto res = run_cli("run --pattern " + g_dir + "/triangle.pat --parts " + g_dir +
                     "/parts_k4 --emit results");
  CHECK(res.exit_code == 0);
  std::set<std::string> lines;
  std::istringstream in(res.out);
  std::string line;
  while (std::getline(in, line)) lines.insert(line);
  CHECK(lines == std::set<std::string>{"0 1 2", "0 1 3", "0 2 3", "1 2 3"});

  auto json = run_cli("run --pattern " + g_dir + "/triangle.pat --parts " + g_dir +
                      "/parts_k4 --json");
  CHECK(json.exit_code == 0);
  CHECK(json.out.find("\"total\": 4") != std::string::npos);
  CHECK(json.out.find("\"workers\"") != std::string::npos);
}

TEST_CASE("partition with a mismatched metis file fails with a usage error") {
  write_file(g_dir + "/short.metis", "0\n1\n");
  auto r = run_cli("partition --graph " + g_dir + "/k4.adj --machines 2 --metis " + g_dir +
                   "/short.metis --out " + g_dir + "/parts_bad");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("LengthMismatch") != std::string::npos);
}

TEST_CASE("verify agrees with the oracle and exposes the fault hook") {
  auto ok = run_cli("verify --pattern " + g_dir + "/triangle.pat --graph " + g_dir +
                    "/k4.adj --machines 2");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("OK") != std::string::npos);

  auto rnd = run_cli("verify --pattern " + g_dir + "/pstar.pat --random-n 40 "
                     "--random-avg-deg 8 --seed 5 --machines 3");
  CHECK(rnd.exit_code == 0);

  // one undetermined edge that is actually absent: skipping verification
  // overcounts and the harness reports the mismatch
  auto fault = run_cli("verify --pattern " + g_dir + "/triangle.pat --graph " + g_dir +
                       "/open.adj --machines 2 --fault-skip-verify");
  CHECK(fault.exit_code == 1);
  CHECK(fault.out.find("MISMATCH") != std::string::npos);

  auto honest = run_cli("verify --pattern " + g_dir + "/triangle.pat --graph " + g_dir +
                        "/open.adj --machines 2");
  CHECK(honest.exit_code == 0);

  // single machine is the pure SM-E path
  auto solo = run_cli("verify --pattern " + g_dir + "/triangle.pat --graph " + g_dir +
                      "/k4.adj --machines 1");
  CHECK(solo.exit_code == 0);
}

TEST_CASE("usage errors exit with 2") {
  auto r = run_cli("run --parts nowhere");
  CHECK(r.exit_code == 2);
  auto unknown = run_cli("frobnicate");
  CHECK(unknown.exit_code != 0);
}

TEST_CASE("tcp workers split the job across processes") {
  auto part = run_cli("partition --graph " + g_dir + "/k4.adj --machines 2 --out " + g_dir +
                      "/parts_tcp");
  REQUIRE(part.exit_code == 0);
  write_file(g_dir + "/hosts.txt", "0 127.0.0.1:39211\n1 127.0.0.1:39212\n");

  std::string base = std::string(RADS_CLI_PATH) + " run --pattern " + g_dir +
                     "/triangle.pat --parts " + g_dir + "/parts_tcp --transport tcp --hosts " +
                     g_dir + "/hosts.txt";
  std::string cmd = "(" + base + " --worker-id 0 >" + g_dir + "/w0.txt 2>&1 & " + base +
                    " --worker-id 1 >" + g_dir + "/w1.txt 2>&1; wait)";
  int status = std::system(cmd.c_str());
  CHECK(WIFEXITED(status));

  std::uint64_t total = 0;
  for (int t = 0; t < 2; ++t) {
    std::istringstream in(slurp(g_dir + "/parts_tcp/count." + std::to_string(t)));
    std::uint64_t c = 0;
    in >> c;
    total += c;
  }
  CHECK(total == 4);
}
