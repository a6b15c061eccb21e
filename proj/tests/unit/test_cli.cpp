#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "divnorm/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = divnorm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("divnorm-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string value_of(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return "<missing>";
}

}  // namespace

TEST_CASE("generate") {
  const auto r = invoke({"generate", "--kind", "periodic", "--pattern", "0", "--length", "5"});
  CHECK(r.code == 0);
  CHECK(r.out == "#alphabet:01\n00000\n");
  const auto c = invoke({"generate", "--kind", "champernowne", "--length", "10"});
  CHECK(c.out == "#alphabet:01\n1101110010\n");
  const auto d = invoke({"generate", "--kind", "debruijn", "--order", "3", "--length", "8"});
  CHECK(d.out == "#alphabet:01\n00010111\n");
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(invoke({"--help"}).code == divnorm::cli::kExitOk);
  CHECK(invoke({"analyze", "--bogus"}).code == divnorm::cli::kExitUsage);
  CHECK(invoke({}).code == divnorm::cli::kExitUsage);

  spit(dir.file("bad.txt"), "#alphabet:01\n0102\n");
  const auto bad = invoke({"analyze", "--input", dir.file("bad.txt"), "--no-timestamp"});
  CHECK(bad.code == divnorm::cli::kExitMalformed);
  CHECK(bad.err.find("byte offset") != std::string::npos);

  spit(dir.file("ok.txt"), "#alphabet:01\n0101\n");
  CHECK(invoke({"analyze", "--input", dir.file("ok.txt"), "--alpha", "1/2,1/3"}).code ==
        divnorm::cli::kExitInvalidMath);
  CHECK(invoke({"analyze", "--input", dir.file("missing.txt")}).code == divnorm::cli::kExitIo);
  spit(dir.file("g.txt"), "not a gambler\n");
  CHECK(invoke({"simulate", "--input", dir.file("ok.txt"), "--gambler", dir.file("g.txt")}).code ==
        divnorm::cli::kExitMalformed);
}

TEST_CASE("analyze output is deterministic") {
  TempDir dir;
  const std::string seq = dir.file("s.txt");
  REQUIRE(invoke({"generate", "--kind", "iid", "--seed", "3", "--length", "20000", "--output", seq}).code == 0);
  const std::vector<std::string> args = {"analyze", "--input", seq, "--lmax", "3", "--epsilon", "0.05", "--no-timestamp"};
  auto a1 = args, a2 = args;
  a1.insert(a1.end(), {"--output", dir.file("p1.csv"), "--report", dir.file("r1.txt")});
  a2.insert(a2.end(), {"--output", dir.file("p2.csv"), "--report", dir.file("r2.txt"), "--parallel"});
  REQUIRE(invoke(a1).code == 0);
  REQUIRE(invoke(a2).code == 0);
  CHECK(slurp(dir.file("p1.csv")) == slurp(dir.file("p2.csv")));
  const std::string r1 = slurp(dir.file("r1.txt"));
  CHECK(value_of(r1, "verdict") == "normal");
  CHECK(r1.find("# timestamp=") == std::string::npos);

  const auto stamped = invoke({"analyze", "--input", seq, "--lmax", "1"});
  CHECK(stamped.out.find("# timestamp=") != std::string::npos);
}

TEST_CASE("periodic sequence is flagged") {
  TempDir dir;
  const std::string seq = dir.file("s.txt");
  REQUIRE(invoke({"generate", "--kind", "periodic", "--pattern", "01", "--length", "10000", "--output", seq}).code ==
          0);
  const auto r = invoke({"analyze", "--input", seq, "--lmax", "4", "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "verdict") == "non-normal");
  CHECK(value_of(r.out, "upper_divergence") == "1");
}

TEST_CASE("synthesize then simulate") {
  TempDir dir;
  const std::string seq = dir.file("s.txt");
  const std::string gam = dir.file("g.txt");
  REQUIRE(invoke({"generate", "--kind", "periodic", "--pattern", "01", "--length", "10000", "--output", seq}).code ==
          0);
  const auto y = invoke({"synthesize", "--input", seq, "--l", "2", "--output", gam, "--no-timestamp"});
  REQUIRE(y.code == 0);
  const auto s = invoke({"simulate", "--input", seq, "--gambler", gam, "--no-timestamp"});
  REQUIRE(s.code == 0);
  CHECK(value_of(s.out, "log2_capital") == "10000");
  CHECK(value_of(s.out, "bankrupt_at") == "none");

  const auto again = invoke({"simulate", "--input", seq, "--gambler", gam, "--no-timestamp"});
  CHECK(again.out == s.out);
}

TEST_CASE("failed runs leave no partial output") {
  TempDir dir;
  spit(dir.file("bad.txt"), "#alphabet:01\n" + std::string(100000, '0') + "2");
  const std::string out = dir.file("profile.csv");
  const auto r = invoke({"analyze", "--input", dir.file("bad.txt"), "--output", out, "--report", dir.file("r.txt")});
  CHECK(r.code == divnorm::cli::kExitMalformed);
  CHECK_FALSE(fs::exists(out));
  CHECK_FALSE(fs::exists(dir.file("r.txt")));
  for (const auto& entry : fs::directory_iterator(dir.file(""))) CHECK(entry.path().filename() == "bad.txt");
}

TEST_CASE("dimension of a periodic sequence") {
  TempDir dir;
  const std::string seq = dir.file("s.txt");
  REQUIRE(invoke({"generate", "--kind", "periodic", "--pattern", "01", "--length", "20000", "--output", seq}).code ==
          0);
  const auto d = invoke({"dimension", "--input", seq, "--lmax", "2", "--no-timestamp"});
  REQUIRE(d.code == 0);
  CHECK(value_of(d.out, "estimated_dim") == "0");
}
