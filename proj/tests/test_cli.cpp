#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adaptgap/cli.hpp"

using adaptgap::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data_section(const std::string& text) {
  std::istringstream in(text);
  std::string line, data;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') data += line + '\n';
  }
  return data;
}

}  // namespace

TEST_CASE("estimate is deterministic and echoes its parameters") {
  const std::vector<std::string> args{"estimate", "--family", "mu2", "--alg", "a2", "--n1", "64",
                                      "--n2", "64", "--p", "2", "--u", "2", "--n", "1024",
                                      "--seed", "7"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# seed=7") != std::string::npos);
  CHECK(a.out.find("# n=1024") != std::string::npos);
  CHECK(a.out.find("card,1024") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({"estimate", "--n1", "x"}).code == 2);
  CHECK(invoke({"estimate", "--p", "0.5"}).code == 2);
  CHECK(invoke({"rates", "--regime", "nope"}).code == 2);
  CHECK(invoke({"estimate", "--alg", "a3", "--n", "10", "--n1", "64", "--p", "1", "--u", "inf"})
            .code == 3);
  CHECK(invoke({"estimate", "--family", "mu4", "--u", "2.0", "--alg", "a3"}).code == 3);
  const auto gap = invoke({"gap", "--c3", "0.1", "--budgets", "64", "--trials", "5"});
  CHECK(gap.code == 3);
  CHECK(gap.err.find("regime") != std::string::npos);
  CHECK(gap.out.empty());
  CHECK(invoke({"norm-est", "--u", "2", "--v", "2"}).code == 3);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("estimate reads a matrix file") {
  const std::string path = "cli_matrix_input.txt";
  {
    std::ofstream f(path);
    f << "2 3\n1 2 3\n4 5 6\n";
  }
  const auto r = invoke({"estimate", "--input", path, "--alg", "a3", "--p", "1", "--u", "inf",
                         "--n", "4", "--m", "2"});
  std::remove(path.c_str());
  CHECK(r.code == 0);
  CHECK(r.out.find("true_mean,3.5") != std::string::npos);
  CHECK(r.out.find("stage1_card,8") != std::string::npos);
  CHECK(invoke({"estimate", "--input", "does-not-exist.txt"}).code == 2);
}

TEST_CASE("seed resolution and output redirection") {
  const std::vector<std::string> args{"norm-est", "--budgets", "16,32,64,128", "--trials", "20"};
  const auto fixed = invoke(args);
  CHECK(fixed.out.find("# seed=" + std::to_string(adaptgap::cli::kDefaultSeed)) !=
        std::string::npos);
  ::setenv("ADAPTGAP_SEED", "42", 1);
  const auto env = invoke(args);
  auto explicit_seed = args;
  explicit_seed.insert(explicit_seed.end(), {"--seed", "43"});
  const auto flag = invoke(explicit_seed);
  ::unsetenv("ADAPTGAP_SEED");
  CHECK(env.out.find("# seed=42") != std::string::npos);
  CHECK(flag.out.find("# seed=43") != std::string::npos);

  const std::string path = "cli_out.tsv";
  auto to_file = args;
  to_file.insert(to_file.end(), {"--out", path, "--format", "tsv"});
  CHECK(invoke(to_file).out.empty());
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  std::remove(path.c_str());
  CHECK(content.str().find("family\testimator") != std::string::npos);
}

TEST_CASE("data section does not depend on workers") {
  for (const std::vector<std::string>& base :
       {std::vector<std::string>{"gap", "--budgets", "256,1024", "--c3", "5", "--trials", "12"},
        std::vector<std::string>{"ds", "--k0", "3,4", "--trials", "10"},
        std::vector<std::string>{"rates", "--regime", "p-lt-u-le-2", "--trials", "10"}}) {
    auto one = base, four = base;
    one.insert(one.end(), {"--workers", "1"});
    four.insert(four.end(), {"--workers", "4"});
    const auto a = invoke(one), b = invoke(four);
    CHECK(a.code == 0);
    CHECK(data_section(a.out) == data_section(b.out));
    CHECK_FALSE(data_section(a.out).empty());
  }
}
