#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsieve/cli.hpp"

using nlohmann::json;
namespace cli = dsieve::cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("constants gamma_chain exits 0") {
  const auto r = run({"constants", "--which", "gamma_chain"});
  CHECK(r.code == cli::kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j.is_object());
}

TEST_CASE("gsharp-scan csv: 1000 rows, nonincreasing running minimum") {
  const auto r = run({"gsharp-scan", "--limit", "1000", "--emit", "csv"});
  REQUIRE(r.code == cli::kExitOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 1001);
  CHECK(rows[0] == "z,g_sharp,ratio,running_min,argmin_so_far");
  double prev = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream is(rows[i]);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(is, field, ',')) f.push_back(field);
    REQUIRE(f.size() == 5);
    CHECK(std::stoull(f[0]) == i);
    const double rm = std::stod(f[3]);
    REQUIRE(rm <= prev);
    prev = rm;
  }
}

TEST_CASE("gsharp-scan json") {
  const auto r = run({"gsharp-scan", "--limit", "5000", "--min-from", "100"});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j.at("argmin") == 178);
  CHECK(j.at("fixed_point_consistent") == true);
  CHECK(j.at("min_ratio").get<double>() == doctest::Approx(0.30011452658544));
  CHECK(run({"gsharp-scan", "--limit", "5000", "--assert-min", "0.304"}).code == cli::kExitCheckFailed);
  CHECK(run({"gsharp-scan", "--limit", "200000000"}).code == cli::kExitUsage);
}

TEST_CASE("verify is deterministic") {
  const std::vector<std::string> args = {"verify", "--kind", "interval", "--trials", "100", "--seed", "7"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  CHECK(j.is_object());
  // The manifest digest matches across runs; wall time does not enter it.
  const auto ma = json::parse(lines(a.err).back());
  const auto mb = json::parse(lines(b.err).back());
  CHECK(ma.at("output_digest") == mb.at("output_digest"));
  CHECK(ma.at("subcommand") == "verify");
  CHECK(ma.at("seed") == 7);
  for (const char* key : {"parameters", "tool_version", "wall_time_s", "exit_code"}) CHECK(ma.contains(key));
}

TEST_CASE("verify a config file") {
  const auto path = std::filesystem::temp_directory_path() / "dsieve_cli_instance.txt";
  {
    std::ofstream f(path);
    f << "# interval example\nkind=interval\nX=1/8,2/8,4/8\nf=1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16\nN=16\n";
  }
  const auto r = run({"verify", "--config", path.string()});
  std::filesystem::remove(path);
  REQUIRE(r.code == cli::kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j.dump().find("holds") != std::string::npos);
}

TEST_CASE("unknown flag suggests the closest one") {
  const auto r = run({"gsharp-scan", "--limt", "10"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("did you mean --limit?") != std::string::npos);
  const auto s = run({"gsharp-scn"});
  CHECK(s.code == cli::kExitUsage);
  CHECK(s.err.find("did you mean 'gsharp-scan'?") != std::string::npos);
}

TEST_CASE("subcommands run") {
  CHECK(run({"square-sieve", "--z", "15"}).code == cli::kExitOk);
  CHECK(run({"prime-sieve", "--z", "30", "--z0", "3"}).code == cli::kExitOk);
  CHECK(run({"spectrum", "--modulus", "101", "--set", "2,3,5,7,11", "--alpha", "2"}).code == cli::kExitOk);
  CHECK(run({"dissociate", "--points", "1/8,2/8,4/8", "--z", "5", "--greedy", "--span"}).code == cli::kExitOk);
  CHECK(run({"dissociate", "--points", "1/7,2/7,3/7", "--assert-dissociate"}).code == cli::kExitCheckFailed);
  CHECK(run({"dissociate", "--group", "5,6", "--elements", "1:1,1:4,3:2,3:3", "--assert-dissociate"}).code ==
        cli::kExitOk);
  CHECK(run({"chang", "--n", "10000", "--u1", "101", "--u2", "103", "--alpha", "2", "--primes-all"}).code ==
        cli::kExitOk);
  CHECK(run({"chang", "--n", "10000", "--u1", "7", "--u2", "103", "--primes-all"}).code == cli::kExitUsage);
  CHECK(run({"majorant", "--n", "10", "--delta", "0.5"}).code == cli::kExitOk);
}

TEST_CASE("output and manifest files") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto out = dir / "dsieve_cli_out.json", man = dir / "dsieve_cli_manifest.json";
  const auto r = run({"square-sieve", "--z", "7", "--out", out.string(), "--manifest", man.string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.empty());
  std::ifstream fo(out), fm(man);
  const auto jo = json::parse(fo);
  const auto jm = json::parse(fm);
  CHECK(jo.is_object());
  CHECK(jm.at("subcommand") == "square-sieve");
  std::filesystem::remove(out);
  std::filesystem::remove(man);
}

TEST_CASE("edit distance and suggestions") {
  CHECK(cli::edit_distance("kitten", "sitting") == 3);
  CHECK(cli::edit_distance("", "abc") == 3);
  CHECK(cli::suggest("--seeed", {"--seed", "--emit"}) == "--seed");
  CHECK(cli::suggest("--zzzzzzzz", {"--seed", "--emit"}).empty());
}

}
