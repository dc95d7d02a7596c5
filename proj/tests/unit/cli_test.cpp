#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "sobext/io.hpp"
#include "sobext/pipeline.hpp"
#include "support/paths.hpp"

using namespace sobext;
using sobext::testing::scratch_dir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string s(const std::filesystem::path& p) { return p.string(); }

}  // namespace

TEST_CASE("subcommands compose to the pipeline") {
  const auto dir = scratch_dir("compose");
  const auto config = dir / "config.json";
  io::write_file(config, R"({
  "name": "compose",
  "space": {"generator": "fat_cantor", "level": 2, "cells": 16, "dims": 2},
  "mask": "generator",
  "p": 2,
  "delta": 0.125,
  "input_function": {"kind": "coordinate", "axis": 1}
})");
  const auto whole = dir / "whole";
  const Result r = call({"run", "--config", s(config), "--out", s(whole)});
  REQUIRE_MESSAGE(r.code == 0, r.err, r.out);
  CHECK(r.out.find("all audits passed") != std::string::npos);

  const auto parts = dir / "parts";
  REQUIRE(call({"gen-space", "--config", s(config), "--out", s(parts)}).code == 0);
  const std::vector<std::string> base{"--space", s(parts / "space.mms"), "--mask", s(parts / "mask.txt")};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), base.begin(), base.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return call(head);
  };
  REQUIRE(with({"estimate"}, {"--delta", "0.125", "--out", s(parts)}).code == 0);
  const std::vector<std::string> est{"--estimate", s(parts / "estimate.json")};
  auto plus = [&](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  REQUIRE(with({"cover"}, plus(est, {"--out", s(parts)})).code == 0);
  const std::vector<std::string> built = plus(est, {"--cover", s(parts / "cover.txt"), "--family",
                                                    s(parts / "family.txt"), "--u", s(parts / "u.field")});
  REQUIRE(with({"extend"}, plus(built, {"--out", s(parts)})).code == 0);
  const Result audit = with({"audit"}, plus(built, {"--config", s(config), "--out", s(parts)}));
  CHECK(audit.code == 0);

  for (const char* f : {"space.mms", "mask.txt", "cover.txt", "family.txt", "phi.txt", "u.field", "g.field",
                        "u_tilde.field", "g_tilde.field", "reports.json"}) {
    CAPTURE(f);
    CHECK(io::read_file(whole / f) == io::read_file(parts / f));
  }
}

TEST_CASE("estimate on a full mask") {
  const auto dir = scratch_dir("estimate_full");
  const auto config = dir / "config.json";
  io::write_file(config, R"({"space": {"generator": "grid", "dims": [16, 16], "spacing": 0.5}, "mask": "all",
                             "input_function": {"kind": "constant", "value": 2}})");
  REQUIRE(call({"gen-space", "--config", s(config), "--out", s(dir)}).code == 0);
  const Result r = call({"estimate", "--space", s(dir / "space.mms"), "--mask", s(dir / "mask.txt"), "--delta", "1",
                         "--out", s(dir)});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(io::read_file(dir / "estimate.json"));
  CHECK(j["theta"].get<double>() == 1.0);
  CHECK(j["points"].get<int>() == 256);
  CHECK(j["subset_points"].get<int>() == 256);
}

TEST_CASE("report merges rows") {
  const auto dir = scratch_dir("report");
  AuditReport ok;
  ok.name = "a";
  ok.observed_constant = 1.0;
  AuditReport bad = ok;
  bad.name = "b";
  bad.pass = false;
  std::ostringstream one, two;
  io::write_csv(one, io::csv_rows("x", {ok, bad}));
  io::write_csv(two, io::csv_rows("y", {ok}));
  io::write_file(dir / "one.csv", one.str());
  io::write_file(dir / "two.csv", two.str());
  const Result r = call({"report", "--in", s(dir / "one.csv"), "--in", s(dir / "two.csv"), "--out", s(dir / "m")});
  CHECK(r.code == 1);
  CHECK(r.out.find("3 rows, 1 failing") != std::string::npos);
  std::ifstream merged(dir / "m" / "reports.csv");
  CHECK(io::read_csv(merged).size() == 3);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == cli::kUsageError);
  CHECK(call({"frobnicate"}).code == cli::kUsageError);
  CHECK(call({"run"}).code == cli::kUsageError);
  const Result missing = call({"run", "--config", "/nonexistent/config.json"});
  CHECK(missing.code == cli::kUsageError);
  const auto dir = scratch_dir("bad_config");
  io::write_file(dir / "c.json", R"({"space": {"generator": "grid", "dims": [4]}, "p": 1})");
  const Result bad = call({"run", "--config", s(dir / "c.json")});
  CHECK(bad.code == cli::kUsageError);
  CHECK(bad.err.find("error:") == 0);
  CHECK(call({"--help"}).code == cli::kPass);
}
