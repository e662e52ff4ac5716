// Command-line dispatch: exit codes, output files and reproducibility.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "eulerlab/cli.hpp"

namespace fs = std::filesystem;
using eulerlab::cli::dispatch;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("eulerlab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == eulerlab::cli::kExitUsage);
  CHECK(call({"bogus"}).code == eulerlab::cli::kExitUsage);
  CHECK(call({"verify-thermo", "--no-such-flag"}).code == eulerlab::cli::kExitUsage);
  CHECK(call({"simulate", "--grid-n", "-4"}).code == eulerlab::cli::kExitUsage);
  CHECK(call({"simulate", "--config", "/nonexistent/cfg.json"}).code == eulerlab::cli::kExitUsage);
  CHECK(call({"--help"}).code == eulerlab::cli::kExitPass);
  CHECK(call({"--version"}).out.find("0.1.0") != std::string::npos);
}

TEST_CASE("malformed configs name the offending field") {
  const auto dir = scratch("badcfg");
  write(dir / "type.json", R"({"cells": "many"})");
  auto r = call({"simulate", "--config", (dir / "type.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == eulerlab::cli::kExitUsage);
  CHECK(r.err.find("cells") != std::string::npos);

  write(dir / "key.json", R"({"cfl": 0.4, "flavour": 1})");
  r = call({"simulate", "--config", (dir / "key.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == eulerlab::cli::kExitUsage);
  CHECK(r.err.find("flavour") != std::string::npos);

  write(dir / "syntax.json", "{ not json");
  r = call({"besov-fit", "--config", (dir / "syntax.json").string(), "--out", (dir / "o").string()});
  CHECK(r.code == eulerlab::cli::kExitUsage);
}

TEST_CASE("verify-thermo passes and writes a commented CSV") {
  const auto dir = scratch("thermo");
  for (const char* gamma : {"1.4", "2"}) {
    const auto r = call({"verify-thermo", "--gamma", gamma, "--out", dir.string()});
    CHECK(r.code == eulerlab::cli::kExitPass);
    const auto text = slurp(dir / "thermo.csv");
    CHECK(text.rfind("# eulerlab 0.1.0 config=", 0) == 0);
    CHECK(text.find("check,value,threshold,pass") != std::string::npos);
  }
  CHECK(call({"verify-thermo", "--gamma", "1"}).code == eulerlab::cli::kExitUsage);
}

TEST_CASE("simulate, relentropy and oslip-check chain together") {
  const auto dir = scratch("chain");
  write(dir / "cfg.json", R"({"cells": 64, "t_end": 0.2, "snapshot_count": 4,
                             "init": {"id": "rarefaction"}})");
  const auto a = (dir / "a").string(), b = (dir / "b").string();
  CHECK(call({"simulate", "--config", (dir / "cfg.json").string(), "--out", a}).code == 0);
  CHECK(call({"simulate", "--config", (dir / "cfg.json").string(), "--out", b}).code == 0);
  CHECK(fs::exists(dir / "a" / "meta.json"));
  // Reruns reproduce every data file byte for byte.
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    if (entry.path().extension() != ".csv") continue;
    CHECK(slurp(entry.path()) == slurp(dir / "b" / entry.path().filename()));
  }

  const auto rel = (dir / "rel").string();
  auto r = call({"relentropy", "--candidate", a, "--reference", b, "--out", rel});
  CHECK(r.code == eulerlab::cli::kExitPass);
  CHECK(slurp(dir / "rel" / "trace.csv").rfind("# eulerlab", 0) == 0);

  const auto osl = (dir / "osl").string();
  r = call({"oslip-check", "--input", a, "--out", osl});
  CHECK(r.code == eulerlab::cli::kExitPass);
  CHECK(slurp(dir / "osl" / "oslip.csv").rfind("# eulerlab", 0) == 0);
}

TEST_CASE("besov-fit and commutator-rate on synthetic fields") {
  const auto dir = scratch("fields");
  write(dir / "bes.json", R"({"field": {"weierstrass": {"alpha": 0.5, "levels": 10}}, "cells": 4096})");
  auto r = call({"besov-fit", "--config", (dir / "bes.json").string(), "--alpha", "0.5",
                 "--out", (dir / "bes").string()});
  CHECK(r.code == eulerlab::cli::kExitPass);
  const auto first = slurp(dir / "bes" / "besov_report.csv");
  CHECK(first.rfind("# eulerlab", 0) == 0);
  r = call({"besov-fit", "--config", (dir / "bes.json").string(), "--alpha", "0.5",
            "--out", (dir / "bes").string()});
  CHECK(slurp(dir / "bes" / "besov_report.csv") == first);

  r = call({"commutator-rate", "--g", "square", "--grid-n", "2048", "--out", (dir / "com").string()});
  CHECK(r.code == eulerlab::cli::kExitPass);
  const auto text = slurp(dir / "com" / "commutator.csv");
  CHECK(text.find("eps,norm,bound,pass,norm_a,norm_b,split_defect") != std::string::npos);
  CHECK(call({"commutator-rate", "--g", "cube"}).code == eulerlab::cli::kExitUsage);
}

TEST_CASE("accept runs a subset") {
  const auto dir = scratch("accept");
  const auto r = call({"accept", "--only", "1", "2", "--out", dir.string()});
  CHECK(r.code == eulerlab::cli::kExitPass);
  CHECK(r.out.find("criterion 1 PASS") != std::string::npos);
  CHECK(r.out.find("criterion 2 PASS") != std::string::npos);
  CHECK(r.out.find("criterion 3") == std::string::npos);
  CHECK(call({"accept", "--only", "12", "--out", dir.string()}).code == eulerlab::cli::kExitUsage);
}
