#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>

#include "eigenform/io.hpp"
#include "subprocess.hpp"

using namespace eigenform;
using testutil::run_cli;
using testutil::RunResult;
using Catch::Approx;

namespace {

std::string fixture(const std::string& name) {
  return testutil::source_dir() + "/tests/fixtures/" + name;
}

std::string golden(const std::string& name) {
  return testutil::source_dir() + "/tests/golden/" + name;
}

ojson parse_report(const std::string& text) {
  return parse_json(text, "cli output");
}

}  // namespace

TEST_CASE("cli validate") {
  SECTION("builtin passes") {
    RunResult r = run_cli("validate builtin:gasket");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.back() == '\n');
    ojson j = parse_report(r.out);
    REQUIRE(j["pass"] == true);
    REQUIRE(j["failures"].empty());
    REQUIRE(j["manifest"]["command"] == "validate");
    REQUIRE(j["manifest"]["inputs"][0] == "builtin:gasket");
    REQUIRE(j["manifest"]["weights"].is_null());
    REQUIRE(j["manifest"]["seed"].is_null());
    REQUIRE(j["manifest"]["tool_version"].is_string());
  }

  SECTION("violations are reported with witnesses and exit 2") {
    RunResult r =
        run_cli("validate '" + fixture("condition_b_violation.json") + "'");
    REQUIRE(r.exit_code == 2);
    ojson j = parse_report(r.out);
    REQUIRE(j["pass"] == false);
    REQUIRE(j["failures"].size() == 1);
    REQUIRE(j["failures"][0]["witness"] == "(i=1,h=2,j=2)");
  }

  SECTION("disconnected triple fails condition c") {
    RunResult r = run_cli("validate '" + fixture("disconnected.json") + "'");
    REQUIRE(r.exit_code == 2);
    ojson j = parse_report(r.out);
    bool saw_c = false;
    for (const auto& f : j["failures"])
      if (f["condition"] == "c") saw_c = true;
    REQUIRE(saw_c);
  }

  SECTION("missing file is an input error") {
    RunResult r = run_cli("validate /nonexistent/triple.json");
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.out.empty());
  }

  SECTION("unknown builtin is an input error") {
    RunResult r = run_cli("validate builtin:moebius");
    REQUIRE(r.exit_code == 1);
  }
}

TEST_CASE("cli solve") {
  SECTION("gasket") {
    RunResult r = run_cli("solve builtin:gasket --weights 1,1,1");
    REQUIRE(r.exit_code == 0);
    ojson j = parse_report(r.out);
    REQUIRE(j["status"] == "converged");
    REQUIRE(j["eigenvalue"].get<double>() == Approx(0.6).margin(1e-10));
    for (int d = 0; d < 3; ++d)
      REQUIRE(j["form"]["coeffs"][d].get<double>() ==
              Approx(1.0 / 3.0).margin(1e-10));
    REQUIRE(j["manifest"]["weights"] == ojson({1.0, 1.0, 1.0}));
  }

  SECTION("interval with uneven weights") {
    RunResult r = run_cli("solve builtin:interval --weights 1,2");
    REQUIRE(r.exit_code == 0);
    ojson j = parse_report(r.out);
    REQUIRE(j["eigenvalue"].get<double>() ==
            Approx(2.0 / 3.0).margin(1e-12));
  }

  SECTION("explicit start point") {
    RunResult r = run_cli("solve builtin:gasket --weights 1,1,1 --start '" +
                          fixture("gasket_uniform.json") + "'");
    REQUIRE(r.exit_code == 0);
    ojson j = parse_report(r.out);
    REQUIRE(j["manifest"]["inputs"].size() == 2);
  }

  SECTION("weight count mismatch is an input error") {
    RunResult r = run_cli("solve builtin:gasket --weights 1,1");
    REQUIRE(r.exit_code == 1);
  }

  SECTION("iteration budget exhaustion exits 3") {
    RunResult r =
        run_cli("solve builtin:gasket --weights 1,2,3 --set max_iter=1");
    REQUIRE(r.exit_code == 3);
    ojson j = parse_report(r.out);
    REQUIRE(j["status"] == "max_iter");
    REQUIRE(j["manifest"]["config_overrides"]["max_iter"] == "1");
  }

  SECTION("unknown --set key is an input error") {
    RunResult r =
        run_cli("solve builtin:gasket --weights 1,1,1 --set turbo=yes");
    REQUIRE(r.exit_code == 1);
  }
}

TEST_CASE("cli classify") {
  SECTION("strata across the fixtures") {
    struct Case {
      const char* triple;
      const char* form;
      const char* stratum;
    };
    const Case cases[] = {
        {"builtin:gasket", "gasket_uniform.json", "D1"},
        {"builtin:gasket", "gasket_half_half.json", "D2"},
        {"builtin:gasket", "gasket_edge12.json", "D3"},
        {"builtin:tripod", "tripod_pair23.json", "D4"},
    };
    for (const auto& c : cases) {
      RunResult r = run_cli(std::string("classify ") + c.triple +
                            " --weights 1,1,1 --form '" + fixture(c.form) +
                            "'");
      INFO(c.form);
      REQUIRE(r.exit_code == 0);
      REQUIRE(parse_report(r.out)["stratum"] == c.stratum);
    }
  }

  SECTION("vertex form components") {
    RunResult r = run_cli("classify builtin:gasket --weights 1,1,1 --form '" +
                          fixture("gasket_edge12.json") + "'");
    ojson j = parse_report(r.out);
    REQUIRE(j["components"] == ojson({{0, 1}, {2}}));
  }
}

TEST_CASE("cli repulsing") {
  SECTION("the gasket vertex eigenform is strictly repulsing") {
    RunResult r = run_cli("repulsing builtin:gasket --weights 1,1,1 --form '" +
                          fixture("gasket_edge12.json") + "'");
    REQUIRE(r.exit_code == 0);
    ojson j = parse_report(r.out);
    REQUIRE(j["rho"].get<double>() == Approx(0.5).margin(1e-12));
    REQUIRE(j["mu"].get<double>() == Approx(2.0 / 3.0).margin(1e-10));
    REQUIRE(j["repulsing_strict"] == true);
    REQUIRE(j["infeasible_directions"] == 0);
  }

  SECTION("non-eigenform input is a domain error") {
    RunResult r = run_cli("repulsing builtin:gasket --weights 1,1,1 --form '" +
                          fixture("gasket_half_half.json") + "'");
    REQUIRE(r.exit_code == 2);
  }

  SECTION("zero-image eigenforms are outside the certificate's domain") {
    RunResult r = run_cli("repulsing builtin:tripod --weights 1,1,1 --form '" +
                          fixture("tripod_pair23.json") + "'");
    REQUIRE(r.exit_code == 2);
  }
}

TEST_CASE("cli probe") {
  const std::string base = "probe builtin:gasket --weights 1,1,1 --form '" +
                           fixture("gasket_edge12.json") +
                           "' --radius 0.01 --samples 50 --seed 7";
  RunResult r = run_cli(base);
  REQUIRE(r.exit_code == 0);
  ojson j = parse_report(r.out);
  REQUIRE(j["hits"] == 0);
  REQUIRE(j["samples"] == 50);
  REQUIRE(j["degenerate_images"] == 0);
  REQUIRE(j["worst_t"].get<double>() < 1.0);
  REQUIRE(j["manifest"]["seed"] == 7);
}

TEST_CASE("cli determinism") {
  SECTION("solve bytes repeat") {
    const std::string cmd = "solve builtin:gasket --weights 1,2,3";
    RunResult a = run_cli(cmd);
    RunResult b = run_cli(cmd);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
  }

  SECTION("probe bytes repeat for a fixed seed") {
    const std::string cmd = "probe builtin:gasket --weights 1,1,1 --form '" +
                            fixture("gasket_edge12.json") +
                            "' --radius 0.01 --samples 200 --seed 99";
    RunResult a = run_cli(cmd);
    RunResult b = run_cli(cmd);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
  }

  SECTION("log level does not leak into stdout") {
    const std::string cmd = "solve builtin:gasket --weights 1,2,3";
    RunResult quiet = run_cli(cmd);
    RunResult chatty = run_cli(cmd, "EIGENFORM_LOG=info");
    RunResult debug = run_cli(cmd, "EIGENFORM_LOG=debug");
    REQUIRE(quiet.out == chatty.out);
    REQUIRE(quiet.out == debug.out);
  }

  SECTION("--out writes exactly the stdout bytes") {
    const std::string path = "cli_out_tmp.json";
    RunResult direct = run_cli("solve builtin:interval --weights 1,2");
    RunResult filed =
        run_cli("solve builtin:interval --weights 1,2 --out " + path);
    REQUIRE(filed.exit_code == 0);
    REQUIRE(filed.out.empty());
    REQUIRE(read_text(path) == direct.out);
    std::remove(path.c_str());
  }
}

TEST_CASE("cli sweep") {
  SECTION("interval line ordering and eigenvalues") {
    RunResult r =
        run_cli("sweep builtin:interval --weights-grid 1,1:4:3");
    REQUIRE(r.exit_code == 0);
    std::vector<std::string> lines;
    std::stringstream ss(r.out);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    REQUIRE(lines.size() == 4);

    const double rho[3] = {0.5, 2.0 / 3.0, 0.8};
    const double w2[3] = {1.0, 2.0, 4.0};
    for (int i = 0; i < 3; ++i) {
      ojson j = parse_report(lines[i]);
      REQUIRE(j["status"] == "converged");
      REQUIRE(j["eigenvalue"].get<double>() ==
              Approx(rho[i]).margin(1e-12));
      REQUIRE(j["manifest"]["weights"][0] == 1.0);
      REQUIRE(j["manifest"]["weights"][1].get<double>() ==
              Approx(w2[i]).margin(1e-15));
    }
    ojson summary = parse_report(lines[3]);
    REQUIRE(summary["summary"]["points"] == 3);
    REQUIRE(summary["summary"]["converged"] == 3);
    REQUIRE(summary["manifest"]["grid"] == "1,1:4:3");
    REQUIRE(summary["manifest"]["weights"].is_null());
  }

  SECTION("empty grid produces only the summary") {
    RunResult r = run_cli("sweep builtin:interval --weights-grid ''");
    REQUIRE(r.exit_code == 0);
    ojson j = parse_report(r.out);
    REQUIRE(j["summary"]["points"] == 0);
    REQUIRE(j["summary"]["converged"] == 0);
  }

  SECTION("axis count mismatch is an input error") {
    RunResult r = run_cli("sweep builtin:gasket --weights-grid 1,2");
    REQUIRE(r.exit_code == 1);
  }

  SECTION("jobs do not change the bytes") {
    const std::string grid = "0.5:2:3,0.5:2:3,0.5:2:3";
    RunResult serial =
        run_cli("sweep builtin:gasket --weights-grid " + grid);
    RunResult parallel =
        run_cli("sweep builtin:gasket --weights-grid " + grid + " --jobs 3");
    REQUIRE(serial.exit_code == 0);
    REQUIRE(serial.out == parallel.out);
  }
}

TEST_CASE("cli golden files") {
  SECTION("gasket sweep snapshot") {
    RunResult r = run_cli(
        "sweep builtin:gasket --weights-grid 0.5:2:3,0.5:2:3,0.5:2:3");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == read_text(golden("gasket_sweep.jsonl")));
  }

  SECTION("tripod existence snapshot") {
    RunResult r = run_cli("existence builtin:tripod --weights 1,1,1");
    REQUIRE(r.exit_code == 0);
    ojson j = parse_report(r.out);
    REQUIRE(j["outcome"] == "eigenform");
    REQUIRE(r.out == read_text(golden("tripod_existence.json")));
  }
}
