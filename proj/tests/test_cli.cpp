#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sacalc/cli.hpp"

namespace {

const std::string kData = SACALC_DATA_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sacalc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = sacalc::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sacalc_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("successful commands exit zero") {
    CHECK(run({"--help"}).code == sacalc::kExitOk);
    CHECK(run({"integrate", kData + "/disk.json", kData + "/area2form.json", "--depth", "5"}).code == sacalc::kExitOk);
    CHECK(run({"stokes", kData + "/disk.json", kData + "/x_dy.json", "--depth", "4", "--tol", "1e-10"}).code ==
          sacalc::kExitOk);
    CHECK(run({"compare", kData + "/disk.json", kData + "/area2form.json", "--depth", "4", "--common"}).code ==
          sacalc::kExitOk);
    CHECK(run({"volume", kData + "/square.json", "--d", "2", "--n", "1,2,3"}).code == sacalc::kExitOk);
    CHECK(run({"panelbeat", "demo", "--example", "abs"}).code == sacalc::kExitOk);
    CHECK(run({"panelbeat", "certify", kData + "/two_triangles.txt", kData + "/affine_charts.json"}).code ==
          sacalc::kExitOk);
    const auto mesh = scratch("disk.mesh");
    CHECK(run({"triangulate", kData + "/disk.json", "--depth", "3", "--out", mesh.string()}).code == sacalc::kExitOk);
    CHECK(slurp(mesh).rfind("dim 2\n", 0) == 0);
  }

  TEST_CASE("failed checks exit one") {
    CHECK(run({"integrate", kData + "/disk.json", kData + "/area2form.json", "--depth", "3", "--expect", "3.14159265",
               "--tol", "1e-6"})
              .code == sacalc::kExitFailed);
    CHECK(run({"panelbeat", "certify", kData + "/two_triangles.txt", kData + "/bent_charts.json"}).code ==
          sacalc::kExitFailed);
  }

  TEST_CASE("bad input exits two with a message") {
    const Run missing = run({"integrate", kData + "/no_such_file.json", kData + "/area2form.json"});
    CHECK(missing.code == sacalc::kExitBadInput);
    CHECK_FALSE(missing.err.empty());
    CHECK(run({"integrate", kData + "/disk.json"}).code == sacalc::kExitBadInput);
    CHECK(run({"frobnicate"}).code == sacalc::kExitBadInput);
    CHECK(run({"integrate", kData + "/disk.json", kData + "/area2form.json", "--depth", "40"}).code ==
          sacalc::kExitBadInput);
    CHECK(run({"panelbeat", "demo", "--example", "nope"}).code == sacalc::kExitBadInput);
    // A mesh file where a set is expected is a parse error, reported by path.
    const Run wrong = run({"integrate", kData + "/two_triangles.txt", kData + "/area2form.json"});
    CHECK(wrong.code == sacalc::kExitBadInput);
    CHECK(wrong.err.find("two_triangles.txt") != std::string::npos);
    // A 1-form is not top-degree on a planar set.
    CHECK(run({"integrate", kData + "/disk.json", kData + "/x_dy.json"}).code == sacalc::kExitBadInput);
  }

  TEST_CASE("JSON reports are byte identical across runs") {
    const auto a = scratch("a.json");
    const auto b = scratch("b.json");
    for (const std::vector<std::string>& cmd :
         {std::vector<std::string>{"compare", kData + "/disk.json", kData + "/area2form.json", "--depth", "4",
                                   "--common", "--seed", "9"},
          std::vector<std::string>{"panelbeat", "demo", "--example", "sqrt"},
          std::vector<std::string>{"volume", kData + "/disk_unit_box.json", "--d", "2", "--n", "4,8"}}) {
      auto first = cmd;
      first.insert(first.end(), {"--json", a.string()});
      auto second = cmd;
      second.insert(second.end(), {"--json", b.string()});
      REQUIRE(run(first).code == sacalc::kExitOk);
      REQUIRE(run(second).code == sacalc::kExitOk);
      const std::string text = slurp(a);
      CHECK(text == slurp(b));
      CHECK(text.find("\"schema\": 1") != std::string::npos);
    }
  }

  TEST_CASE("reported values") {
    const Run disk = run({"integrate", kData + "/disk.json", kData + "/area2form.json", "--depth", "6"});
    REQUIRE(disk.out.rfind("integral ", 0) == 0);
    CHECK(std::abs(std::stod(disk.out.substr(9)) - M_PI) < 5e-3);
    const Run square = run({"volume", kData + "/square.json", "--d", "2", "--n", "1,7"});
    CHECK(square.out.find("bounded: yes") != std::string::npos);
    const auto json = scratch("square.json");
    REQUIRE(run({"volume", kData + "/square.json", "--d", "2", "--n", "1,7", "--json", json.string()}).code == 0);
    CHECK(slurp(json).find("\"v_pessimistic\": 2.0") != std::string::npos);
    const Run sqrt_demo = run({"panelbeat", "demo", "--example", "sqrt"});
    CHECK(sqrt_demo.out.find("C1 certification: PASS") != std::string::npos);
  }
}
