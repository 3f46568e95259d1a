#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "ut/cli.hpp"
#include "ut/io.hpp"
#include "ut/synth.hpp"
#include "ut/transform.hpp"

using namespace ut;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path dir() {
  const auto d = fs::temp_directory_path() / "ut_cli_tests";
  fs::create_directories(d);
  return d;
}

std::string p(const std::string& name) { return (dir() / name).string(); }

void write_spec() {
  io::write_text(p("two_mode.json"), R"({
    "factors": [{"cardinality": 4}],
    "dimensions": [
      {"type": "mixture", "components": [{"weight": 0.3, "mean": -4, "variance": 0.25},
                                         {"weight": 0.7, "mean": 4, "variance": 0.25}]},
      {"type": "factor_copy", "factor": 0, "noise": 0.01},
      {"type": "constant", "value": 5.0}
    ]})");
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("synth is reproducible") {
    write_spec();
    REQUIRE(run({"synth", "--spec", p("two_mode.json"), "--n", "2000", "--seed", "42", "--output", p("a.csv"),
                 "--factors-out", p("fa.csv"), "--truth-out", p("truth.json")})
                .code == 0);
    REQUIRE(run({"synth", "--spec", p("two_mode.json"), "--n", "2000", "--seed", "42", "--output", p("b.csv")}).code == 0);
    CHECK(io::read_text(p("a.csv")) == io::read_text(p("b.csv")));
    const auto truth = nlohmann::json::parse(io::read_text(p("truth.json")));
    CHECK(truth["dimensions"][0]["components"].size() == 2);
    CHECK(truth["dimensions"][1].is_null());
  }

  TEST_CASE("fit, transform, inverse, report, hist") {
    write_spec();
    REQUIRE(run({"synth", "--spec", p("two_mode.json"), "--n", "3000", "--seed", "1", "--output", p("z.csv")}).code == 0);
    const std::string before = io::read_text(p("z.csv"));

    auto r = run({"fit", "--input", p("z.csv"), "--output", p("m.json"), "--threads", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.find("collapsed") != std::string::npos);
    REQUIRE(run({"transform", "--model", p("m.json"), "--input", p("z.csv"), "--output", p("zt.csv")}).code == 0);
    const auto zt = io::read_matrix(p("zt.csv"));
    for (std::size_t c = 0; c < zt.cols(); ++c) {
      for (double v : zt.column(c)) {
        CHECK(v >= -4.0);
        CHECK(v <= 4.0);
      }
    }

    // CLI output equals the library pipeline bit for bit.
    const auto z = io::read_matrix(p("z.csv"));
    const auto model = fit(z);
    CHECK(io::read_model(p("m.json")) == model);
    CHECK(zt == ut::apply(model, z));
    CHECK(io::read_text(p("z.csv")) == before);

    REQUIRE(run({"inverse", "--model", p("m.json"), "--input", p("zt.csv"), "--output", p("zi.csv")}).code == 0);
    const auto zi = io::read_matrix(p("zi.csv"));
    for (std::size_t i = 0; i < z.rows(); ++i) CHECK(std::abs(zi(i, 0) - z(i, 0)) <= 1e-8);

    r = run({"report", "--model", p("m.json"), "--output", "-"});
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(r.out);
    CHECK(report["dimensions"][0]["k"] == 2);
    CHECK(report["dimensions"][2]["collapsed"] == true);

    r = run({"hist", "--input", p("z.csv"), "--model", p("m.json"), "--output", p("h.json"), "--bins", "40",
             "--svg", p("svg")});
    REQUIRE(r.code == 0);
    const auto hist = nlohmann::json::parse(io::read_text(p("h.json")));
    CHECK(hist["bins"] == 40);
    CHECK(fs::exists(dir() / "svg" / "hist_dim0.svg"));
  }

  TEST_CASE("metrics") {
    write_spec();
    REQUIRE(run({"synth", "--spec", p("two_mode.json"), "--n", "5000", "--seed", "2", "--output", p("mz.csv"),
                 "--factors-out", p("mf.csv")})
                .code == 0);
    const auto r = run({"metrics", "--input", p("mz.csv"), "--factors", p("mf.csv"), "--output", "-",
                        "--metrics", "mig,tc,correlation"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["mig"].get<double>() >= 0.9);
    CHECK(j["factor_vae_score"].is_null());
    CHECK(j["beta_vae"].is_null());
    CHECK(j["correlation"]["matrix"].size() == 3);
  }

  TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::usage_error);
    CHECK(run({"fit"}).code == cli::usage_error);
    CHECK(run({"bogus"}).code == cli::usage_error);
    CHECK(run({"fit", "--input", p("x.csv"), "--output", p("y.json"), "--grid-size", "8"}).code == cli::usage_error);
    CHECK(run({"--help"}).code == cli::ok);

    io::write_text(p("bad.csv"), "z0,z1\n1.0,2.0\n3.0,oops\n");
    const auto r = run({"fit", "--input", p("bad.csv"), "--output", p("bad.json")});
    CHECK(r.code == cli::data_error);
    CHECK(r.err.find("line 3, column 1") != std::string::npos);
    CHECK(run({"fit", "--input", p("missing.csv"), "--output", p("bad.json")}).code == cli::data_error);

    io::write_text(p("sing.csv"), "a,b\n1,1\n2,2\n3,3\n4,4\n");
    io::write_text(p("sing_f.csv"), "y\n0\n1\n0\n1\n");
    CHECK(run({"metrics", "--input", p("sing.csv"), "--factors", p("sing_f.csv"), "--output", "-", "--metrics", "tc"})
              .code == cli::numeric_error);
  }
}
