#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include "support.hpp"

using namespace blgram;
using blgram::io::Json;
using testsupport::Rng;

TEST_CASE("system fixture parses with the declared shapes") {
  const std::string text = io::read_file(testsupport::fixture_path("bench5_system.json"));
  const Json j = io::parse_json_text(text, "bench5_system.json");
  const BilinearSystem sys = io::system_from_json(j);
  CHECK(sys.n() == 5);
  CHECK(sys.m() == 1);
  CHECK(sys.A(1, 0) == 1.0);
  CHECK(sys.A(2, 2) == 0.9);
  CHECK(sys.F[0](4, 4) == 0.5);
  CHECK(sys.B(0, 0) == 0.8);
}

TEST_CASE("system parsing rejects malformed documents") {
  const auto parse = [](const std::string& text) {
    return io::system_from_json(io::parse_json_text(text, "test"));
  };
  CHECK_THROWS_AS(parse("[1,2]"), InputError);
  CHECK_THROWS_AS(parse("{\"n\":1,\"m\":1}"), InputError);  // missing A/F/B
  CHECK_THROWS_AS(parse("{\"n\":2,\"m\":0,\"A\":[[0.1,0],[0,0.1]],\"F\":[],"
                        "\"B\":[[1],[1]]}"),
                  InputError);  // B columns with m = 0
  CHECK_THROWS_AS(parse("{\"n\":2,\"m\":1,\"A\":[[0.1,0],[0,0.1]],"
                        "\"F\":[[[0,0],[0,0]]],\"B\":[[1],[1],[1]]}"),
                  InputError);  // B row count
  CHECK_THROWS_AS(parse("{\"n\":2,\"m\":1,\"A\":[[0.1,0],[0.1]],"
                        "\"F\":[[[0,0],[0,0]]],\"B\":[[1],[1]]}"),
                  InputError);  // ragged A
  CHECK_THROWS_AS(parse("{\"n\":2,\"m\":1,\"A\":[[0.1,\"x\"],[0,0.1]],"
                        "\"F\":[[[0,0],[0,0]]],\"B\":[[1],[1]]}"),
                  InputError);  // non-numeric entry
  CHECK_THROWS_AS(parse("{\"n\":2,\"m\":2,\"A\":[[0.1,0],[0,0.1]],"
                        "\"F\":[[[0,0],[0,0]]],\"B\":[[1,0],[1,0]]}"),
                  InputError);  // one F for two channels
  CHECK_THROWS_AS(io::parse_json_text("{\"n\": 5,", "broken"), InputError);
}

TEST_CASE("a zero-input system may omit B entirely") {
  const BilinearSystem sys = io::system_from_json(io::parse_json_text(
      "{\"n\":2,\"m\":0,\"A\":[[0.1,0],[0,0.1]],\"F\":[]}", "test"));
  CHECK(sys.m() == 0);
  CHECK(sys.B.rows() == 2);
}

TEST_CASE("library fixture parses all four candidates") {
  const ActuatorLibrary lib =
      testsupport::load_fixture_library("bench5_actuators.json");
  REQUIRE(lib.size() == 4);
  CHECK(lib.n() == 5);
  CHECK(lib.candidates[0].B(0) == 0.8);
  CHECK(lib.candidates[1].F(0, 1) == 0.02);
  CHECK(lib.candidates[3].F(3, 4) == 0.02);
}

TEST_CASE("input CSV parsing is strict about the header and width") {
  const std::vector<Vector> two =
      io::inputs_from_csv("u1,u2\n0.5,-1\n0,0.25\n", 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0](0) == 0.5);
  CHECK(two[0](1) == -1.0);
  CHECK(two[1](1) == 0.25);

  // Carriage returns and blank lines are tolerated.
  const std::vector<Vector> crlf =
      io::inputs_from_csv("u1\r\n1.0\r\n\r\n2.0\r\n", 1);
  REQUIRE(crlf.size() == 2);
  CHECK(crlf[1](0) == 2.0);

  CHECK(io::inputs_from_csv("u1\n", 1).empty());

  CHECK_THROWS_AS(io::inputs_from_csv("", 1), InputError);
  CHECK_THROWS_AS(io::inputs_from_csv("u2\n1\n", 1), InputError);
  CHECK_THROWS_AS(io::inputs_from_csv("u1,u2\n1\n", 2), InputError);
  CHECK_THROWS_AS(io::inputs_from_csv("u1\n1,2\n", 1), InputError);
  CHECK_THROWS_AS(io::inputs_from_csv("u1\nabc\n", 1), InputError);
  CHECK_THROWS_AS(io::inputs_from_csv("u1\n1.5x\n", 1), InputError);
}

TEST_CASE("floating-point rendering keeps signed zeros and round trips") {
  CHECK(io::format_double(0.0, 17) == "0");
  CHECK(io::format_double(-0.0, 17) == "-0.0");
  CHECK(io::format_double(1.5, 17) == "1.5");
  CHECK(io::format_double(0.1, 12) == "0.1");
  CHECK_THROWS_AS(io::format_double(std::numeric_limits<double>::quiet_NaN(), 17),
                  NumericalError);
  CHECK_THROWS_AS(io::format_double(std::numeric_limits<double>::infinity(), 17),
                  NumericalError);

  Rng rng(91);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = (rng.uniform(-1.0, 1.0)) * std::pow(10.0, rng.uniform(-30, 30));
    const std::string s = io::format_double(x, io::kJsonSigDigits);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(x));
  }
}

TEST_CASE("serialized documents are deterministic and newline-terminated") {
  Json j = Json::object();
  j["name"] = "demo";
  j["values"] = Json::array({1.0, 2.5, -0.0});
  j["nested"] = Json::array({Json::array({1.0, 0.0}), Json::array({0.0, 1.0})});
  j["flag"] = true;
  j["missing"] = nullptr;
  const std::string once = io::dump_json(j);
  CHECK(once == io::dump_json(j));
  CHECK(once.back() == '\n');
  CHECK(once.find("\"values\": [1, 2.5, -0.0]") != std::string::npos);
  CHECK(once.find("\"flag\": true") != std::string::npos);
  CHECK(once.find("\"missing\": null") != std::string::npos);
  // Rows of a nested array each get their own line.
  CHECK(once.find("[1, 0]") != std::string::npos);
  CHECK(once.find("[0, 1]") != std::string::npos);
}

TEST_CASE("matrices and systems survive a serialize/parse round trip") {
  Rng rng(92);
  const BilinearSystem sys = testsupport::random_system(rng, 4, 2, 0.8);
  const std::string text = io::dump_json(io::system_to_json(sys));
  const BilinearSystem back =
      io::system_from_json(io::parse_json_text(text, "round-trip"));
  CHECK(back.A == sys.A);
  CHECK(back.B == sys.B);
  REQUIRE(back.F.size() == sys.F.size());
  for (std::size_t i = 0; i < sys.F.size(); ++i) CHECK(back.F[i] == sys.F[i]);
}

TEST_CASE("Gramian reports carry the method and residual fields in order") {
  const BilinearSystem sys = testsupport::load_fixture_system("scalar_system.json");
  const Json direct = io::gramian_to_json(gramian_vec_solve(sys));
  auto it = direct.begin();
  CHECK(it.key() == "W");
  CHECK((++it).key() == "method");
  CHECK((++it).key() == "truncation_order");
  CHECK((++it).key() == "residual");
  CHECK((++it).key() == "existence_rho");
  CHECK(direct["method"] == "vec_solve");
  CHECK(direct["truncation_order"].is_null());
  CHECK(direct["residual"].get<double>() <= 1e-10);

  const Json series = io::gramian_to_json(gramian_series(sys, 200, 1e-12));
  CHECK(series["method"] == "series");
  CHECK(series["truncation_order"].get<int>() >= 1);
}

TEST_CASE("unbounded caps serialize as the string inf") {
  EnergyBound eb;
  eb.Psi = Matrix::Identity(1, 1);
  eb.beta = 0.0;
  eb.input_cap = std::numeric_limits<double>::infinity();
  eb.G_negdef = true;
  eb.cross_norm_sum = 0.0;
  eb.gap_lambda_max = -0.5;
  const Json without = io::energy_bound_to_json(eb, false);
  CHECK(without["input_cap"] == "inf");
  CHECK_FALSE(without.contains("Psi"));
  const Json with = io::energy_bound_to_json(eb, true);
  CHECK(with.contains("Psi"));

  eb.input_cap = 0.25;
  CHECK(io::energy_bound_to_json(eb, false)["input_cap"].get<double>() == 0.25);
}

TEST_CASE("sweep CSV leaves missing values as empty cells") {
  SweepRecord good;
  good.n = 3;
  good.lambda_min_bilinear = 0.5;
  good.lambda_min_linear = 0.25;
  good.lambda_min_bound = 1.25;
  good.assumptions_hold = true;
  SweepRecord bad;
  bad.n = 4;
  bad.lambda_min_bilinear = std::numeric_limits<double>::quiet_NaN();
  bad.lambda_min_linear = std::numeric_limits<double>::quiet_NaN();
  bad.lambda_min_bound = std::nullopt;
  bad.assumptions_hold = false;

  const std::string csv = io::sweep_csv({good, bad});
  CHECK(csv ==
        "n,lambda_min_bilinear,lambda_min_linear,lambda_min_bound,assumptions_hold\n"
        "3,0.5,0.25,1.25,true\n"
        "4,,,,false\n");
}

TEST_CASE("energy report CSV tabulates one row per step") {
  EnergyReport rep;
  rep.steps = {{0, 0.0, 0.0, 0.0}, {1, 2.0, 1.5, 0.5}};
  rep.cap = 1.0;
  rep.cap_satisfied = true;
  rep.inequality_held = true;
  CHECK(io::energy_report_csv(rep) ==
        "k,energy,bound,slack\n0,0,0,0\n1,2,1.5,0.5\n");
}

TEST_CASE("witness serialization echoes the query parameters") {
  const RatioWitness wit = unbounded_ratio_witness(0.5, 1.0, 10.0);
  const Json j = io::witness_to_json(0.5, 1.0, 10.0, wit);
  CHECK(j["a"].get<double>() == 0.5);
  CHECK(j["f"].get<double>() == 1.0);
  CHECK(j["w"].get<double>() == 10.0);
  CHECK(j["u1"].get<double>() == 4.0);
  CHECK(j["u0"].get<double>() == 18.0);
  CHECK(j["x_f"].get<double>() == 85.0);
  CHECK(j["ratio"].get<double>() == doctest::Approx(0.047058823529411764));
}

TEST_CASE("expansion serialization counts the appended columns") {
  const LinearExpansion e = expand_to_linear(subdiag_modulated_system(4));
  const Json j = io::expansion_to_json(e);
  CHECK(j["appended_columns"].get<int>() == 3);
  REQUIRE(j["column_map"].size() == 3);
  CHECK(j["column_map"][0]["input"].get<int>() == 0);
  CHECK(j["column_map"][0]["row"].get<int>() == 1);
  CHECK(j["column_map"][0]["col"].get<int>() == 0);
  CHECK(j["column_map"][0]["weight"].get<double>() == 1.0);
  CHECK(j["B_ext"].size() == 4);
}

TEST_CASE("file IO round trips text and reports missing paths") {
  const std::string path = "/tmp/blgram_io_test.txt";
  io::write_file(path, "line one\nline two\n");
  CHECK(io::read_file(path) == "line one\nline two\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(io::read_file("/nonexistent/definitely/missing.json"), InputError);
  CHECK_THROWS_AS(io::write_file("/nonexistent/definitely/missing.json", "x"),
                  InputError);
}

TEST_CASE("matrix parsing accepts only rectangular numeric grids") {
  const auto from = [](const std::string& text) {
    return io::matrix_from_json(io::parse_json_text(text, "m"), "m", -1, -1);
  };
  const Matrix two = from("[[1,2],[3,4]]");
  CHECK(two(1, 0) == 3.0);
  CHECK_THROWS_AS(from("[[1,2],[3]]"), InputError);
  CHECK_THROWS_AS(from("[1,2,3]"), InputError);
  CHECK_THROWS_AS(from("[[true]]"), InputError);
  CHECK_THROWS_AS(io::matrix_from_json(io::parse_json_text("[[1,2]]", "m"), "m", 2, 2),
                  InputError);
}
