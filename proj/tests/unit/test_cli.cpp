#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qgld/cli/commands.hpp"
#include "test_support.hpp"

using namespace testsupport;
namespace cli = qgld::cli;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string run(const std::function<int(std::ostream&)>& cmd, int expected = cli::kExitOk) {
  std::ostringstream out;
  CHECK(cmd(out) == expected);
  return out.str();
}

}  // namespace

TEST_CASE("matrix presets") {
  CHECK(cli::load_matrix("sigma-x", 1) == (ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}));
  CHECK(cli::load_matrix("identity:4", 1) == ComplexMatrix::identity(4));
  CHECK(cli::load_matrix("diag:2,4", 1)(1, 1) == cplx(4.0));
  CHECK(cli::load_matrix("hadamard", 1).is_hermitian());
  CHECK(cli::load_matrix("random-spd:8", 3) == cli::load_matrix("random-spd:8", 3));
  CHECK(cli::load_matrix("random-hermitian:4", 3).is_hermitian());
  CHECK(code_of([] { cli::load_matrix("no-such-file.json", 1); }) == qgld::ErrorCode::Io);
}

TEST_CASE("vector presets and directions") {
  const CVector plus = cli::load_phi("plus", 2, 1);
  CHECK(std::abs(plus[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(cli::load_phi("basis:2", 4, 1) == CVector{0.0, 1.0, 0.0, 0.0});
  CHECK(qgld::norm2(cli::load_phi("random", 8, 5)) == doctest::Approx(1.0));
  CHECK(cli::parse_delta("element:1,2", 2, nullptr).matrix == cli::load_matrix("sigma-x", 1));
  CHECK(cli::parse_delta("proj:2", 2, nullptr).matrix(1, 1) == cplx(1.0));
  CHECK(cli::parse_delta("identity", 3, nullptr).matrix == ComplexMatrix::identity(3));
  CHECK(cli::parse_delta("outer", 2, &plus).matrix(0, 1).real() == doctest::Approx(0.5));
  CHECK_THROWS_AS(cli::parse_delta("element:3,1", 2, nullptr), qgld::Error);
  CHECK_THROWS_AS(cli::parse_delta("outer", 2, nullptr), qgld::Error);
  CHECK_THROWS_AS(cli::parse_delta("sideways", 2, nullptr), qgld::Error);
}

TEST_CASE("gradient command") {
  cli::GradientConfig cfg;
  cfg.matrix = "sigma-x";
  cfg.delta = "element:1,2";
  cfg.p = 2;
  auto rows = parse_csv(run([&](std::ostream& o) { return cli::cmd_gradient(cfg, o); }));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"p", "E_p", "delta_kind", "L", "m", "gradient_quantum", "gradient_oracle", "abs_error"});
  CHECK(std::abs(std::stod(rows[1][5]) - 0.999999) <= 1e-5);

  cfg.delta = "identity";
  cfg.p = 1;
  cfg.readout = "amplitude";
  rows = parse_csv(run([&](std::ostream& o) { return cli::cmd_gradient(cfg, o); }));
  CHECK(std::abs(std::stod(rows[1][5]) - 1.0) <= 1e-5);

  cfg.p.reset();
  rows = parse_csv(run([&](std::ostream& o) { return cli::cmd_gradient(cfg, o); }));
  CHECK(rows.size() == 3);

  cfg.matrix = "does-not-exist.json";
  std::ostringstream err;
  CHECK(cli::run_guarded([&] {
          std::ostringstream o;
          return cli::cmd_gradient(cfg, o);
        }, err) == cli::kExitInput);
  CHECK_FALSE(err.str().empty());
}

TEST_CASE("reference table command") {
  const auto rows = parse_csv(run([](std::ostream& o) { return cli::cmd_reproduce_table1(o); }));
  REQUIRE(rows.size() == 11);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][5].empty()) continue;
    CAPTURE(r);
    CHECK(std::abs(std::stod(rows[r][4]) - std::stod(rows[r][5])) <= 1e-5);
  }
  CHECK(rows[4][1] == "|0><0|");
  CHECK(rows[4][2] == "-");
  CHECK(rows[5][1] == "|1><1|");
  CHECK(rows[5][2] == "+");
  CHECK(rows[9][0] == "H");
  CHECK(std::abs(std::stod(rows[9][4]) - 0.70710691) <= 1e-6);
}

TEST_CASE("qgld command") {
  cli::QgldConfig cfg;
  cfg.matrix = "sigma-z";
  cfg.phi = "plus";
  auto j = nlohmann::json::parse(run([&](std::ostream& o) { return cli::cmd_qgld(cfg, o); }));
  CHECK(std::abs(j["total"].get<double>()) <= 2e-6);

  cfg.matrix = "identity:4";
  cfg.phi = "random";
  j = nlohmann::json::parse(run([&](std::ostream& o) { return cli::cmd_qgld(cfg, o); }));
  CHECK(std::abs(j["total"].get<double>() - 1.0) <= 2e-6);

  for (const char* mode : {"sigma", "sampled"}) {
    cfg.matrix = "diag:2,4";
    cfg.phi = "plus";
    cfg.mode = mode;
    j = nlohmann::json::parse(run([&](std::ostream& o) { return cli::cmd_qgld(cfg, o); }));
    CAPTURE(mode);
    CHECK(std::abs(j["total"].get<double>() - 0.375) <= 1e-5);
  }
}

TEST_CASE("error-versus-L sweep") {
  cli::QgldConfig cfg;
  cfg.matrix = "random-spd:4";
  cfg.seed = 7;
  cfg.sweep_l = {1e-2, 1e-3, 1e-4};
  cfg.format = cli::Format::csv;
  const auto rows = parse_csv(run([&](std::ostream& o) { return cli::cmd_qgld(cfg, o); }));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].back() == "abs_error");
  CHECK(std::stod(rows[1].back()) > std::stod(rows[2].back()));
  CHECK(std::stod(rows[2].back()) > std::stod(rows[3].back()));
}

TEST_CASE("lanczos and kernel commands") {
  cli::LanczosConfig lc;
  lc.matrix = "sigma-x";
  lc.k = 2;
  const auto j = nlohmann::json::parse(run([&](std::ostream& o) { return cli::cmd_lanczos(lc, o); }));
  CHECK(j.dump().find("values") != std::string::npos);

  cli::KernelDemoConfig kc;
  kc.points = 8;
  kc.holdout = 10;
  kc.lambda = 1e-4;
  const auto text = run([&](std::ostream& o) { return cli::cmd_kernel_demo(kc, o); });
  CHECK(parse_csv(text).size() > 1);
}

TEST_CASE("identical configuration gives identical bytes") {
  cli::QgldConfig cfg;
  cfg.matrix = "random-hermitian:8";
  cfg.phi = "random";
  cfg.seed = 42;
  const auto a = run([&](std::ostream& o) { return cli::cmd_qgld(cfg, o); });
  const auto b = run([&](std::ostream& o) { return cli::cmd_qgld(cfg, o); });
  CHECK(a == b);
  cfg.mode = "sampled";
  CHECK(run([&](std::ostream& o) { return cli::cmd_qgld(cfg, o); }) ==
        run([&](std::ostream& o) { return cli::cmd_qgld(cfg, o); }));
  const auto t1 = run([](std::ostream& o) { return cli::cmd_reproduce_table1(o); });
  CHECK(t1 == run([](std::ostream& o) { return cli::cmd_reproduce_table1(o); }));
}

TEST_CASE("exit codes") {
  std::ostringstream err;
  CHECK(cli::run_guarded([] { return cli::kExitOk; }, err) == cli::kExitOk);
  CHECK(cli::run_guarded([]() -> int { throw qgld::Error(qgld::ErrorCode::SingularMatrix, "x"); }, err) ==
        cli::kExitNumerical);
  CHECK(cli::run_guarded([]() -> int { throw qgld::Error(qgld::ErrorCode::NearZeroEigenvalue, "x"); }, err) ==
        cli::kExitNumerical);
  CHECK(cli::run_guarded([]() -> int { throw qgld::Error(qgld::ErrorCode::IndexOutOfRange, "x"); }, err) ==
        cli::kExitInput);
  CHECK(cli::run_guarded([]() -> int { throw std::runtime_error("boom"); }, err) == cli::kExitInput);
  CHECK(cli::fmt(0.1) == "0.1");
  CHECK(cli::fmt(1.0 / 3.0) == "0.333333333");
}
