#include <doctest.h>

#include <filesystem>

#include "koiter/config.hpp"
#include "koiter/errors.hpp"

using namespace koiter;

TEST_CASE("INI config with sections") {
  RunConfig cfg;
  load_config_text(R"(
; comment
case = generalized
eps = 1e-2, 1e-3
format = both
[mesh]
n1 = 8
n2 = 6
layers = 2
n1_3d = 4
n2_3d = 3
[solver]
method = cholesky
tol = 1e-12
[case]
penalty = 1e4
f = 0, 0, 3
)",
                   "test.ini", cfg);
  CHECK(cfg.cases == std::vector<std::string>{"generalized"});
  CHECK(*cfg.eps == std::vector<double>{1e-2, 1e-3});
  CHECK(cfg.format == OutputFormat::Both);
  CHECK(*cfg.mesh == std::array<int, 3>{8, 6, 2});
  CHECK(*cfg.mesh_3d == std::array<int, 2>{4, 3});
  CHECK(*cfg.solver_method == SolveMethod::DirectCholesky);
  CHECK(*cfg.solver_tol == 1e-12);

  const auto c = cfg.shell_case("generalized");
  CHECK(c.mesh.n1 == 8);
  CHECK(c.mesh.n2_3d == 3);
  CHECK(c.eps_list.size() == 2);
  CHECK(c.f[2] == 3.0);
  CHECK(c.solver.tol == 1e-12);
  CHECK(c.solver.accept_rounding_floor);
}

TEST_CASE("config errors name the key") {
  RunConfig cfg;
  try {
    load_config_text("[solver]\nmethods = cg\n", "bad.ini", cfg);
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("solver.methods") != std::string::npos);
    CHECK(std::string(e.what()).find("bad.ini") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config_text("[mesh]\nn1 = many\n", "x", cfg), ConfigError);
  CHECK_THROWS_AS(load_config_text("[solver]\nmethod = lu\n", "x", cfg), ConfigError);
  CHECK_THROWS_AS(load_config_text("format = pdf\n", "x", cfg), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/koiter.ini", cfg), ConfigError);
}

TEST_CASE("overrides are validated") {
  RunConfig cfg;
  cfg.penalty = 0.0;
  CHECK_THROWS_AS(cfg.shell_case("flexural"), InvalidPenalty);
  cfg.penalty.reset();
  cfg.mesh = std::array<int, 3>{8, 8, 3};
  CHECK_THROWS_AS(cfg.shell_case("elliptic"), ConfigError);
  cfg.mesh.reset();
  cfg.young = 1e9;
  cfg.poisson = 0.3;
  const auto c = cfg.shell_case("elliptic");
  CHECK(c.lame.mu == doctest::Approx(1e9 / 2.6));
  CHECK_THROWS_AS(cfg.shell_case("sphere"), ConfigError);
}

TEST_CASE("lists and output directories") {
  CHECK(parse_doubles("1, 2.5,3") == std::vector<double>{1, 2.5, 3});
  CHECK(parse_ints("32,32,4") == std::vector<int>{32, 32, 4});
  CHECK_THROWS_AS(parse_ints("3.5"), ConfigError);
  CHECK_THROWS_AS(parse_doubles(""), ConfigError);
  const auto dir = std::filesystem::temp_directory_path() / "koiter_cfg_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  CHECK_NOTHROW(ensure_writable_dir(dir.string()));
  CHECK(std::filesystem::is_directory(dir));
  CHECK_THROWS_AS(ensure_writable_dir("/proc/koiter_no_such_dir"), IoError);
  std::filesystem::remove_all(dir.parent_path());
}
