#include <doctest.h>

#include <cmath>

#include "koiter/acceptance.hpp"

using namespace koiter;

namespace {

// rows with err = first / ratio^i in the given column
CaseResult geometric(const std::string& name, std::optional<ErrorValue> ResultRow::*col, double first, double ratio) {
  CaseResult r;
  r.shell = builtin_case(name);
  for (std::size_t i = 0; i < r.shell.eps_list.size(); ++i) {
    ResultRow row;
    row.eps = r.shell.eps_list[i];
    row.ndof_koiter = 10;
    row.*col = ErrorValue{0.0, first / std::pow(ratio, static_cast<double>(i))};
    r.rows.push_back(row);
  }
  return r;
}

void fill(CaseResult& r, std::optional<ErrorValue> ResultRow::*col, double first, double ratio) {
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    r.rows[i].*col = ErrorValue{0.0, first / std::pow(ratio, static_cast<double>(i))};
}

}  // namespace

TEST_CASE("elliptic trend") {
  auto r = geometric("elliptic", &ResultRow::err_lk, 1.0, 2.0);
  fill(r, &ResultRow::err_3dk, 0.5, 1.5);
  fill(r, &ResultRow::err_3dl, 0.7, 1.1);
  CHECK(elliptic_trend(r).pass);  // 2^7 = 128x
  CHECK(trend(r).pass);
  fill(r, &ResultRow::err_lk, 1.0, 1.3);  // 1.3^7 = 6.3x
  CHECK(!elliptic_trend(r).pass);
  fill(r, &ResultRow::err_lk, 1.0, 2.0);
  r.rows[3].err_3dl.reset();
  CHECK(!elliptic_trend(r).pass);
  fill(r, &ResultRow::err_3dl, 0.7, 1.1);
  r.rows[4].err_3dk->relative = r.rows[3].err_3dk->relative;  // not strict
  CHECK(!elliptic_trend(r).pass);
  r = geometric("elliptic", &ResultRow::err_lk, 1.0, 2.0);
  fill(r, &ResultRow::err_3dk, 0.5, 1.5);
  fill(r, &ResultRow::err_3dl, 0.7, 1.1);
  r.wall_seconds = 700;
  CHECK(!elliptic_trend(r).pass);
}

TEST_CASE("generalized trend") {
  CHECK(generalized_trend(geometric("generalized", &ResultRow::err_3dk, 1.0, 3.16)).pass);
  CHECK(!generalized_trend(geometric("generalized", &ResultRow::err_3dk, 1.0, 1.5)).pass);
  CHECK(!generalized_trend(geometric("generalized", &ResultRow::err_3dk, 1.0, 12.0)).pass);
  CHECK(!generalized_trend(geometric("generalized", &ResultRow::err_3dk, 1.0, 0.5)).pass);
}

TEST_CASE("flexural trend and penalty saturation") {
  auto r = geometric("flexural", &ResultRow::err_lk, 1.0, 60.0);
  fill(r, &ResultRow::err_3dk, 1.0, 3.0);
  r.penalties = {1e6, 1e8};
  r.penalty_energies = {1.001, 1.0};
  CHECK(flexural_trend(r).pass);
  r.penalty_energies = {1.05, 1.0};
  CHECK(!flexural_trend(r).pass);
  r.penalty_energies = {1.001, 1.0};
  fill(r, &ResultRow::err_lk, 1.0, 10.0);
  CHECK(!flexural_trend(r).pass);
  r.penalty_energies.clear();
  fill(r, &ResultRow::err_lk, 1.0, 60.0);
  CHECK(!flexural_trend(r).pass);
}

TEST_CASE("regime energies") {
  auto e = geometric("elliptic", &ResultRow::err_lk, 1.0, 2.0);
  auto f = geometric("flexural", &ResultRow::err_lk, 1.0, 2.0);
  e.rows.back().flexural_fraction = 5e-4;
  f.rows.back().membrane_fraction = 0.01;
  CHECK(regime_energies(e, f).pass);
  f.rows.back().membrane_fraction = 0.2;
  CHECK(!regime_energies(e, f).pass);
  f.rows.back().membrane_fraction = 0.01;
  e.rows.back().ndof_koiter = 0;  // Koiter step failed
  CHECK(!regime_energies(e, f).pass);
}
