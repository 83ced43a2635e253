#include "koiter/acceptance.hpp"

#include <cmath>
#include <optional>

#include <fmt/format.h>

namespace koiter {

namespace {

using Column = std::optional<ErrorValue> ResultRow::*;

std::vector<std::optional<double>> column(const CaseResult& r, Column c) {
  std::vector<std::optional<double>> out;
  for (const auto& row : r.rows) out.push_back(row.*c ? std::optional((row.*c)->relative) : std::nullopt);
  return out;
}

std::string show(const std::vector<std::optional<double>>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + (x ? fmt::format("{:.3g}", *x) : std::string("NA"));
  return "[" + s + "]";
}

bool complete(const std::vector<std::optional<double>>& v) {
  for (const auto& x : v)
    if (!x) return false;
  return !v.empty();
}

bool strictly_decreasing(const std::vector<std::optional<double>>& v) {
  if (!complete(v)) return false;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(*v[i] < *v[i - 1])) return false;
  return true;
}

// ratios err(i) / err(i + 1)
std::vector<double> ratios(const std::vector<std::optional<double>>& v) {
  std::vector<double> out;
  for (std::size_t i = 1; i < v.size(); ++i)
    out.push_back(v[i] && v[i - 1] && *v[i] > 0 ? *v[i - 1] / *v[i] : NAN);
  return out;
}

std::string show(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt::format("{:.3g}", x);
  return "[" + s + "]";
}

std::string runtime(const CaseResult& r, bool& pass) {
  const bool ok = r.wall_seconds < kCaseBudgetSeconds;
  pass = pass && ok;
  return fmt::format("runtime {:.0f}s{}", r.wall_seconds, ok ? "" : " over budget");
}

}  // namespace

Verdict elliptic_trend(const CaseResult& r) {
  const auto lk = column(r, &ResultRow::err_lk), k = column(r, &ResultRow::err_3dk),
             l = column(r, &ResultRow::err_3dl);
  const double drop = complete(lk) ? *lk.front() / *lk.back() : NAN;
  Verdict v;
  v.pass = r.rows.size() == 8 && strictly_decreasing(lk) && strictly_decreasing(k) && strictly_decreasing(l) &&
           drop >= 10.0;
  v.summary = fmt::format("ErrLK {} (drop {:.3g}x, need 10x), Err3DK {}, Err3DL {}; {}", show(lk), drop, show(k),
                          show(l), runtime(r, v.pass));
  return v;
}

Verdict generalized_trend(const CaseResult& r) {
  const auto k = column(r, &ResultRow::err_3dk);
  const auto q = ratios(k);
  Verdict v;
  v.pass = strictly_decreasing(k);
  for (double x : q) v.pass = v.pass && x >= 2.0 && x <= 10.0;
  v.summary = fmt::format("Err3DK {} ratios {} (need [2, 10]); {}", show(k), show(q), runtime(r, v.pass));
  return v;
}

Verdict flexural_trend(const CaseResult& r) {
  const auto lk = column(r, &ResultRow::err_lk), k = column(r, &ResultRow::err_3dk);
  const auto q = ratios(lk);
  Verdict v;
  v.pass = strictly_decreasing(lk) && strictly_decreasing(k);
  for (double x : q) v.pass = v.pass && x >= 20.0;
  double sat = NAN;
  if (r.penalty_energies.size() >= 2)
    sat = std::abs(r.penalty_energies[0] - r.penalty_energies[1]) / std::abs(r.penalty_energies[1]);
  v.pass = v.pass && sat < 0.01;
  v.summary = fmt::format("ErrLK {} ratios {} (need >= 20), Err3DK {}, penalty energies differ by {:.3g} (need < 0.01); {}",
                          show(lk), show(q), show(k), sat, runtime(r, v.pass));
  return v;
}

Verdict trend(const CaseResult& r) {
  switch (r.shell.kind) {
    case ShellKind::EllipticMembrane: return elliptic_trend(r);
    case ShellKind::GeneralizedMembrane: return generalized_trend(r);
    case ShellKind::Flexural: return flexural_trend(r);
  }
  return {};
}

Verdict regime_energies(const CaseResult& elliptic, const CaseResult& flexural) {
  auto last_ok = [](const CaseResult& r) -> const ResultRow* {
    if (r.rows.empty() || r.rows.back().ndof_koiter == 0) return nullptr;
    return &r.rows.back();
  };
  const ResultRow* e = last_ok(elliptic);
  const ResultRow* f = last_ok(flexural);
  const double ef = e ? e->flexural_fraction : NAN, fm = f ? f->membrane_fraction : NAN;
  Verdict v;
  v.pass = ef < 1e-3 && fm < 0.05;
  v.summary = fmt::format("elliptic flexural fraction {:.3g} at eps {:g} (need < 1e-3), cone membrane fraction {:.3g} "
                          "at eps {:g} (need < 0.05)",
                          ef, e ? e->eps : NAN, fm, f ? f->eps : NAN);
  return v;
}

}  // namespace koiter
