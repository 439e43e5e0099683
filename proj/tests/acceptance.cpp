// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "rarebase/cli.hpp"

using namespace rarebase;

namespace {

const BasisSpec kAll = BasisSpec::zygmund(ExponentSet::all());

unsigned hw() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::pair<int, std::string> cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(std::move(args), out, err);
  return {code, out.str() + err.str()};
}

// 1: every identity holds for the canonical schedules N = 2..8 within 60 s.
Outcome verify_range() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t checks = 0;
  for (int n = 2; n <= 8; ++n) {
    auto r = verify_construction(default_schedule(n), kAll, Orientation::normal, hw());
    checks += r.checks.size();
    o.require(r.pass(), "N=" + std::to_string(n) + " " + (r.pass() ? "" : r.first_failure()->name));
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(s < 60.0, "took " + std::to_string(s) + " s");
  if (o.pass) o.detail = std::to_string(checks) + " checks in " + std::to_string(s).substr(0, 5) + " s";
  return o;
}

// 2: exact growth W = N(N-1)/8 and W / log2(1/alpha)^2 = (N-1)/(8N), rising toward 1/8.
Outcome growth() {
  Outcome o;
  const auto rows = sweep(2, 8, hw());
  o.require(rows[0].w == Dyadic::parse("1/4") && rows[1].w == Dyadic::parse("3/4") &&
                rows[2].w == Dyadic::parse("3/2"),
            "W(2..4) differs from 1/4, 3/4, 3/2");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    o.require(r.w == r.reference, "W != N(N-1)/8 at N=" + std::to_string(r.n));
    o.require(r.w_over_log2 == rational(r.n - 1, 8 * r.n), "ratio off at N=" + std::to_string(r.n));
    o.require(r.w_over_log2 < rational(1, 8), "ratio reached 1/8");
    if (i) o.require(r.w_over_log2 > rows[i - 1].w_over_log2, "ratio not increasing at N=" + std::to_string(r.n));
  }
  if (o.pass) o.detail = "N=2..8, last ratio " + rational_string(rows.back().w_over_log2);
  return o;
}

// 3: dense grid oracle on Z_2 at cells 2^-9 x 2^-9 x 2^-6 over [0,1]^2 x [0,4].
Outcome grid_oracle() {
  Outcome o;
  Construction c(default_schedule(2));
  const Certificate cert = build_certificate(c, kAll);
  const auto pieces = cert.expand();
  const auto f = c.Z_explicit();
  const Box3 domain = Box3::from_spans(Interval1D(0, 1), Interval1D(0, 1), Interval1D(0, 4));
  const Grid3 g = Grid3::rasterize(f, {9, 9, 6}, domain);
  o.require(Dyadic(static_cast<unsigned long long>(g.total())) * g.cell_volume() == c.Z().measure(),
            "rasterized volume differs from |Z|");

  LatticeSearch seeds_only;
  seeds_only.basis = kAll;
  seeds_only.use_lattice = false;
  for (const auto& p : pieces) seeds_only.seeds.push_back(p.witness);
  LatticeSearch wide = seeds_only;
  wide.use_lattice = true;
  wide.spacing_exp = {2, 2, 0};
  wide.side_min = -2;
  wide.side_max = -1;
  wide.height_min = 0;
  wide.height_max = 1;

  const GridValues exact = grid_maximal(g, seeds_only, hw());
  const GridValues lower = grid_maximal(g, wide, hw());
  const Dyadic alpha = c.alpha();
  std::uint64_t region_cells = 0;
  for (const auto& p : pieces) {
    auto range = g.cell_range(p.region);
    o.require(range.has_value(), "piece region not aligned to the grid");
    if (!range) break;
    const auto& [lo, hi] = *range;
    for (std::size_t i = lo[0]; i < hi[0]; ++i)
      for (std::size_t j = lo[1]; j < hi[1]; ++j)
        for (std::size_t k = lo[2]; k < hi[2]; ++k) {
          ++region_cells;
          o.require(exact.at(i, j, k) == alpha, "witness-aligned cell value differs from 2^-N");
          o.require(lower.at(i, j, k) >= alpha, "cell in certified region below 2^-N");
        }
  }
  o.require(Dyadic(static_cast<unsigned long long>(region_cells)) * g.cell_volume() == certificate_measure(cert),
            "region cells do not add up to the certificate");

  std::uint64_t above = 0;
  for (std::size_t i = 0; i < g.dims()[0]; ++i)
    for (std::size_t j = 0; j < g.dims()[1]; ++j)
      for (std::size_t k = 0; k < g.dims()[2]; ++k) above += lower.at(i, j, k) >= alpha;
  const Dyadic level = Dyadic(static_cast<unsigned long long>(above)) * g.cell_volume();
  o.require(level >= certificate_measure(cert), "grid superlevel below the certificate");

  // pointwise search agrees with the grid at sampled cell centres
  for (std::size_t s = 0; s < 64; ++s) {
    const std::size_t i = (s * 97) % g.dims()[0], j = (s * 389) % g.dims()[1], k = (s * 53) % g.dims()[2];
    const Box3 cell = g.cell_box(i, j, k);
    const Point3 x{cell.base.x1 + cell.base.d1.halve(), cell.base.x2 + cell.base.d2.halve(),
                   cell.x3.lo + cell.x3.measure().halve()};
    Dyadic v;
    try {
      v = maximal_lower_at(x, f, wide).value;
    } catch (const error&) {
      v = 0;
    }
    o.require(v == lower.at(i, j, k), "pointwise value differs from grid at a sample");
  }
  if (o.pass)
    o.detail = std::to_string(g.cell_count()) + " cells, grid level " + level.to_string() + " >= certificate " +
               certificate_measure(cert).to_string();
  return o;
}

// 4: cube test for the fixed-eccentricity basis, plus dominance by the strong basis.
Outcome cube() {
  Outcome o;
  const Dyadic c0 = Dyadic::parse("15/8");
  const auto rep = cube_test(BasisSpec::fixed_eccentricity(0), {1, 2, 3, 4, 5, 6}, {}, hw());
  o.require(rep.strictly_increasing(), "alpha L(alpha) not strictly increasing");
  o.require(rep.min_increment() && *rep.min_increment() >= c0, "increment below 15/8");
  const auto fava = fava_probe(rep, rational(5, 2));
  o.require(fava.within_cap, "probe ratio " + rational_string(fava.max_ratio) + " above 5/2");

  CubeOptions small;
  small.height_max = 3;
  const LatticeSearch s = cube_lattice(BasisSpec::fixed_eccentricity(0), small);
  std::vector<Point3> pts;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int d = 0; d < 4; ++d)
        pts.push_back({Dyadic::parse(std::to_string(2 * a - 1) + "/2^1"), Dyadic::parse(std::to_string(2 * b + 1) + "/2^2"),
                       Dyadic::parse(std::to_string(4 * d - 3) + "/2^2")});
  for (const auto& row : dominance_check(unit_cube_indicator(), pts, s)) o.require(row.ok, "dominance fails");
  if (o.pass)
    o.detail = "min increment " + rep.min_increment()->to_string() + ", probe max " + rational_string(fava.max_ratio) +
               ", " + std::to_string(pts.size()) + " dominance points";
  return o;
}

// 5: byte-identical outputs across runs and thread counts; construct -> check round trips.
Outcome determinism() {
  Outcome o;
  for (const std::vector<std::string>& base :
       {std::vector<std::string>{"sweep", "--from", "2", "--to", "8"},
        std::vector<std::string>{"construct", "--N", "6"},
        std::vector<std::string>{"cube-test", "--alpha-exp", "1..4", "--format", "json"}}) {
    auto a = base, b = base;
    a.insert(a.end(), {"--threads", "1"});
    b.insert(b.end(), {"--threads", "4"});
    const auto r1 = cli_run(a), r2 = cli_run(a), r3 = cli_run(b);
    o.require(r1.first == 0, base[0] + " failed");
    o.require(r1.second == r2.second && r1.second == r3.second, base[0] + " output not reproducible");
  }
  for (int n = 2; n <= 8; ++n) {
    Construction c(default_schedule(n));
    const auto doc = construction_document(c, build_certificate(c, kAll));
    const auto r = check_document(json::parse(doc.dump()));
    o.require(r.pass(), "check failed for N=" + std::to_string(n));
  }
  if (o.pass) o.detail = "3 commands x 3 runs, round trips N=2..8";
  return o;
}

// 6: the exponents (5,3,1) break the gap hypothesis and verify says so.
Outcome negative_control() {
  Outcome o;
  const auto [code, text] = cli_run({"verify", "--N", "3", "--j", "5,3,1"});
  o.require(code == 1, "exit code " + std::to_string(code));
  o.require(text.find("first failing check: hypothesis.gap_condition") != std::string::npos,
            "failing check not named");
  if (o.pass) o.detail = "exit 1 at hypothesis.gap_condition";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 verify N=2..8", verify_range},  {"2 exact growth", growth},     {"3 grid oracle", grid_oracle},
      {"4 cube test", cube},              {"5 determinism", determinism}, {"6 negative control", negative_control}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
