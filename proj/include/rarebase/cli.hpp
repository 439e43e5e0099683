#pragma once

// Command-line front end. run() takes the argument list without the program
// name and writes to the given streams, so tests can drive it in-process.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 resource cap.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "rarebase/basis.hpp"
#include "rarebase/crystal.hpp"
#include "rarebase/error.hpp"
#include "rarebase/harness.hpp"
#include "rarebase/maximal.hpp"
#include "rarebase/serialize.hpp"

namespace rarebase::cli {

enum exit_code : int { ok = 0, verification_failed = 1, usage = 2, resource = 3 };

struct Config {
  unsigned threads = 1;
  std::size_t max_grid_cells = std::size_t{1} << 27;
  std::size_t max_candidates = std::size_t{1} << 23;
  std::size_t max_pieces = std::size_t{1} << 16;
  std::size_t max_mantissa_bits = 4096;
};

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative())
    if (const char* dir = std::getenv("RAREBASE_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
  return p;
}

/// Writes via a sibling temporary and rename, so readers never see a partial file.
inline void write_atomic(const std::string& path, const std::string& content) {
  const auto target = resolve_output(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw error(errc::invalid_argument, "cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw error(errc::invalid_argument, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") out << content;
  else write_atomic(path, content);
}

inline json read_json(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw error(errc::parse_error, path + ": " + e.what());
  }
}

inline std::vector<std::int64_t> parse_ints(const std::string& text) {
  std::vector<std::int64_t> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      long long x = std::stoll(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      v.push_back(x);
    } catch (const std::exception&) {
      throw usage_error("expected comma-separated integers, got '" + text + "'");
    }
  }
  if (v.empty()) throw usage_error("empty integer list");
  return v;
}

/// "a..b" or a single integer; "2^a..2^b" is accepted for exponent ranges.
inline std::pair<std::int64_t, std::int64_t> parse_range(std::string text) {
  auto strip = [](std::string s) {
    if (s.rfind("2^", 0) == 0) s = s.substr(2);
    return s;
  };
  auto dots = text.find("..");
  std::string a = strip(text.substr(0, dots));
  std::string b = dots == std::string::npos ? a : strip(text.substr(dots + 2));
  auto lo = parse_ints(a), hi = parse_ints(b);
  if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0]) throw usage_error("bad range '" + text + "'");
  return {lo[0], hi[0]};
}

inline Point3 parse_point(const std::string& text) {
  std::vector<Dyadic> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(Dyadic::parse(tok));
  if (v.size() != 3) throw usage_error("point needs three coordinates: '" + text + "'");
  return {v[0], v[1], v[2]};
}

struct Exponents {
  std::vector<std::int64_t> js;
  Orientation orientation = Orientation::normal;
  BasisSpec basis;
};

/// Exponents from --j, or selected from the basis for --N. The default basis
/// is the shifted family with every integer exponent.
inline Exponents resolve_exponents(int n, const std::string& jtext, const std::string& basis_text,
                                   const Config& cfg) {
  Exponents e;
  e.basis = basis_text.empty() ? BasisSpec::zygmund(ExponentSet::all()) : BasisSpec::parse(basis_text);
  const auto* z = std::get_if<BasisSpec::ZygmundShifted>(&e.basis.variant());
  if (!jtext.empty()) {
    e.js = parse_ints(jtext);
    if (n > 0 && static_cast<std::size_t>(n) != e.js.size())
      throw usage_error("--N " + std::to_string(n) + " disagrees with " + std::to_string(e.js.size()) + " exponents");
    if (z) {
      if (exponents_in_set(e.js, z->exponents, z->orientation)) e.orientation = z->orientation;
      else if (exponents_in_set(e.js, z->exponents, Orientation::swapped)) e.orientation = Orientation::swapped;
      else e.orientation = z->orientation;
    }
  } else {
    if (n < 1) throw usage_error("give --N or --j");
    if (z) {
      auto sel = select_exponents(z->exponents, n);
      e.js = sel.j;
      e.orientation = sel.orientation;
    } else {
      e.js = default_schedule(n);
    }
  }
  if (!e.js.empty() && e.js.front() > 0 &&
      static_cast<std::size_t>(e.js.front()) + e.js.size() + 8 > cfg.max_mantissa_bits)
    throw error(errc::resource_cap, "exponents need more than " + std::to_string(cfg.max_mantissa_bits) +
                                        " mantissa bits");
  return e;
}

inline std::string report_text(const VerificationReport& r) {
  std::string s;
  for (const auto& c : r.checks)
    s += std::string(c.pass ? "PASS " : "FAIL ") + c.name + "  [" + c.identity + "]  expected " + c.expected +
         ", computed " + c.computed + "\n";
  if (const auto* f = r.first_failure())
    s += "first failing check: " + f->name + "\n";
  else
    s += "all " + std::to_string(r.checks.size()) + " checks passed\n";
  return s;
}

inline std::string svg_number(const Dyadic& d, double scale) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", d.to_double() * scale);
  return buf;
}

/// E_N strips in the unit square with the outlines of R_1..R_N.
inline std::string render_svg(const Construction& c, std::size_t max_strips) {
  const double size = 800.0;
  const DigitSet& cd = c.C();
  if (cd.depth() - cd.constraints().size() > 40 ||
      (std::uint64_t{1} << (cd.depth() - cd.constraints().size())) > max_strips)
    throw error(errc::resource_cap, "C has too many strips to draw");
  const Set1D strips = cd.to_set1d(max_strips);
  auto y = [&](const Dyadic& v) { return svg_number(Dyadic(1) - v, size); };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\" stroke=\"black\"/>\n";
  s += "<g fill=\"#4a6fa5\" data-strips=\"" + std::to_string(strips.size()) + "\">\n";
  const std::string w = svg_number(c.E().x1.hi, size);
  for (const auto& iv : strips.intervals())
    s += "<rect x=\"0\" y=\"" + y(iv.hi) + "\" width=\"" + w + "\" height=\"" + svg_number(iv.measure(), size) +
         "\"/>\n";
  s += "</g>\n<g fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1\">\n";
  for (int k = 1; k <= c.n(); ++k) {
    const Rect2 r = c.base_rect(k);
    s += "<rect x=\"0\" y=\"" + y(r.x2 + r.d2) + "\" width=\"" + svg_number(r.d1, size) + "\" height=\"" +
         svg_number(r.d2, size) + "\"/>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact verification of maximal-operator superlevel bounds over rare bases"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Config cfg;
  app.add_option("--threads", cfg.threads, "Worker threads (results do not depend on it)")->check(CLI::Range(1u, 256u));
  app.add_option("--max-grid-cells", cfg.max_grid_cells, "Cell cap for dense grids")->check(CLI::PositiveNumber);
  app.add_option("--max-candidates", cfg.max_candidates, "Candidate-box cap")->check(CLI::PositiveNumber);
  app.add_option("--max-pieces", cfg.max_pieces, "Cap on explicitly expanded pieces")->check(CLI::PositiveNumber);
  app.add_option("--max-mantissa-bits", cfg.max_mantissa_bits, "Cap on dyadic mantissa size")->check(CLI::PositiveNumber);

  int n = 0;
  std::string jtext, basis_text, out_path, json_path, format = "csv", input, seeds, alpha_text, lattice_text,
                                                       sides_text, heights_text, grid_text, domain_text;
  std::vector<std::string> points;
  int from = 2, to = 8;

  auto* construct = app.add_subcommand("construct", "Build the construction and its certificate as JSON");
  construct->add_option("--N", n, "Number of layers")->check(CLI::PositiveNumber);
  construct->add_option("--j", jtext, "Exponents j_1,...,j_N");
  construct->add_option("--basis", basis_text, "Basis descriptor");
  construct->add_option("-o,--out", out_path, "Output file (default stdout)");

  std::string check_file;
  auto* check = app.add_subcommand("check", "Re-verify a construction document");
  check->add_option("file", check_file, "Document from construct")->required();
  check->add_option("--json", json_path, "Write the report as JSON");

  auto* verify = app.add_subcommand("verify", "Verify every identity of the construction");
  verify->add_option("--N", n, "Number of layers")->check(CLI::PositiveNumber);
  verify->add_option("--j", jtext, "Exponents j_1,...,j_N");
  verify->add_option("--basis", basis_text, "Basis descriptor");
  verify->add_option("--json", json_path, "Write the report as JSON");

  auto* sw = app.add_subcommand("sweep", "Growth table over N");
  sw->add_option("--from", from)->check(CLI::PositiveNumber);
  sw->add_option("--to", to)->check(CLI::PositiveNumber);
  sw->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  sw->add_option("-o,--out", out_path);
  int sweep_cap = 12;
  sw->add_option("--max-N", sweep_cap, "Largest N accepted")->check(CLI::PositiveNumber);

  auto* mx = app.add_subcommand("maximal", "Certified lower bounds of the maximal function of an indicator");
  mx->add_option("--basis", basis_text, "Basis descriptor (default strong)");
  mx->add_option("--input", input, "Cylinder JSON, or a construction document")->required();
  mx->add_option("--point", points, "Point x1,x2,x3 (repeatable)");
  mx->add_option("--alpha", alpha_text, "Level for the superlevel bound from seed witnesses");
  mx->add_option("--lattice", lattice_text, "Anchor spacing exponents r1,r2,r3");
  mx->add_option("--sides", sides_text, "Planar side exponents a..b");
  mx->add_option("--heights", heights_text, "Height exponents a..b (2^a..2^b)");
  mx->add_option("--seed-witnesses", seeds, "Construction document whose witnesses join the candidates");
  mx->add_option("--grid", grid_text, "Dense grid resolution exponents r1,r2,r3");
  mx->add_option("--domain", domain_text, "Grid domain lo1,hi1,lo2,hi2,lo3,hi3");
  bool cells = false;
  mx->add_flag("--cells", cells, "With --grid, one CSV row per covered cell instead of a value histogram");
  mx->add_option("-o,--out", out_path);

  auto* cube = app.add_subcommand("cube-test", "Superlevel growth for the unit cube");
  std::string cube_basis = "fixed-ecc:0", alpha_exp = "1..6", fava_cap = "5/2";
  cube->add_option("--basis", cube_basis);
  cube->add_option("--alpha-exp", alpha_exp, "Range of m for alpha = 2^-m");
  cube->add_option("--lattice", lattice_text, "Anchor spacing exponent r");
  cube->add_option("--sides", sides_text, "Planar side exponents a..b");
  cube->add_option("--heights", heights_text, "Height exponents a..b");
  cube->add_option("--fava-cap", fava_cap, "Cap for alpha L(alpha) / (1 + m)");
  cube->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  cube->add_option("-o,--out", out_path);

  auto* render = app.add_subcommand("render", "SVG of E_N with the base rectangles");
  render->add_option("--N", n)->check(CLI::PositiveNumber);
  render->add_option("--j", jtext);
  render->add_option("-o,--out", out_path);

  auto fail = [&](int code, const std::string& name, const std::string& msg) {
    err << json{{"error", name}, {"message", msg}, {"exit", code}}.dump() << "\n";
    return code;
  };

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    return fail(usage, "UsageError", e.what());
  }

  try {
    if (*construct) {
      const auto e = detail::resolve_exponents(n, jtext, basis_text, cfg);
      Construction c(e.js, e.orientation);
      Certificate cert = build_certificate(c, e.basis);
      detail::emit(out_path, construction_document(c, cert).dump(1) + "\n", out);
      return ok;
    }
    if (*check) {
      const VerificationReport r = check_document(detail::read_json(check_file));
      out << detail::report_text(r);
      if (!json_path.empty()) detail::write_atomic(json_path, to_json(r).dump(1) + "\n");
      return r.pass() ? ok : verification_failed;
    }
    if (*verify) {
      const auto e = detail::resolve_exponents(n, jtext, basis_text, cfg);
      const VerificationReport r = verify_construction(e.js, e.basis, e.orientation, cfg.threads);
      out << detail::report_text(r);
      if (!json_path.empty()) detail::write_atomic(json_path, to_json(r).dump(1) + "\n");
      return r.pass() ? ok : verification_failed;
    }
    if (*sw) {
      const auto rows = sweep(from, to, cfg.threads, sweep_cap);
      detail::emit(out_path, format == "csv" ? sweep_csv(rows) : sweep_document(rows).dump(1) + "\n", out);
      return ok;
    }
    if (*mx) {
      json doc = detail::read_json(input);
      const json& zj = doc.contains("Z") ? doc.at("Z") : doc;
      LatticeSearch search;
      search.basis = basis_text.empty() ? BasisSpec::strong() : BasisSpec::parse(basis_text);
      search.max_candidates = cfg.max_candidates;
      if (!lattice_text.empty()) {
        auto r = detail::parse_ints(lattice_text);
        if (r.size() != 3) throw usage_error("--lattice needs r1,r2,r3");
        search.spacing_exp = {r[0], r[1], r[2]};
      }
      std::tie(search.side_min, search.side_max) = detail::parse_range(sides_text.empty() ? "0" : sides_text);
      std::tie(search.height_min, search.height_max) = detail::parse_range(heights_text.empty() ? "0" : heights_text);
      search.use_lattice = !lattice_text.empty() || seeds.empty();
      std::vector<PieceFamily> seed_fams;
      if (!seeds.empty()) {
        json sd = detail::read_json(seeds);
        for (const auto& f : rarebase::detail::field(rarebase::detail::field(sd, "certificate"), "families"))
          seed_fams.push_back(family_from_json(f));
        for (const auto& f : seed_fams) {
          if (points.empty() && grid_text.empty()) break;
          if (f.count() > cfg.max_pieces) throw error(errc::resource_cap, "seed family exceeds --max-pieces");
          for (const auto& b : f.anchors.enumerate(cfg.max_pieces)) search.seeds.push_back(f.member(b).witness);
          if (search.seeds.size() > cfg.max_pieces) throw error(errc::resource_cap, "seeds exceed --max-pieces");
        }
      }
      json result{{"schema", kSchema}, {"kind", "maximal"}, {"basis", search.basis.to_string()},
                  {"label", "certified lower bounds"}};
      auto evaluate = [&](const auto& f) -> std::optional<std::string> {
        if (!points.empty()) {
          json rows = json::array();
          for (const auto& p : points) {
            const Point3 x = detail::parse_point(p);
            json row{{"point", json::array({to_json(x[0]), to_json(x[1]), to_json(x[2])})}};
            try {
              auto v = maximal_lower_at(x, f, search);
              row["value"] = to_json(v.value);
              row["value_decimal"] = v.value.to_decimal();
              row["witness"] = to_json(v.witness);
              row["candidates"] = v.candidates;
            } catch (const error& e) {
              if (e.code() != errc::empty_candidate_set) throw;
              row["value"] = nullptr;
              row["error"] = e.name();
            }
            rows.push_back(std::move(row));
          }
          result["points"] = rows;
        }
        if (!alpha_text.empty()) {
          if (seed_fams.empty()) throw usage_error("--alpha needs --seed-witnesses");
          const Dyadic a = Dyadic::parse(alpha_text);
          result["alpha"] = to_json(a);
          if (a > Dyadic(1)) result["superlevel_lower"] = to_json(Dyadic(0));
          else if constexpr (std::is_same_v<std::decay_t<decltype(f)>, Cylinder3<DigitSet>>)
            result["superlevel_lower"] = to_json(superlevel_lower(f, a, seed_fams, search.basis));
          else {
            std::vector<CertifiedPiece> pieces;
            for (const auto& fam : seed_fams)
              for (const auto& b : fam.anchors.enumerate(cfg.max_pieces)) pieces.push_back(fam.member(b));
            result["superlevel_lower"] = to_json(superlevel_lower(f, a, pieces, search.basis));
          }
        }
        return std::nullopt;
      };
      if (!grid_text.empty()) {
        if (cylinder_is_digits(zj) && !doc.contains("Z")) throw usage_error("--grid needs an explicit cylinder");
        Cylinder3<Set1D> f = cylinder_is_digits(zj)
                                 ? Cylinder3<Set1D>{{interval_from_json(zj.at("x1")),
                                                     digitset_from_json(zj.at("x2set")).to_set1d(cfg.max_grid_cells)},
                                                    interval_from_json(zj.at("x3"))}
                                 : set_cylinder_from_json(zj);
        auto r = detail::parse_ints(grid_text);
        if (r.size() != 3) throw usage_error("--grid needs r1,r2,r3");
        std::vector<Dyadic> dom;
        if (domain_text.empty()) dom = {f.base.x1.lo, f.base.x1.hi, 0, 1, f.x3.lo, f.x3.hi};
        else {
          std::stringstream ss(domain_text);
          std::string tok;
          while (std::getline(ss, tok, ',')) dom.push_back(Dyadic::parse(tok));
        }
        if (dom.size() != 6) throw usage_error("--domain needs six values");
        const Grid3 g = Grid3::rasterize(f, {r[0], r[1], r[2]}, Box3::from_spans({dom[0], dom[1]}, {dom[2], dom[3]}, {dom[4], dom[5]}),
                                         cfg.max_grid_cells);
        const GridValues v = grid_maximal(g, search, cfg.threads);
        std::string csv;
        if (cells) {
          csv = "i,j,k,value,value_decimal\n";
          for (std::size_t i = 0; i < v.dims[0]; ++i)
            for (std::size_t j = 0; j < v.dims[1]; ++j)
              for (std::size_t k = 0; k < v.dims[2]; ++k)
                if (v.covered(i, j, k)) {
                  const Dyadic val = v.at(i, j, k);
                  csv += std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + "," +
                         val.to_string() + "," + val.to_decimal() + "\n";
                }
        } else {
          std::vector<std::uint64_t> hist(v.table.size() + 1, 0);
          for (auto r : v.rank) ++hist[r];
          csv = "value,value_decimal,cells,volume\n";
          for (std::size_t r = hist.size(); r-- > 0;) {
            if (!hist[r]) continue;
            const Dyadic val = r ? v.table[r - 1] : Dyadic(0);
            csv += (r ? val.to_string() : std::string("uncovered")) + "," + val.to_decimal() + "," +
                   std::to_string(hist[r]) + "," +
                   (Dyadic(static_cast<unsigned long long>(hist[r])) * g.cell_volume()).to_string() + "\n";
          }
        }
        detail::emit(out_path, csv, out);
        return ok;
      }
      if (points.empty() && alpha_text.empty()) throw usage_error("maximal needs --point, --alpha or --grid");
      if (cylinder_is_digits(zj)) evaluate(digit_cylinder_from_json(zj));
      else evaluate(set_cylinder_from_json(zj));
      detail::emit(out_path, result.dump(1) + "\n", out);
      return ok;
    }
    if (*cube) {
      const BasisSpec b = BasisSpec::parse(cube_basis);
      auto [m0, m1] = detail::parse_range(alpha_exp);
      if (m0 < 0 || m1 > 30) throw usage_error("--alpha-exp must lie in 0..30");
      std::vector<int> ms;
      for (auto m = m0; m <= m1; ++m) ms.push_back(static_cast<int>(m));
      CubeOptions o;
      o.max_candidates = cfg.max_candidates;
      o.max_cells = cfg.max_grid_cells;
      if (!lattice_text.empty()) {
        auto r = detail::parse_ints(lattice_text);
        if (r.size() != 1) throw usage_error("--lattice takes one spacing exponent for the cube test");
        o.spacing_exp = r[0];
      }
      if (!sides_text.empty()) std::tie(o.side_min, o.side_max) = detail::parse_range(sides_text);
      if (heights_text.empty()) o.height_max = std::max<std::int64_t>(o.height_max, m1);
      else std::tie(o.height_min, o.height_max) = detail::parse_range(heights_text);
      const CubeReport rep = cube_test(b, ms, o, cfg.threads);
      const Dyadic capd = Dyadic::parse(fava_cap);
      const FavaReport fava = fava_probe(
          rep, to_rational(capd));
      if (format == "json") {
        detail::emit(out_path, to_json(rep, fava).dump(1) + "\n", out);
      } else {
        std::string csv = "m,alpha,L,alpha_L,alpha_L_decimal,increment,boxes,probe_ratio\n";
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
          const auto& r = rep.rows[i];
          csv += std::to_string(r.m) + "," + r.alpha.to_string() + "," + r.level.to_string() + "," +
                 r.scaled.to_string() + "," + r.scaled.to_decimal() + "," +
                 (i ? (r.scaled - rep.rows[i - 1].scaled).to_string() : std::string()) + "," +
                 std::to_string(r.boxes) + "," + rational_string(fava.rows[i].ratio) + "\n";
        }
        detail::emit(out_path, csv, out);
      }
      return rep.strictly_increasing() ? ok : verification_failed;
    }
    if (*render) {
      std::vector<std::int64_t> js = jtext.empty() ? (n > 0 ? default_schedule(n) : std::vector<std::int64_t>{5, 3, 1})
                                                   : detail::parse_ints(jtext);
      if (js.size() > 4) throw error(errc::resource_cap, "render is limited to N <= 4");
      Construction c(js);
      detail::emit(out_path, detail::render_svg(c, cfg.max_pieces * 4), out);
      return ok;
    }
  } catch (const usage_error& e) {
    return fail(usage, "UsageError", e.what());
  } catch (const error& e) {
    switch (e.code()) {
      case errc::resource_cap: return fail(resource, e.name(), e.what());
      case errc::invalid_argument:
      case errc::parse_error:
      case errc::insufficient_exponents:
      case errc::not_dyadic:
      case errc::resolution_mismatch:
      case errc::empty_candidate_set: return fail(usage, e.name(), e.what());
      default: return fail(verification_failed, e.name(), e.what());
    }
  } catch (const std::bad_alloc&) {
    return fail(resource, "ResourceCap", "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(usage, "IoError", e.what());
  }
  return usage;
}

}  // namespace rarebase::cli
