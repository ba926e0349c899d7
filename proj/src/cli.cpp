#include "twoline/cli.hpp"

#include "twoline/error.hpp"
#include "twoline/json_io.hpp"
#include "twoline/kernels.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace twoline::cli {

namespace {

using io::Json;

std::vector<Param> param_list(const std::string& s) {
  std::vector<Param> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto p = Param::parse(item);
    if (!p.positive()) throw InputError("parameters must be positive, got " + item);
    out.push_back(p);
  }
  if (out.empty()) throw InputError("empty parameter list '" + s + "'");
  return out;
}

std::string block_str(const std::vector<int>& b, const cosets::FiniteGroup& g) {
  std::string s = "{";
  for (size_t i = 0; i < b.size(); ++i) s += (i ? ", " : "") + g.name(b[i]);
  return s + "}";
}

void print_table(std::ostream& out, const cosets::PairClassification& c) {
  auto yn = [&](cosets::Cell cell) { return c[cell] ? "yes" : "no"; };
  out << std::left << "         " << std::setw(6) << "+" << "-\n"
      << "  fix    " << std::setw(6) << yn(cosets::Cell::FixPlus) << yn(cosets::Cell::FixMinus) << "\n"
      << "  ex     " << std::setw(6) << yn(cosets::Cell::ExPlus) << yn(cosets::Cell::ExMinus) << "\n";
}

std::string germ_str(const germs::AnyGerm& g) {
  if (const auto* e = std::get_if<germs::Germ>(&g)) return germs::to_string(*e);
  return "numeric germ (" + std::get<germs::NumericGerm>(g).provenance() + ")";
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json = false;
};

// ---------------------------------------------------------------- commands

int cmd_cosets(Context& cx, const std::string& file, const std::string& c_name, const std::string& d_name, bool pm) {
  auto spec = io::group_from_json(io::read_file(file));
  const auto& g = spec.group;
  cosets::CosetPartition part;
  std::string title;
  if (pm) {
    const std::string name = d_name.empty() ? c_name : d_name;
    if (name.empty()) throw InputError("--pm needs --D");
    part = cosets::pm_double_cosets(g, spec.subgroup(name));
    title = "(" + name + ",+-)-double cosets";
  } else {
    if (c_name.empty() || d_name.empty()) throw InputError("double cosets need --C and --D");
    part = cosets::double_cosets(g, spec.subgroup(c_name), spec.subgroup(d_name));
    title = c_name + "\\G/" + d_name + " double cosets";
  }
  if (cx.json) {
    cx.out << io::dump(io::to_json(part, g));
  } else {
    cx.out << title << " (" << part.blocks.size() << " blocks):\n";
    for (const auto& b : part.blocks) cx.out << "  " << block_str(b, g) << "\n";
  }
  return kOk;
}

int cmd_classify(Context& cx, const std::string& a_text, const std::string& b_text, int k, bool grid) {
  if (k < 1) throw InputError("--k must be at least 1");
  auto as = param_list(a_text), bs = param_list(b_text);
  if (grid) {
    auto cells = kernels::classify_grid(as, bs, k);
    Json rows = Json::array();
    for (size_t i = 0; i < as.size(); ++i)
      for (size_t j = 0; j < bs.size(); ++j) {
        const auto& c = cells[i * bs.size() + j];
        Json cj = Json::object();
        for (auto cell : cosets::kCells) cj[cosets::to_string(cell)] = c[cell];
        rows.push_back(Json{{"a", as[i].str()},
                            {"b", bs[j].str()},
                            {"diffeomorphic", c.any()},
                            {"cells", cj},
                            {"intersection_type",
                             Json{{"fix", io::intersection_name(c.fix_type)}, {"ex", io::intersection_name(c.ex_type)}}}});
      }
    if (cx.json) {
      cx.out << io::dump(Json{{"k", k}, {"grid", rows}});
    } else {
      for (const auto& r : rows)
        cx.out << "a=" << r["a"].get<std::string>() << " b=" << r["b"].get<std::string>() << ": "
               << (r["diffeomorphic"].get<bool>() ? "diffeomorphic" : "not diffeomorphic") << "\n";
    }
    return kOk;
  }
  if (as.size() != 1 || bs.size() != 1) throw InputError("lists of parameters need --grid");
  const Param &a = as[0], &b = bs[0];
  auto classes = dline::diffeo_classes(a, b, k);
  auto report = io::classification_json(a, b, k, classes);
  if (cx.json) {
    cx.out << io::dump(report);
  } else {
    cx.out << "W_" << a.str() << " -> W_" << b.str() << ", C^" << k << "\n";
    print_table(cx.out, classes.cells);
    cx.out << "intersection type: fix " << io::intersection_name(classes.cells.fix_type) << ", ex "
           << io::intersection_name(classes.cells.ex_type) << "\n";
    if (classes.cells.any()) {
      cx.out << "witnesses:\n";
      for (const auto& w : classes.witnesses)
        cx.out << "  " << std::left << std::setw(5) << cosets::to_string(w.cell) << " " << std::setw(9) << w.kind
               << germ_str(w.map.restriction()) << "\n";
    } else {
      cx.out << "not diffeomorphic: " << report["obstruction"].get<std::string>() << "\n";
    }
  }
  return classes.cells.any() ? kOk : kNegative;
}

int cmd_germ(Context& cx, const std::string& op, const std::vector<std::string>& files, int k) {
  std::vector<germs::Germ> gs;
  for (size_t i = 0; i < files.size(); ++i) gs.push_back(io::germ_from_json(io::read_file(files[i])));
  if (op == "compose") {
    if (gs.size() != 2) throw InputError("germ compose needs two germ files (outer inner)");
    auto r = germs::compose(gs[0], gs[1]);
    cx.out << (cx.json ? io::dump(io::to_json(r)) : germ_str(r) + "\n");
    return kOk;
  }
  if (op == "invert") {
    if (gs.size() != 1) throw InputError("germ invert needs one germ file");
    auto r = germs::invert(gs[0]);
    cx.out << (cx.json ? io::dump(io::to_json(r)) : germ_str(r) + "\n");
    return kOk;
  }
  if (op == "jet") {
    if (gs.size() != 1) throw InputError("germ jet needs one germ file");
    if (k < 1 || k > germs::kMaxJetOrder) throw InputError("--k must be in 1.." + std::to_string(germs::kMaxJetOrder));
    auto j = germs::jet(gs[0], k);
    auto rep = germs::compare_sides(j);
    if (cx.json) {
      cx.out << io::dump(Json{{"jet", io::to_json(j)}, {"smoothness", io::to_json(rep)}});
    } else {
      for (int i = 0; i < j.order; ++i)
        cx.out << "order " << i + 1 << ": " << germs::to_string(j.neg[i]) << " (x<0), " << germs::to_string(j.pos[i])
               << " (x>0)\n";
      cx.out << germs::describe(rep) << "\n";
    }
    return kOk;
  }
  throw InputError("unknown germ operation '" + op + "' (compose, invert, jet)");
}

int cmd_structure(Context& cx, const std::string& h_file, const std::string& g_file, int k_flag) {
  auto h = io::structure_from_json(io::read_file(h_file));
  auto g = io::structure_from_json(io::read_file(g_file));
  const int k = k_flag > 0 ? k_flag : std::max(h.k, g.k);
  auto transition = germs::compose(h.h, germs::invert(g.h));
  auto rep = germs::smoothness_at_zero(transition, k);
  auto answer = dline::same_structure(h.h, g.h, k);
  if (cx.json) {
    cx.out << io::dump(Json{{"same", germs::to_string(answer)},
                            {"k", k},
                            {"transition", io::to_json(transition)},
                            {"smoothness", io::to_json(rep)}});
  } else {
    cx.out << germs::to_string(answer) << "\n";
    cx.out << "transition h o g^-1: " << germ_str(transition) << "\n" << germs::describe(rep) << "\n";
  }
  switch (answer) {
    case germs::Certainty::True: return kOk;
    case germs::Certainty::False: return kNegative;
    case germs::Certainty::Indeterminate: return kIndeterminate;
  }
  return kIndeterminate;
}

int cmd_psi(Context& cx, const std::string& a_text, int k, bool selfcheck) {
  auto a = Param::parse(a_text);
  if (!a.positive()) throw InputError("--a must be positive");
  auto p = dline::psi(a.value(), k);
  Json report{{"a", a.str()},
              {"k", k},
              {"restriction", io::to_json(p.restriction())},
              {"origin_action", dline::to_string(p.origin_action())},
              {"u_presentation", io::to_json(p.u_presentation())},
              {"v_presentation", io::to_json(p.v_presentation())}};
  bool ok = true;
  if (selfcheck) {
    const double r = std::sqrt(a.value());
    dline::SpecialMinimalAtlas w{germs::make_wa(a.value())};
    auto square = dline::compose_diffeo(p, p);
    dline::DiffeoL id(germs::Germ::identity(), dline::OriginAction::Fix, w, w, k);
    const bool involution = dline::same_map(square, id);
    const bool exchanges = p.origin_action() == dline::OriginAction::Exchange &&
                           p(dline::PointL::real(0.0)) == dline::PointL::origin_tilde();
    const auto u_expected = germs::Germ::linear(-r);
    const auto v_expected = germs::Germ::linear(-1.0 / r);
    const bool u_ok = dline::germs_agree(p.u_presentation(), u_expected);
    const bool v_ok = dline::germs_agree(p.v_presentation(), v_expected);
    const auto phi = germs::diff_membership(dline::phi_ex(p), k);
    ok = involution && exchanges && u_ok && v_ok && phi == germs::Certainty::True && p.certified();
    report["selfcheck"] = Json{{"psi_squared_is_identity", involution},
                               {"exchanges_origins", exchanges},
                               {"u_presentation_is_-sqrt(a)x", u_ok},
                               {"v_presentation_is_-x/sqrt(a)", v_ok},
                               {"phi_ex_in_diff", germs::to_string(phi)},
                               {"pass", ok}};
  }
  if (cx.json) {
    cx.out << io::dump(report);
  } else {
    cx.out << "psi_" << a.str() << ": " << germ_str(p.restriction()) << ", exchanges the origins\n";
    cx.out << "  U-presentation: " << germ_str(p.u_presentation()) << "\n";
    cx.out << "  V-presentation: " << germ_str(p.v_presentation()) << "\n";
    if (selfcheck) {
      const auto& s = report["selfcheck"];
      for (const auto& [key, v] : s.items())
        if (key != "pass") cx.out << "  " << key << ": " << (v.is_boolean() ? (v.get<bool>() ? "yes" : "no") : v.get<std::string>()) << "\n";
      cx.out << "selfcheck " << (ok ? "passed" : "FAILED") << " at order " << k << "\n";
    }
  }
  return ok ? kOk : kNegative;
}

void print_cert(std::ostream& out, const join::SmoothCert& c) {
  out << "C^" << c.k << " certificate: " << (c.pass ? "pass" : "FAIL") << " (" << c.points << " points, grid level "
      << c.grid_level << ")\n";
  for (size_t j = 0; j < c.max_residual.size(); ++j)
    out << "  order " << j + 1 << ": max residual " << c.max_residual[j] << " (tol " << c.tolerance[j] << ")\n";
  if (c.refinement_checked) out << "  refinement x2: " << (c.refinement_stable ? "stable" : "unstable") << "\n";
  if (c.unconverged) out << "  " << c.unconverged << " unconverged one-sided estimates (agreeing within tol)\n";
  for (const auto& f : c.failures) out << "  " << f << "\n";
}

struct Tuning {
  int grid_level = 0;
  int max_retries = -1;
  double eps_fraction = 0;
};

int cmd_join(Context& cx, const std::string& file, int k, const std::vector<double>& tol, const std::string& order,
             int samples, const Tuning& tune) {
  auto spec = io::join_spec_from_json(io::read_file(file));
  join::JoinOptions opt;
  opt.verify.k = k > 0 ? k : spec.k;
  if (opt.verify.k > join::kMaxCertOrder) throw InputError("--k must be in 1..4");
  opt.verify.tol = tol.empty() ? spec.tol : tol;
  opt.verify.grid_level = tune.grid_level > 0 ? tune.grid_level : spec.grid_level;
  if (tune.max_retries >= 0) opt.glue.max_retries = tune.max_retries;
  if (tune.eps_fraction > 0) opt.glue.eps_fraction = tune.eps_fraction;
  auto ord = spec.order;
  if (order == "middle-out") ord = join::CollapseOrder::MiddleOut;
  else if (order == "left-to-right") ord = join::CollapseOrder::LeftToRight;
  else if (!order.empty()) throw InputError("--order must be left-to-right or middle-out");
  auto r = join::collapse_chain(spec.atlas, ord, opt);
  const int n = samples > 0 ? samples : spec.samples;
  if (cx.json) {
    cx.out << io::dump(io::collapse_json(r, n));
  } else {
    cx.out << "joined chart " << r.chart.label << " on (" << r.chart.lo << "; " << r.chart.hi << ")\n";
    for (size_t i = 0; i < r.join_order.size(); ++i)
      cx.out << "  join at overlap " << r.join_order[i] << ": eps = " << r.eps[i] << "\n";
    print_cert(cx.out, r.cert);
  }
  return r.cert.pass ? kOk : kNegative;
}

int cmd_verify(Context& cx, const std::string& file, int k, const std::vector<double>& tol, const Tuning& tune) {
  auto spec = io::verify_spec_from_json(io::read_file(file));
  if (k > 0) spec.options.k = k;
  if (spec.options.k > join::kMaxCertOrder) throw InputError("--k must be in 1..4");
  if (!tol.empty()) spec.options.tol = tol;
  if (tune.grid_level > 0) spec.options.grid_level = tune.grid_level;
  auto c = join::verify_ck_numeric(spec.map, spec.options);
  if (cx.json) cx.out << io::dump(io::to_json(c));
  else print_cert(cx.out, c);
  return c.pass ? kOk : kNegative;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smooth structures on the line with two origins"};
  app.require_subcommand(1);
  app.fallthrough();
  Context cx{out, err};
  app.add_flag("--json", cx.json, "machine-readable output");

  std::string file, c_name, d_name, a_text, b_text, h_file, g_file, op, order;
  std::vector<std::string> germ_files;
  std::vector<double> tol;
  int k = 0, samples = 0;
  Tuning tune;
  bool pm = false, grid = false, selfcheck = false;

  auto* cosets = app.add_subcommand("cosets", "double cosets of a finite group");
  cosets->add_option("group", file, "group JSON")->required();
  cosets->add_option("--C", c_name, "left subgroup name");
  cosets->add_option("--D", d_name, "right subgroup name");
  cosets->add_flag("--pm", pm, "(D,+-)-double cosets of --D");

  auto* classify = app.add_subcommand("classify", "diffeomorphisms W_a -> W_b");
  classify->add_option("--a", a_text, "a > 0 (comma list with --grid)")->required();
  classify->add_option("--b", b_text, "b > 0 (comma list with --grid)")->required();
  classify->add_option("--k", k, "smoothness order")->default_val(1);
  classify->add_flag("--grid", grid, "classify every pair of the two lists");

  auto* germ = app.add_subcommand("germ", "germ algebra");
  germ->add_option("op", op, "compose | invert | jet")->required();
  germ->add_option("files", germ_files, "germ JSON files")->required();
  germ->add_option("--k", k, "jet order")->default_val(2);

  auto* structure = app.add_subcommand("structure", "compare C^k structures");
  structure->set_help_flag("--help", "Print this help message and exit");
  std::string same;
  structure->add_option("mode", same, "same")->required()->check(CLI::IsMember({"same"}));
  structure->add_option("--h", h_file, "first structure JSON")->required();
  structure->add_option("--g", g_file, "second structure JSON")->required();
  structure->add_option("--k", k, "smoothness order (default: from the files)");

  auto* psi = app.add_subcommand("psi", "the origin-exchanging map psi_a");
  psi->add_option("--a", a_text, "a > 0")->required();
  psi->add_option("--k", k, "smoothness order")->default_val(2);
  psi->add_flag("--selfcheck", selfcheck, "verify involution and presentations");

  auto* joincmd = app.add_subcommand("join", "collapse a chain of interval charts");
  joincmd->add_option("spec", file, "join spec JSON")->required();
  joincmd->add_option("--k", k, "certification order (default: from the file)");
  joincmd->add_option("--tol", tol, "tolerance, one value or one per order");
  joincmd->add_option("--order", order, "left-to-right | middle-out");
  joincmd->add_option("--samples", samples, "sample intervals per output map");
  joincmd->add_option("--grid-level", tune.grid_level, "dyadic check grid level")->check(CLI::Range(1, 16));
  joincmd->add_option("--max-retries", tune.max_retries, "eps halvings before the glue gives up")->check(CLI::Range(0, 30));
  joincmd->add_option("--eps-fraction", tune.eps_fraction, "first glue eps as a fraction of the overlap")
      ->check(CLI::Range(1e-6, 0.2499));

  auto* verify = app.add_subcommand("verify", "finite-difference C^k certificate of a map");
  verify->add_option("map", file, "map JSON")->required();
  verify->add_option("--k", k, "certification order");
  verify->add_option("--tol", tol, "tolerance, one value or one per order");
  verify->add_option("--grid-level", tune.grid_level, "dyadic check grid level")->check(CLI::Range(1, 16));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (cosets->parsed()) return cmd_cosets(cx, file, c_name, d_name, pm);
    if (classify->parsed()) return cmd_classify(cx, a_text, b_text, k, grid);
    if (germ->parsed()) return cmd_germ(cx, op, germ_files, k);
    if (structure->parsed()) return cmd_structure(cx, h_file, g_file, k);
    if (psi->parsed()) return cmd_psi(cx, a_text, k, selfcheck);
    if (joincmd->parsed()) return cmd_join(cx, file, k, tol, order, samples, tune);
    if (verify->parsed()) return cmd_verify(cx, file, k, tol, tune);
  } catch (const GlueInfeasible& e) {
    err << "glue infeasible: " << e.what() << "\n";
    return kIndeterminate;
  } catch (const NotJoinable& e) {
    err << "not joinable";
    if (e.index() >= 0) err << " (overlap " << e.index() << ")";
    err << ": " << e.what() << "\n";
    return kInputError;
  } catch (const IncompatiblePresentations& e) {
    err << "error: " << e.what() << "; residual " << e.residual() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace twoline::cli
