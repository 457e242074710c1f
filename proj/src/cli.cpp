#include "scanmix/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "scanmix/chain.hpp"
#include "scanmix/coupling.hpp"
#include "scanmix/errors.hpp"
#include "scanmix/exact.hpp"
#include "scanmix/io_util.hpp"
#include "scanmix/ring.hpp"
#include "scanmix/tree.hpp"

namespace scanmix {

namespace {

using nlohmann::ordered_json;
using io::KV;

struct SystemOpts {
  std::string graph_path;
  std::string blocks_spec = "sites";  // FILE, or: sites | edges | tree
  int q = 3;
  bool unrestricted = false;
  std::string kernel = "heat-bath";
  std::string weights_path;
  int tree_height = 1;
  int tree_root = 0;
};

void add_system_options(CLI::App* cmd, SystemOpts& o) {
  cmd->add_option("--graph", o.graph_path, "graph file: 'n m' header then one 'u v' line per edge")
      ->required();
  cmd->add_option("-q,--spins", o.q, "number of spin values per site")->required();
  cmd->add_option("--blocks", o.blocks_spec,
                  "blocks file (one block per line, scan order), or: sites | edges | tree");
  cmd->add_flag("--unrestricted", o.unrestricted, "legal states are all assignments, not proper colourings");
  cmd->add_option("--kernel", o.kernel, "update rule: heat-bath | copy-shift")
      ->check(CLI::IsMember({"heat-bath", "copy-shift"}));
  cmd->add_option("--weights", o.weights_path, "site weights file, one rational per line");
  cmd->add_option("--height", o.tree_height, "slice height for --blocks tree");
  cmd->add_option("--root", o.tree_root, "root site for --blocks tree");
}

struct LoadedSystem {
  SpinSystem sys;
  BlockSchedule schedule;
  std::unique_ptr<BlockKernel> kernel;
  std::vector<KV> config;
};

LoadedSystem load_system(const SystemOpts& o, const std::string& command) {
  LoadedSystem L;
  Graph g = read_graph_file(o.graph_path);
  // The shift rule has the uniform product law invariant, so the proper
  // restriction never applies to it.
  const bool unrestricted = o.unrestricted || o.kernel == "copy-shift";
  L.sys = make_system(std::move(g), o.q, !unrestricted);
  if (!o.weights_path.empty()) set_weights(L.sys, read_weights_file(o.weights_path, L.sys.n()));

  if (o.blocks_spec == "sites") {
    std::vector<std::vector<int>> site_lists;
    for (int s = 0; s < L.sys.n(); ++s) site_lists.push_back({s});
    L.schedule = make_schedule(L.sys.graph, site_lists);
  } else if (o.blocks_spec == "edges") {
    std::vector<std::vector<int>> site_lists;
    for (const auto& [u, v] : L.sys.graph.edges()) site_lists.push_back({u, v});
    L.schedule = make_schedule(L.sys.graph, site_lists);
  } else if (o.blocks_spec == "tree") {
    tree::RootedTree t = tree::root_tree(L.sys.graph, o.tree_root);
    std::vector<std::vector<int>> site_lists;
    for (const Block& b : tree::subtree_blocks(L.sys.graph, t, o.tree_height)) site_lists.push_back(b.sites);
    L.schedule = make_schedule(L.sys.graph, site_lists);
  } else {
    L.schedule = read_blocks_file(o.blocks_spec, L.sys.graph);
  }

  if (o.kernel == "copy-shift")
    L.kernel = std::make_unique<CopyShiftKernel>(L.sys.n());
  else
    L.kernel = std::make_unique<HeatBathKernel>();

  L.config = {{"command", command},
              {"graph", o.graph_path},
              {"spins", std::to_string(o.q)},
              {"blocks", o.blocks_spec},
              {"block_count", std::to_string(L.schedule.blocks.size())},
              {"kernel", o.kernel},
              {"restricted", unrestricted ? "no" : "yes"}};
  if (!o.weights_path.empty()) L.config.push_back({"weights", o.weights_path});
  if (o.blocks_spec == "tree") {
    L.config.push_back({"height", std::to_string(o.tree_height)});
    L.config.push_back({"root", std::to_string(o.tree_root)});
  }
  return L;
}

ordered_json config_json(const std::vector<KV>& config) {
  ordered_json j;
  for (const KV& kv : config) j[kv.key] = kv.value;
  return j;
}

// ---------------------------------------------------------------------- simulate

struct SimulateOpts {
  SystemOpts sys;
  long scans = 10;
  std::uint64_t seed = 1;
  std::string start;
  std::string out;
  std::string format = "csv";
};

int cmd_simulate(const SimulateOpts& o) {
  LoadedSystem L = load_system(o.sys, "simulate");
  ChainState st = o.start.empty() ? start_chain(L.sys, o.seed)
                                  : start_chain_at(L.sys, parse_config(o.start, L.sys.n(), L.sys.q), o.seed);
  const Configuration start = st.current;
  auto traj = simulate(L.sys, L.schedule, *L.kernel, std::move(st), o.scans);

  L.config.push_back({"seed", std::to_string(o.seed)});
  L.config.push_back({"scans", std::to_string(o.scans)});
  L.config.push_back({"start", render_config(start)});

  io::Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["config"] = config_json(L.config);
    ordered_json rows = ordered_json::array();
    for (const Configuration& c : traj) {
      ordered_json row = ordered_json::array();
      for (std::uint8_t s : c.spins) row.push_back(s + 1);
      rows.push_back(row);
    }
    j["trajectory"] = rows;
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  io::csv_config(out.os(), L.config);
  std::vector<std::string> head{"scan"};
  for (int s = 0; s < L.sys.n(); ++s) head.push_back("site" + std::to_string(s));
  io::csv_row(out.os(), head);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (std::uint8_t s : traj[t].spins) row.push_back(std::to_string(s + 1));
    io::csv_row(out.os(), row);
  }
  return 0;
}

// ---------------------------------------------------------------------- mix

struct MixOpts {
  SystemOpts sys;
  double eps = 0.01;
  long max_scans = 10000;
  int plateau = 25;
  std::string backend = "exact";
  std::string bound_strategy;
  std::string out;
  std::string format = "csv";
};

int cmd_mix(const MixOpts& o) {
  LoadedSystem L = load_system(o.sys, "mix");
  StateSpace space = enumerate_configs(L.sys);
  exact::MixOptions mo;
  mo.eps = o.eps;
  mo.max_scans = o.max_scans;
  mo.plateau_window = o.plateau;

  std::vector<double> curve;
  std::vector<std::string> curve_exact;
  exact::MixStatus status;
  long mixing_time = -1;
  if (o.backend == "exact") {
    auto res = exact::mixing_time<Rational>(L.sys, space, *L.kernel, L.schedule, mo);
    status = res.status;
    mixing_time = res.mixing_time;
    for (const Rational& d : res.curve) {
      curve.push_back(to_double(d));
      curve_exact.push_back(rational_str(d));
    }
  } else {
    auto res = exact::mixing_time<double>(L.sys, space, *L.kernel, L.schedule, mo);
    status = res.status;
    mixing_time = res.mixing_time;
    curve = res.curve;
  }

  bool have_alpha = false;
  double alpha_d = 0, level_d = 0;
  std::string alpha_s;
  if (!o.bound_strategy.empty()) {
    auto strat = coupling::parse_strategy(o.bound_strategy);
    if (!strat) fail(Errc::ParseError, "unknown strategy " + o.bound_strategy);
    auto rep = coupling::influence(L.sys, space, *L.kernel, L.schedule, *strat);
    // d(t) <= (sum_i w_i / min_j w_j) alpha^t under the weighted estimate.
    Rational wsum(0), wmin = L.sys.weights[0];
    for (const Rational& w : L.sys.weights) {
      wsum += w;
      wmin = std::min(wmin, w);
    }
    have_alpha = true;
    alpha_d = to_double(rep.alpha);
    alpha_s = rational_str(rep.alpha);
    level_d = to_double(wsum / wmin);
  }

  L.config.push_back({"backend", o.backend});
  L.config.push_back({"eps", io::fmt_double(o.eps)});
  L.config.push_back({"max_scans", std::to_string(o.max_scans)});
  L.config.push_back({"plateau", std::to_string(o.plateau)});
  L.config.push_back({"domain", std::to_string(space.size())});
  if (have_alpha) {
    L.config.push_back({"bound_strategy", o.bound_strategy});
    L.config.push_back({"alpha", alpha_s});
  }

  io::Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["config"] = config_json(L.config);
    j["status"] = exact::mix_status_name(status);
    j["mixing_time"] = mixing_time;
    j["tv"] = curve;
    if (!curve_exact.empty()) j["tv_exact"] = curve_exact;
    if (have_alpha) {
      j["alpha"] = alpha_d;
      j["alpha_exact"] = alpha_s;
      std::vector<double> bound;
      double b = level_d;
      for (std::size_t t = 0; t < curve.size(); ++t) {
        b *= alpha_d;
        bound.push_back(b);
      }
      j["bound"] = bound;
    }
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  io::csv_config(out.os(), L.config);
  std::vector<std::string> head{"scan", "tv"};
  if (!curve_exact.empty()) head.push_back("tv_exact");
  if (have_alpha) head.push_back("bound");
  io::csv_row(out.os(), head);
  double b = level_d;
  for (std::size_t t = 0; t < curve.size(); ++t) {
    std::vector<std::string> row{std::to_string(t + 1), io::fmt_double(curve[t])};
    if (!curve_exact.empty()) row.push_back(curve_exact[t]);
    if (have_alpha) {
      b *= alpha_d;
      row.push_back(io::fmt_double(b));
    }
    io::csv_row(out.os(), row);
  }
  out.os() << "# status = " << exact::mix_status_name(status) << "\n";
  out.os() << "# mixing_time = " << mixing_time << "\n";
  return 0;
}

// ---------------------------------------------------------------------- invariance-check

struct InvarianceOpts {
  SystemOpts sys;
  std::string backend = "exact";
  std::string out;
  std::string format = "csv";
};

int cmd_invariance(const InvarianceOpts& o) {
  LoadedSystem L = load_system(o.sys, "invariance-check");
  StateSpace space = enumerate_configs(L.sys);
  L.config.push_back({"backend", o.backend});
  L.config.push_back({"domain", std::to_string(space.size())});

  std::vector<std::string> residuals;
  std::string max_res = "0";
  if (o.backend == "exact") {
    auto r = exact::invariance_residuals<Rational>(L.sys, space, *L.kernel, L.schedule);
    Rational mx(0);
    for (const Rational& v : r) {
      residuals.push_back(rational_str(v));
      mx = std::max(mx, v);
    }
    max_res = rational_str(mx);
  } else {
    auto r = exact::invariance_residuals<double>(L.sys, space, *L.kernel, L.schedule);
    double mx = 0;
    for (double v : r) {
      residuals.push_back(io::fmt_double(v));
      mx = std::max(mx, v);
    }
    max_res = io::fmt_double(mx);
  }

  io::Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["config"] = config_json(L.config);
    j["residuals"] = residuals;
    j["max_residual"] = max_res;
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  io::csv_config(out.os(), L.config);
  io::csv_row(out.os(), {"block", "residual"});
  for (std::size_t k = 0; k < residuals.size(); ++k)
    io::csv_row(out.os(), {std::to_string(k), residuals[k]});
  out.os() << "# max_residual = " << max_res << "\n";
  return 0;
}

// ---------------------------------------------------------------------- influence

struct InfluenceOpts {
  SystemOpts sys;
  std::string strategy = "edge-cases";
  std::string out;
  std::string format = "csv";
};

int cmd_influence(const InfluenceOpts& o) {
  auto strat = coupling::parse_strategy(o.strategy);
  if (!strat) fail(Errc::ParseError, "unknown strategy " + o.strategy);
  LoadedSystem L = load_system(o.sys, "influence");
  StateSpace space = enumerate_configs(L.sys);
  auto rep = coupling::influence(L.sys, space, *L.kernel, L.schedule, *strat);

  L.config.push_back({"strategy", o.strategy});
  L.config.push_back({"domain", std::to_string(space.size())});

  io::Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["config"] = config_json(L.config);
    ordered_json rows = ordered_json::array();
    for (const auto& [key, r] : rep.rho) {
      const auto& [k, i, jj] = key;
      rows.push_back({{"block", k}, {"i", i}, {"j", jj}, {"rho", rational_str(r)}, {"rho_value", to_double(r)}});
    }
    j["rho"] = rows;
    j["alpha"] = rational_str(rep.alpha);
    j["alpha_value"] = to_double(rep.alpha);
    j["alpha_weitz"] = rational_str(rep.alpha_weitz);
    j["alpha_weitz_value"] = to_double(rep.alpha_weitz);
    j["alpha_block"] = rep.alpha_block;
    j["alpha_site"] = rep.alpha_site;
    j["pair_checks"] = rep.pair_checks;
    if (!rep.case_histogram.empty()) {
      ordered_json h;
      for (const auto& [name, cnt] : rep.case_histogram) h[name] = cnt;
      j["cases"] = h;
    }
    if (rep.witness.valid) {
      j["witness"] = {{"block", rep.witness.k},
                      {"i", rep.witness.i},
                      {"j", rep.witness.j},
                      {"x", render_config(rep.witness.x)},
                      {"y", render_config(rep.witness.y)}};
    }
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  io::csv_config(out.os(), L.config);
  io::csv_row(out.os(), {"block", "i", "j", "rho"});
  for (const auto& [key, r] : rep.rho) {
    const auto& [k, i, jj] = key;
    io::csv_row(out.os(), {std::to_string(k), std::to_string(i), std::to_string(jj), rational_str(r)});
  }
  out.os() << "# alpha = " << rational_str(rep.alpha) << "\n";
  out.os() << "# alpha_value = " << io::fmt_double(to_double(rep.alpha)) << "\n";
  out.os() << "# alpha_weitz = " << rational_str(rep.alpha_weitz) << "\n";
  out.os() << "# alpha_block = " << rep.alpha_block << "\n";
  out.os() << "# alpha_site = " << rep.alpha_site << "\n";
  out.os() << "# pair_checks = " << rep.pair_checks << "\n";
  for (const auto& [name, cnt] : rep.case_histogram)
    out.os() << "# case " << name << " = " << cnt << "\n";
  if (rep.witness.valid) {
    out.os() << "# witness_block = " << rep.witness.k << "\n";
    out.os() << "# witness_i = " << rep.witness.i << "\n";
    out.os() << "# witness_j = " << rep.witness.j << "\n";
    out.os() << "# witness_x = " << render_config(rep.witness.x) << "\n";
    out.os() << "# witness_y = " << render_config(rep.witness.y) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------- couple

struct CoupleOpts {
  SystemOpts sys;
  std::string strategy = "edge-cases";
  std::string x, y;
  int site = 0;
  int block = 0;
  std::string out;
  std::string format = "csv";
};

int cmd_couple(const CoupleOpts& o) {
  auto strat = coupling::parse_strategy(o.strategy);
  if (!strat) fail(Errc::ParseError, "unknown strategy " + o.strategy);
  LoadedSystem L = load_system(o.sys, "couple");
  if (o.block < 0 || o.block >= L.schedule.size())
    fail(Errc::IndexOutOfRange, "block " + std::to_string(o.block));
  const Block& b = L.schedule.blocks[o.block];
  const Configuration x = parse_config(o.x, L.sys.n(), L.sys.q);
  const Configuration y = parse_config(o.y, L.sys.n(), L.sys.q);

  coupling::Coupling c;
  std::string case_name;
  bool swapped = false;
  std::vector<KV> bounds;
  if (*strat == coupling::Strategy::EdgeCases) {
    auto ec = coupling::edge_case_coupling(L.sys, x, y, o.site, b);
    c = std::move(ec.joint);
    case_name = coupling::edge_case_name(ec.fired);
    swapped = ec.swapped;
    for (const auto& [site, bd] : ec.case_bound)
      bounds.push_back({"bound_site" + std::to_string(site), rational_str(bd)});
    bounds.push_back({"bound_blanket", rational_str(ec.blanket_bound)});
  } else if (*strat == coupling::Strategy::RecursiveTree) {
    c = coupling::recursive_tree_coupling(L.sys, x, y, o.site, b);
  } else {
    coupling::SupportDist d1 = coupling::uniform_support(L.kernel->support(L.sys, x, b));
    coupling::SupportDist d2 = coupling::uniform_support(L.kernel->support(L.sys, y, b));
    if (*strat == coupling::Strategy::MaximalSite) {
      if (b.size() != 1) fail(Errc::StrategyShapeMismatch, "site coupling needs one-site blocks");
      c = coupling::maximal_site_coupling(d1, d2, b.sites[0]);
    } else if (*strat == coupling::Strategy::MinHamming) {
      c = coupling::min_hamming_coupling(d1, d2, b.sites);
    } else {
      c = coupling::identity_coupling(d1, d2);
    }
  }

  L.config.push_back({"strategy", o.strategy});
  L.config.push_back({"x", render_config(x)});
  L.config.push_back({"y", render_config(y)});
  L.config.push_back({"site", std::to_string(o.site)});
  L.config.push_back({"block", std::to_string(o.block)});
  if (!case_name.empty()) {
    L.config.push_back({"case", case_name});
    L.config.push_back({"swapped", swapped ? "yes" : "no"});
  }

  io::Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["config"] = config_json(L.config);
    ordered_json rows = ordered_json::array();
    for (const auto& e : c.entries)
      rows.push_back({{"ia", e.ia},
                      {"ib", e.ib},
                      {"mass", rational_str(e.mass)},
                      {"out_a", render_config(c.a.support[e.ia])},
                      {"out_b", render_config(c.b.support[e.ib])}});
    j["entries"] = rows;
    ordered_json dis;
    for (int s : b.sites) dis[std::to_string(s)] = rational_str(c.disagreement_at(s));
    j["disagreement"] = dis;
    for (const KV& kv : bounds) j[kv.key] = kv.value;
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  io::csv_config(out.os(), L.config);
  io::csv_row(out.os(), {"ia", "ib", "mass", "out_a", "out_b"});
  for (const auto& e : c.entries)
    io::csv_row(out.os(), {std::to_string(e.ia), std::to_string(e.ib), rational_str(e.mass),
                           render_config(c.a.support[e.ia]), render_config(c.b.support[e.ib])});
  for (int s : b.sites)
    out.os() << "# disagreement_site" << s << " = " << rational_str(c.disagreement_at(s)) << "\n";
  for (const KV& kv : bounds) out.os() << "# " << kv.key << " = " << kv.value << "\n";
  return 0;
}

// ---------------------------------------------------------------------- tree-verify

struct TreeVerifyOpts {
  int delta = 0;  // 0 = all rows
  bool detail = false;
  std::string out;
  std::string format = "csv";
};

int cmd_tree_verify(const TreeVerifyOpts& o) {
  std::vector<int> deltas;
  if (o.delta == 0)
    for (const auto& r : tree::colour_table()) deltas.push_back(r.delta);
  else
    deltas.push_back(o.delta);
  for (int d : deltas) tree::table_row(d);  // reject unknown rows before emitting anything

  std::vector<KV> config{{"command", "tree-verify"},
                         {"delta", o.delta == 0 ? std::string("all") : std::to_string(o.delta)}};

  io::Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["config"] = config_json(config);
    ordered_json rows = ordered_json::array();
    for (int d : deltas) {
      const auto& row = tree::table_row(d);
      auto rep = tree::verify_table_row(d);
      ordered_json r{{"delta", d},
                     {"h", row.h},
                     {"xi", rational_str(row.xi)},
                     {"spins", row.q_formula},
                     {"spins_single_site", row.q_naive},
                     {"max_bound", rational_str(rep.max_bound)},
                     {"max_bound_value", to_double(rep.max_bound)},
                     {"satisfied", rep.satisfied}};
      if (o.detail) {
        ordered_json det = ordered_json::array();
        for (const auto& e : rep.entries)
          det.push_back({{"kind", e.root_block ? "root" : "general"},
                         {"d", e.d},
                         {"value", rational_str(e.value)},
                         {"value_double", to_double(e.value)}});
        r["bounds"] = det;
      }
      rows.push_back(r);
    }
    j["rows"] = rows;
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  io::csv_config(out.os(), config);
  if (o.detail) {
    io::csv_row(out.os(), {"delta", "kind", "d", "bound"});
    for (int d : deltas) {
      auto rep = tree::verify_table_row(d);
      for (const auto& e : rep.entries)
        io::csv_row(out.os(), {std::to_string(d), e.root_block ? "root" : "general", std::to_string(e.d),
                               rational_str(e.value)});
    }
    return 0;
  }
  io::csv_row(out.os(), {"delta", "h", "xi", "spins", "spins_single_site", "max_bound", "satisfied"});
  for (int d : deltas) {
    const auto& row = tree::table_row(d);
    auto rep = tree::verify_table_row(d);
    io::csv_row(out.os(), {std::to_string(d), std::to_string(row.h), rational_str(row.xi),
                           std::to_string(row.q_formula), std::to_string(row.q_naive),
                           io::fmt_double(to_double(rep.max_bound)), rep.satisfied ? "1" : "0"});
  }
  return 0;
}

// ---------------------------------------------------------------------- tree-search

struct TreeSearchOpts {
  int delta = 3;
  int q = 0;
  int h_max = 6;
  int den_cap = 12;
  std::string out;
  std::string format = "csv";
};

int cmd_tree_search(const TreeSearchOpts& o) {
  auto res = tree::search_parameters(o.delta, o.q, o.h_max, o.den_cap);
  std::vector<KV> config{{"command", "tree-search"}, {"delta", std::to_string(o.delta)},
                         {"spins", std::to_string(o.q)}, {"h_max", std::to_string(o.h_max)},
                         {"den_cap", std::to_string(o.den_cap)}};
  io::Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["config"] = config_json(config);
    j["found"] = res.has_value();
    if (res) {
      j["h"] = res->h;
      j["xi"] = rational_str(res->xi);
      j["max_bound"] = rational_str(res->report.max_bound);
      j["max_bound_value"] = to_double(res->report.max_bound);
    }
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  io::csv_config(out.os(), config);
  io::csv_row(out.os(), {"delta", "spins", "found", "h", "xi", "max_bound"});
  if (res)
    io::csv_row(out.os(), {std::to_string(o.delta), std::to_string(o.q), "1", std::to_string(res->h),
                           rational_str(res->xi), io::fmt_double(to_double(res->report.max_bound))});
  else
    io::csv_row(out.os(), {std::to_string(o.delta), std::to_string(o.q), "0", "", "", ""});
  return 0;
}

// ---------------------------------------------------------------------- ring-demo

struct RingDemoOpts {
  int n = 3;
  int q = 2;
  long scans = 1000;
  std::uint64_t seed = 1;
  int horizon = 100;
  std::string out;
  std::string format = "csv";
};

int cmd_ring_demo(const RingDemoOpts& o) {
  auto rep = ring::demonstrate_nonmixing(o.n, o.q, o.scans, o.seed, o.horizon);
  auto inf = ring::ring_influence(o.n, o.q);
  std::vector<KV> config{{"command", "ring-demo"},   {"n", std::to_string(o.n)},
                         {"spins", std::to_string(o.q)}, {"scans", std::to_string(o.scans)},
                         {"seed", std::to_string(o.seed)}, {"horizon", std::to_string(o.horizon)}};
  io::Output out(o.out);
  if (o.format == "json") {
    ordered_json j;
    j["config"] = config_json(config);
    j["site_zero_constant"] = rep.site_zero_constant;
    j["site_zero_spin"] = rep.site_zero_spin + 1;
    j["tv_floor"] = rational_str(rep.tv_floor);
    j["floor_holds"] = rep.floor_holds;
    ordered_json sv = ordered_json::array(), mv = ordered_json::array();
    for (const Rational& d : rep.scan_tv) sv.push_back(rational_str(d));
    for (const Rational& d : rep.mixture_tv) mv.push_back(rational_str(d));
    j["scan_tv"] = sv;
    j["mixture_tv"] = mv;
    j["alpha"] = rational_str(inf.alpha);
    j["alpha_weitz"] = rational_str(inf.alpha_weitz);
    out.os() << j.dump(2) << "\n";
    return 0;
  }
  io::csv_config(out.os(), config);
  io::csv_row(out.os(), {"scan", "tv", "mixture_tv"});
  for (std::size_t t = 0; t < rep.scan_tv.size(); ++t)
    io::csv_row(out.os(), {std::to_string(t + 1), rational_str(rep.scan_tv[t]),
                           t < rep.mixture_tv.size() ? rational_str(rep.mixture_tv[t]) : ""});
  out.os() << "# site_zero_constant = " << (rep.site_zero_constant ? "yes" : "no") << "\n";
  out.os() << "# site_zero_spin = " << rep.site_zero_spin + 1 << "\n";
  out.os() << "# tv_floor = " << rational_str(rep.tv_floor) << "\n";
  out.os() << "# floor_holds = " << (rep.floor_holds ? "yes" : "no") << "\n";
  out.os() << "# alpha = " << rational_str(inf.alpha) << "\n";
  out.os() << "# alpha_weitz = " << rational_str(inf.alpha_weitz) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"systematic block-scan dynamics: exact mixing, influence estimates, couplings"};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "run the scan chain and print the trajectory");
  add_system_options(c_sim, sim.sys);
  c_sim->add_option("--scans", sim.scans, "full sweeps to run");
  c_sim->add_option("--seed", sim.seed, "stream seed; identical seeds replay identical runs");
  c_sim->add_option("--start", sim.start, "start configuration, 1-based spins, e.g. '1 2 1'");
  c_sim->add_option("--out", sim.out, "output file (default stdout)");
  c_sim->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "json"}));

  MixOpts mix;
  auto* c_mix = app.add_subcommand("mix", "worst-start distance to stationarity per sweep");
  add_system_options(c_mix, mix.sys);
  c_mix->add_option("--eps", mix.eps, "target accuracy");
  c_mix->add_option("--max-scans", mix.max_scans, "sweep budget");
  c_mix->add_option("--plateau", mix.plateau, "flat sweeps before declaring the chain stuck (0 = never)");
  c_mix->add_option("--backend", mix.backend, "arithmetic: exact | float")
      ->check(CLI::IsMember({"exact", "float"}));
  c_mix->add_option("--bound-strategy", mix.bound_strategy,
                    "also compute alpha with this coupling strategy and print the implied decay");
  c_mix->add_option("--out", mix.out, "output file (default stdout)");
  c_mix->add_option("--format", mix.format)->check(CLI::IsMember({"csv", "json"}));

  InvarianceOpts inv;
  auto* c_inv = app.add_subcommand("invariance-check", "per-block distance of pi P_k from pi");
  add_system_options(c_inv, inv.sys);
  c_inv->add_option("--backend", inv.backend)->check(CLI::IsMember({"exact", "float"}));
  c_inv->add_option("--out", inv.out, "output file (default stdout)");
  c_inv->add_option("--format", inv.format)->check(CLI::IsMember({"csv", "json"}));

  InfluenceOpts infl;
  auto* c_infl = app.add_subcommand("influence", "worst coupled disagreement table and alpha");
  add_system_options(c_infl, infl.sys);
  c_infl->add_option("--strategy", infl.strategy,
                     "coupling: edge-cases | min-hamming | maximal-site | identity | recursive-tree");
  c_infl->add_option("--out", infl.out, "output file (default stdout)");
  c_infl->add_option("--format", infl.format)->check(CLI::IsMember({"csv", "json"}));

  CoupleOpts cpl;
  auto* c_cpl = app.add_subcommand("couple", "couple one block update for one discrepancy pair");
  add_system_options(c_cpl, cpl.sys);
  c_cpl->add_option("--strategy", cpl.strategy);
  c_cpl->add_option("--x", cpl.x, "first configuration, 1-based spins")->required();
  c_cpl->add_option("--y", cpl.y, "second configuration, differs at --site")->required();
  c_cpl->add_option("--site", cpl.site, "discrepancy site (0-based)")->required();
  c_cpl->add_option("--block", cpl.block, "block index in scan order")->required();
  c_cpl->add_option("--out", cpl.out, "output file (default stdout)");
  c_cpl->add_option("--format", cpl.format)->check(CLI::IsMember({"csv", "json"}));

  TreeVerifyOpts tv;
  auto* c_tv = app.add_subcommand("tree-verify", "re-derive the tabulated tree-slice bounds");
  c_tv->add_option("--delta", tv.delta, "degree row to verify (default: all)");
  c_tv->add_flag("--detail", tv.detail, "emit every bound instead of the row summary");
  c_tv->add_option("--out", tv.out, "output file (default stdout)");
  c_tv->add_option("--format", tv.format)->check(CLI::IsMember({"csv", "json"}));

  TreeSearchOpts ts;
  auto* c_ts = app.add_subcommand("tree-search", "scan slice heights and weight decays for a working pair");
  c_ts->add_option("--delta", ts.delta, "degree bound")->required();
  c_ts->add_option("-q,--spins", ts.q, "number of spins")->required();
  c_ts->add_option("--h-max", ts.h_max, "largest slice height to try");
  c_ts->add_option("--den-cap", ts.den_cap, "largest denominator for the decay");
  c_ts->add_option("--out", ts.out, "output file (default stdout)");
  c_ts->add_option("--format", ts.format)->check(CLI::IsMember({"csv", "json"}));

  RingDemoOpts rd;
  auto* c_rd = app.add_subcommand("ring-demo", "shift ring where every block is invariant but scans never mix");
  c_rd->add_option("--n", rd.n, "ring length");
  c_rd->add_option("-q,--spins", rd.q, "number of spins");
  c_rd->add_option("--scans", rd.scans, "sweeps to simulate");
  c_rd->add_option("--seed", rd.seed, "stream seed");
  c_rd->add_option("--horizon", rd.horizon, "sweeps of exact distance to compute (0 = skip)");
  c_rd->add_option("--out", rd.out, "output file (default stdout)");
  c_rd->add_option("--format", rd.format)->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_mix->parsed()) return cmd_mix(mix);
    if (c_inv->parsed()) return cmd_invariance(inv);
    if (c_infl->parsed()) return cmd_influence(infl);
    if (c_cpl->parsed()) return cmd_couple(cpl);
    if (c_tv->parsed()) return cmd_tree_verify(tv);
    if (c_ts->parsed()) return cmd_tree_search(ts);
    if (c_rd->parsed()) return cmd_ring_demo(rd);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace scanmix
