#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpl/catalog.hpp"
#include "fpl/errors.hpp"
#include "fpl/format.hpp"
#include "fpl/hybrid.hpp"
#include "fpl/learn.hpp"
#include "fpl/normalize.hpp"
#include "fpl/oracle.hpp"
#include "fpl/parser.hpp"
#include "fpl/semantics.hpp"
#include "fpl/svg.hpp"
#include "fpl/trajectory_io.hpp"

namespace {

struct SemanticsFlags {
  std::string metric = "mahalanobis";
  std::string agg = "max";
  double delta_until = 0.1;
  double delta_atom = 0.01;
};

void add_semantics_flags(CLI::App *cmd, SemanticsFlags &s) {
  cmd->add_option("--metric", s.metric,
                  "point metric: mahalanobis, mahalanobis-inf, "
                  "quantile-uniform, quantile-triangular, euclidean")
      ->envname("FPL_METRIC")
      ->capture_default_str();
  cmd->add_option("--agg", s.agg, "aggregator: max or int")
      ->envname("FPL_AGG")
      ->capture_default_str();
  cmd->add_option("--delta-until", s.delta_until, "switch-time step")
      ->envname("FPL_DELTA_UNTIL")
      ->capture_default_str();
  cmd->add_option("--delta-atom", s.delta_atom,
                  "within-template sampling step")
      ->envname("FPL_DELTA_ATOM")
      ->capture_default_str();
}

fpl::SemanticsConfig to_config(const SemanticsFlags &s) {
  fpl::SemanticsConfig cfg;
  cfg.metric = fpl::metric_from_name(s.metric);
  cfg.aggregator = fpl::aggregator_from_name(s.agg);
  cfg.delta_until = s.delta_until;
  cfg.delta_atom = s.delta_atom;
  return cfg;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw fpl::DomainError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out)
    throw fpl::DomainError("cannot write " + path);
}

/* Every *.csv in the directory, in filename order. */
std::vector<fpl::Trajectory> read_data_dir(const std::string &dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw fpl::DomainError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw fpl::DomainError("no .csv trajectories in " + dir);
  std::vector<fpl::Trajectory> out;
  for (const auto &p : files) {
    try {
      out.push_back(fpl::parse_trajectory(read_file(p.string())));
    } catch (const fpl::Error &e) {
      throw fpl::DomainError(p.filename().string() + ": " + e.what());
    }
  }
  return out;
}

fpl::ExtendedDistance parse_threshold(const std::string &text) {
  if (text == "inf")
    return fpl::ExtendedDistance::infinity();
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != text.size() || std::isnan(v) || v < 0.0)
    throw fpl::DomainError("threshold must be a nonnegative number or inf");
  return fpl::ExtendedDistance(v);
}

nlohmann::ordered_json dag_json(const fpl::AtomDag &dag) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (int id : dag.ids()) {
    const fpl::DagNode &n = dag.node(id);
    nlohmann::ordered_json jn;
    jn["id"] = id;
    if (id == fpl::AtomDag::kStart) {
      jn["role"] = "start";
    } else if (id == fpl::AtomDag::kEnd) {
      jn["role"] = "end";
    } else {
      jn["role"] = "atom";
      jn["atom"] = n.atom ? nlohmann::ordered_json(n.atom->name())
                          : nlohmann::ordered_json(nullptr);
      if (n.interval)
        jn["interval"] = {n.interval->lo, n.interval->hi};
      else
        jn["interval"] = nullptr;
    }
    nodes.push_back(std::move(jn));
    for (int c : n.children)
      edges.push_back({{"from", id}, {"to", c}});
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

/* Concrete templates of a catalog, in entry order; tops cannot be drawn. */
std::vector<std::shared_ptr<const fpl::Atom>>
drawable_atoms(const fpl::AtomCatalog &catalog) {
  std::vector<std::shared_ptr<const fpl::Atom>> out;
  for (const auto &[name, ref] : catalog.entries()) {
    if (ref.is_top())
      std::cerr << "note: skipping top template '" << name
                << "' in the plot\n";
    else
      out.push_back(ref.atom());
  }
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"fuzzy path logic: monitor trajectories, learn specifications "
               "from demonstrations, check hybrid machines"};
  app.require_subcommand(1);

  auto *mon = app.add_subcommand(
      "monitor", "distance from one trajectory to a formula");
  std::string mon_formula, mon_atoms, mon_traj;
  bool mon_bound = false;
  SemanticsFlags mon_flags;
  mon->add_option("--formula", mon_formula, "formula text")->required();
  mon->add_option("--atoms", mon_atoms, "template catalog JSON file")
      ->required();
  mon->add_option("--trajectory", mon_traj, "trajectory CSV file")->required();
  add_semantics_flags(mon, mon_flags);
  mon->add_flag("--bound", mon_bound,
                "also print the total error bound on a second line");

  auto *orc = app.add_subcommand(
      "oracle", "brute-force reference distance (exponential, for testing)");
  std::string orc_formula, orc_atoms, orc_traj;
  double orc_grid = 0.0;
  SemanticsFlags orc_flags;
  orc->add_option("--formula", orc_formula, "formula text")->required();
  orc->add_option("--atoms", orc_atoms, "template catalog JSON file")
      ->required();
  orc->add_option("--trajectory", orc_traj, "trajectory CSV file")->required();
  add_semantics_flags(orc, orc_flags);
  orc->add_option("--grid", orc_grid,
                  "switch-time enumeration grid (default: --delta-until)");

  auto *nrm = app.add_subcommand("normalize",
                                 "rewrite a formula into left normal form");
  std::string nrm_formula, nrm_atoms;
  nrm->add_option("--formula", nrm_formula, "formula text")->required();
  nrm->add_option("--atoms", nrm_atoms, "template catalog JSON file")
      ->required();

  auto *lrn = app.add_subcommand(
      "learn", "learn a formula from a directory of trajectories");
  std::string lrn_data, lrn_out, lrn_dag, lrn_svg;
  fpl::LearnConfig lrn_cfg;
  lrn->add_option("--data", lrn_data, "directory of trajectory CSV files")
      ->required();
  lrn->add_option("--init-len", lrn_cfg.init_len,
                  "samples used for clustering and the seed fit")
      ->capture_default_str();
  lrn->add_option("--min-traj", lrn_cfg.min_traj,
                  "smallest group of trajectories worth a template")
      ->capture_default_str();
  lrn->add_option("--dev-threshold", lrn_cfg.dev_threshold,
                  "deviation threshold in stds (0 picks 4 for 1-D, 3 else)")
      ->capture_default_str();
  lrn->add_option("--out", lrn_out,
                  "output file: JSON with the formula text and its templates")
      ->required();
  lrn->add_option("--emit-dag", lrn_dag,
                  "also write the learned graph as JSON");
  lrn->add_option("--emit-svg", lrn_svg,
                  "also write an SVG of templates and data");

  auto *chk = app.add_subcommand(
      "check", "evaluate a formula on every run of a hybrid machine");
  std::string chk_auto, chk_formula, chk_atoms, chk_threshold;
  int chk_cap = 10000;
  SemanticsFlags chk_flags;
  chk->add_option("--automaton", chk_auto, "automaton JSON file")->required();
  chk->add_option("--formula", chk_formula, "formula text")->required();
  chk->add_option("--atoms", chk_atoms, "template catalog JSON file")
      ->required();
  chk->add_option("--threshold", chk_threshold,
                  "pass distance (nonnegative number or inf)")
      ->required();
  add_semantics_flags(chk, chk_flags);
  chk->add_option("--cap", chk_cap, "largest run count to enumerate")
      ->capture_default_str();

  auto *plt = app.add_subcommand(
      "plot", "render templates and trajectories to a static SVG");
  std::string plt_atoms, plt_data, plt_out;
  std::vector<std::string> plt_trajs;
  plt->add_option("--atoms", plt_atoms, "template catalog JSON file");
  plt->add_option("--trajectory", plt_trajs,
                  "trajectory CSV file (repeatable)");
  plt->add_option("--data", plt_data, "directory of trajectory CSV files");
  plt->add_option("--out", plt_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (mon->parsed()) {
      fpl::AtomCatalog catalog = fpl::parse_atoms(read_file(mon_atoms));
      fpl::FormulaPtr f = fpl::parse_formula(mon_formula, catalog);
      fpl::Trajectory z = fpl::parse_trajectory(read_file(mon_traj));
      fpl::SemanticsConfig cfg = to_config(mon_flags);
      if (!fpl::is_lnf(f))
        std::cerr << "note: formula is not in left normal form; evaluating "
                     "its normalization\n";
      fpl::ExtendedDistance d = fpl::compute_semantics(z, f, cfg);
      std::cout << fpl::format_fixed6(d.value()) << "\n";
      if (mon_bound) {
        double b = fpl::error_bound(f, z, cfg) + fpl::quadrature_bound(f, z, cfg);
        std::cout << fpl::format_fixed6(b) << "\n";
      }
    } else if (orc->parsed()) {
      fpl::AtomCatalog catalog = fpl::parse_atoms(read_file(orc_atoms));
      fpl::FormulaPtr f = fpl::parse_formula(orc_formula, catalog);
      fpl::Trajectory z = fpl::parse_trajectory(read_file(orc_traj));
      fpl::SemanticsConfig cfg = to_config(orc_flags);
      if (orc_grid > 0.0)
        cfg.delta_until = orc_grid;
      std::cout << fpl::format_fixed6(fpl::oracle_semantics(z, f, cfg).value())
                << "\n";
    } else if (nrm->parsed()) {
      fpl::AtomCatalog catalog = fpl::parse_atoms(read_file(nrm_atoms));
      fpl::FormulaPtr f = fpl::parse_formula(nrm_formula, catalog);
      std::cout << fpl::emit_formula(fpl::to_lnf(f)) << "\n";
    } else if (lrn->parsed()) {
      std::vector<fpl::Trajectory> data = read_data_dir(lrn_data);
      fpl::LearnResult res = fpl::learn_fpl(data, lrn_cfg);
      nlohmann::ordered_json bundle{
          {"formula", fpl::emit_formula(res.formula)},
          {"atoms", nlohmann::ordered_json::parse(fpl::emit_atoms(res.atoms))}};
      write_file(lrn_out, bundle.dump(2) + "\n");
      if (!lrn_dag.empty())
        write_file(lrn_dag, dag_json(res.dag).dump(2) + "\n");
      if (!lrn_svg.empty())
        write_file(lrn_svg, fpl::render_svg(drawable_atoms(res.atoms), data));
      std::cout << "trajectories " << data.size() << "\n"
                << "templates " << res.atoms.entries().size() << "\n"
                << "nodes-before-merge " << res.nodes_before_merge << "\n"
                << "nodes-after-merge " << res.nodes_after_merge << "\n"
                << "formula " << fpl::emit_formula(res.formula) << "\n";
    } else if (chk->parsed()) {
      fpl::RestrictedHybridAutomaton ha =
          fpl::parse_automaton(read_file(chk_auto));
      fpl::AtomCatalog catalog = fpl::parse_atoms(read_file(chk_atoms));
      fpl::FormulaPtr f = fpl::parse_formula(chk_formula, catalog);
      fpl::SemanticsConfig cfg = to_config(chk_flags);
      fpl::ModelCheckResult res =
          fpl::model_check(ha, f, parse_threshold(chk_threshold), cfg, chk_cap);
      std::cout << "runs " << res.distances.size() << "\n";
      for (size_t i = 0; i < res.distances.size(); ++i)
        std::cout << "run " << i << " distance "
                  << fpl::format_fixed6(res.distances[i].value()) << " bound "
                  << fpl::format_fixed6(res.bounds[i]) << "\n";
      std::cout << "worst " << res.worst_run << " distance "
                << fpl::format_fixed6(
                       res.distances[static_cast<size_t>(res.worst_run)].value())
                << "\n";
      std::cout << "best " << res.best_run << " distance "
                << fpl::format_fixed6(
                       res.distances[static_cast<size_t>(res.best_run)].value())
                << "\n";
      std::cout << "verdict " << (res.all_within ? "pass" : "fail") << "\n";
    } else if (plt->parsed()) {
      std::vector<std::shared_ptr<const fpl::Atom>> atoms;
      if (!plt_atoms.empty())
        atoms = drawable_atoms(fpl::parse_atoms(read_file(plt_atoms)));
      std::vector<fpl::Trajectory> trajs;
      if (!plt_data.empty())
        trajs = read_data_dir(plt_data);
      for (const std::string &p : plt_trajs)
        trajs.push_back(fpl::parse_trajectory(read_file(p)));
      write_file(plt_out, fpl::render_svg(atoms, trajs));
    }
  } catch (const fpl::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
