// trinet: noisy-W targets, the explicit quantum model, tester seesaw and
// inflation programs for the binary triangle network.
//
// Exit codes: 0 success/feasible, 2 usage error, 3 infeasible with a
// verified certificate, 4 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "trinet/inflation.hpp"
#include "trinet/json_io.hpp"
#include "trinet/local_model.hpp"
#include "trinet/quantum_model.hpp"
#include "trinet/seesaw.hpp"

namespace {

using namespace trinet;

constexpr std::uint64_t kDefaultSeed = 20240001;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

jsonio::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  jsonio::json j;
  in >> j;
  return j;
}

int env_threads() {
  const char* t = std::getenv("TRINET_THREADS");
  if (t == nullptr) return 1;
  const int n = std::atoi(t);
  return n >= 1 ? n : 1;
}

// Target specs: "w:<visibility>" or a distribution JSON path.
TripartiteDistribution parse_target(const std::string& spec) {
  if (spec.rfind("w:", 0) == 0)
    return w_dist(Visibility::parse(spec.substr(2)));
  return jsonio::distribution_from_json(read_json(spec));
}

std::string scan_csv(const std::vector<FitResult>& results) {
  std::string csv = "# schema trinet.scan.v1\n";
  csv += "v,p0,p_empty,omega,theta0,theta1,l2\n";
  for (const auto& r : results) {
    csv += fmt(r.v.to_double()) + "," + fmt(r.params.p0) + "," +
           fmt(r.params.p_empty) + "," + fmt(r.params.omega) + "," +
           fmt(r.params.theta0) + "," + fmt(r.params.theta1) + "," +
           fmt(r.l2) + "\n";
  }
  return csv;
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "triangle-network nonlocality at desk scale: noisy-W targets, the "
      "explicit quantum model, tester seesaw and inflation programs"};
  app.require_subcommand(1);

  // ---- wdist ----
  auto* wdist_cmd = app.add_subcommand("wdist", "emit a noisy-W distribution");
  std::string wdist_v;
  std::string wdist_out;
  wdist_cmd->add_option("--v", wdist_v, "visibility (rational like 11/20 or decimal)")
      ->required();
  wdist_cmd->add_option("--out", wdist_out, "output file (default stdout)");

  // ---- model ----
  auto* model_cmd = app.add_subcommand("model", "explicit quantum model");
  model_cmd->require_subcommand(1);

  auto* model_eval = model_cmd->add_subcommand("eval", "evaluate parameters");
  std::string eval_params, eval_out;
  bool eval_fast = false;
  model_eval->add_option("--params", eval_params, "ModelParams JSON file")
      ->required();
  model_eval->add_flag("--fast", eval_fast,
                       "use the closed-form path instead of the full contraction");
  model_eval->add_option("--out", eval_out, "output file (default stdout)");

  auto* model_fit = model_cmd->add_subcommand("fit", "fit at one visibility");
  std::string fit_v, fit_out;
  int fit_grid = 64, fit_refine = 200;
  model_fit->add_option("--v", fit_v, "visibility")->required();
  model_fit->add_option("--grid", fit_grid, "coarse grid resolution");
  model_fit->add_option("--refine", fit_refine, "refinement iteration cap");
  model_fit->add_option("--out", fit_out, "output file (default stdout)");

  auto* model_scan = model_cmd->add_subcommand("scan", "fit over a visibility grid");
  std::string scan_from = "0", scan_to, scan_step, scan_out;
  int scan_grid = 64, scan_refine = 200;
  model_scan->add_option("--from", scan_from, "start visibility");
  model_scan->add_option("--to", scan_to, "end visibility")->required();
  model_scan->add_option("--step", scan_step, "grid step (rational)")->required();
  model_scan->add_option("--grid", scan_grid, "coarse grid resolution");
  model_scan->add_option("--refine", scan_refine, "refinement iteration cap");
  model_scan->add_option("--out", scan_out, "output CSV (default stdout)");

  auto* model_chsh = model_cmd->add_subcommand(
      "chsh", "bipartite CHSH analysis of the fitted model");
  std::string chsh_v, chsh_out;
  model_chsh->add_option("--v", chsh_v, "visibility")->required();
  model_chsh->add_option("--out", chsh_out, "output file (default stdout)");

  // ---- seesaw ----
  auto* seesaw_cmd =
      app.add_subcommand("seesaw", "tester seesaw toward a target distribution");
  std::string ss_w, ss_target, ss_outdir;
  seesaw::SeesawConfig ss_cfg;
  ss_cfg.seed = kDefaultSeed;
  double ss_target_l2 = 0.0;
  bool ss_raw = false;
  seesaw_cmd->add_flag(
      "--raw", ss_raw,
      "baseline over the six raw variables instead of three testers");
  seesaw_cmd->add_option("--w", ss_w, "target W visibility");
  seesaw_cmd->add_option("--target", ss_target, "target distribution JSON");
  seesaw_cmd->add_option("--dim", ss_cfg.wire_dim, "wire dimension (default 4)");
  seesaw_cmd->add_option("--restarts", ss_cfg.restarts, "restart count");
  seesaw_cmd->add_option("--max-sweeps", ss_cfg.max_sweeps, "sweep cap");
  seesaw_cmd->add_option("--seed", ss_cfg.seed, "random seed");
  seesaw_cmd->add_option("--stop-at", ss_target_l2,
                         "stop a restart when l2 falls below this (0 = off)");
  seesaw_cmd->add_option("--out-dir", ss_outdir, "output directory")->required();

  // ---- inflate ----
  auto* inflate_cmd = app.add_subcommand("inflate", "inflation feasibility");
  std::string inf_v, inf_out;
  int inf_level = 2;
  std::size_t inf_maxinj = 6;
  bool inf_exact = false, inf_no_reduce = false, inf_stats = false;
  inflate_cmd->add_option("--level", inf_level, "inflation level (default 2)");
  inflate_cmd->add_option("--v", inf_v, "target W visibility (rational)");
  inflate_cmd->add_flag("--exact-certificate", inf_exact,
                        "verify infeasibility certificates in exact rationals");
  inflate_cmd->add_option("--max-injectable", inf_maxinj,
                          "injectable set size cap (default 6)");
  inflate_cmd->add_flag("--no-reduce", inf_no_reduce,
                        "solve the unreduced LP instead of orbit variables");
  inflate_cmd->add_flag("--stats-only", inf_stats,
                        "print scenario statistics without assembling");
  inflate_cmd->add_option("--out", inf_out, "certificate/verdict JSON output");

  // ---- local ----
  auto* local_cmd = app.add_subcommand("local", "triangle-local models");
  local_cmd->require_subcommand(1);

  auto* local_eval = local_cmd->add_subcommand("eval", "evaluate a local model");
  std::string leval_model, leval_out;
  local_eval->add_option("--model", leval_model, "LocalModel JSON file")
      ->required();
  local_eval->add_option("--out", leval_out, "output file (default stdout)");

  auto* local_search =
      local_cmd->add_subcommand("search", "search for a local model");
  std::string ls_target, ls_cards = "4,4,4", ls_out;
  int ls_restarts = 200;
  std::uint64_t ls_seed = kDefaultSeed;
  local_search->add_option("--target", ls_target, "w:<v> or distribution JSON")
      ->required();
  local_search->add_option("--cards", ls_cards,
                           "source cardinalities, e.g. 3,2,2");
  local_search->add_option("--restarts", ls_restarts, "restart count");
  local_search->add_option("--seed", ls_seed, "random seed");
  local_search->add_option("--out", ls_out, "output file (default stdout)");

  auto* local_verify = local_cmd->add_subcommand(
      "verify-appendix-b", "golden check of the printed local model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.get_name() << ": " << e.what() << "\n";
    return 2;
  }

  if (wdist_cmd->parsed()) {
    const auto d = w_dist(Visibility::parse(wdist_v));
    write_text(wdist_out, jsonio::to_json(d).dump(2) + "\n");
    return 0;
  }

  if (model_eval->parsed()) {
    const ModelParams p = jsonio::params_from_json(read_json(eval_params));
    const auto d = eval_fast ? evaluate_model_fast(p) : evaluate_model(p);
    write_text(eval_out, jsonio::to_json(d).dump(2) + "\n");
    return 0;
  }
  if (model_fit->parsed()) {
    const auto fr = fit_model(Visibility::parse(fit_v), fit_grid, fit_refine);
    write_text(fit_out, jsonio::to_json(fr).dump(2) + "\n");
    return 0;
  }
  if (model_scan->parsed()) {
    const Visibility from = Visibility::parse(scan_from);
    const Visibility to = Visibility::parse(scan_to);
    const Rational step = Visibility::parse(scan_step).value();
    const auto results = scan_model(from, to, step, scan_grid, scan_refine);
    write_text(scan_out, scan_csv(results));
    return 0;
  }
  if (model_chsh->parsed()) {
    const auto fr = fit_model_branch(Visibility::parse(chsh_v));
    const auto res = bipartite_chsh(fr.params);
    jsonio::json j;
    j["v"] = fr.v.str();
    j["fit_l2"] = fr.l2;
    j["params"] = jsonio::to_json(fr.params);
    j["chsh_value"] = res.value;
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) {
        jsonio::json cell;
        cell["beta"] = y;
        cell["alpha"] = x;
        cell["correlator"] = res.correlator[y][x];
        cell["p_ab"] = {res.p[y][x][0][0], res.p[y][x][0][1], res.p[y][x][1][0],
                        res.p[y][x][1][1]};
        j["table"].push_back(std::move(cell));
      }
    write_text(chsh_out, j.dump(2) + "\n");
    return 0;
  }

  if (seesaw_cmd->parsed()) {
    if (ss_w.empty() == ss_target.empty())
      throw CLI::ValidationError("seesaw", "give exactly one of --w / --target");
    const TripartiteDistribution target =
        ss_w.empty() ? parse_target(ss_target) : w_dist(Visibility::parse(ss_w));
    ss_cfg.threads = env_threads();
    ss_cfg.target_l2 = ss_target_l2;

    if (ss_raw) {
      const auto res = seesaw::run_raw(target, ss_cfg);
      std::filesystem::create_directories(ss_outdir);
      std::string trace = "# schema trinet.seesaw-trace.v1\nrestart,sweep,l2\n";
      for (std::size_t r = 0; r < res.all_traces.size(); ++r)
        for (std::size_t s = 0; s < res.all_traces[r].size(); ++s)
          trace += std::to_string(r) + "," + std::to_string(s + 1) + "," +
                   fmt(res.all_traces[r][s]) + "\n";
      write_text(ss_outdir + "/trace.csv", trace);
      jsonio::json summary;
      summary["algorithm"] = "raw";
      summary["l2"] = res.l2;
      summary["restart_index"] = res.restart_index;
      summary["sweeps_used"] = res.sweeps_used;
      summary["wire_dim"] = ss_cfg.wire_dim;
      summary["restarts"] = ss_cfg.restarts;
      summary["seed"] = ss_cfg.seed;
      write_text(ss_outdir + "/summary.json", summary.dump(2) + "\n");
      std::printf("best l2 %s from restart %d (%d sweeps, raw baseline)\n",
                  fmt(res.l2).c_str(), res.restart_index, res.sweeps_used);
      return 0;
    }

    const auto res = seesaw::run(target, ss_cfg);
    std::filesystem::create_directories(ss_outdir);
    std::string trace = "# schema trinet.seesaw-trace.v1\nrestart,sweep,l2\n";
    for (std::size_t r = 0; r < res.all_traces.size(); ++r)
      for (std::size_t s = 0; s < res.all_traces[r].size(); ++s)
        trace += std::to_string(r) + "," + std::to_string(s + 1) + "," +
                 fmt(res.all_traces[r][s]) + "\n";
    write_text(ss_outdir + "/trace.csv", trace);
    write_text(ss_outdir + "/tester_r.json", jsonio::to_json(res.r).dump(2) + "\n");
    write_text(ss_outdir + "/tester_s.json", jsonio::to_json(res.s).dump(2) + "\n");
    write_text(ss_outdir + "/tester_t.json", jsonio::to_json(res.t).dump(2) + "\n");
    jsonio::json summary;
    summary["l2"] = res.l2;
    summary["restart_index"] = res.restart_index;
    summary["sweeps_used"] = res.sweeps_used;
    summary["wire_dim"] = ss_cfg.wire_dim;
    summary["restarts"] = ss_cfg.restarts;
    summary["seed"] = ss_cfg.seed;
    write_text(ss_outdir + "/summary.json", summary.dump(2) + "\n");
    std::printf("best l2 %s from restart %d (%d sweeps)\n", fmt(res.l2).c_str(),
                res.restart_index, res.sweeps_used);
    return 0;
  }

  if (inflate_cmd->parsed()) {
    if (inf_stats) {
      const auto st = inflation::scenario_stats(inf_level, inf_maxinj);
      jsonio::json j;
      j["level"] = st.level;
      j["parties"] = st.parties;
      j["events"] = st.events;
      j["injectable_sets"] = st.injectable_sets;
      j["group_order"] = st.group_order;
      write_text(inf_out, j.dump(2) + "\n");
      return 0;
    }
    if (inf_v.empty())
      throw CLI::ValidationError("inflate", "--v is required unless --stats-only");
    const Visibility v = Visibility::parse(inf_v);
    const auto scenario = inflation::build_scenario(inf_level);
    inflation::AssembleOptions opts;
    opts.max_injectable = inf_maxinj;
    opts.reduce_symmetry = !inf_no_reduce;
    const auto lp = inflation::assemble_lp(scenario, w_dist_exact(v), opts);
    const auto res = inflation::solve(lp, inf_exact);

    jsonio::json j;
    j["v"] = v.str();
    j["level"] = inf_level;
    switch (res.verdict) {
      case inflation::Verdict::feasible:
        j["verdict"] = "feasible";
        j["residual"] = res.residual;
        break;
      case inflation::Verdict::infeasible:
        j["verdict"] = "infeasible";
        j["certificate"] = jsonio::certificate_json(lp, res.certificate);
        break;
      case inflation::Verdict::failure:
        j["verdict"] = "failure";
        break;
    }
    write_text(inf_out, j.dump(2) + "\n");
    if (res.verdict == inflation::Verdict::feasible) return 0;
    if (res.verdict == inflation::Verdict::infeasible) {
      const bool ok = inf_exact ? res.certificate.verified_exact
                                : res.certificate.verified_float;
      return ok ? 3 : 4;
    }
    return 4;
  }

  if (local_eval->parsed()) {
    const LocalModel m = jsonio::local_model_from_json(read_json(leval_model));
    write_text(leval_out, jsonio::to_json(evaluate(m)).dump(2) + "\n");
    return 0;
  }
  if (local_search->parsed()) {
    const auto target = parse_target(ls_target);
    std::size_t cards[3] = {0, 0, 0};
    if (std::sscanf(ls_cards.c_str(), "%zu,%zu,%zu", &cards[0], &cards[1],
                    &cards[2]) != 3)
      throw CLI::ValidationError("local search", "bad --cards (want e.g. 3,2,2)");
    const auto res =
        search_local(target, cards[0], cards[1], cards[2], ls_restarts, ls_seed);
    jsonio::json j;
    j["l2"] = res.l2;
    j["restarts_used"] = res.restarts_used;
    j["model"] = jsonio::to_json(res.model);
    write_text(ls_out, j.dump(2) + "\n");
    return 0;
  }
  if (local_verify->parsed()) {
    const auto rep = verify_appendix_b();
    jsonio::json j;
    j["l2_vs_printed"] = rep.l2_vs_printed;
    j["l2_self"] = rep.l2_self;
    j["l2_vs_quantum_pempty0"] = rep.l2_vs_quantum_pempty0;
    j["pass"] = rep.pass;
    write_text("", j.dump(2) + "\n");
    return rep.pass ? 0 : 4;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const CLI::ParseError&) {
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
