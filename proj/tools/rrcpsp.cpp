// Command-line front end: JSON/CSV on stdout, diagnostics on stderr.
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rrcpsp/rrcpsp.hpp"

namespace fs = std::filesystem;
using namespace rrcpsp;

namespace {

ProjectInstance load_instance(const std::string& path, bool nominal_only) {
  if (fs::path(path).extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ParseError(0, "json", e.what());
    }
    return instance_from_json(j);
  }
  auto inst = load_psplib(path);
  return nominal_only ? inst : robustify(std::move(inst));
}

json read_json_arg(const std::string& arg) {
  try {
    if (fs::exists(arg)) {
      std::ifstream in(arg);
      return json::parse(in);
    }
    return json::parse(arg);
  } catch (const json::exception& e) {
    throw ParseError(0, "json", e.what());
  }
}

std::string bridge_command(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ROBUST_RCPSP_BRIDGE")) return env;
  return {};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage robust resource-constrained project scheduling"};
  app.require_subcommand(1);

  std::string file;
  int gamma = 0;
  bool nominal_only = false;
  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("file", file, "PSPLIB .sm or instance .json")->required();
    sub->add_flag("--nominal", nominal_only, "do not set deviations from nominal durations (.sm only)");
  };
  auto add_gamma = [&](CLI::App* sub) { sub->add_option("--gamma,-g", gamma, "uncertainty budget")->required(); };

  auto* parse = app.add_subcommand("parse", "print the instance as JSON");
  add_instance(parse);

  auto* forbidden = app.add_subcommand("forbidden", "print the minimal forbidden sets");
  add_instance(forbidden);

  std::string selection_arg;
  auto* evaluate = app.add_subcommand("evaluate", "worst-case makespan of a selection");
  add_instance(evaluate);
  add_gamma(evaluate);
  evaluate->add_option("--selection,-s", selection_arg, "selection JSON (file or literal), default empty");

  auto* warm = app.add_subcommand("warmstart", "LFT heuristic warm start");
  add_instance(warm);
  add_gamma(warm);

  bool trans = false, tighten = false, int_starts = false, verbatim_flow = false;
  std::string out_path, mst_path;
  auto* build = app.add_subcommand("build", "export the compact model");
  add_instance(build);
  add_gamma(build);
  build->add_flag("--trans", trans, "add transitivity rows");
  build->add_flag("--tighten", tighten, "per-arc big-M from time windows at the warm-start bound");
  build->add_flag("--int-starts", int_starts, "integer start-time variables");
  build->add_flag("--verbatim-flow", verbatim_flow, "dummy flow rows use zero requirements");
  build->add_option("-o,--output", out_path, "LP file")->required();
  build->add_option("--mst", mst_path, "warm-start file");

  std::string method = "bnb", variant = "basic", bridge_flag;
  double time_limit = 60.0;
  auto* solve = app.add_subcommand("solve", "solve to optimality");
  add_instance(solve);
  add_gamma(solve);
  solve->add_option("--method", method)->check(CLI::IsMember({"bnb", "bridge"}));
  solve->add_option("--variant", variant, "compact-model variant for --method bridge")
      ->check(CLI::IsMember({"basic", "trans", "warm", "warm+trans"}));
  solve->add_option("--time-limit", time_limit);
  solve->add_option("--bridge", bridge_flag, "solver command template (default $ROBUST_RCPSP_BRIDGE)");

  std::string config_path, out_dir = "bench_out";
  auto* bench = app.add_subcommand("bench", "run an experiment");
  bench->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  bench->add_option("--out", out_dir, "output directory");

  std::string results_path, svg_path;
  std::vector<std::string> profile_variants;
  auto* profile = app.add_subcommand("profile", "performance profile from results.csv");
  profile->add_option("--results", results_path)->required()->check(CLI::ExistingFile);
  profile->add_option("--variants", profile_variants, "variants to compare (default: all present)")->delimiter(',');
  profile->add_option("--svg", svg_path, "also write the chart");

  auto* verify = app.add_subcommand("verify", "reproduce the analytical results");
  verify->require_subcommand(1);
  auto* verify_ce = verify->add_subcommand("counterexample", "integral vs fractional adversary value");
  auto* verify_tu = verify->add_subcommand("tu", "total unimodularity refutation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse) {
      std::cout << to_json(load_instance(file, nominal_only)).dump(2) << '\n';
    } else if (*forbidden) {
      std::cout << to_json(minimal_forbidden_sets(load_instance(file, nominal_only))).dump() << '\n';
    } else if (*evaluate) {
      const auto inst = load_instance(file, nominal_only);
      const Selection sel = selection_arg.empty() ? Selection{} : selection_from_json(inst, read_json_arg(selection_arg));
      auto j = to_json(worst_case_makespan_dp(inst, sel, gamma));
      j.erase("table");
      std::cout << j.dump() << '\n';
    } else if (*warm) {
      const auto inst = load_instance(file, nominal_only);
      const auto ws = warm_start(inst, gamma);
      json out = {{"ub", ws.ub},
                  {"schedule", to_json(ws.schedule)},
                  {"selection", to_json(ws.selection)},
                  {"leveled_starts", ws.leveled_starts}};
      std::cout << out.dump() << '\n';
    } else if (*build) {
      const auto inst = load_instance(file, nominal_only);
      CompactOptions opts;
      opts.transitivity = trans;
      opts.integral_starts = int_starts;
      opts.classical_source_flow = !verbatim_flow;
      std::optional<WarmStart> ws;
      if (tighten || !mst_path.empty()) ws = warm_start(inst, gamma);
      if (tighten) opts.tighten = time_windows(inst, ws->selection, gamma, ws->ub);
      const auto model = build_compact(inst, gamma, opts);
      write_file(out_path, export_lp(model));
      if (!mst_path.empty())
        write_file(mst_path, export_warm_start(make_warm_start_assignment(inst, gamma, *ws, opts.classical_source_flow)));
      json stats = {{"variables", model.variables().size()},
                    {"constraints", model.constraints().size()},
                    {"start_variables", model.count(VarRole::kStart)},
                    {"rows_30", model.count(Family::kBigMSameLevel)},
                    {"rows_31", model.count(Family::kBigMNextLevel)},
                    {"rows_33", model.count(Family::kFlowCapacity)},
                    {"rows_34", model.count(Family::kFlowIn)},
                    {"rows_35", model.count(Family::kFlowOut)},
                    {"rows_38", model.count(Family::kAntisymmetry)},
                    {"rows_39", model.count(Family::kTransitivity)}};
      std::cout << stats.dump() << '\n';
    } else if (*solve) {
      const auto inst = load_instance(file, nominal_only);
      if (method == "bnb") {
        const auto res = solve_exact(inst, gamma, SearchLimits{time_limit, 10'000'000});
        const auto gap = optimality_gap(res, res.bound);
        json out = {{"status", res.optimal() ? "optimal" : "feasible"},
                    {"value", res.value},
                    {"bound", res.bound},
                    {"gap", gap ? json(*gap) : json(nullptr)},
                    {"nodes", res.nodes},
                    {"selection", to_json(res.best)},
                    {"wall_s", res.wall_s}};
        std::cout << out.dump() << '\n';
      } else {
        const std::string cmd = bridge_command(bridge_flag);
        if (cmd.empty()) throw DomainError("no bridge command: pass --bridge or set ROBUST_RCPSP_BRIDGE");
        auto [model, warm_values] = build_variant(inst, gamma, variant);
        const auto out = solve_external(model, warm_values, ExternalLimits{time_limit, cmd});
        if (!out.diagnostics.empty()) std::cerr << out.diagnostics << '\n';
        json j = {{"status", to_string(out.status)},
                  {"value", json_detail::opt_number(out.objective)},
                  {"bound", json_detail::opt_number(out.bound)},
                  {"wall_s", out.wall_s}};
        std::cout << j.dump() << '\n';
        if (out.status == SolveOutcome::Status::kError) return 1;
      }
    } else if (*bench) {
      std::ifstream in(config_path);
      json cfg_json;
      try {
        cfg_json = json::parse(in);
      } catch (const json::exception& e) {
        throw ParseError(0, "config", e.what());
      }
      auto cfg = bench_config_from_json(cfg_json, fs::path(config_path).parent_path());
      if (cfg.bridge_cmd.empty()) cfg.bridge_cmd = bridge_command({});
      const auto records = run_experiment(cfg);
      write_bench_outputs(records, cfg.variants, out_dir);
      write_summary_csv(summarize(records), std::cout);
      std::cerr << records.size() << " records written to " << out_dir << '\n';
    } else if (*profile) {
      std::ifstream in(results_path);
      const auto records = read_results_csv(in);
      if (profile_variants.empty())
        for (const auto& r : records)
          if (std::find(profile_variants.begin(), profile_variants.end(), r.variant) == profile_variants.end())
            profile_variants.push_back(r.variant);
      const auto p = performance_profile(records, profile_variants);
      write_profile_csv(p, std::cout);
      if (!svg_path.empty()) {
        std::ofstream svg(svg_path);
        write_profile_svg(p, svg);
      }
    } else if (*verify_ce) {
      const auto inst = counterexample::instance();
      const Time integral = worst_case_makespan_dp(inst, {}, counterexample::kGamma).value;
      const auto frac =
          check_fractional_certificate(inst, {}, counterexample::kGamma, counterexample::fractional_certificate());
      std::cout << "integral=" << integral << " fractional=" << to_string(frac.objective)
                << " fractional_feasible=" << (frac.feasible ? "yes" : "no") << '\n';
      return integral == 3 && frac.feasible && frac.objective == Rational(7, 2) ? 0 : 1;
    } else if (*verify_tu) {
      AdversaryMatrixOptions mopt;
      mopt.drop_source_dummy = true;
      const auto m = build_adversary_constraint_matrix(counterexample::instance(), {}, counterexample::kGamma, mopt);
      const auto rows = refutation_rows(m);
      const auto v = ghouila_houri_refute(m, rows);
      std::cout << (v.not_tu ? "NOT_TU" : "NO_REFUTATION") << " rows=";
      for (std::size_t t = 0; t < rows.size(); ++t) std::cout << (t ? "," : "") << m.row_labels[rows[t]];
      std::cout << " assignments=" << v.assignments_checked << '\n';
      return v.not_tu ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
