// Command-line front end: plan, translate, check, bench.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "apmdp/apmdp.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kViolated = 1,
  kParse = 2,
  kUnsupported = 3,
  kInfeasible = 4,
  kConfig = 5,
};

int exit_code(const apmdp::Error& e) {
  switch (e.kind()) {
    case apmdp::ErrorKind::Parse:
    case apmdp::ErrorKind::UnknownProposition: return kParse;
    case apmdp::ErrorKind::UnsupportedFragment: return kUnsupported;
    case apmdp::ErrorKind::Infeasible: return kInfeasible;
    case apmdp::ErrorKind::Config:
    case apmdp::ErrorKind::Grounding: return kConfig;
    default: return kViolated;
  }
}

struct Options {
  std::string env;
  std::string ltl;
  std::string ltl_file;
  std::string start;
  std::string method = "apmdp";
  std::string out;
  std::string plan_file;
  std::string format = "both";
  apmdp::RewardParams params;
  std::size_t tasks = 100;
  std::uint64_t seed = 7;
  int min_level = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
};

void add_reward_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--gamma-goal", o.params.gamma_goal, "Reward for reaching the goal condition")->capture_default_str();
  cmd->add_option("--gamma-stay", o.params.gamma_stay, "Reward for violating the stay condition")->capture_default_str();
  cmd->add_option("--gamma-step", o.params.gamma_step, "Reward per step")->capture_default_str();
  cmd->add_option("--discount", o.params.discount, "Discount factor in (0, 1)")->capture_default_str();
  cmd->add_option("--epsilon", o.params.epsilon, "Value-iteration convergence threshold")->capture_default_str();
  cmd->add_option("--max-iters", o.params.max_iters, "Value-iteration sweep cap")->capture_default_str();
}

void add_formula_flags(CLI::App* cmd, Options& o) {
  auto* inline_opt = cmd->add_option("--ltl", o.ltl, "LTL formula, e.g. \"F (red_room & F floor_1)\"");
  auto* file_opt = cmd->add_option("--ltl-file", o.ltl_file, "File with one formula ('#' starts a comment)");
  inline_opt->excludes(file_opt);
}

std::string formula_text(const Options& o) {
  if (!o.ltl.empty()) return o.ltl;
  if (o.ltl_file.empty()) throw apmdp::ConfigError("one of --ltl or --ltl-file is required");
  const auto lines = apmdp::split_formula_lines(apmdp::read_text_file(o.ltl_file));
  if (lines.size() != 1)
    throw apmdp::ConfigError(o.ltl_file + ": expected exactly one formula, found " + std::to_string(lines.size()));
  return lines.front();
}

apmdp::Cell parse_start(const apmdp::WorldModel& world, const std::string& text) {
  if (auto named = world.start(text)) return *named;
  apmdp::Cell c;
  char sep1 = 0, sep2 = 0;
  std::istringstream in(text);
  if (!(in >> c.x >> sep1 >> c.y >> sep2 >> c.z) || sep1 != ',' || sep2 != ',' || !in.eof())
    throw apmdp::ConfigError("--start: expected x,y,z or a named start, got '" + text + "'");
  if (!world.contains(c)) throw apmdp::ConfigError("--start: " + apmdp::to_string(c) + " is outside the world");
  return c;
}

std::string path_text(const std::vector<apmdp::StateIndex>& states) {
  std::string s;
  for (auto q : states) s += (s.empty() ? "q" : " q") + std::to_string(q);
  return s;
}

int cmd_plan(const Options& o) {
  const auto world = apmdp::load_world(o.env);
  const auto formula = apmdp::parse(formula_text(o), world.registry());
  const auto start = parse_start(world, o.start);
  const auto method = o.method == "pmdp" ? apmdp::Method::PMdp : apmdp::Method::ApMdp;
  const auto plan = apmdp::solve(method, world, formula, start, o.params);

  std::cout << "method: " << plan.method << "\n"
            << "formula: " << plan.formula << "\n"
            << "start: " << apmdp::to_string(plan.start) << "\n"
            << "automaton path: " << path_text(plan.automaton_path) << "\n";
  for (const auto& a : plan.attempts)
    std::cout << "  path " << path_text(a.states) << ": "
              << (a.feasible ? std::to_string(a.actions) + " actions" : "infeasible (" + a.reason + ")") << "\n";
  for (const auto& h : plan.hops)
    std::cout << "  hop q" << h.from << " -> q" << h.to << " at level " << h.level << ": " << h.actions << " actions"
              << (h.fallback ? " (re-planned at a lower level)" : "") << "\n";
  std::cout << "actions (" << plan.actions.size() << "):";
  for (auto m : plan.actions) std::cout << ' ' << apmdp::move_name(m);
  std::cout << "\nbackups: " << plan.backups << "\n"
            << "time: " << plan.total_seconds() << " s (translate " << plan.translate_seconds << " s, plan "
            << plan.plan_seconds << " s)\n";
  if (!o.out.empty()) {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw apmdp::ConfigError("cannot write " + o.out);
    out << apmdp::plan_to_json(plan, world).dump(2) << "\n";
  }
  return kOk;
}

int cmd_translate(const Options& o) {
  apmdp::Formula formula = apmdp::Formula::constant(true);
  std::optional<apmdp::WorldModel> world;
  apmdp::PropRegistry scratch;
  if (!o.env.empty()) {
    world.emplace(apmdp::load_world(o.env));
    formula = apmdp::parse(formula_text(o), world->registry());
  } else {
    formula = apmdp::parse_declaring(formula_text(o), scratch);
  }
  const auto raw = apmdp::ltl_to_dba(formula);
  auto emit = [&](const apmdp::Dba& d, const std::string& title) {
    std::cout << "# " << title << ": " << d.size() << " states, " << d.edge_count() << " edges\n";
    if (o.format != "dot") std::cout << apmdp::to_hoa(d, apmdp::to_string(formula));
    if (o.format != "hoa") std::cout << apmdp::to_dot(d, title);
    std::cout << "# paths:";
    for (const auto& p : apmdp::find_paths(d)) std::cout << " [" << p.to_string() << "]";
    std::cout << "\n";
  };
  emit(raw, "unpruned");
  if (world) emit(apmdp::remove_contradictions(raw, world->facts()), "pruned");
  return kOk;
}

int cmd_check(const Options& o) {
  const auto world = apmdp::load_world(o.env);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(apmdp::read_text_file(o.plan_file));
  } catch (const nlohmann::json::parse_error& e) {
    throw apmdp::ConfigError(o.plan_file + ": " + e.what());
  }
  const auto plan = apmdp::plan_from_json(doc, world);
  if (plan.world_id != world.id())
    throw apmdp::ConfigError("plan was made for world '" + plan.world_id + "', not '" + world.id() + "'");
  const std::string text = !o.ltl.empty() || !o.ltl_file.empty() ? formula_text(o) : plan.formula;
  const auto formula = apmdp::parse(text, world.registry());
  const auto dba = apmdp::remove_contradictions(apmdp::ltl_to_dba(formula), world.facts());
  const auto r = apmdp::check_plan(world, dba, plan);
  if (r.satisfied) {
    std::cout << "satisfied: " << plan.actions.size() << " actions, automaton ends in q" << r.final_state << "\n";
    return kOk;
  }
  std::cout << "violated at step " << r.step << ": " << r.reason << "\n";
  return kViolated;
}

int cmd_bench(const Options& o) {
  const auto world = apmdp::load_world(o.env);
  o.params.validate();
  std::vector<apmdp::Task> tasks;
  if (!o.ltl_file.empty()) {
    // Task file: formulas as given, starts drawn from the seed.
    std::mt19937_64 rng(o.seed);
    std::size_t id = 0;
    for (const auto& line : apmdp::split_formula_lines(apmdp::read_text_file(o.ltl_file))) {
      apmdp::parse(line, world.registry());
      apmdp::Task t;
      t.id = id++;
      t.formula = line;
      t.start = world.cell_at(std::uniform_int_distribution<std::size_t>(0, world.cell_count() - 1)(rng));
      tasks.push_back(std::move(t));
    }
  } else {
    tasks = apmdp::sample_tasks(world, o.tasks, o.seed, o.min_level);
  }
  const auto pairs = apmdp::run_benchmark(world, tasks, o.params, o.seed, o.jobs);
  const std::string dir = o.out.empty() ? "bench_" + world.id() : o.out;
  apmdp::emit_report(pairs, world.id(), dir);
  std::cout << apmdp::summary_text(pairs, world.id()) << "report: " << dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical LTL planning on 3D gridworlds (AP-MDP and the flat P-MDP baseline)"};
  app.require_subcommand(1);
  Options o;

  auto* plan = app.add_subcommand("plan", "Plan for one formula from one start cell");
  plan->add_option("--env", o.env, "World file")->required()->check(CLI::ExistingFile);
  add_formula_flags(plan, o);
  plan->add_option("--start", o.start, "Start cell as x,y,z or a start name from the world file")->required();
  plan->add_option("--method", o.method, "Planner")->check(CLI::IsMember({"apmdp", "pmdp"}))->capture_default_str();
  plan->add_option("--out", o.out, "Write the plan (JSON) to this file");
  add_reward_flags(plan, o);

  auto* translate = app.add_subcommand("translate", "Print the automaton of a formula (HOA-like text and DOT)");
  add_formula_flags(translate, o);
  translate->add_option("--env", o.env, "World file; adds the contradiction-pruned automaton")
      ->check(CLI::ExistingFile);
  translate->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"hoa", "dot", "both"}))
      ->capture_default_str();

  auto* check = app.add_subcommand("check", "Verify a plan file against its formula");
  check->add_option("--env", o.env, "World file")->required()->check(CLI::ExistingFile);
  check->add_option("--plan", o.plan_file, "Plan file written by 'plan --out'")->required()->check(CLI::ExistingFile);
  add_formula_flags(check, o);

  auto* bench = app.add_subcommand("bench", "Run AP-MDP and P-MDP on random tasks and write CSV reports");
  bench->add_option("--env", o.env, "World file")->required()->check(CLI::ExistingFile);
  bench->add_option("--tasks", o.tasks, "Number of sampled tasks")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  bench->add_option("--min-level", o.min_level, "Lowest proposition level to sample")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  bench->add_option("--ltl-file", o.ltl_file, "Use the formulas in this file instead of sampling");
  bench->add_option("--out", o.out, "Report directory (default bench_<world id>)");
  bench->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  add_reward_flags(bench, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*plan) return cmd_plan(o);
    if (*translate) return cmd_translate(o);
    if (*check) return cmd_check(o);
    if (*bench) return cmd_bench(o);
  } catch (const apmdp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolated;
  }
  return kOk;
}
