#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "apmdp/error.hpp"
#include "apmdp/ltl.hpp"
#include "apmdp/parser.hpp"
#include "apmdp/planner.hpp"
#include "apmdp/world.hpp"

namespace apmdp {

enum class TaskTemplate { Eventually, Sequence2, Sequence3, Both, Until };

inline constexpr std::array<TaskTemplate, 5> kTemplates{TaskTemplate::Eventually, TaskTemplate::Sequence2,
                                                       TaskTemplate::Sequence3, TaskTemplate::Both,
                                                       TaskTemplate::Until};

inline int slot_count(TaskTemplate t) {
  switch (t) {
    case TaskTemplate::Eventually: return 1;
    case TaskTemplate::Sequence3: return 3;
    default: return 2;
  }
}

inline const char* template_name(TaskTemplate t) {
  switch (t) {
    case TaskTemplate::Eventually: return "F a";
    case TaskTemplate::Sequence2: return "F(a & F b)";
    case TaskTemplate::Sequence3: return "F(a & F(b & F c))";
    case TaskTemplate::Both: return "F a & F b";
    case TaskTemplate::Until: return "!a U b";
  }
  return "";
}

inline std::string instantiate(TaskTemplate t, const std::vector<std::string>& s) {
  switch (t) {
    case TaskTemplate::Eventually: return "F " + s.at(0);
    case TaskTemplate::Sequence2: return "F (" + s.at(0) + " & F " + s.at(1) + ")";
    case TaskTemplate::Sequence3: return "F (" + s.at(0) + " & F (" + s.at(1) + " & F " + s.at(2) + "))";
    case TaskTemplate::Both: return "F " + s.at(0) + " & F " + s.at(1);
    case TaskTemplate::Until: return "! " + s.at(0) + " U " + s.at(1);
  }
  return "";
}

struct Task {
  std::size_t id = 0;
  TaskTemplate kind = TaskTemplate::Eventually;
  std::string formula;
  Cell start;
};

/// Draws n tasks: a template uniformly, then per slot a level uniformly from
/// [min_level, top] and a proposition of that level uniformly, without
/// repeating a proposition inside one formula; then a start cell uniformly.
inline std::vector<Task> sample_tasks(const WorldModel& world, std::size_t n, std::uint64_t seed, int min_level = 0) {
  if (min_level < 0 || min_level >= kLevelCount) throw ConfigError("min level must be in [0, 2]");
  std::vector<int> levels;
  for (int l = min_level; l < kLevelCount; ++l)
    if (!world.registry().at_level(l).empty()) levels.push_back(l);
  if (levels.empty()) throw ConfigError("the world has no propositions at the requested levels");

  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t k) { return std::uniform_int_distribution<std::size_t>(0, k - 1)(rng); };
  std::vector<Task> out;
  for (std::size_t i = 0; i < n; ++i) {
    Task t;
    t.id = i;
    t.kind = kTemplates[pick(kTemplates.size())];
    std::vector<std::string> slots;
    while (slots.size() < static_cast<std::size_t>(slot_count(t.kind))) {
      const auto props = world.registry().at_level(levels[pick(levels.size())]);
      const auto& name = world.registry()[props[pick(props.size())]].name;
      if (std::find(slots.begin(), slots.end(), name) == slots.end()) slots.push_back(name);
    }
    t.formula = instantiate(t.kind, slots);
    t.start = world.cell_at(pick(world.cell_count()));
    out.push_back(std::move(t));
  }
  return out;
}

struct BenchRecord {
  std::string method;
  bool feasible = false;
  std::string status;  // "ok", "infeasible", "unsupported", "error"
  std::size_t backups = 0;
  std::size_t plan_length = 0;
  double translate_seconds = 0.0;
  double plan_seconds = 0.0;
  double total_seconds() const { return translate_seconds + plan_seconds; }
};

struct BenchPair {
  Task task;
  std::uint64_t seed = 0;
  BenchRecord apmdp;
  BenchRecord pmdp;
};

inline BenchRecord run_one(Method m, const WorldModel& world, const Task& task, const RewardParams& params) {
  BenchRecord r;
  r.method = method_name(m);
  try {
    const Formula f = parse(task.formula, world.registry());
    const auto plan = solve(m, world, f, task.start, params);
    r.feasible = true;
    r.status = "ok";
    r.backups = plan.backups;
    r.plan_length = plan.actions.size();
    r.translate_seconds = plan.translate_seconds;
    r.plan_seconds = plan.plan_seconds;
  } catch (const Error& e) {
    r.status = e.kind() == ErrorKind::Infeasible ? "infeasible"
               : e.kind() == ErrorKind::UnsupportedFragment ? "unsupported"
                                                             : "error";
  } catch (const std::exception&) {
    r.status = "error";
  }
  return r;
}

/// Runs both methods on every task. Tasks are distributed over `jobs` worker
/// threads; results come back in task order.
inline std::vector<BenchPair> run_benchmark(const WorldModel& world, const std::vector<Task>& tasks,
                                            const RewardParams& params, std::uint64_t seed = 0, unsigned jobs = 1) {
  std::vector<BenchPair> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      out[i].task = tasks[i];
      out[i].seed = seed;
      out[i].apmdp = run_one(Method::ApMdp, world, tasks[i], params);
      out[i].pmdp = run_one(Method::PMdp, world, tasks[i], params);
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, tasks.size()))));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

struct BenchSummary {
  std::size_t tasks = 0;
  std::size_t both_feasible = 0;
  std::size_t apmdp_infeasible = 0;
  std::size_t pmdp_infeasible = 0;
  std::size_t backup_wins = 0;  // AP-MDP strictly fewer backups, over pairs where both are feasible
  std::size_t time_wins = 0;

  double backup_win_rate() const { return both_feasible ? double(backup_wins) / both_feasible : 0.0; }
  double time_win_rate() const { return both_feasible ? double(time_wins) / both_feasible : 0.0; }
};

inline BenchSummary summarize(const std::vector<BenchPair>& pairs) {
  BenchSummary s;
  s.tasks = pairs.size();
  for (const auto& p : pairs) {
    if (!p.apmdp.feasible) ++s.apmdp_infeasible;
    if (!p.pmdp.feasible) ++s.pmdp_infeasible;
    if (!p.apmdp.feasible || !p.pmdp.feasible) continue;
    ++s.both_feasible;
    if (p.apmdp.backups < p.pmdp.backups) ++s.backup_wins;
    if (p.apmdp.total_seconds() < p.pmdp.total_seconds()) ++s.time_wins;
  }
  return s;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"') r += '"';
    r += c;
  }
  return r + "\"";
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(9) << v;
  return os.str();
}

inline double safe_ratio(double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? 1e300 : 1.0); }

}  // namespace detail

/// Per-task CSV. Ratio columns are AP-MDP over P-MDP and are left empty unless
/// both methods are feasible.
inline std::string tasks_csv(const std::vector<BenchPair>& pairs) {
  std::ostringstream os;
  os << "task,template,formula,start,seed,"
        "apmdp_status,apmdp_backups,apmdp_length,apmdp_translate_s,apmdp_plan_s,apmdp_total_s,"
        "pmdp_status,pmdp_backups,pmdp_length,pmdp_translate_s,pmdp_plan_s,pmdp_total_s,"
        "backup_ratio,time_ratio\n";
  for (const auto& p : pairs) {
    os << p.task.id << ',' << detail::csv_quote(template_name(p.task.kind)) << ','
       << detail::csv_quote(p.task.formula) << ',' << detail::csv_quote(to_string(p.task.start)) << ',' << p.seed;
    for (const auto* r : {&p.apmdp, &p.pmdp})
      os << ',' << r->status << ',' << r->backups << ',' << r->plan_length << ',' << detail::fmt(r->translate_seconds)
         << ',' << detail::fmt(r->plan_seconds) << ',' << detail::fmt(r->total_seconds());
    if (p.apmdp.feasible && p.pmdp.feasible)
      os << ',' << detail::fmt(detail::safe_ratio(double(p.apmdp.backups), double(p.pmdp.backups))) << ','
         << detail::fmt(detail::safe_ratio(p.apmdp.total_seconds(), p.pmdp.total_seconds()));
    else
      os << ",,";
    os << '\n';
  }
  return os.str();
}

/// Cumulative histogram points: for each metric and each distinct value v,
/// the number of feasible pairs whose value is <= v.
inline std::string histogram_csv(const std::vector<BenchPair>& pairs) {
  std::map<std::string, std::vector<double>> series;
  for (const auto& p : pairs) {
    if (!p.apmdp.feasible || !p.pmdp.feasible) continue;
    series["apmdp_backups"].push_back(double(p.apmdp.backups));
    series["pmdp_backups"].push_back(double(p.pmdp.backups));
    series["apmdp_time_s"].push_back(p.apmdp.total_seconds());
    series["pmdp_time_s"].push_back(p.pmdp.total_seconds());
    series["backup_ratio"].push_back(detail::safe_ratio(double(p.apmdp.backups), double(p.pmdp.backups)));
    series["time_ratio"].push_back(detail::safe_ratio(p.apmdp.total_seconds(), p.pmdp.total_seconds()));
  }
  std::ostringstream os;
  os << "metric,value,cumulative_count\n";
  for (auto& [name, values] : series) {
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i)
      if (i + 1 == values.size() || values[i + 1] != values[i])
        os << name << ',' << detail::fmt(values[i]) << ',' << i + 1 << '\n';
  }
  return os.str();
}

inline std::string summary_text(const std::vector<BenchPair>& pairs, const std::string& world_id) {
  const auto s = summarize(pairs);
  std::ostringstream os;
  os << "world: " << world_id << '\n'
     << "tasks: " << s.tasks << '\n'
     << "both feasible: " << s.both_feasible << '\n'
     << "apmdp infeasible: " << s.apmdp_infeasible << '\n'
     << "pmdp infeasible: " << s.pmdp_infeasible << '\n'
     << "apmdp fewer backups: " << s.backup_wins << " / " << s.both_feasible << '\n'
     << "apmdp faster: " << s.time_wins << " / " << s.both_feasible << '\n';
  return os.str();
}

/// Writes tasks.csv, histogram.csv and summary.txt into `dir`.
inline void emit_report(const std::vector<BenchPair>& pairs, const std::string& world_id,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    out << text;
  };
  write("tasks.csv", tasks_csv(pairs));
  write("histogram.csv", histogram_csv(pairs));
  write("summary.txt", summary_text(pairs, world_id));
}

}  // namespace apmdp
