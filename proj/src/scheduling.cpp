#include "wfthresh/scheduling.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace wfthresh {

const char* to_string(ScheduleFault f) {
  switch (f) {
    case ScheduleFault::none: return "none";
    case ScheduleFault::partial: return "partial";
    case ScheduleFault::precedence: return "precedence";
    case ScheduleFault::deadline: return "deadline";
    case ScheduleFault::capacity: return "capacity";
  }
  return "?";
}

namespace {

Duration tau_of(const Process& p, std::span<const Duration> tau, OccPlace q) { return tau[p.place(q).label]; }

// Longest chain of durations strictly after each place.
std::vector<Time> tails(const Process& p, std::span<const Duration> tau) {
  std::vector<Time> tail(p.num_places(), 0);
  for (OccPlace q = p.num_places(); q-- > 0;) {
    if (auto c = p.place(q).consumer)
      for (OccPlace s : p.transition(*c).postset) tail[q] = std::max(tail[q], tau_of(p, tau, s) + tail[s]);
  }
  return tail;
}

// Strict causal predecessors of every place as boolean rows.
std::vector<std::vector<bool>> ancestors(const Process& p) {
  std::vector<std::vector<bool>> anc(p.num_places(), std::vector<bool>(p.num_places(), false));
  for (OccPlace q = 0; q < p.num_places(); ++q) {
    for (OccPlace pred : p.place_predecessors(q)) {
      anc[q][pred] = true;
      for (OccPlace r = 0; r < q; ++r)
        if (anc[pred][r]) anc[q][r] = true;
    }
  }
  return anc;
}

class Profile {
 public:
  Profile(Time horizon, std::size_t capacity) : used_(horizon, 0), capacity_(capacity) {}
  bool fits(Time start, Duration d) const {
    for (Time u = start; u < start + d; ++u)
      if (used_[u] >= capacity_) return false;
    return true;
  }
  void add(Time start, Duration d) {
    for (Time u = start; u < start + d; ++u) ++used_[u];
  }
  void remove(Time start, Duration d) {
    for (Time u = start; u < start + d; ++u) --used_[u];
  }
  std::uint64_t free_from(Time from) const {
    std::uint64_t free = 0;
    for (Time u = from; u < used_.size(); ++u) free += capacity_ - used_[u];
    return free;
  }

 private:
  std::vector<std::size_t> used_;
  std::size_t capacity_;
};

// Zero-duration places start as early as their predecessors allow.
void fill_zero_duration(const Process& p, std::span<const Duration> tau, StartTimes& f) {
  for (OccPlace q = 0; q < p.num_places(); ++q) {
    if (tau_of(p, tau, q) > 0) continue;
    Time start = 0;
    for (OccPlace pred : p.place_predecessors(q)) start = std::max(start, f[pred] + tau_of(p, tau, pred));
    f[q] = start;
  }
}

struct SearchOutcome {
  std::optional<Schedule> schedule;
  std::uint64_t nodes = 0;
};

SearchOutcome search_schedule(const Process& p, std::span<const Duration> tau, std::size_t k, Time t) {
  SearchOutcome out;
  const std::size_t n = p.num_places();
  const auto head = min_schedule(p, tau);
  const auto tail = tails(p, tau);

  std::vector<OccPlace> tasks;
  for (OccPlace q = 0; q < n; ++q) {
    const Duration d = tau_of(p, tau, q);
    if (head[q] + d + tail[q] > t) return out;
    if (d > 0) tasks.push_back(q);
  }
  if (tasks.empty()) {
    StartTimes f(n, 0);
    fill_zero_duration(p, tau, f);
    out.schedule = Schedule{std::move(f)};
    return out;
  }
  if (k == 0) return out;

  // Earliest start first; a strict predecessor always has a smaller head.
  std::stable_sort(tasks.begin(), tasks.end(), [&](OccPlace a, OccPlace b) { return head[a] < head[b]; });
  const auto anc = ancestors(p);
  std::vector<std::vector<OccPlace>> task_preds(tasks.size());
  // Twins share producer, consumer and duration; they are interchangeable, so
  // a twin may not start before the twin placed just before it.
  std::vector<std::optional<std::size_t>> twin_before(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (anc[tasks[i]][tasks[j]]) task_preds[i].push_back(tasks[j]);
      const auto& a = p.place(tasks[i]);
      const auto& b = p.place(tasks[j]);
      if (a.producer == b.producer && a.consumer == b.consumer && tau_of(p, tau, tasks[i]) == tau_of(p, tau, tasks[j]))
        twin_before[i] = j;
    }
  }
  std::vector<std::uint64_t> suffix_area(tasks.size() + 1, 0);
  std::vector<Time> suffix_head(tasks.size() + 1, t);
  for (std::size_t i = tasks.size(); i-- > 0;) {
    suffix_area[i] = suffix_area[i + 1] + tau_of(p, tau, tasks[i]);
    suffix_head[i] = std::min(suffix_head[i + 1], head[tasks[i]]);
  }

  Profile profile(t, k);
  StartTimes f(n, 0);
  std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
    ++out.nodes;
    if (i == tasks.size()) return true;
    if (suffix_area[i] > profile.free_from(suffix_head[i])) return false;
    const OccPlace q = tasks[i];
    const Duration d = tau_of(p, tau, q);
    Time earliest = head[q];
    for (OccPlace pred : task_preds[i]) earliest = std::max(earliest, f[pred] + tau_of(p, tau, pred));
    if (twin_before[i]) earliest = std::max(earliest, f[tasks[*twin_before[i]]]);
    const Time latest = t - d - tail[q];
    for (Time s = earliest; s <= latest; ++s) {
      if (!profile.fits(s, d)) continue;
      f[q] = s;
      profile.add(s, d);
      if (place(i + 1)) return true;
      profile.remove(s, d);
    }
    return false;
  };
  if (place(0)) {
    fill_zero_duration(p, tau, f);
    out.schedule = Schedule{std::move(f)};
  }
  return out;
}

}  // namespace

ScheduleCheck check_schedule(const Process& p, std::span<const Duration> tau, const Schedule& f, std::size_t k,
                             Time t) {
  ScheduleCheck check;
  const std::size_t n = p.num_places();
  if (f.start.size() != n) {
    check.fault = ScheduleFault::partial;
    return check;
  }
  for (OccPlace q = 0; q < n; ++q) {
    for (OccPlace pred : p.place_predecessors(q)) {
      if (f.start[pred] + tau_of(p, tau, pred) > f.start[q]) {
        check.fault = ScheduleFault::precedence;
        check.place = q;
        return check;
      }
    }
  }
  for (OccPlace q = 0; q < n; ++q) {
    if (static_cast<std::uint64_t>(f.start[q]) + tau_of(p, tau, q) > t) {
      check.fault = ScheduleFault::deadline;
      check.place = q;
      return check;
    }
  }
  // The number of active tasks only rises at start instants.
  for (OccPlace q = 0; q < n; ++q) {
    if (tau_of(p, tau, q) == 0) continue;
    const Time u = f.start[q];
    std::size_t active = 0;
    for (OccPlace r = 0; r < n; ++r) {
      const Duration d = tau_of(p, tau, r);
      if (d > 0 && f.start[r] <= u && u < f.start[r] + d) ++active;
    }
    if (active > k) {
      check.fault = ScheduleFault::capacity;
      check.instant = u;
      return check;
    }
  }
  return check;
}

std::optional<Schedule> feasible_schedule(const Process& p, std::span<const Duration> tau, std::size_t k, Time t) {
  return search_schedule(p, tau, k, t).schedule;
}

ResourceThresholdResult resource_threshold_run(const Process& p, std::span<const Duration> tau) {
  ResourceThresholdResult result;
  result.deadline = t_min(p, tau);
  for (std::size_t k = 1;; ++k) {
    auto outcome = search_schedule(p, tau, k, result.deadline);
    if (outcome.schedule) {
      result.threshold = k;
      result.witness = std::move(*outcome.schedule);
      return result;
    }
    result.lower = InfeasibilityCertificate{k, outcome.nodes};
    if (k > p.num_places()) throw NetError("no schedule within t_min; process durations inconsistent");
  }
}

NetResourceThreshold resource_threshold_net(const WorkflowNet& wf, std::size_t max_runs) {
  auto runs = enumerate_runs(wf, max_runs);
  if (runs.truncated) throw NetError("run limit reached before all runs were enumerated");
  if (runs.runs.empty()) throw NetError("net has no run");
  NetResourceThreshold out;
  for (auto& run : runs.runs) {
    auto r = resource_threshold_run(run, wf.durations());
    out.threshold = std::max(out.threshold, r.threshold);
    out.runs.push_back({std::move(run), std::move(r)});
  }
  return out;
}

std::vector<Schedule> enumerate_optimal_schedules(const Process& p, std::span<const Duration> tau, std::size_t k,
                                                  Time t, std::uint64_t node_budget) {
  const std::size_t n = p.num_places();
  const auto tail = tails(p, tau);
  std::vector<Schedule> out;
  Profile profile(t, k);
  StartTimes f(n, 0);
  std::uint64_t nodes = 0;
  std::function<void(OccPlace)> rec = [&](OccPlace q) {
    if (++nodes > node_budget) throw SearchBudgetExceeded("schedule enumeration exceeded its node budget");
    if (q == n) {
      out.push_back(Schedule{f});
      return;
    }
    const Duration d = tau_of(p, tau, q);
    Time earliest = 0;
    for (OccPlace pred : p.place_predecessors(q)) earliest = std::max(earliest, f[pred] + tau_of(p, tau, pred));
    if (static_cast<std::uint64_t>(earliest) + d + tail[q] > t) return;
    const Time latest = t - d - tail[q];
    for (Time s = earliest; s <= latest; ++s) {
      if (d > 0 && !profile.fits(s, d)) continue;
      f[q] = s;
      profile.add(s, d);
      rec(q + 1);
      profile.remove(s, d);
    }
  };
  rec(0);
  return out;
}

bool scheduling_feasibility(std::span<const Job> jobs, std::size_t k, Time t) {
  const std::size_t n = jobs.size();
  // Reject cycles (and self-loops) in the precedence relation.
  std::vector<int> color(n, 0);
  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    color[v] = 1;
    for (std::size_t u : jobs[v].predecessors) {
      if (u >= n) throw NetError("job predecessor out of range");
      if (color[u] == 1) throw NetError("cyclic job precedence");
      if (color[u] == 0) dfs(u);
    }
    color[v] = 2;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (color[v] == 0) dfs(v);

  for (const Job& j : jobs)
    if (j.duration > t) return false;

  std::vector<Time> start(n, 0);
  std::vector<std::size_t> load(t, 0);
  auto consistent = [&](std::size_t i) {
    // Precedence against already assigned jobs, in both directions.
    for (std::size_t u : jobs[i].predecessors)
      if (u < i && start[u] + jobs[u].duration > start[i]) return false;
    for (std::size_t j = 0; j < i; ++j)
      for (std::size_t u : jobs[j].predecessors)
        if (u == i && start[i] + jobs[i].duration > start[j]) return false;
    return true;
  };
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == n) return true;
    const Duration d = jobs[i].duration;
    for (Time s = 0; s + d <= t; ++s) {
      start[i] = s;
      if (!consistent(i)) continue;
      bool fits = true;
      for (Time u = s; u < s + d; ++u) fits = fits && load[u] < k;
      if (!fits) continue;
      for (Time u = s; u < s + d; ++u) ++load[u];
      if (rec(i + 1)) return true;
      for (Time u = s; u < s + d; ++u) --load[u];
    }
    return false;
  };
  return rec(0);
}

std::vector<Job> jobs_of(const Process& p, std::span<const Duration> tau) {
  std::vector<Job> jobs(p.num_places());
  for (OccPlace q = 0; q < p.num_places(); ++q) {
    jobs[q].duration = tau_of(p, tau, q);
    auto preds = p.place_predecessors(q);
    jobs[q].predecessors.assign(preds.begin(), preds.end());
  }
  return jobs;
}

}  // namespace wfthresh
