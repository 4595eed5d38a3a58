#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wfthresh/process.hpp"
#include "wfthresh/workflow.hpp"

namespace wfthresh {

using Time = Duration;

/// Start time per occurrence place.
struct Schedule {
  StartTimes start;
  bool operator==(const Schedule&) const = default;
};

enum class ScheduleFault {
  none,
  partial,     // domain does not cover the process
  precedence,  // condition (1)
  deadline,    // condition (2)
  capacity,    // condition (3)
};

const char* to_string(ScheduleFault f);

struct ScheduleCheck {
  ScheduleFault fault = ScheduleFault::none;
  std::optional<OccPlace> place;  // offending place for (1)/(2)
  std::optional<Time> instant;    // offending instant for (3)
  bool ok() const { return fault == ScheduleFault::none; }
};

/// Conditions (1)-(3) of a (k,t)-schedule. Zero-duration places never
/// occupy a resource.
ScheduleCheck check_schedule(const Process& p, std::span<const Duration> tau, const Schedule& f,
                             std::size_t k, Time t);

/// Branch and bound over integer start times of the positive-duration
/// places; zero-duration places get their earliest start.
std::optional<Schedule> feasible_schedule(const Process& p, std::span<const Duration> tau, std::size_t k,
                                          Time t);

/// Search statistics of a failed feasibility search.
struct InfeasibilityCertificate {
  std::size_t resources = 0;
  std::uint64_t nodes = 0;
};

struct ResourceThresholdResult {
  std::size_t threshold = 0;
  Time deadline = 0;  // t_min of the process
  Schedule witness;
  std::optional<InfeasibilityCertificate> lower;  // absent when threshold is 1
};

/// RT of a process: least k >= 1 admitting a (k, t_min)-schedule.
ResourceThresholdResult resource_threshold_run(const Process& p, std::span<const Duration> tau);

struct RunThreshold {
  Process run;
  ResourceThresholdResult result;
};

struct NetResourceThreshold {
  std::size_t threshold = 0;
  std::vector<RunThreshold> runs;  // canonical run order
};

/// max over runs of RT(run). The net must be acyclic and sound.
NetResourceThreshold resource_threshold_net(const WorkflowNet& wf, std::size_t max_runs = 100000);

class SearchBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every integer start-time assignment over all occurrence places that is a
/// (k,t)-schedule. Throws SearchBudgetExceeded past `node_budget` nodes.
std::vector<Schedule> enumerate_optimal_schedules(const Process& p, std::span<const Duration> tau, std::size_t k,
                                                  Time t, std::uint64_t node_budget = 10'000'000);

/// A job of the classical precedence-constrained scheduling problem.
struct Job {
  Duration duration = 0;
  std::vector<std::size_t> predecessors;  // indices into the job list
};

/// Plain enumeration of start times for every job; independent of the
/// process-based search. Throws NetError on cyclic precedence.
bool scheduling_feasibility(std::span<const Job> jobs, std::size_t k, Time t);

/// Jobs induced by a process: one per occurrence place, with the causal order as precedence.
std::vector<Job> jobs_of(const Process& p, std::span<const Duration> tau);

}  // namespace wfthresh
