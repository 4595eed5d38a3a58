#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfthresh/scheduling.hpp"
#include "wfthresh/threshold.hpp"
#include "wfthresh/workflow.hpp"

namespace wfthresh {

struct AnalysisOptions {
  std::size_t state_limit = 1'000'000;
  bool compute_rt = true;
  std::size_t runs_limit = 1000;
};

struct RtSummary {
  std::optional<std::size_t> value;
  std::string status;  // "computed", "cyclic", "unsound", "too-many-runs"
  std::vector<std::pair<std::vector<TransitionIndex>, ResourceThresholdResult>> runs;
};

struct AnalysisRecord {
  std::string name;
  std::size_t places = 0;
  std::size_t transitions = 0;
  bool marked_graph = false;
  bool free_choice = false;
  bool acyclic = false;
  std::vector<StructuralViolation> violations;
  SoundnessReport soundness;
  ThresholdReport bounds;
  RtSummary rt;
  std::map<std::string, double> timings_ms;

  /// A limit was hit somewhere so a requested value is missing.
  bool inconclusive() const;
};

AnalysisRecord analyze(const std::string& name, const WorkflowNet& wf, const AnalysisOptions& options = {});

nlohmann::ordered_json witness_json(const WorkflowNet& wf, const Witness& w);
nlohmann::ordered_json bounds_json(const WorkflowNet& wf, const ThresholdReport& r);
nlohmann::ordered_json to_json(const WorkflowNet& wf, const AnalysisRecord& r);

/// Median, mean and maximum of each column. Throws std::invalid_argument on
/// an empty record list.
nlohmann::ordered_json report(const std::vector<AnalysisRecord>& records);

/// Removes every "timings_ms" member, recursively.
nlohmann::ordered_json strip_timings(nlohmann::ordered_json j);

}  // namespace wfthresh
