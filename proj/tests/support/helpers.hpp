#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wfthresh/netfile.hpp"
#include "wfthresh/process.hpp"
#include "wfthresh/scheduling.hpp"
#include "wfthresh/workflow.hpp"

namespace wfthresh::testing {

/// Re-parses the rendered net after replacing one whole line; an empty
/// replacement deletes it.
WorkflowNet edit_net(const WorkflowNet& wf, std::string_view line, std::string_view replacement);

/// The unique occurrence place with the given base label.
OccPlace occ(const Process& p, std::string_view label);

/// Schedule given per label; every occurrence place must be covered.
Schedule schedule_by_label(const Process& p, const std::map<std::string, Time>& start);

/// The run among `runs` whose events include `transition`.
const Process& run_with(const std::vector<Process>& runs, std::string_view transition);

std::vector<std::string> names(const PetriNet& net, const std::vector<TransitionIndex>& seq);

}  // namespace wfthresh::testing
