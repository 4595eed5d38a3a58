#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wfthresh/workflow.hpp"

namespace wfthresh {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Line-oriented net grammar:
///   place <id> [tau <n>]
///   trans <id> : <ids> -> <ids>
///   input <ids>
///   output <ids>
///   dset positive | all-but-output | explicit <ids>
/// Id lists are separated by blanks or commas; '#' starts a comment.
WorkflowNet parse_net(std::string_view text);

std::string render_net(const WorkflowNet& wf);

/// Ordinary PNML nets. I is the set of initially marked places (source
/// places if none is marked), O the set of sink places, D = P \ O, tau = 0.
WorkflowNet parse_pnml(const std::string& xml);

/// Dispatches on the extension (.pnml or anything else).
WorkflowNet load_net(const std::string& path);

}  // namespace wfthresh
