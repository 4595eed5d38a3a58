#include "wfthresh/netfile.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace wfthresh {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> id_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool valid_id(std::string_view id) {
  if (id.empty() || id == "->") return false;
  return id.find_first_of(":,#") == std::string_view::npos && id.find("->") == std::string_view::npos;
}

struct Statement {
  std::size_t line;
  std::string keyword;
  std::string rest;
};

}  // namespace

WorkflowNet parse_net(std::string_view text) {
  std::vector<Statement> statements;
  {
    std::size_t number = 0;
    while (!text.empty()) {
      const auto end = text.find('\n');
      std::string_view line = text.substr(0, end);
      text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
      ++number;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto space = line.find_first_of(" \t");
      std::string keyword(line.substr(0, space));
      std::string rest(space == std::string_view::npos ? std::string_view{} : trim(line.substr(space)));
      statements.push_back({number, std::move(keyword), std::move(rest)});
    }
  }

  PetriNet net;
  std::vector<Duration> tau;
  std::map<std::string, std::size_t> place_line;
  // Pass one: places, so that transitions may reference places declared later.
  for (const auto& s : statements) {
    if (s.keyword != "place") continue;
    const auto words = id_list(s.rest);
    if (words.size() != 1 && !(words.size() == 3 && words[1] == "tau"))
      throw ParseError(s.line, "expected 'place <id> [tau <n>]'");
    if (!valid_id(words[0])) throw ParseError(s.line, "invalid id '" + words[0] + "'");
    Duration d = 0;
    if (words.size() == 3) {
      const auto& w = words[2];
      auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), d);
      if (ec != std::errc{} || ptr != w.data() + w.size())
        throw ParseError(s.line, "tau must be a non-negative integer, got '" + w + "'");
    }
    if (net.find_place(words[0]) || !place_line.emplace(words[0], s.line).second)
      throw ParseError(s.line, "duplicate place '" + words[0] + "'");
    net.add_place(words[0]);
    tau.push_back(d);
  }

  auto lookup = [&](const Statement& s, const std::string& id) {
    auto p = net.find_place(id);
    if (!p) throw ParseError(s.line, "unknown place '" + id + "'");
    return *p;
  };
  auto lookup_all = [&](const Statement& s, std::string_view ids) {
    std::vector<PlaceIndex> out;
    for (const auto& id : id_list(ids)) out.push_back(lookup(s, id));
    return out;
  };

  std::optional<std::vector<PlaceIndex>> inputs, outputs;
  std::optional<std::pair<DPolicy, std::vector<PlaceIndex>>> dset;
  for (const auto& s : statements) {
    if (s.keyword == "place") continue;
    if (s.keyword == "trans") {
      const auto colon = s.rest.find(':');
      if (colon == std::string::npos) throw ParseError(s.line, "expected 'trans <id> : <ids> -> <ids>'");
      const std::string id(trim(std::string_view(s.rest).substr(0, colon)));
      const std::string_view arcs = std::string_view(s.rest).substr(colon + 1);
      const auto arrow = arcs.find("->");
      if (arrow == std::string_view::npos) throw ParseError(s.line, "missing '->'");
      if (!valid_id(id) || id.find_first_of(" \t") != std::string::npos)
        throw ParseError(s.line, "invalid transition id '" + id + "'");
      if (net.find_transition(id)) throw ParseError(s.line, "duplicate transition '" + id + "'");
      if (net.find_place(id)) throw ParseError(s.line, "id '" + id + "' is already a place");
      const auto pre = lookup_all(s, arcs.substr(0, arrow));
      const auto post = lookup_all(s, arcs.substr(arrow + 2));
      const TransitionIndex t = net.add_transition(id);
      for (PlaceIndex p : pre) {
        try {
          net.add_input_arc(p, t);
        } catch (const NetError&) {
          throw ParseError(s.line, "duplicate arc " + net.place_name(p) + " -> " + id);
        }
      }
      for (PlaceIndex p : post) {
        try {
          net.add_output_arc(t, p);
        } catch (const NetError&) {
          throw ParseError(s.line, "duplicate arc " + id + " -> " + net.place_name(p));
        }
      }
    } else if (s.keyword == "input" || s.keyword == "output") {
      auto& target = s.keyword == "input" ? inputs : outputs;
      if (target) throw ParseError(s.line, "duplicate " + s.keyword + " section");
      auto places = lookup_all(s, s.rest);
      auto sorted = places;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ParseError(s.line, "repeated place in " + s.keyword + " section");
      target = std::move(places);
    } else if (s.keyword == "dset") {
      if (dset) throw ParseError(s.line, "duplicate dset section");
      auto words = id_list(s.rest);
      if (words.empty()) throw ParseError(s.line, "dset needs a policy");
      if (words[0] == "positive" && words.size() == 1) {
        dset.emplace(DPolicy::positive, std::vector<PlaceIndex>{});
      } else if (words[0] == "all-but-output" && words.size() == 1) {
        dset.emplace(DPolicy::all_but_output, std::vector<PlaceIndex>{});
      } else if (words[0] == "explicit") {
        std::vector<PlaceIndex> d;
        for (std::size_t i = 1; i < words.size(); ++i) d.push_back(lookup(s, words[i]));
        dset.emplace(DPolicy::explicit_set, std::move(d));
      } else {
        throw ParseError(s.line, "expected 'dset positive | all-but-output | explicit <ids>'");
      }
    } else {
      throw ParseError(s.line, "unknown keyword '" + s.keyword + "'");
    }
  }
  const std::size_t last = statements.empty() ? 1 : statements.back().line;
  if (!inputs) throw ParseError(last, "missing input section");
  if (!outputs) throw ParseError(last, "missing output section");
  WorkflowNet wf(std::move(net), std::move(*inputs), std::move(*outputs), std::move(tau));
  if (dset) wf.set_d_policy(dset->first, std::move(dset->second));
  return wf;
}

std::string render_net(const WorkflowNet& wf) {
  const PetriNet& net = wf.net();
  std::ostringstream os;
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    os << "place " << net.place_name(p);
    if (wf.duration(p) != 0) os << " tau " << wf.duration(p);
    os << '\n';
  }
  auto names = [&](const std::vector<PlaceIndex>& ps) {
    std::string s;
    for (PlaceIndex p : ps) s += " " + net.place_name(p);
    return s;
  };
  for (TransitionIndex t = 0; t < net.num_transitions(); ++t)
    os << "trans " << net.transition_name(t) << " :" << names(net.pre(t)) << " ->" << names(net.post(t)) << '\n';
  os << "input" << names(wf.inputs()) << '\n';
  os << "output" << names(wf.outputs()) << '\n';
  os << "dset " << to_string(wf.d_policy());
  if (wf.d_policy() == DPolicy::explicit_set) os << names(wf.explicit_d());
  os << '\n';
  return os.str();
}

WorkflowNet parse_pnml(const std::string& xml) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(xml);
  try {
    pt::read_xml(is, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.line(), std::string("malformed PNML: ") + e.message());
  }
  const auto pnml = tree.get_child_optional("pnml");
  if (!pnml) throw ParseError(0, "missing <pnml> root");
  const auto net_node = pnml->get_child_optional("net");
  if (!net_node) throw ParseError(0, "missing <net> element");

  struct Arc {
    std::string source, target;
  };
  std::vector<std::pair<std::string, Token>> places;
  std::vector<std::string> transitions;
  std::vector<Arc> arcs;
  // Pages may nest; collect elements depth-first in document order.
  std::function<void(const pt::ptree&)> collect = [&](const pt::ptree& node) {
    for (const auto& [tag, child] : node) {
      if (tag == "page") {
        collect(child);
      } else if (tag == "place") {
        const std::string id = child.get<std::string>("<xmlattr>.id", "");
        if (id.empty()) throw ParseError(0, "place without id");
        std::string text = child.get<std::string>("initialMarking.text", "0");
        Token tokens = 0;
        const auto t = trim(text);
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), tokens);
        if (ec != std::errc{} || ptr != t.data() + t.size())
          throw ParseError(0, "bad initial marking on place '" + id + "'");
        places.emplace_back(id, tokens);
      } else if (tag == "transition") {
        const std::string id = child.get<std::string>("<xmlattr>.id", "");
        if (id.empty()) throw ParseError(0, "transition without id");
        transitions.push_back(id);
      } else if (tag == "arc") {
        const std::string weight = std::string(trim(child.get<std::string>("inscription.text", "1")));
        if (weight != "1") throw ParseError(0, "arc weights other than 1 are not supported");
        arcs.push_back({child.get<std::string>("<xmlattr>.source", ""), child.get<std::string>("<xmlattr>.target", "")});
      }
    }
  };
  collect(*net_node);

  PetriNet net;
  for (const auto& [id, tokens] : places) {
    if (net.find_place(id)) throw ParseError(0, "duplicate place '" + id + "'");
    net.add_place(id);
  }
  for (const auto& id : transitions) {
    if (net.find_transition(id) || net.find_place(id)) throw ParseError(0, "duplicate id '" + id + "'");
    net.add_transition(id);
  }
  for (const auto& a : arcs) {
    try {
      if (auto p = net.find_place(a.source)) {
        auto t = net.find_transition(a.target);
        if (!t) throw ParseError(0, "arc target '" + a.target + "' is not a transition");
        net.add_input_arc(*p, *t);
      } else if (auto t = net.find_transition(a.source)) {
        auto q = net.find_place(a.target);
        if (!q) throw ParseError(0, "arc target '" + a.target + "' is not a place");
        net.add_output_arc(*t, *q);
      } else {
        throw ParseError(0, "arc source '" + a.source + "' is unknown");
      }
    } catch (const NetError& e) {
      throw ParseError(0, e.what());
    }
  }
  std::vector<PlaceIndex> inputs, outputs;
  for (PlaceIndex p = 0; p < net.num_places(); ++p) {
    if (places[p].second > 1) throw ParseError(0, "place '" + places[p].first + "' carries more than one token");
    if (places[p].second == 1) inputs.push_back(p);
  }
  if (inputs.empty())
    for (PlaceIndex p = 0; p < net.num_places(); ++p)
      if (net.producers(p).empty()) inputs.push_back(p);
  for (PlaceIndex p = 0; p < net.num_places(); ++p)
    if (net.consumers(p).empty()) outputs.push_back(p);
  WorkflowNet wf(std::move(net), std::move(inputs), std::move(outputs));
  wf.set_d_policy(DPolicy::all_but_output);
  return wf;
}

WorkflowNet load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const bool pnml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".pnml") == 0;
  return pnml ? parse_pnml(buf.str()) : parse_net(buf.str());
}

}  // namespace wfthresh
