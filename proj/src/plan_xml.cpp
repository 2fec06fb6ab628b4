#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <set>
#include <sstream>

#include "bimoplan/errors.hpp"
#include "bimoplan/plan.hpp"

namespace bimoplan {
namespace {

const char* kind_name(BtKind kind) {
  switch (kind) {
    case BtKind::Sequence: return "Sequence";
    case BtKind::Fallback: return "Fallback";
    case BtKind::Parallel: return "Parallel";
    case BtKind::Decorator: return "Decorator";
    case BtKind::Action: return "Action";
    case BtKind::Condition: return "Condition";
  }
  return "Sequence";
}

std::string escape_attr(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_node(std::ostringstream& out, const BtNode& node, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out << indent << '<' << kind_name(node.kind);
  if (!node.name.empty()) out << " name=\"" << escape_attr(node.name) << '"';
  for (const auto& [key, value] : node.params) {
    out << ' ' << key << "=\"" << escape_attr(value) << '"';
  }
  if (node.children.empty()) {
    out << "/>\n";
    return;
  }
  out << ">\n";
  for (const auto& child : node.children) write_node(out, child, depth + 1);
  out << indent << "</" << kind_name(node.kind) << ">\n";
}

const std::set<std::string> kActionNames = {
    "AcquirePose", "ExecuteTrajectoryTo", "ExecCoordinatedTrajectoryTo",
    "Grasp",       "Release",             "KeepGrasp",
    "MotionPrimitive"};

const std::set<std::string> kConditionNames = {"AtTarget"};

const std::set<std::string>& allowed_params(BtKind kind, const std::string& name) {
  static const std::set<std::string> acquire = {"target", "arm"};
  static const std::set<std::string> exec = {"target", "rel", "subject", "arm"};
  static const std::set<std::string> exec_coord = {"target", "rel",     "subject",
                                                   "grasp_x", "grasp_y", "arm"};
  static const std::set<std::string> grip = {"target", "arm"};
  static const std::set<std::string> keep = {"arm"};
  static const std::set<std::string> motion = {"tag", "target", "arm"};
  static const std::set<std::string> at_target = {"frame", "rel",   "subject",
                                                  "arm",   "tol_m", "tol_rad"};
  static const std::set<std::string> control = {"coordination", "arm", "dominant",
                                                "reference", "target", "policy"};
  // "name" maps to the node's name field during parsing, never into params.
  if (kind == BtKind::Condition) return at_target;
  if (kind != BtKind::Action) return control;
  if (name == "AcquirePose") return acquire;
  if (name == "ExecuteTrajectoryTo") return exec;
  if (name == "ExecCoordinatedTrajectoryTo") return exec_coord;
  if (name == "Grasp" || name == "Release") return grip;
  if (name == "KeepGrasp") return keep;
  return motion;
}

using boost::property_tree::ptree;

BtNode parse_node(const std::string& element, const ptree& tree);

void parse_children(BtNode& node, const ptree& tree) {
  for (const auto& [key, child] : tree) {
    if (key == "<xmlattr>") continue;
    if (key == "<xmlcomment>" || key == "<xmltext>") {
      raise(ErrorCode::SchemaViolation, "unexpected content in plan document");
    }
    node.children.push_back(parse_node(key, child));
  }
}

BtNode parse_node(const std::string& element, const ptree& tree) {
  BtNode node;
  if (element == "Sequence") node.kind = BtKind::Sequence;
  else if (element == "Fallback") node.kind = BtKind::Fallback;
  else if (element == "Parallel") node.kind = BtKind::Parallel;
  else if (element == "Decorator") node.kind = BtKind::Decorator;
  else if (element == "Action") node.kind = BtKind::Action;
  else if (element == "Condition") node.kind = BtKind::Condition;
  else raise(ErrorCode::SchemaViolation, "unknown element <" + element + ">");

  if (auto attrs = tree.get_child_optional("<xmlattr>")) {
    for (const auto& [key, value] : *attrs) {
      if (key == "name") {
        node.name = value.data();
      } else {
        node.params[key] = value.data();
      }
    }
  }

  if (node.kind == BtKind::Action) {
    if (!kActionNames.count(node.name)) {
      raise(ErrorCode::SchemaViolation, "unknown action name '" + node.name + "'");
    }
  } else if (node.kind == BtKind::Condition) {
    if (!kConditionNames.count(node.name)) {
      raise(ErrorCode::SchemaViolation, "unknown condition name '" + node.name + "'");
    }
  }
  const auto& allowed = allowed_params(node.kind, node.name);
  for (const auto& [key, value] : node.params) {
    if (!allowed.count(key)) {
      raise(ErrorCode::SchemaViolation,
            "attribute '" + key + "' not allowed on <" + element + "> " + node.name);
    }
    if (key == "rel" || key == "grasp_x" || key == "grasp_y") {
      parse_transform(value);  // validates the 7-tuple
    }
  }

  parse_children(node, tree);

  switch (node.kind) {
    case BtKind::Parallel:
      if (node.children.size() < 2) {
        raise(ErrorCode::SchemaViolation, "parallel node needs at least 2 children");
      }
      break;
    case BtKind::Decorator:
      if (node.children.size() != 1) {
        raise(ErrorCode::SchemaViolation, "decorator node needs exactly one child");
      }
      if (!node.params.count("policy") ||
          node.params.at("policy") != "KeepRunningUntilSuccess") {
        raise(ErrorCode::SchemaViolation, "decorator needs policy=KeepRunningUntilSuccess");
      }
      break;
    case BtKind::Fallback:
      if (node.children.size() < 2) {
        raise(ErrorCode::SchemaViolation, "fallback node needs at least 2 children");
      }
      break;
    case BtKind::Action:
    case BtKind::Condition:
      if (!node.children.empty()) {
        raise(ErrorCode::SchemaViolation, "execution nodes are leaves");
      }
      break;
    case BtKind::Sequence:
      break;
  }
  return node;
}

}  // namespace

std::string serialize(const Plan& plan) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\"?>\n";
  out << "<Plan version=\"1\" trace_id=\"" << escape_attr(plan.trace_id)
      << "\" config_hash=\"" << escape_attr(plan.config_hash) << "\">\n";
  write_node(out, plan.root, 1);
  out << "</Plan>\n";
  return out.str();
}

Plan parse_plan(const std::string& xml) {
  ptree doc;
  std::istringstream in(xml);
  try {
    boost::property_tree::read_xml(in, doc);
  } catch (const boost::property_tree::xml_parser_error& e) {
    raise(ErrorCode::SchemaViolation, std::string("malformed XML: ") + e.what());
  }

  auto plan_tree = doc.get_child_optional("Plan");
  if (!plan_tree) raise(ErrorCode::SchemaViolation, "missing <Plan> root");

  Plan plan;
  const std::string version = plan_tree->get<std::string>("<xmlattr>.version", "");
  if (version != "1") raise(ErrorCode::SchemaViolation, "unsupported plan version '" + version + "'");
  plan.trace_id = plan_tree->get<std::string>("<xmlattr>.trace_id", "");
  plan.config_hash = plan_tree->get<std::string>("<xmlattr>.config_hash", "");
  if (auto attrs = plan_tree->get_child_optional("<xmlattr>")) {
    for (const auto& [key, value] : *attrs) {
      if (key != "version" && key != "trace_id" && key != "config_hash") {
        raise(ErrorCode::SchemaViolation, "unknown plan attribute '" + key + "'");
      }
    }
  }

  std::vector<std::pair<std::string, const ptree*>> roots;
  for (const auto& [key, child] : *plan_tree) {
    if (key == "<xmlattr>") continue;
    roots.emplace_back(key, &child);
  }
  if (roots.size() != 1 || roots.front().first != "Sequence") {
    raise(ErrorCode::SchemaViolation, "plan body must be a single <Sequence>");
  }
  plan.root = parse_node("Sequence", *roots.front().second);
  return plan;
}

}  // namespace bimoplan
