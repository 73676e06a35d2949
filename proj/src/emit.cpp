#include "ultracoral/emit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ultracoral {

std::string fmt_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string emit_timeseries_csv(const Trajectory& trajectory, std::size_t branches) {
  std::ostringstream os;
  os << "t";
  for (const char* species : {"u", "v", "w"})
    for (std::size_t i = 0; i < branches; ++i) os << "," << species << "_" << i;
  os << "\n";
  for (std::size_t row = 0; row < trajectory.size(); ++row) {
    os << fmt_double(trajectory.times[row]);
    const auto& state = trajectory.states[row];
    for (double value : state) os << "," << fmt_double(value);
    os << "\n";
  }
  return os.str();
}

std::string emit_event_log_csv(const std::vector<EventLogRow>& rows) {
  std::ostringstream os;
  os << "branch,kind,time,u,v,w,omega\n";
  for (const EventLogRow& row : rows) {
    os << row.branch << "," << to_string(row.kind) << "," << fmt_double(row.time) << ","
       << fmt_double(row.u) << "," << fmt_double(row.v) << "," << fmt_double(row.w) << ","
       << fmt_double(row.omega) << "\n";
  }
  return os.str();
}

std::string emit_matrix_csv(const GeneratorMatrix& gen) {
  std::ostringstream os;
  for (std::size_t i = 0; i < gen.size; ++i) {
    for (std::size_t j = 0; j < gen.size; ++j) {
      if (j) os << ",";
      os << fmt_double(gen.at(i, j));
    }
    os << "\n";
  }
  return os.str();
}

std::string emit_spectrum_csv(const std::vector<SpectrumCheck>& checks) {
  std::ostringstream os;
  os << "eigenvalue,multiplicity,expected,abs_error\n";
  for (const SpectrumCheck& c : checks)
    os << fmt_double(c.computed) << "," << c.multiplicity << "," << fmt_double(c.expected)
       << "," << fmt_double(c.abs_error) << "\n";
  return os.str();
}

std::string emit_equilibria_csv(const std::vector<Equilibrium>& eq) {
  std::ostringstream os;
  os << "u,v,lambda1,lambda2,classification\n";
  for (const Equilibrium& e : eq)
    os << fmt_double(e.u) << "," << fmt_double(e.v) << "," << fmt_double(e.lambda1) << ","
       << fmt_double(e.lambda2) << "," << to_string(e.stability) << "\n";
  return os.str();
}

std::string format_equilibria_table(const std::vector<Equilibrium>& eq) {
  std::ostringstream os;
  os << "equilibrium            eigenvalues                     classification\n";
  for (const Equilibrium& e : eq) {
    std::string point = "(" + fmt_double(e.u) + ", " + fmt_double(e.v) + ")";
    std::string lambdas = "(" + fmt_double(e.lambda1) + ", " + fmt_double(e.lambda2) + ")";
    os << point;
    for (std::size_t k = point.size(); k < 23; ++k) os << ' ';
    os << lambdas;
    for (std::size_t k = lambdas.size(); k < 32; ++k) os << ' ';
    os << to_string(e.stability) << "\n";
  }
  return os.str();
}

// ---- JSON tree document ----

bool TreeDocument::operator==(const TreeDocument& other) const {
  auto metrics_eq = [](const TreeMetrics& a, const TreeMetrics& b) {
    return a.min_lifetime == b.min_lifetime && a.max_lifetime == b.max_lifetime &&
           a.mean_lifetime == b.mean_lifetime && a.relative_range == b.relative_range &&
           a.leaf_count == b.leaf_count && a.depth == b.depth && a.node_count == b.node_count;
  };
  return schema_version == other.schema_version && p == other.p && alpha == other.alpha &&
         levels_completed == other.levels_completed && out_of_regime == other.out_of_regime &&
         config == other.config && metrics_eq(metrics, other.metrics) && root == other.root;
}

namespace {

TreeNodeDoc doc_node(const BranchNode& node) {
  TreeNodeDoc out;
  out.path.assign(node.path.begin(), node.path.end());
  out.birth_time = node.birth_time;
  out.crossing_time = node.crossing_time;
  out.lifetime = node.lifetime;
  out.omega = node.omega;
  out.halted = node.halted;
  out.continuation = false;
  out.children.reserve(node.children.size());
  for (const BranchNode& child : node.children) out.children.push_back(doc_node(child));
  return out;
}

using Json = nlohmann::ordered_json;

Json node_to_json(const TreeNodeDoc& node) {
  Json j;
  j["path"] = node.path;
  j["birth_time"] = node.birth_time;
  j["crossing_time"] = node.crossing_time ? Json(*node.crossing_time) : Json(nullptr);
  j["lifetime"] = node.lifetime;
  j["omega"] = node.omega ? Json(*node.omega) : Json(nullptr);
  j["halted"] = node.halted;
  j["continuation"] = node.continuation;
  j["children"] = Json::array();
  for (const TreeNodeDoc& child : node.children) j["children"].push_back(node_to_json(child));
  return j;
}

TreeNodeDoc node_from_json(const Json& j) {
  TreeNodeDoc node;
  node.path = j.at("path").get<std::vector<int>>();
  node.birth_time = j.at("birth_time").get<double>();
  if (!j.at("crossing_time").is_null())
    node.crossing_time = j.at("crossing_time").get<double>();
  node.lifetime = j.at("lifetime").get<double>();
  if (!j.at("omega").is_null()) node.omega = j.at("omega").get<double>();
  node.halted = j.at("halted").get<bool>();
  node.continuation = j.at("continuation").get<bool>();
  for (const Json& child : j.at("children")) node.children.push_back(node_from_json(child));
  return node;
}

}  // namespace

TreeDocument make_tree_document(const CoralTree& tree, std::string config_echo,
                                bool out_of_regime) {
  TreeDocument doc;
  doc.p = tree.p;
  doc.alpha = tree.alpha;
  doc.levels_completed = tree.levels_completed;
  doc.out_of_regime = out_of_regime;
  doc.config = std::move(config_echo);
  doc.metrics = tree_metrics(tree);
  doc.root = doc_node(tree.root);
  return doc;
}

std::string tree_document_to_json(const TreeDocument& doc) {
  Json j;
  j["schema_version"] = doc.schema_version;
  j["p"] = doc.p;
  j["alpha"] = doc.alpha;
  j["levels_completed"] = doc.levels_completed;
  j["out_of_regime"] = doc.out_of_regime;
  j["config"] = doc.config;
  j["metrics"] = {
      {"min_lifetime", doc.metrics.min_lifetime},
      {"max_lifetime", doc.metrics.max_lifetime},
      {"mean_lifetime", doc.metrics.mean_lifetime},
      {"relative_range", doc.metrics.relative_range},
      {"leaf_count", doc.metrics.leaf_count},
      {"depth", doc.metrics.depth},
      {"node_count", doc.metrics.node_count},
  };
  j["tree"] = node_to_json(doc.root);
  return j.dump(2) + "\n";
}

TreeDocument tree_document_from_json(std::string_view json_text) {
  Json j = Json::parse(json_text);
  TreeDocument doc;
  doc.schema_version = j.at("schema_version").get<int>();
  doc.p = j.at("p").get<long long>();
  doc.alpha = j.at("alpha").get<double>();
  doc.levels_completed = j.at("levels_completed").get<int>();
  doc.out_of_regime = j.at("out_of_regime").get<bool>();
  doc.config = j.at("config").get<std::string>();
  const Json& m = j.at("metrics");
  doc.metrics.min_lifetime = m.at("min_lifetime").get<double>();
  doc.metrics.max_lifetime = m.at("max_lifetime").get<double>();
  doc.metrics.mean_lifetime = m.at("mean_lifetime").get<double>();
  doc.metrics.relative_range = m.at("relative_range").get<double>();
  doc.metrics.leaf_count = m.at("leaf_count").get<int>();
  doc.metrics.depth = m.at("depth").get<int>();
  doc.metrics.node_count = m.at("node_count").get<int>();
  doc.root = node_from_json(j.at("tree"));
  return doc;
}

// ---- schematic renderings ----

namespace {

void layout_node(const BranchNode& node, double x, double y, double heading_deg,
                 double fan_deg, double scale, std::vector<Segment>& out) {
  double rad = heading_deg * std::numbers::pi / 180.0;
  double len = node.lifetime * scale;
  double x2 = x + len * std::sin(rad);
  double y2 = y + len * std::cos(rad);
  bool halted_leaf = node.halted && node.children.empty();
  out.push_back({x, y, x2, y2, static_cast<int>(node.path.size()), halted_leaf});
  std::size_t count = node.children.size();
  for (std::size_t c = 0; c < count; ++c) {
    double offset = count > 1
                        ? fan_deg * (1.0 - 2.0 * static_cast<double>(c) /
                                               static_cast<double>(count - 1))
                        : 0.0;
    layout_node(node.children[c], x2, y2, heading_deg + offset, fan_deg, scale, out);
  }
}

}  // namespace

std::vector<Segment> tree_layout(const CoralTree& tree, double angle_deg,
                                 double length_scale) {
  std::vector<Segment> out;
  layout_node(tree.root, 0.0, 0.0, 0.0, angle_deg, length_scale, out);
  return out;
}

std::string emit_svg(const CoralTree& tree, double angle_deg, double length_scale) {
  std::vector<Segment> segments = tree_layout(tree, angle_deg, length_scale);
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const Segment& s : segments) {
    xmin = std::min({xmin, s.x1, s.x2});
    xmax = std::max({xmax, s.x1, s.x2});
    ymin = std::min({ymin, s.y1, s.y2});
    ymax = std::max({ymax, s.y1, s.y2});
  }
  const double margin = 10.0;
  double width = xmax - xmin + 2 * margin;
  double height = ymax - ymin + 2 * margin;
  auto to_x = [&](double x) { return x - xmin + margin; };
  auto to_y = [&](double y) { return ymax - y + margin; };  // flip: growth points up

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt_double(width)
     << " " << fmt_double(height) << "\">\n";
  for (const Segment& s : segments) {
    os << "  <line x1=\"" << fmt_double(to_x(s.x1)) << "\" y1=\"" << fmt_double(to_y(s.y1))
       << "\" x2=\"" << fmt_double(to_x(s.x2)) << "\" y2=\"" << fmt_double(to_y(s.y2))
       << "\" stroke=\"#2d6a4f\" stroke-width=\"1.5\" stroke-linecap=\"round\"/>\n";
  }
  for (const Segment& s : segments) {
    if (!s.halted_leaf) continue;
    os << "  <circle cx=\"" << fmt_double(to_x(s.x2)) << "\" cy=\"" << fmt_double(to_y(s.y2))
       << "\" r=\"2\" fill=\"#bc4749\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

namespace {

void lsystem_node(const BranchNode& node, double angle_deg, std::string& out) {
  out += "F(" + fmt_double(node.lifetime) + ")";
  std::size_t count = node.children.size();
  for (std::size_t c = 0; c < count; ++c) {
    double offset = count > 1
                        ? angle_deg * (1.0 - 2.0 * static_cast<double>(c) /
                                                 static_cast<double>(count - 1))
                        : 0.0;
    out += "[";
    out += offset >= 0.0 ? "+(" + fmt_double(offset) + ")" : "-(" + fmt_double(-offset) + ")";
    lsystem_node(node.children[c], angle_deg, out);
    out += "]";
  }
}

struct LsysParser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& message) const {
    throw std::invalid_argument("lsystem parse error at offset " + std::to_string(pos) +
                                ": " + message);
  }

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  double number() {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), out);
    if (ec != std::errc{}) fail("expected a number");
    pos = static_cast<std::size_t>(ptr - text.data());
    return out;
  }

  LsysNode node() {
    expect('F');
    expect('(');
    LsysNode out;
    out.length = number();
    expect(')');
    while (peek() == '[') {
      ++pos;
      if (peek() != '+' && peek() != '-') fail("expected '+' or '-' after '['");
      ++pos;
      expect('(');
      number();  // branch angle, not part of the topology
      expect(')');
      out.children.push_back(node());
      expect(']');
    }
    return out;
  }
};

LsysNode lsys_of(const BranchNode& node) {
  LsysNode out;
  out.length = node.lifetime;
  for (const BranchNode& child : node.children) out.children.push_back(lsys_of(child));
  return out;
}

}  // namespace

std::string emit_lsystem(const CoralTree& tree, double angle_deg) {
  std::string out;
  lsystem_node(tree.root, angle_deg, out);
  out += "\n";
  return out;
}

LsysNode parse_lsystem(std::string_view text) {
  LsysParser parser{text};
  LsysNode root = parser.node();
  while (parser.peek() == '\n' || parser.peek() == ' ') ++parser.pos;
  if (parser.pos != text.size()) parser.fail("trailing characters");
  return root;
}

LsysNode lsys_from_tree(const CoralTree& tree) { return lsys_of(tree.root); }

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ultracoral
