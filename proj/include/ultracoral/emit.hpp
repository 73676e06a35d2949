#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ultracoral/growth.hpp"
#include "ultracoral/integrator.hpp"
#include "ultracoral/kinetics.hpp"
#include "ultracoral/vladimirov.hpp"

namespace ultracoral {

// shortest decimal that round-trips the exact double
std::string fmt_double(double x);

// header t,u_0..u_(n-1),v_0..,w_0..; one row per trajectory sample
// (initial state, accepted steps, event times)
std::string emit_timeseries_csv(const Trajectory& trajectory, std::size_t branches);

// header branch,kind,time,u,v,w,omega
std::string emit_event_log_csv(const std::vector<EventLogRow>& rows);

std::string emit_matrix_csv(const GeneratorMatrix& gen);

// header eigenvalue,multiplicity,expected,abs_error
std::string emit_spectrum_csv(const std::vector<SpectrumCheck>& checks);

// header u,v,lambda1,lambda2,classification
std::string emit_equilibria_csv(const std::vector<Equilibrium>& eq);
std::string format_equilibria_table(const std::vector<Equilibrium>& eq);

// ---- JSON tree document ----

struct TreeNodeDoc {
  std::vector<int> path;
  double birth_time = 0.0;
  std::optional<double> crossing_time;
  double lifetime = 0.0;
  std::optional<double> omega;
  bool halted = false;
  bool continuation = false;
  std::vector<TreeNodeDoc> children;

  bool operator==(const TreeNodeDoc&) const = default;
};

struct TreeDocument {
  int schema_version = 1;
  long long p = 2;
  double alpha = 2.0;
  int levels_completed = 0;
  bool out_of_regime = false;
  std::string config;  // canonical config text echo
  TreeMetrics metrics;
  TreeNodeDoc root;

  bool operator==(const TreeDocument&) const;
};

TreeDocument make_tree_document(const CoralTree& tree, std::string config_echo,
                                bool out_of_regime);

std::string tree_document_to_json(const TreeDocument& doc);
TreeDocument tree_document_from_json(std::string_view json_text);

// ---- schematic renderings ----

struct Segment {
  double x1, y1, x2, y2;
  int depth;
  bool halted_leaf;
};

// straight-line layout, root at the origin growing upward; children fan
// at +/- angle; segment length = lifetime * length_scale
std::vector<Segment> tree_layout(const CoralTree& tree, double angle_deg,
                                 double length_scale);

std::string emit_svg(const CoralTree& tree, double angle_deg, double length_scale);

// bracketed string: F(len) per branch, children as [+(a)...][-(a)...]
std::string emit_lsystem(const CoralTree& tree, double angle_deg);

struct LsysNode {
  double length = 0.0;
  std::vector<LsysNode> children;

  bool operator==(const LsysNode&) const = default;
};

LsysNode parse_lsystem(std::string_view text);
LsysNode lsys_from_tree(const CoralTree& tree);

// write via a temp file in the same directory plus rename
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ultracoral
