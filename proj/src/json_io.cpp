#include "mtspace/json_io.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>

#include "mtspace/errors.hpp"

namespace mts {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end())
    throw ParseError(std::string("missing key \"") + key + "\"");
  return *it;
}

double require_number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number())
    throw ParseError(std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

int require_index(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer())
    throw ParseError(std::string("\"") + key + "\" must be an integer");
  return v.get<int>();
}

/// Reads "arcs": [[parent, child], ...] into parent links.
template <typename SetParent>
void read_arcs(const json& j, int count, SetParent&& set_parent) {
  const json& arcs = require(j, "arcs");
  if (!arcs.is_array()) throw ParseError("\"arcs\" must be an array");
  for (const json& a : arcs) {
    if (!a.is_array() || a.size() != 2 || !a[0].is_number_integer() ||
        !a[1].is_number_integer())
      throw ParseError("arcs must be [parent, child] index pairs");
    const int p = a[0].get<int>();
    const int c = a[1].get<int>();
    if (p < 0 || c < 0 || p >= count || c >= count || p == c)
      throw ParseError("arc endpoints out of range");
    set_parent(p, c);
  }
}

}  // namespace

json merge_tree_to_json(const MergeTree& t) {
  json nodes = json::array();
  for (int i = 0; i < t.node_count(); ++i) {
    const MergeTreeNode& n = t.nodes[static_cast<std::size_t>(i)];
    json jn;
    jn["id"] = i;
    jn["scalar"] = n.scalar;
    if (n.vertex < 0)
      jn["vertex"] = nullptr;
    else
      jn["vertex"] = n.vertex;
    nodes.push_back(std::move(jn));
  }
  json arcs = json::array();
  for (int c = 0; c < t.node_count(); ++c) {
    const int p = t.nodes[static_cast<std::size_t>(c)].parent;
    if (p >= 0) arcs.push_back(json::array({p, c}));
  }
  json out;
  out["kind"] = t.kind == TreeKind::Join ? "join" : "split";
  out["nodes"] = std::move(nodes);
  out["arcs"] = std::move(arcs);
  return out;
}

MergeTree merge_tree_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("merge tree JSON must be an object");
  MergeTree t;
  const json& kind = require(j, "kind");
  if (kind == "join")
    t.kind = TreeKind::Join;
  else if (kind == "split")
    t.kind = TreeKind::Split;
  else
    throw ParseError("\"kind\" must be \"join\" or \"split\"");

  const json& nodes = require(j, "nodes");
  if (!nodes.is_array() || nodes.empty())
    throw ParseError("\"nodes\" must be a non-empty array");
  t.nodes.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& jn = nodes[i];
    if (!jn.is_object()) throw ParseError("node entries must be objects");
    if (require_index(jn, "id") != static_cast<int>(i))
      throw ParseError("node ids must be 0..n-1 in order");
    t.nodes[i].scalar = require_number(jn, "scalar");
    const json& v = require(jn, "vertex");
    if (v.is_null())
      t.nodes[i].vertex = -1;
    else if (v.is_number_integer())
      t.nodes[i].vertex = v.get<std::int64_t>();
    else
      throw ParseError("\"vertex\" must be an integer or null");
  }

  read_arcs(j, t.node_count(), [&t](int p, int c) {
    if (t.nodes[static_cast<std::size_t>(c)].parent != -1)
      throw ParseError("node has two parents");
    t.nodes[static_cast<std::size_t>(c)].parent = p;
    t.nodes[static_cast<std::size_t>(p)].children.push_back(c);
  });
  t.root = -1;
  for (int i = 0; i < t.node_count(); ++i) {
    if (t.nodes[static_cast<std::size_t>(i)].parent >= 0) continue;
    if (t.root != -1) throw ParseError("merge tree has multiple roots");
    t.root = i;
  }
  if (t.root < 0) throw ParseError("merge tree has no root");
  assign_sweep_orders(t);
  t.validate();
  return t;
}

json bdt_to_json(const Bdt& b) {
  json branches = json::array();
  for (const Branch& br : b.branches) {
    json jb;
    jb["id"] = br.id;
    jb["birth"] = br.birth;
    jb["death"] = br.death;
    branches.push_back(std::move(jb));
  }
  json arcs = json::array();
  for (const Branch& br : b.branches)
    if (br.parent >= 0) arcs.push_back(json::array({br.parent, br.id}));
  json out;
  out["branches"] = std::move(branches);
  out["arcs"] = std::move(arcs);
  return out;
}

Bdt bdt_from_json(const json& j, TreeKind kind) {
  if (!j.is_object()) throw ParseError("BDT JSON must be an object");
  Bdt b;
  b.kind = kind;
  const json& branches = require(j, "branches");
  if (!branches.is_array() || branches.empty())
    throw ParseError("\"branches\" must be a non-empty array");
  b.branches.resize(branches.size());
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const json& jb = branches[i];
    if (!jb.is_object()) throw ParseError("branch entries must be objects");
    if (require_index(jb, "id") != static_cast<int>(i))
      throw ParseError("branch ids must be 0..n-1 in order");
    b.branches[i].id = static_cast<int>(i);
    b.branches[i].birth = require_number(jb, "birth");
    b.branches[i].death = require_number(jb, "death");
  }
  read_arcs(j, b.size(), [&b](int p, int c) {
    if (b.branches[static_cast<std::size_t>(c)].parent != -1)
      throw ParseError("branch has two parents");
    b.branches[static_cast<std::size_t>(c)].parent = p;
  });
  int roots = 0;
  for (const Branch& br : b.branches)
    if (br.parent < 0) ++roots;
  if (roots != 1) throw ParseError("BDT must have exactly one root");
  b.rebuild_children();
  b.validate_nesting();
  return b;
}

json matching_to_json(const TreeMatching& m) {
  json out;
  out["distance"] = m.distance;
  json matched = json::array();
  for (const auto& [a, b] : m.matched) matched.push_back(json::array({a, b}));
  out["matched"] = std::move(matched);
  out["destroyed"] = m.destroyed;
  out["created"] = m.created;
  return out;
}

TreeMatching matching_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("matching JSON must be an object");
  TreeMatching m;
  m.distance = require_number(j, "distance");
  const json& matched = require(j, "matched");
  if (!matched.is_array()) throw ParseError("\"matched\" must be an array");
  for (const json& p : matched) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
        !p[1].is_number_integer())
      throw ParseError("matched entries must be [i, j] pairs");
    m.matched.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  for (const char* key : {"destroyed", "created"}) {
    const json& arr = require(j, key);
    if (!arr.is_array())
      throw ParseError(std::string("\"") + key + "\" must be an array");
    auto& out = key[0] == 'd' ? m.destroyed : m.created;
    for (const json& v : arr) {
      if (!v.is_number_integer())
        throw ParseError(std::string("\"") + key + "\" entries must be integers");
      out.push_back(v.get<int>());
    }
  }
  return m;
}

json barycenter_run_to_json(const BarycenterRun& run) {
  json out;
  out["result"] = bdt_to_json(run.result);
  out["merge_tree"] = merge_tree_to_json(run.merge_tree);
  out["energy_trace"] = run.energy_trace;
  json matchings = json::array();
  for (const TreeMatching& m : run.matchings)
    matchings.push_back(matching_to_json(m));
  out["matchings"] = std::move(matchings);
  out["weights"] = run.weights;
  out["iterations"] = run.iterations;
  return out;
}

json clustering_to_json(const ClusteringResult& r) {
  json out;
  out["assignments"] = r.assignments;
  json centroids = json::array();
  for (const Bdt& c : r.centroids) centroids.push_back(bdt_to_json(c));
  out["centroids"] = std::move(centroids);
  out["cluster_energies"] = r.cluster_energies;
  out["iterations"] = r.iterations;
  return out;
}

json reduction_to_json(const ReductionResult& r) {
  json out;
  out["kept"] = r.kept;
  out["ds_trace"] = r.ds_trace;
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

MergeTree load_merge_tree_input(const std::filesystem::path& path,
                                const LoadOptions& opts) {
  const json j = read_json(path);
  if (j.is_object() && j.contains("dims")) {
    const ScalarField f = load_field(path.string());
    return simplify(compute_merge_tree(f, opts.kind), opts.simplify_threshold);
  }
  if (j.is_object() && j.contains("nodes")) return merge_tree_from_json(j);
  if (j.is_object() && j.contains("branches"))
    return bdt_to_merge_tree(bdt_from_json(j, opts.kind));
  throw ParseError("unrecognized input " + path.string() +
                   ": expected a field, merge tree, or BDT JSON file");
}

Bdt load_tree_input(const std::filesystem::path& path,
                    const LoadOptions& opts) {
  const json j = read_json(path);
  if (j.is_object() && j.contains("branches")) return bdt_from_json(j, opts.kind);
  return build_bdt(load_merge_tree_input(path, opts));
}

std::vector<std::filesystem::path> list_inputs(
    const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw ParseError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() != ".json") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const std::filesystem::path& a, const std::filesystem::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

std::vector<Bdt> load_tree_dir(const std::filesystem::path& dir,
                               const LoadOptions& opts) {
  std::vector<Bdt> out;
  for (const std::filesystem::path& p : list_inputs(dir))
    out.push_back(load_tree_input(p, opts));
  return out;
}

}  // namespace mts
