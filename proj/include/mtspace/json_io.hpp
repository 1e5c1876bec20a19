#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtspace/barycenter.hpp"
#include "mtspace/ensemble.hpp"
#include "mtspace/field.hpp"
#include "mtspace/merge_tree.hpp"
#include "mtspace/metric.hpp"

namespace mts {

// Serialization of the core types. Objects use sorted keys and shortest
// round-trip doubles, so equal values produce byte-identical text.
nlohmann::json merge_tree_to_json(const MergeTree& t);
MergeTree merge_tree_from_json(const nlohmann::json& j);
nlohmann::json bdt_to_json(const Bdt& b);
Bdt bdt_from_json(const nlohmann::json& j, TreeKind kind = TreeKind::Split);
nlohmann::json matching_to_json(const TreeMatching& m);
TreeMatching matching_from_json(const nlohmann::json& j);
nlohmann::json barycenter_run_to_json(const BarycenterRun& run);
nlohmann::json clustering_to_json(const ClusteringResult& r);
nlohmann::json reduction_to_json(const ReductionResult& r);

/// How an input file becomes a tree: the tree kind used for scalar fields
/// (and assumed for kind-less BDT files), and the persistence fraction
/// below which branches are dropped right after extraction from a field.
struct LoadOptions {
  TreeKind kind = TreeKind::Split;
  double simplify_threshold = 0.0025;
};

/// Reads a JSON file; any I/O or syntax problem becomes ParseError.
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Loads a field, merge-tree, or BDT JSON file (recognized by its top-level
/// keys) and returns the merge tree: fields are swept and simplified,
/// merge-tree files pass through, BDT files are reconstructed.
MergeTree load_merge_tree_input(const std::filesystem::path& path,
                                const LoadOptions& opts = {});

/// Same input sniffing as load_merge_tree_input, ending at the BDT stage.
Bdt load_tree_input(const std::filesystem::path& path,
                    const LoadOptions& opts = {});

/// JSON files directly inside `dir`, sorted by filename. Throws ParseError
/// when `dir` is not a directory.
std::vector<std::filesystem::path> list_inputs(
    const std::filesystem::path& dir);

/// Loads every JSON file of a directory as a BDT, in filename order.
std::vector<Bdt> load_tree_dir(const std::filesystem::path& dir,
                               const LoadOptions& opts = {});

}  // namespace mts
