#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "umatch/graph.hpp"

namespace umatch {

// Edge-list files: one edge per line as two whitespace-separated
// non-negative integers. Lines starting with '#' are comments, except that
// a `# nodes=<n>` line fixes the node count (otherwise 1 + max id).

Graph read_edge_list(std::istream& in, const std::string& source = "<stream>");
Graph read_edge_list(const std::filesystem::path& path);

/// Writes the `# nodes=` header followed by the edges in stored order.
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

// Pair files: `left right` per line, '#' comments allowed.
std::vector<LinkSet::Pair> read_pairs(const std::filesystem::path& path);
void write_pairs(const std::filesystem::path& path, std::span<const LinkSet::Pair> pairs);

// Id files: one node id per line.
std::vector<NodeId> read_ids(const std::filesystem::path& path);
void write_ids(const std::filesystem::path& path, std::span<const NodeId> ids);

// Sybil files: `<copy> <sybil id> <victim id>` per line, copy in {1, 2}.
struct SybilFile {
  std::vector<std::pair<NodeId, NodeId>> copy1;  // (sybil, victim)
  std::vector<std::pair<NodeId, NodeId>> copy2;
};
SybilFile read_sybils(const std::filesystem::path& path);

/// Maps external string labels onto dense ids in first-seen order.
class LabelDictionary {
 public:
  NodeId intern(const std::string& label);
  std::size_t size() const { return labels_.size(); }
  const std::string& label(NodeId id) const { return labels_.at(id); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Sidecar format: `<id> <label>` per line.
  void save(const std::filesystem::path& path) const;
  static LabelDictionary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> ids_;
};

/// Reads an edge list whose endpoints are arbitrary whitespace-free tokens,
/// interning them through `dict`.
Graph read_labeled_edge_list(const std::filesystem::path& path, LabelDictionary& dict);

}  // namespace umatch
