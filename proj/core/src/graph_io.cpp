#include "umatch/graph_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "umatch/errors.hpp"

namespace umatch {
namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

bool parse_u64(std::string_view token, std::uint64_t& value) {
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

// Reads lines of exactly two unsigned integers. `on_header` sees comment lines.
template <typename OnPair, typename OnComment>
void scan_pairs(std::istream& in, const std::string& source, OnPair on_pair, OnComment on_comment) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.front().front() == '#') {
      on_comment(std::string_view(line), lineno);
      continue;
    }
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    if (tokens.size() != 2 || !parse_u64(tokens[0], a) || !parse_u64(tokens[1], b)) {
      throw FormatError(where(source, lineno) + ": expected two non-negative integers, got '" + line + "'");
    }
    if (a >= kNoNode || b >= kNoNode) throw FormatError(where(source, lineno) + ": id exceeds 32-bit range");
    on_pair(static_cast<NodeId>(a), static_cast<NodeId>(b), lineno);
  }
}

}  // namespace

Graph read_edge_list(std::istream& in, const std::string& source) {
  std::vector<Edge> edges;
  std::vector<std::size_t> lines;
  std::optional<std::uint64_t> declared;
  std::uint64_t max_id_plus_one = 0;
  scan_pairs(
      in, source,
      [&](NodeId u, NodeId v, std::size_t lineno) {
        edges.push_back({u, v});
        lines.push_back(lineno);
        max_id_plus_one = std::max<std::uint64_t>(max_id_plus_one, std::max(u, v) + std::uint64_t{1});
      },
      [&](std::string_view line, std::size_t lineno) {
        const auto pos = line.find("nodes=");
        if (pos == std::string_view::npos) return;
        std::uint64_t n = 0;
        if (!parse_u64(split_ws(line.substr(pos + 6)).at(0), n)) {
          throw FormatError(where(source, lineno) + ": malformed nodes= header");
        }
        declared = n;
      });
  const std::uint64_t n = declared.value_or(max_id_plus_one);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].u >= n || edges[i].v >= n) {
      throw FormatError(where(source, lines[i]) + ": node id exceeds declared node count " + std::to_string(n));
    }
  }
  return build_graph(n, edges);
}

Graph read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_edge_list(in, path.string());
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes=" << g.num_nodes() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  auto out = open_out(path);
  write_edge_list(out, g);
}

std::vector<LinkSet::Pair> read_pairs(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<LinkSet::Pair> pairs;
  scan_pairs(
      in, path.string(), [&](NodeId a, NodeId b, std::size_t) { pairs.push_back({a, b}); },
      [](std::string_view, std::size_t) {});
  return pairs;
}

void write_pairs(const std::filesystem::path& path, std::span<const LinkSet::Pair> pairs) {
  auto out = open_out(path);
  for (const auto& [a, b] : pairs) out << a << ' ' << b << '\n';
}

std::vector<NodeId> read_ids(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<NodeId> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    std::uint64_t id = 0;
    if (tokens.size() != 1 || !parse_u64(tokens[0], id) || id >= kNoNode) {
      throw FormatError(where(path.string(), lineno) + ": expected one node id");
    }
    ids.push_back(static_cast<NodeId>(id));
  }
  return ids;
}

void write_ids(const std::filesystem::path& path, std::span<const NodeId> ids) {
  auto out = open_out(path);
  for (auto id : ids) out << id << '\n';
}

SybilFile read_sybils(const std::filesystem::path& path) {
  auto in = open_in(path);
  SybilFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    std::uint64_t copy = 0;
    std::uint64_t id = 0;
    std::uint64_t victim = 0;
    if (tokens.size() != 3 || !parse_u64(tokens[0], copy) || !parse_u64(tokens[1], id) ||
        !parse_u64(tokens[2], victim) || (copy != 1 && copy != 2) || id >= kNoNode || victim >= kNoNode) {
      throw FormatError(where(path.string(), lineno) + ": expected '<copy 1|2> <sybil id> <victim id>'");
    }
    (copy == 1 ? out.copy1 : out.copy2).emplace_back(static_cast<NodeId>(id), static_cast<NodeId>(victim));
  }
  return out;
}

NodeId LabelDictionary::intern(const std::string& label) {
  auto [it, inserted] = ids_.try_emplace(label, static_cast<NodeId>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

void LabelDictionary::save(const std::filesystem::path& path) const {
  auto out = open_out(path);
  for (std::size_t i = 0; i < labels_.size(); ++i) out << i << ' ' << labels_[i] << '\n';
}

LabelDictionary LabelDictionary::load(const std::filesystem::path& path) {
  auto in = open_in(path);
  LabelDictionary dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    std::uint64_t id = 0;
    if (tokens.size() != 2 || !parse_u64(tokens[0], id) || id != dict.size()) {
      throw FormatError(where(path.string(), lineno) + ": expected '<next id> <label>'");
    }
    dict.intern(std::string(tokens[1]));
  }
  return dict;
}

Graph read_labeled_edge_list(const std::filesystem::path& path, LabelDictionary& dict) {
  auto in = open_in(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 2) throw FormatError(where(path.string(), lineno) + ": expected two labels");
    const NodeId u = dict.intern(std::string(tokens[0]));
    const NodeId v = dict.intern(std::string(tokens[1]));
    edges.push_back({u, v});
  }
  return build_graph(dict.size(), edges);
}

}  // namespace umatch
