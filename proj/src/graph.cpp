#include "nsgfb/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "nsgfb/errors.hpp"

namespace nsgfb {

namespace {

// Component id per vertex, computed on a raw adjacency list.
std::vector<int> components(std::size_t n, const std::vector<std::vector<Vertex>>& adj, int& count) {
  std::vector<int> comp(n, -1);
  count = 0;
  std::vector<Vertex> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = count;
    stack.assign(1, static_cast<Vertex>(s));
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : adj[v]) {
        if (comp[w] < 0) {
          comp[w] = count;
          stack.push_back(w);
        }
      }
    }
    ++count;
  }
  return comp;
}

std::vector<std::vector<Vertex>> geometric_adjacency(const std::vector<Point>& pts, double radius) {
  const std::size_t n = pts.size();
  const int cells = std::max(1, static_cast<int>(std::floor(1.0 / radius)));
  auto cell_of = [&](double c) { return std::clamp(static_cast<int>(c * cells), 0, cells - 1); };
  std::vector<std::vector<Vertex>> grid(static_cast<std::size_t>(cells) * cells);
  for (std::size_t v = 0; v < n; ++v) {
    grid[cell_of(pts[v].x) * cells + cell_of(pts[v].y)].push_back(static_cast<Vertex>(v));
  }
  const double r2 = radius * radius;
  std::vector<std::vector<Vertex>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    const int cx = cell_of(pts[v].x);
    const int cy = cell_of(pts[v].y);
    for (int gx = std::max(0, cx - 1); gx <= std::min(cells - 1, cx + 1); ++gx) {
      for (int gy = std::max(0, cy - 1); gy <= std::min(cells - 1, cy + 1); ++gy) {
        for (Vertex w : grid[gx * cells + gy]) {
          if (w == static_cast<Vertex>(v)) continue;
          const double dx = pts[v].x - pts[w].x;
          const double dy = pts[v].y - pts[w].y;
          if (dx * dx + dy * dy <= r2) adj[v].push_back(w);
        }
      }
    }
    std::sort(adj[v].begin(), adj[v].end());
  }
  return adj;
}

std::vector<std::pair<Vertex, Vertex>> to_edges(const std::vector<std::vector<Vertex>>& adj) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    for (Vertex w : adj[v]) {
      if (static_cast<Vertex>(v) < w) edges.emplace_back(static_cast<Vertex>(v), w);
    }
  }
  return edges;
}

bool parse_int(std::string_view token, long long& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

Graph::Graph(std::size_t vertex_count, const std::vector<std::pair<Vertex, Vertex>>& edges,
             std::vector<Point> coordinates)
    : coordinates_(std::move(coordinates)) {
  if (vertex_count == 0) throw Error(ErrorKind::InvariantViolation, "graph has no vertices");
  if (!coordinates_.empty() && coordinates_.size() != vertex_count) {
    throw Error(ErrorKind::DimensionMismatch, "coordinate count differs from vertex count");
  }
  std::vector<std::vector<Vertex>> adj(vertex_count);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= vertex_count ||
        static_cast<std::size_t>(v) >= vertex_count) {
      throw Error(ErrorKind::InvariantViolation, "edge endpoint out of range");
    }
    if (u == v) {
      throw Error(ErrorKind::InvariantViolation, "self-loop at vertex " + std::to_string(u));
    }
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (list.empty()) {
      throw Error(ErrorKind::InvariantViolation, "isolated vertex " + std::to_string(v));
    }
    offsets_[v + 1] = offsets_[v] + list.size();
  }
  adjacency_.reserve(offsets_.back());
  for (const auto& list : adj) adjacency_.insert(adjacency_.end(), list.begin(), list.end());

  int count = 0;
  components(vertex_count, adj, count);
  if (count != 1) {
    throw Error(ErrorKind::InvariantViolation,
                "graph is disconnected (" + std::to_string(count) + " components)");
  }
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v < size(); ++v) best = std::max(best, degree(static_cast<Vertex>(v)));
  return best;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_count());
  for (std::size_t v = 0; v < size(); ++v) {
    for (Vertex w : neighbors(static_cast<Vertex>(v))) {
      if (static_cast<Vertex>(v) < w) out.emplace_back(static_cast<Vertex>(v), w);
    }
  }
  return out;
}

std::vector<int> Graph::distances_from(Vertex source, int max_radius) const {
  std::vector<int> dist(size(), -1);
  std::deque<Vertex> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    if (max_radius >= 0 && dist[v] >= max_radius) continue;
    for (Vertex w : neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

bool NeighborhoodIndex::contains(Vertex v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

RandomGeometricGraph generate_rgg(std::size_t n_vertices, std::uint64_t seed,
                                  const RggOptions& options) {
  if (n_vertices < 2) throw Error(ErrorKind::InvariantViolation, "RGG needs at least 2 vertices");
  const double radius = std::sqrt(2.0 / static_cast<double>(n_vertices));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Point> pts(n_vertices);
  std::mt19937_64 rng;
  std::uint64_t current = seed;
  std::vector<std::vector<Vertex>> adj;
  for (int attempt = 0; attempt <= options.retry_budget; ++attempt) {
    current = seed + static_cast<std::uint64_t>(attempt);
    rng.seed(current);
    for (auto& p : pts) {
      p.x = unit(rng);
      p.y = unit(rng);
    }
    adj = geometric_adjacency(pts, radius);
    int count = 0;
    components(n_vertices, adj, count);
    if (count == 1) {
      return {Graph(n_vertices, to_edges(adj), pts), current, attempt + 1, 0, radius};
    }
  }
  if (!options.repair) {
    throw Error(ErrorKind::RetriesExhausted,
                "no connected RGG within " + std::to_string(options.retry_budget + 1) + " draws");
  }

  // Continue the last draw's RNG stream, re-drawing stragglers only.
  std::size_t repaired = 0;
  for (int round = 0; round < options.repair_round_cap; ++round) {
    int count = 0;
    auto comp = components(n_vertices, adj, count);
    if (count == 1) {
      return {Graph(n_vertices, to_edges(adj), pts), current, options.retry_budget + 1, repaired,
              radius};
    }
    std::vector<std::size_t> sizes(count, 0);
    for (int c : comp) ++sizes[c];
    const int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (std::size_t v = 0; v < n_vertices; ++v) {
      if (comp[v] != largest) {
        pts[v].x = unit(rng);
        pts[v].y = unit(rng);
        ++repaired;
      }
    }
    adj = geometric_adjacency(pts, radius);
  }
  throw Error(ErrorKind::RetriesExhausted, "RGG repair did not reach a connected graph");
}

LoadedGraph parse_edge_list(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> raw;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool all_integer = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra)) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected \"u v\"");
    }
    long long ia = 0, ib = 0;
    if (!parse_int(a, ia) || !parse_int(b, ib) || ia < 0 || ib < 0) all_integer = false;
    raw.emplace_back(std::move(a), std::move(b));
  }
  if (raw.empty()) throw Error(ErrorKind::ParseError, "edge list is empty");

  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<std::string> labels;
  if (all_integer) {
    long long max_id = 0;
    for (const auto& [a, b] : raw) {
      long long ia = 0, ib = 0;
      parse_int(a, ia);
      parse_int(b, ib);
      max_id = std::max({max_id, ia, ib});
      edges.emplace_back(static_cast<Vertex>(ia), static_cast<Vertex>(ib));
    }
    labels.resize(static_cast<std::size_t>(max_id) + 1);
    for (std::size_t v = 0; v < labels.size(); ++v) labels[v] = std::to_string(v);
  } else {
    std::unordered_map<std::string, Vertex> ids;
    auto id_of = [&](const std::string& token) {
      auto [it, inserted] = ids.try_emplace(token, static_cast<Vertex>(labels.size()));
      if (inserted) labels.push_back(token);
      return it->second;
    };
    for (const auto& [a, b] : raw) {
      const Vertex u = id_of(a);
      const Vertex v = id_of(b);
      edges.emplace_back(u, v);
    }
  }
  return {Graph(labels.size(), edges), std::move(labels)};
}

LoadedGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_edge_list(buffer.str());
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "# vertices " << g.size() << " edges " << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void save_coordinates(const Graph& g, const std::filesystem::path& path) {
  if (!g.has_coordinates()) throw Error(ErrorKind::MissingCoordinates, "graph has no coordinates");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "vertex,x,y\n";
  out.precision(17);
  for (std::size_t v = 0; v < g.size(); ++v) {
    out << v << ',' << g.coordinates()[v].x << ',' << g.coordinates()[v].y << '\n';
  }
}

std::vector<Point> load_coordinates(const std::filesystem::path& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<Point> pts(expected);
  std::vector<bool> seen(expected, false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.starts_with("vertex")) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    long long v = 0;
    Point p;
    if (!(fields >> v >> p.x >> p.y) || v < 0 || static_cast<std::size_t>(v) >= expected) {
      throw Error(ErrorKind::ParseError, "coordinates line " + std::to_string(line_no));
    }
    pts[v] = p;
    seen[v] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorKind::MissingCoordinates, "coordinate file does not cover every vertex");
  }
  return pts;
}

NeighborhoodIndex geodesic_ball(const Graph& g, Vertex i, int r) {
  NeighborhoodIndex ball{i, r, {}};
  auto dist = g.distances_from(i, r);
  for (std::size_t v = 0; v < dist.size(); ++v) {
    if (dist[v] >= 0) ball.members.push_back(static_cast<Vertex>(v));
  }
  return ball;
}

GrowthProfile estimate_growth(const Graph& g, int max_radius, double dimension) {
  if (max_radius < 1) throw Error(ErrorKind::InvariantViolation, "max_radius must be >= 1");
  GrowthProfile profile{dimension, 0.0, max_radius};
  const std::size_t n = g.size();
  std::vector<std::size_t> per_radius;
  for (std::size_t i = 0; i < n; ++i) {
    auto dist = g.distances_from(static_cast<Vertex>(i), max_radius);
    per_radius.assign(max_radius + 1, 0);
    for (int d : dist) {
      if (d >= 0) ++per_radius[d];
    }
    std::size_t cumulative = 0;
    for (int r = 0; r <= max_radius; ++r) {
      cumulative += per_radius[r];
      const double ratio = static_cast<double>(cumulative) / std::pow(r + 1.0, dimension);
      profile.density = std::max(profile.density, ratio);
    }
  }
  return profile;
}

int diameter(const Graph& g) {
  int best = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto dist = g.distances_from(static_cast<Vertex>(i));
    best = std::max(best, *std::max_element(dist.begin(), dist.end()));
  }
  return best;
}

Graph path_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph(n, edges);
}

Graph cycle_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
  return Graph(n, edges);
}

Graph complete_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph(n, edges);
}

}  // namespace nsgfb
