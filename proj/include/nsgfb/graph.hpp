#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nsgfb {

using Vertex = std::int32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Undirected, unweighted, connected simple graph with dense ids 0..N-1.
///
/// Adjacency is stored in CSR form with each neighbor list sorted ascending.
/// Construction validates: no self-loops, no isolated vertices, connectivity.
/// Duplicate and reversed edges in the input are merged.
class Graph {
 public:
  Graph(std::size_t vertex_count, const std::vector<std::pair<Vertex, Vertex>>& edges,
        std::vector<Point> coordinates = {});

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const;
  bool has_edge(Vertex u, Vertex v) const;

  bool has_coordinates() const noexcept { return !coordinates_.empty(); }
  const std::vector<Point>& coordinates() const noexcept { return coordinates_; }

  /// Edge list with u < v, sorted lexicographically.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  /// Hop distances from `source`; vertices farther than `max_radius` (or
  /// unreachable) get -1. A negative `max_radius` means unbounded.
  std::vector<int> distances_from(Vertex source, int max_radius = -1) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::vector<Point> coordinates_;
};

/// Vertices of B(source, radius), ascending by id.
struct NeighborhoodIndex {
  Vertex source = 0;
  int radius = 0;
  std::vector<Vertex> members;

  bool contains(Vertex v) const;
};

/// Polynomial growth constants: mu(B(i,r)) <= density * (r+1)^dimension.
struct GrowthProfile {
  double dimension = 2.0;
  double density = 1.0;
  int max_radius = 0;  // largest radius probed while estimating density
};

struct RggOptions {
  int retry_budget = 20;
  /// Re-draw positions of vertices outside the largest component of the last
  /// draw until connected. Needed at large N where isolated vertices are
  /// almost certain under the sqrt(2/N) threshold.
  bool repair = true;
  int repair_round_cap = 10000;
};

struct RandomGeometricGraph {
  Graph graph;
  std::uint64_t final_seed;
  int attempts;
  std::size_t repaired_vertices;
  double connection_radius;
};

/// Uniform points in [0,1]^2, edge iff Euclidean distance <= sqrt(2) N^{-1/2}.
RandomGeometricGraph generate_rgg(std::size_t n_vertices, std::uint64_t seed,
                                  const RggOptions& options = {});

struct LoadedGraph {
  Graph graph;
  /// labels[v] is the token the file used for dense vertex v.
  std::vector<std::string> labels;
};

/// Parses "u v" lines ('#' starts a comment). Integer ids are taken verbatim
/// (N = max id + 1, so gaps are isolated vertices and rejected); any
/// non-integer token switches to first-appearance remapping.
LoadedGraph load_edge_list(const std::filesystem::path& path);
LoadedGraph parse_edge_list(const std::string& text);

void save_edge_list(const Graph& g, const std::filesystem::path& path);
void save_coordinates(const Graph& g, const std::filesystem::path& path);
std::vector<Point> load_coordinates(const std::filesystem::path& path, std::size_t expected);

NeighborhoodIndex geodesic_ball(const Graph& g, Vertex i, int r);

/// dimension is an input; density = max over i and 0 <= r <= max_radius of
/// mu(B(i,r)) / (r+1)^dimension.
GrowthProfile estimate_growth(const Graph& g, int max_radius, double dimension = 2.0);

/// Eccentricity maximum over all vertices (exact, N BFS runs).
int diameter(const Graph& g);

/// Standard test graphs.
Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);

}  // namespace nsgfb
