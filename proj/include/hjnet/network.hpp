#ifndef HJNET_NETWORK_HPP
#define HJNET_NETWORK_HPP

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hjnet {

inline constexpr double kInfiniteLength = std::numeric_limits<double>::infinity();

// Oriented edge. The tail end (offset 0) is e0, the head end (offset length)
// is e1. Half-lines have infinite length and no head vertex.
struct Edge {
    std::string id;
    double length = kInfiniteLength;
    int tail_vertex = -1;
    int head_vertex = -1;  // -1 for half-lines

    bool is_half_line() const { return !std::isfinite(length); }
};

// A vertex is a partition cell of edge endpoints.
//   incoming_minus: edges e with e0 = this vertex
//   incoming_plus:  edges e with e1 = this vertex
struct Vertex {
    std::string id;
    std::vector<int> incoming_minus;
    std::vector<int> incoming_plus;

    int degree() const {
        return static_cast<int>(incoming_minus.size() + incoming_plus.size());
    }
};

// A point on the network: an edge and an offset in [0, length].
// Offsets 0 / length are canonically identified with the edge's vertices.
struct NetworkPoint {
    int edge = 0;
    double offset = 0.0;
};

struct EdgeSpec {
    std::string id;
    double length = kInfiniteLength;  // +inf for a half-line
    std::string tail;                 // vertex id at offset 0
    std::optional<std::string> head;  // vertex id at offset length; absent for half-lines
};

// Finite network as a metric graph. Immutable after construction; all
// operations are pure, so instances can be shared across threads.
class Network {
public:
    static Network from_parts(const std::vector<std::string>& vertex_ids,
                              const std::vector<EdgeSpec>& edge_specs,
                              bool require_connected = true);

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const Edge& edge(int i) const { return edges_.at(i); }
    const Vertex& vertex(int i) const { return vertices_.at(i); }

    int edge_index(const std::string& id) const;
    int vertex_index(const std::string& id) const;

    // Stored partition (E_n^-, E_n^+) for a vertex, stable order.
    std::pair<std::vector<int>, std::vector<int>> incident_partition(int v) const;
    std::pair<std::vector<int>, std::vector<int>> incident_partition(const std::string& id) const;

    // Length of a shortest path; +inf when the points are disconnected.
    double geodesic_distance(const NetworkPoint& x, const NetworkPoint& y) const;

    // Shortest path between two vertices through finite edges.
    double vertex_distance(int a, int b) const;

    bool is_connected() const { return connected_; }

    void validate_point(const NetworkPoint& p) const;

private:
    Network() = default;
    void compute_vertex_distances();

    std::vector<Edge> edges_;
    std::vector<Vertex> vertices_;
    std::map<std::string, int> edge_by_id_;
    std::map<std::string, int> vertex_by_id_;
    std::vector<std::vector<double>> vertex_dist_;
    bool connected_ = true;
};

// One vertex, n half-line branches glued at the origin, all in E_n^-.
Network build_junction(int n_branches);

}  // namespace hjnet

#endif
