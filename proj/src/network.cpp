#include "hjnet/network.hpp"

#include <algorithm>
#include <queue>

#include "hjnet/errors.hpp"

namespace hjnet {

Network Network::from_parts(const std::vector<std::string>& vertex_ids,
                            const std::vector<EdgeSpec>& edge_specs,
                            bool require_connected) {
    Network net;
    for (const auto& vid : vertex_ids) {
        if (net.vertex_by_id_.count(vid))
            throw ConfigError("duplicate vertex id: " + vid);
        net.vertex_by_id_[vid] = static_cast<int>(net.vertices_.size());
        net.vertices_.push_back(Vertex{vid, {}, {}});
    }
    for (const auto& spec : edge_specs) {
        if (net.edge_by_id_.count(spec.id))
            throw ConfigError("duplicate edge id: " + spec.id);
        if (!(spec.length > 0.0))
            throw ConfigError("edge " + spec.id + ": length must be positive");
        auto tail_it = net.vertex_by_id_.find(spec.tail);
        if (tail_it == net.vertex_by_id_.end())
            throw ConfigError("edge " + spec.id + " references undefined vertex: " + spec.tail);
        Edge e;
        e.id = spec.id;
        e.length = spec.length;
        e.tail_vertex = tail_it->second;
        if (std::isfinite(spec.length)) {
            if (!spec.head)
                throw ConfigError("edge " + spec.id + ": finite edge needs a head vertex");
            auto head_it = net.vertex_by_id_.find(*spec.head);
            if (head_it == net.vertex_by_id_.end())
                throw ConfigError("edge " + spec.id + " references undefined vertex: " + *spec.head);
            e.head_vertex = head_it->second;
        } else if (spec.head) {
            throw ConfigError("edge " + spec.id + ": a half-line has no head vertex");
        }
        int ei = static_cast<int>(net.edges_.size());
        net.edges_.push_back(e);
        net.vertices_[e.tail_vertex].incoming_minus.push_back(ei);
        if (e.head_vertex >= 0) net.vertices_[e.head_vertex].incoming_plus.push_back(ei);
    }
    for (const auto& v : net.vertices_) {
        if (v.degree() == 0)
            throw ConfigError("vertex " + v.id + " has no incident edges");
    }
    net.compute_vertex_distances();
    if (require_connected && !net.connected_)
        throw ConfigError("network is not connected");
    return net;
}

int Network::edge_index(const std::string& id) const {
    auto it = edge_by_id_.find(id);
    if (it == edge_by_id_.end()) throw ConfigError("unknown edge id: " + id);
    return it->second;
}

int Network::vertex_index(const std::string& id) const {
    auto it = vertex_by_id_.find(id);
    if (it == vertex_by_id_.end()) throw ConfigError("unknown vertex id: " + id);
    return it->second;
}

std::pair<std::vector<int>, std::vector<int>> Network::incident_partition(int v) const {
    if (v < 0 || v >= static_cast<int>(vertices_.size()))
        throw ConfigError("unknown vertex index: " + std::to_string(v));
    return {vertices_[v].incoming_minus, vertices_[v].incoming_plus};
}

std::pair<std::vector<int>, std::vector<int>> Network::incident_partition(const std::string& id) const {
    return incident_partition(vertex_index(id));
}

void Network::compute_vertex_distances() {
    const int n = static_cast<int>(vertices_.size());
    const double inf = std::numeric_limits<double>::infinity();
    vertex_dist_.assign(n, std::vector<double>(n, inf));

    // Dijkstra from every vertex over finite edges; index tie-break keeps
    // the iteration order deterministic.
    for (int s = 0; s < n; ++s) {
        auto& dist = vertex_dist_[s];
        dist[s] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        pq.push({0.0, s});
        while (!pq.empty()) {
            double d = pq.top().first;
            int v = pq.top().second;
            pq.pop();
            if (d > dist[v]) continue;
            auto relax = [&](int ei) {
                const Edge& e = edges_[ei];
                if (e.is_half_line()) return;
                int other = (e.tail_vertex == v) ? e.head_vertex : e.tail_vertex;
                // self-loop relaxation is a no-op for vertex distances
                double nd = d + e.length;
                if (nd < dist[other]) {
                    dist[other] = nd;
                    pq.push({nd, other});
                }
            };
            for (int ei : vertices_[v].incoming_minus) relax(ei);
            for (int ei : vertices_[v].incoming_plus) relax(ei);
        }
    }

    connected_ = true;
    for (int i = 0; i < n && connected_; ++i)
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(vertex_dist_[i][j])) {
                connected_ = false;
                break;
            }
}

double Network::vertex_distance(int a, int b) const { return vertex_dist_.at(a).at(b); }

void Network::validate_point(const NetworkPoint& p) const {
    if (p.edge < 0 || p.edge >= static_cast<int>(edges_.size()))
        throw ConfigError("network point references unknown edge index " + std::to_string(p.edge));
    const Edge& e = edges_[p.edge];
    if (p.offset < 0.0 || p.offset > e.length)
        throw ConfigError("network point offset outside edge " + e.id);
}

double Network::geodesic_distance(const NetworkPoint& x, const NetworkPoint& y) const {
    validate_point(x);
    validate_point(y);
    const Edge& ex = edges_[x.edge];
    const Edge& ey = edges_[y.edge];

    double best = std::numeric_limits<double>::infinity();
    if (x.edge == y.edge) best = std::abs(x.offset - y.offset);

    // cost from a point to each of its edge's endpoints
    struct End {
        int vertex;
        double cost;
    };
    auto ends = [](const Edge& e, double off) {
        std::vector<End> out;
        out.push_back({e.tail_vertex, off});
        if (e.head_vertex >= 0) out.push_back({e.head_vertex, e.length - off});
        return out;
    };

    for (const End& a : ends(ex, x.offset))
        for (const End& b : ends(ey, y.offset)) {
            double via = a.cost + vertex_dist_[a.vertex][b.vertex] + b.cost;
            best = std::min(best, via);
        }
    return best;
}

Network build_junction(int n_branches) {
    if (n_branches < 1)
        throw ConfigError("a junction needs at least one branch");
    std::vector<EdgeSpec> edges;
    edges.reserve(n_branches);
    for (int i = 1; i <= n_branches; ++i)
        edges.push_back(EdgeSpec{"e" + std::to_string(i), kInfiniteLength, "v0", std::nullopt});
    return Network::from_parts({"v0"}, edges);
}

}  // namespace hjnet
