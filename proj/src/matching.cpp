#include "cpd/matching.hpp"

#include <algorithm>
#include <numeric>

#include "cpd/error.hpp"

namespace cpd {

namespace {

class Blossom {
public:
    explicit Blossom(const std::vector<std::vector<int>>& adjacency)
        : g_(adjacency), n_(static_cast<int>(adjacency.size())), match_(n_, -1), parent_(n_), base_(n_), used_(n_),
          in_blossom_(n_), queue_(n_) {}

    std::vector<int> run(std::span<const int> order) {
        for (int v : order) {
            if (match_[v] != -1) continue;
            int u = find_path(v);
            while (u != -1) {
                const int pv = parent_[u];
                const int ppv = match_[pv];
                match_[u] = pv;
                match_[pv] = u;
                u = ppv;
            }
        }
        return match_;
    }

private:
    int lca(int a, int b) {
        std::vector<char> seen(n_, 0);
        for (;;) {
            a = base_[a];
            seen[a] = 1;
            if (match_[a] == -1) break;
            a = parent_[match_[a]];
        }
        for (;;) {
            b = base_[b];
            if (seen[b]) return b;
            b = parent_[match_[b]];
        }
    }

    void mark_path(int v, int b, int child) {
        while (base_[v] != b) {
            in_blossom_[base_[v]] = in_blossom_[base_[match_[v]]] = 1;
            parent_[v] = child;
            child = match_[v];
            v = parent_[match_[v]];
        }
    }

    int find_path(int root) {
        std::fill(used_.begin(), used_.end(), 0);
        std::fill(parent_.begin(), parent_.end(), -1);
        std::iota(base_.begin(), base_.end(), 0);
        used_[root] = 1;
        int head = 0, tail = 0;
        queue_[tail++] = root;
        while (head < tail) {
            const int v = queue_[head++];
            for (int to : g_[v]) {
                if (base_[v] == base_[to] || match_[v] == to) continue;
                if (to == root || (match_[to] != -1 && parent_[match_[to]] != -1)) {
                    const int cur = lca(v, to);
                    std::fill(in_blossom_.begin(), in_blossom_.end(), 0);
                    mark_path(v, cur, to);
                    mark_path(to, cur, v);
                    for (int i = 0; i < n_; ++i) {
                        if (in_blossom_[base_[i]]) {
                            base_[i] = cur;
                            if (!used_[i]) {
                                used_[i] = 1;
                                queue_[tail++] = i;
                            }
                        }
                    }
                } else if (parent_[to] == -1) {
                    parent_[to] = v;
                    if (match_[to] == -1) return to;
                    used_[match_[to]] = 1;
                    queue_[tail++] = match_[to];
                }
            }
        }
        return -1;
    }

    const std::vector<std::vector<int>>& g_;
    int n_;
    std::vector<int> match_, parent_, base_;
    std::vector<char> used_, in_blossom_;
    std::vector<int> queue_;
};

void check_inputs(int node_count, std::span<const Edge> edges, std::span<const int> capacity) {
    if (static_cast<int>(capacity.size()) != node_count) throw DimensionError("matching: capacity size mismatch");
    for (const Edge& e : edges)
        if (e.a < 0 || e.b >= node_count || e.a >= e.b) throw DimensionError("matching: invalid edge");
}

}  // namespace

std::vector<int> maximum_matching(const std::vector<std::vector<int>>& adjacency, std::span<const int> order) {
    return Blossom(adjacency).run(order);
}

std::vector<Edge> greedy_b_matching(int node_count, std::span<const Edge> edges, std::span<const int> capacity,
                                    std::mt19937_64& rng) {
    check_inputs(node_count, edges, capacity);
    std::vector<Edge> shuffled(edges.begin(), edges.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<int> used(node_count, 0);
    auto has_room = [&](int v) { return capacity[v] == kUnboundedCapacity || used[v] < capacity[v]; };
    std::vector<Edge> chosen;
    for (const Edge& e : shuffled) {
        if (has_room(e.a) && has_room(e.b)) {
            ++used[e.a];
            ++used[e.b];
            chosen.push_back(e);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<Edge> maximum_b_matching(int node_count, std::span<const Edge> edges, std::span<const int> capacity,
                                     std::mt19937_64& rng) {
    check_inputs(node_count, edges, capacity);

    std::vector<int> degree(node_count, 0);
    for (const Edge& e : edges) {
        ++degree[e.a];
        ++degree[e.b];
    }
    // Vertices whose capacity covers every incident edge never constrain the matching: each incident
    // edge gets a private copy. Capacity-1 vertices map to themselves; others need the edge gadget.
    enum class Mode { Private, Single, Gadget, Closed };
    std::vector<Mode> mode(node_count);
    std::vector<std::vector<int>> copies(node_count);
    int next = 0;
    for (int v = 0; v < node_count; ++v) {
        const int cap = capacity[v];
        if (cap == 0) {
            mode[v] = Mode::Closed;
        } else if (cap == kUnboundedCapacity || cap >= degree[v]) {
            mode[v] = Mode::Private;
        } else if (cap == 1) {
            mode[v] = Mode::Single;
            copies[v].push_back(next++);
        } else {
            mode[v] = Mode::Gadget;
            for (int c = 0; c < cap; ++c) copies[v].push_back(next++);
        }
    }

    struct Mapped {
        Edge original;
        bool gadget = false;
        int left = -1;   // direct: endpoint vertex of a; gadget: x
        int right = -1;  // direct: endpoint vertex of b; gadget: y
    };
    std::vector<Mapped> mapped;
    std::vector<std::pair<int, int>> links;
    for (const Edge& e : edges) {
        if (mode[e.a] == Mode::Closed || mode[e.b] == Mode::Closed) continue;
        auto side = [&](int v) -> std::vector<int> {
            if (mode[v] == Mode::Private) return {next++};
            return copies[v];
        };
        if (mode[e.a] != Mode::Gadget && mode[e.b] != Mode::Gadget) {
            const int u = side(e.a).front();
            const int w = side(e.b).front();
            mapped.push_back({e, false, u, w});
            links.emplace_back(u, w);
        } else {
            const auto us = side(e.a);
            const auto ws = side(e.b);
            const int x = next++;
            const int y = next++;
            for (int u : us) links.emplace_back(u, x);
            links.emplace_back(x, y);
            for (int w : ws) links.emplace_back(y, w);
            mapped.push_back({e, true, x, y});
        }
    }

    std::vector<std::vector<int>> adjacency(next);
    std::shuffle(links.begin(), links.end(), rng);
    for (auto [u, w] : links) {
        adjacency[u].push_back(w);
        adjacency[w].push_back(u);
    }
    std::vector<int> order(next);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    const std::vector<int> mate = maximum_matching(adjacency, order);

    std::vector<Edge> chosen;
    for (const Mapped& m : mapped) {
        const bool selected = m.gadget ? (mate[m.left] != -1 && mate[m.left] != m.right && mate[m.right] != -1)
                                       : mate[m.left] == m.right;
        if (selected) chosen.push_back(m.original);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace cpd
