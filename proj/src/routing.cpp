#include "cpd/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

#include "cpd/error.hpp"

namespace cpd {

namespace {

constexpr int kNever = std::numeric_limits<int>::max();

// CSP ordering: earliest arrival, then earliest contact start, then lowest edge, then direction.
struct QueueEntry {
    int arrival;
    int t_start;
    int a;
    int b;
    int from;
    int vertex;

    bool operator>(const QueueEntry& o) const {
        return std::tie(arrival, t_start, a, b, from, vertex) > std::tie(o.arrival, o.t_start, o.a, o.b, o.from, o.vertex);
    }
};

struct SearchResult {
    std::vector<int> node_arrival;  // first arrival step per node, kNever if unreached
    std::vector<int> node_via;      // vertex that delivered the first arrival
    std::vector<int> node_hops;
    std::vector<int> pred;          // per vertex
    std::vector<int> arrival;       // per vertex
};

void check_query(const ContactGraph& graph, int source, int t_start) {
    if (source < 0 || source >= graph.node_count()) throw DimensionError("routing: unknown node " + std::to_string(source));
    if (t_start < 0 || t_start >= graph.step_count())
        throw DimensionError("routing: start step " + std::to_string(t_start) + " outside the horizon");
}

// Dijkstra over contact vertices. The contact review step relaxes contacts leaving the node reached by
// the selected contact; the selection step pops the unvisited contact with the earliest arrival. A node
// is reviewed once, from its earliest arrival, since later arrivals at the same node cannot enable
// earlier transfers. Stops once `stop_at` is reached when it is >= 0.
SearchResult search(const ContactGraph& graph, int source, int t_start, int stop_at) {
    const int n = graph.node_count();
    const int last_arrival = graph.step_count() - 1;
    const auto& contacts = graph.contacts();

    SearchResult r;
    r.node_arrival.assign(n, kNever);
    r.node_via.assign(n, -1);
    r.node_hops.assign(n, 0);
    r.pred.assign(graph.vertex_count(), -1);
    r.arrival.assign(graph.vertex_count(), kNever);
    std::vector<int> hops(graph.vertex_count(), 0);
    std::vector<char> visited(graph.vertex_count(), 0);

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
    const int root = graph.root(source);
    r.arrival[root] = t_start;
    queue.push({t_start, -1, -1, -1, source, root});

    while (!queue.empty()) {
        const QueueEntry current = queue.top();
        queue.pop();
        const int v = current.vertex;
        if (visited[v] || current.arrival != r.arrival[v]) continue;
        visited[v] = 1;

        const int node = graph.is_root(v) ? source : contacts[v].to;
        if (r.node_arrival[node] != kNever) continue;
        r.node_arrival[node] = current.arrival;
        r.node_via[node] = v;
        r.node_hops[node] = hops[v];
        if (node == stop_at) break;

        for (int d : graph.outgoing(node)) {
            const DirectedContact& c = contacts[d];
            if (visited[d] || c.t_end <= current.arrival || r.node_arrival[c.to] != kNever) continue;
            const int tx = std::max(current.arrival, c.t_start);
            const int arrive = tx + 1;
            if (arrive > last_arrival) continue;
            if (arrive < r.arrival[d]) {
                r.arrival[d] = arrive;
                r.pred[d] = v;
                hops[d] = hops[v] + 1;
                queue.push({arrive, c.t_start, std::min(c.from, c.to), std::max(c.from, c.to), c.from, d});
            }
        }
    }
    return r;
}

}  // namespace

ContactGraph::ContactGraph(std::span<const Contact> contacts, const Scenario& scenario, RoutingOptions options)
    : node_count_(scenario.node_count()),
      step_count_(scenario.step_count()),
      step_minutes_(scenario.grid.step_minutes()),
      outgoing_(scenario.node_count()) {
    if (options.propagation_delay)
        hop_delay_minutes_ = scenario.mean_link_distance_km / kSpeedOfLightKmPerS / 60.0;
    for (std::size_t k = 0; k < contacts.size(); ++k) {
        const Contact& c = contacts[k];
        if (c.a < 0 || c.b >= node_count_ || c.a >= c.b || c.t_start < 0 || c.t_end > step_count_ || c.t_start >= c.t_end)
            throw DimensionError("contact graph: contact " + std::to_string(k) + " does not fit the scenario");
        if (k > 0) {
            const Contact& p = contacts[k - 1];
            if (std::tie(p.t_start, p.a, p.b) > std::tie(c.t_start, c.a, c.b))
                throw DimensionError("contact graph: contacts must be sorted by (t_start, a, b)");
        }
        contacts_.push_back({c.a, c.b, c.t_start, c.t_end});
        contacts_.push_back({c.b, c.a, c.t_start, c.t_end});
    }
    for (int d = 0; d < static_cast<int>(contacts_.size()); ++d) outgoing_[contacts_[d].from].push_back(d);
}

std::vector<int> ContactGraph::successors(int vertex, int arrival) const {
    if (vertex < 0 || vertex >= vertex_count() || is_terminal(vertex)) return {};
    const int node = is_root(vertex) ? vertex - root(0) : contacts_[vertex].to;
    std::vector<int> out;
    for (int d : outgoing_[node])
        if (d != vertex && contacts_[d].t_end > arrival && std::max(arrival, contacts_[d].t_start) + 1 <= step_count_ - 1)
            out.push_back(d);
    if (!is_root(vertex)) out.push_back(terminal(node));
    return out;
}

ContactGraph build_contact_graph(std::span<const Contact> contacts, const Scenario& scenario, RoutingOptions options) {
    return ContactGraph(contacts, scenario, options);
}

std::optional<Route> cgds(const ContactGraph& graph, int source, int destination, int t_start) {
    check_query(graph, source, t_start);
    if (destination < 0 || destination >= graph.node_count())
        throw DimensionError("routing: unknown node " + std::to_string(destination));

    Route route;
    route.source = source;
    route.destination = destination;
    route.t_start = t_start;
    if (source == destination) {
        route.delivery_step = t_start;
        route.tx_win = {t_start, t_start};
        return route;
    }

    const SearchResult r = search(graph, source, t_start, destination);
    if (r.node_arrival[destination] == kNever) return std::nullopt;

    const auto& contacts = graph.contacts();
    for (int v = r.node_via[destination]; v != -1 && !graph.is_root(v); v = r.pred[v]) {
        const DirectedContact& c = contacts[v];
        route.hops.push_back({c.from, c.to, c.t_start, c.t_end, r.arrival[v] - 1});
    }
    std::reverse(route.hops.begin(), route.hops.end());

    route.delivery_step = r.node_arrival[destination];
    route.bdt_minutes = (route.delivery_step - t_start) * graph.step_minutes() +
                        static_cast<double>(route.hops.size()) * graph.hop_delay_minutes();
    route.tx_win.start = route.hops.front().tx_step;
    route.tx_win.end = kNever;
    route.volume = kNever;
    for (const Hop& h : route.hops) {
        route.tx_win.end = std::min(route.tx_win.end, h.t_end);
        route.volume = std::min(route.volume, h.t_end - h.t_start);
    }
    return route;
}

std::vector<BdtResult> bdt_all_destinations(const ContactGraph& graph, int source, int t_start) {
    check_query(graph, source, t_start);
    const SearchResult r = search(graph, source, t_start, -1);
    std::vector<BdtResult> out(graph.node_count());
    for (int j = 0; j < graph.node_count(); ++j) {
        BdtResult& b = out[j];
        b.source = source;
        b.destination = j;
        b.t = t_start;
        if (r.node_arrival[j] != kNever) {
            b.delivery_step = r.node_arrival[j];
            b.hop_count = r.node_hops[j];
            b.bdt_minutes = (r.node_arrival[j] - t_start) * graph.step_minutes() + b.hop_count * graph.hop_delay_minutes();
        }
    }
    return out;
}

BdtResult oracle_bdt(const ContactPlan& plan, const Scenario& scenario, int source, int destination, int t_start) {
    const int n = scenario.node_count();
    if (plan.node_count() != n || plan.step_count() != scenario.step_count())
        throw DimensionError("oracle: plan does not match scenario");
    if (source < 0 || source >= n) throw DimensionError("oracle: unknown node " + std::to_string(source));
    if (destination < 0 || destination >= n) throw DimensionError("oracle: unknown node " + std::to_string(destination));
    if (t_start < 0 || t_start >= scenario.step_count())
        throw DimensionError("oracle: start step " + std::to_string(t_start) + " outside the horizon");

    BdtResult result;
    result.source = source;
    result.destination = destination;
    result.t = t_start;

    // Layer-by-layer sweep of the time-expanded graph; holding[v] means (v, step) is reachable.
    std::vector<char> holding(n, 0);
    holding[source] = 1;
    for (int step = t_start;; ++step) {
        if (holding[destination]) {
            result.delivery_step = step;
            result.bdt_minutes = (step - t_start) * scenario.grid.step_minutes();
            return result;
        }
        if (step + 1 >= scenario.step_count()) break;
        std::vector<char> next = holding;
        for (const Edge& e : plan.edges(step)) {
            if (holding[e.a]) next[e.b] = 1;
            if (holding[e.b]) next[e.a] = 1;
        }
        holding = std::move(next);
    }
    return result;
}

}  // namespace cpd
