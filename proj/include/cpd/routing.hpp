#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cpd/contact_plan.hpp"
#include "cpd/scenario.hpp"

namespace cpd {

struct RoutingOptions {
    // Adds mean link distance / c per hop to the reported delivery time. Delivery steps are unaffected.
    bool propagation_delay = false;
};

// One direction of a contact: data can leave `from` at any step in [t_start, t_end).
struct DirectedContact {
    int from = 0;
    int to = 0;
    int t_start = 0;
    int t_end = 0;
};

// Contacts as vertices. Each undirected contact yields two directed vertices; every node also owns a
// root vertex (message injection) and a terminal vertex (delivery). A message that reached node n at
// step a may continue on any contact leaving n with t_end > a; one transfer occupies one full step.
class ContactGraph {
public:
    ContactGraph(std::span<const Contact> contacts, const Scenario& scenario, RoutingOptions options = {});

    int node_count() const { return node_count_; }
    int step_count() const { return step_count_; }
    double step_minutes() const { return step_minutes_; }
    double hop_delay_minutes() const { return hop_delay_minutes_; }

    const std::vector<DirectedContact>& contacts() const { return contacts_; }
    std::span<const int> outgoing(int node) const { return outgoing_[node]; }

    int vertex_count() const { return static_cast<int>(contacts_.size()) + 2 * node_count_; }
    int root(int node) const { return static_cast<int>(contacts_.size()) + node; }
    int terminal(int node) const { return static_cast<int>(contacts_.size()) + node_count_ + node; }
    bool is_root(int vertex) const { return vertex >= root(0) && vertex < terminal(0); }
    bool is_terminal(int vertex) const { return vertex >= terminal(0); }

    // Vertices reachable in one transfer from `vertex` when the message sits at its receiving node at
    // step `arrival`. Includes that node's terminal.
    std::vector<int> successors(int vertex, int arrival) const;

private:
    int node_count_ = 0;
    int step_count_ = 0;
    double step_minutes_ = 1.0;
    double hop_delay_minutes_ = 0.0;
    std::vector<DirectedContact> contacts_;
    std::vector<std::vector<int>> outgoing_;
};

ContactGraph build_contact_graph(std::span<const Contact> contacts, const Scenario& scenario, RoutingOptions options = {});

struct Hop {
    int from = 0;
    int to = 0;
    int t_start = 0;  // window of the contact used
    int t_end = 0;
    int tx_step = 0;  // step in which the transfer happens; arrival is tx_step + 1
};

struct StepInterval {
    int start = 0;
    int end = 0;
};

struct Route {
    int source = 0;
    int destination = 0;
    int t_start = 0;
    int delivery_step = 0;
    double bdt_minutes = 0.0;
    std::vector<Hop> hops;
    StepInterval tx_win;  // [first transfer step, earliest hop window end)
    int volume = 0;       // min over hops of window length, 1 unit per step
};

struct BdtResult {
    int source = 0;
    int destination = 0;
    int t = 0;
    std::optional<int> delivery_step;  // nullopt: unreachable within the horizon
    int hop_count = 0;
    double bdt_minutes = 0.0;          // meaningful only when reachable

    bool reachable() const { return delivery_step.has_value(); }
};

// Contact Graph Dijkstra Search. Returns nullopt when the destination cannot be reached.
// Throws DimensionError for unknown nodes or t_start outside [0, N_t).
std::optional<Route> cgds(const ContactGraph& graph, int source, int destination, int t_start);

// One search from `source`, reporting every node. Entry k is the result for destination k.
std::vector<BdtResult> bdt_all_destinations(const ContactGraph& graph, int source, int t_start);

// Earliest arrival over the time-expanded graph: vertices (node, step) for steps in [0, N_t), wait edges
// (n,t)->(n,t+1) and transfer edges (i,t)->(j,t+1) whenever U_t(i,j)=1.
BdtResult oracle_bdt(const ContactPlan& plan, const Scenario& scenario, int source, int destination, int t_start);

}  // namespace cpd
