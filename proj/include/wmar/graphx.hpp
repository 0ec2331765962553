#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wmar {

/// One directed dependency: feature `from` helps predict feature `to`.
struct Edge {
    std::string from;
    std::string to;
    double weight = 0.0;

    friend bool operator==(const Edge& a, const Edge& b) {
        return a.from == b.from && a.to == b.to && a.weight == b.weight;
    }
};

struct SelfLoop {
    std::string node;
    double weight = 0.0;

    friend bool operator==(const SelfLoop& a, const SelfLoop& b) {
        return a.node == b.node && a.weight == b.weight;
    }
};

/// Thresholded digraph read off a coefficient matrix. Off-diagonal entries
/// become edges j -> i with weight A_ij; diagonal entries are kept
/// separately as self-loops. Weights are matrix entries verbatim.
struct EdgeList {
    std::vector<Edge> edges;
    std::vector<SelfLoop> self_loops;
    double threshold = 0.0;

    friend bool operator==(const EdgeList& a, const EdgeList& b) {
        return a.edges == b.edges && a.self_loops == b.self_loops && a.threshold == b.threshold;
    }
};

EdgeList to_edges(const Eigen::MatrixXd& a, const std::vector<std::string>& labels,
                  double threshold = 0.0);

/// The k largest off-diagonal weights, descending; ties resolve by
/// (row, column) index order. Shorter when fewer positive entries exist.
std::vector<Edge> top_k(const Eigen::MatrixXd& a, const std::vector<std::string>& labels,
                        std::size_t k);

/// DOT digraph. Edge penwidth is proportional to weight; weights are
/// printed to 6 decimals. Self-loop weights are drawn on the nodes.
std::string export_dot(const EdgeList& edges);

std::string export_json(const EdgeList& edges);
EdgeList parse_json(const std::string& text);

/// CSV edge table `from,to,weight` (self-loops included as from == to).
std::string export_csv(const EdgeList& edges);

} // namespace wmar
