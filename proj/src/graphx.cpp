#include "wmar/graphx.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wmar/error.hpp"

namespace wmar {

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string quote_dot(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

EdgeList to_edges(const Eigen::MatrixXd& a, const std::vector<std::string>& labels,
                  double threshold) {
    if (a.rows() != a.cols()) throw Error("to_edges: matrix must be square");
    if (static_cast<Eigen::Index>(labels.size()) != a.rows()) {
        throw Error("to_edges: " + std::to_string(labels.size()) + " labels for "
                    + std::to_string(a.rows()) + " features");
    }
    if (threshold < 0.0) throw Error("to_edges: threshold must be nonnegative");
    EdgeList out;
    out.threshold = threshold;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double w = a(i, j);
            if (w <= threshold) continue;
            if (i == j) {
                out.self_loops.push_back({labels[static_cast<std::size_t>(i)], w});
            } else {
                out.edges.push_back({labels[static_cast<std::size_t>(j)],
                                     labels[static_cast<std::size_t>(i)], w});
            }
        }
    }
    return out;
}

std::vector<Edge> top_k(const Eigen::MatrixXd& a, const std::vector<std::string>& labels,
                        std::size_t k) {
    if (k == 0) throw Error("top_k: k must be at least 1");
    struct Entry {
        double w;
        Eigen::Index i, j;
    };
    std::vector<Entry> entries;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j && a(i, j) > 0.0) entries.push_back({a(i, j), i, j});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        if (x.w != y.w) return x.w > y.w;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    if (entries.size() > k) entries.resize(k);
    std::vector<Edge> out;
    out.reserve(entries.size());
    for (const Entry& e : entries) {
        out.push_back({labels[static_cast<std::size_t>(e.j)], labels[static_cast<std::size_t>(e.i)],
                       e.w});
    }
    return out;
}

std::string export_dot(const EdgeList& list) {
    double wmax = 0.0;
    for (const Edge& e : list.edges) wmax = std::max(wmax, e.weight);
    for (const SelfLoop& s : list.self_loops) wmax = std::max(wmax, s.weight);
    const double scale = wmax > 0.0 ? 8.0 / wmax : 1.0;

    std::ostringstream os;
    os << "digraph wmar {\n";
    if (!list.edges.empty() || !list.self_loops.empty()) {
        os << "  // threshold " << fixed6(list.threshold) << "\n";
        os << "  rankdir=LR;\n";
    }
    for (const SelfLoop& s : list.self_loops) {
        os << "  " << quote_dot(s.node) << " [penwidth=" << fixed6(s.weight * scale)
           << ", xlabel=" << quote_dot(fixed6(s.weight)) << "];\n";
    }
    for (const Edge& e : list.edges) {
        os << "  " << quote_dot(e.from) << " -> " << quote_dot(e.to)
           << " [weight=" << fixed6(e.weight) << ", penwidth=" << fixed6(e.weight * scale)
           << ", label=" << quote_dot(fixed6(e.weight)) << "];\n";
    }
    os << "}\n";
    return os.str();
}

std::string export_json(const EdgeList& list) {
    nlohmann::json j;
    j["threshold"] = list.threshold;
    j["edges"] = nlohmann::json::array();
    for (const Edge& e : list.edges) {
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
    }
    j["self_loops"] = nlohmann::json::array();
    for (const SelfLoop& s : list.self_loops) {
        j["self_loops"].push_back({{"node", s.node}, {"weight", s.weight}});
    }
    return j.dump(2) + "\n";
}

EdgeList parse_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("edge list JSON: ") + e.what());
    }
    EdgeList out;
    out.threshold = j.at("threshold").get<double>();
    for (const auto& e : j.at("edges")) {
        out.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                             e.at("weight").get<double>()});
    }
    for (const auto& s : j.at("self_loops")) {
        out.self_loops.push_back({s.at("node").get<std::string>(), s.at("weight").get<double>()});
    }
    return out;
}

std::string export_csv(const EdgeList& list) {
    std::ostringstream os;
    os << "from,to,weight\n";
    for (const Edge& e : list.edges) {
        os << e.from << "," << e.to << "," << shortest(e.weight) << "\n";
    }
    for (const SelfLoop& s : list.self_loops) {
        os << s.node << "," << s.node << "," << shortest(s.weight) << "\n";
    }
    return os.str();
}

} // namespace wmar
