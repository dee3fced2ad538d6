#include "crnstab/structure.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include "crnstab/error.hpp"
#include "linalg_detail.hpp"

namespace crnstab {

namespace {

struct ComplexGraph {
    std::vector<Complex> complexes;
    std::vector<std::pair<int, int>> edges;  // reactant id -> product id, per reaction
};

ComplexGraph build_complex_graph(const Network& net) {
    ComplexGraph g;
    std::map<Complex, int> ids;
    auto intern = [&](const Complex& c) {
        auto [it, inserted] = ids.emplace(c, static_cast<int>(g.complexes.size()));
        if (inserted) g.complexes.push_back(c);
        return it->second;
    };
    for (const Reaction& r : net.reactions)
        g.edges.emplace_back(intern(r.reactant), intern(r.product));
    return g;
}

/// Union-find connected components over the undirected complex graph.
std::vector<int> linkage_classes(int m, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto [a, b] : edges) parent[find(a)] = find(b);
    std::vector<int> label(m, -1);
    int next = 0;
    std::vector<int> cls(m);
    for (int v = 0; v < m; ++v) {
        int root = find(v);
        if (label[root] < 0) label[root] = next++;
        cls[v] = label[root];
    }
    return cls;
}

/// Iterative Tarjan; returns the number of strongly connected components.
int count_sccs(int m, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(m);
    for (auto [a, b] : edges) adj[a].push_back(b);

    std::vector<int> index(m, -1), low(m, 0), on_stack(m, 0);
    std::vector<int> stack;
    int next_index = 0, sccs = 0;

    struct Frame { int v; std::size_t child; };
    for (int start = 0; start < m; ++start) {
        if (index[start] >= 0) continue;
        std::vector<Frame> call{{start, 0}};
        index[start] = low[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.child < adj[f.v].size()) {
                int w = adj[f.v][f.child++];
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    ++sccs;
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        if (w == f.v) break;
                    }
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    return sccs;
}

}  // namespace

std::vector<Vec> reaction_vectors(const Network& net) {
    std::vector<Vec> out;
    out.reserve(net.reactions.size());
    for (const Reaction& r : net.reactions) {
        Vec v(net.species_count());
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] = (r.product.coeffs[j] - r.reactant.coeffs[j]).to_double();
        out.push_back(std::move(v));
    }
    return out;
}

StoichiometryAnalysis analyze_structure(const Network& net) {
    net.validate();
    StoichiometryAnalysis a;

    ComplexGraph g = build_complex_graph(net);
    a.complexes = g.complexes;
    int m = static_cast<int>(g.complexes.size());
    a.complex_class = linkage_classes(m, g.edges);
    a.linkage_class_count = 1 + *std::max_element(a.complex_class.begin(), a.complex_class.end());

    // Weakly reversible iff every connected component is strongly connected,
    // i.e. the SCC count equals the linkage class count.
    a.weakly_reversible = count_sccs(m, g.edges) == a.linkage_class_count;

    std::vector<Vec> vecs = reaction_vectors(net);
    const int n = static_cast<int>(net.species_count());
    const int r = static_cast<int>(vecs.size());
    Eigen::MatrixXd V(n, r);
    for (int i = 0; i < r; ++i)
        V.col(i) = detail::to_eigen(vecs[i]);

    a.rank = detail::matrix_rank(V);
    a.deficiency = m - a.linkage_class_count - a.rank;
    if (a.deficiency < 0) throw Error("internal: negative deficiency");

    a.basis_S = detail::orthonormalize(vecs);
    if (static_cast<int>(a.basis_S.size()) != a.rank)
        throw Error("internal: rank/basis size mismatch");

    a.basis_S_perp = detail::orthonormalize(detail::kernel_basis(V.transpose()));
    if (static_cast<int>(a.basis_S_perp.size()) != n - a.rank)
        throw Error("internal: S-perp dimension mismatch");

    return a;
}

}  // namespace crnstab
