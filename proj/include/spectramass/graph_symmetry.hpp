#pragma once

// Weighted graph Laplacians with finite symmetry groups: isotypic eigenvalue
// counting, fundamental domains and the boundary-size bound on the deviation
// from proportional splitting, plus the square-torus and square-lattice
// symmetry experiments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spectramass/errors.hpp"
#include "spectramass/homogeneous.hpp"
#include "spectramass/numerics.hpp"
#include "spectramass/rng.hpp"

namespace spectramass {

// ---------------------------------------------------------------------------
// Weighted graphs

struct WeightedGraph {
    struct Edge {
        int u, v;
        double c;
    };

    int n = 0;
    std::vector<double> mu;   // vertex measure, size n
    std::vector<Edge> edges;  // undirected, stored once

    int add_vertex(double measure = 1.0) {
        mu.push_back(measure);
        return n++;
    }

    void add_edge(int u, int v, double c = 1.0) { edges.push_back({u, v, c}); }

    void validate() const {
        if (static_cast<int>(mu.size()) != n)
            throw std::invalid_argument("WeightedGraph: measure size mismatch");
        for (double m : mu)
            if (!(m > 0.0)) throw std::invalid_argument("WeightedGraph: mu must be positive");
        for (const Edge& e : edges) {
            if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
                throw std::invalid_argument("WeightedGraph: bad edge endpoints");
            if (!(e.c > 0.0)) throw NonPositiveConductance("WeightedGraph: conductance must be positive");
        }
    }

    double total_measure() const {
        double s = 0.0;
        for (double m : mu) s += m;
        return s;
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(n);
        for (const Edge& e : edges) {
            adj[e.u].push_back(e.v);
            adj[e.v].push_back(e.u);
        }
        return adj;
    }
};

// Operator A u(x) = (1/mu(x)) sum_y c_xy (u(x) - u(y)), returned in the
// mu-symmetrized coordinates D^{1/2} A D^{-1/2} so a plain symmetric
// eigensolver applies; the spectrum is unchanged.
inline std::vector<double> build_laplacian(const WeightedGraph& g) {
    g.validate();
    const std::size_t n = static_cast<std::size_t>(g.n);
    std::vector<double> a(n * n, 0.0);
    for (const auto& e : g.edges) {
        a[e.u * n + e.u] += e.c / g.mu[e.u];
        a[e.v * n + e.v] += e.c / g.mu[e.v];
        const double off = e.c / std::sqrt(g.mu[e.u] * g.mu[e.v]);
        a[e.u * n + e.v] -= off;
        a[e.v * n + e.u] -= off;
    }
    return a;
}

inline double rayleigh(const WeightedGraph& g, std::span<const double> u) {
    g.validate();
    if (static_cast<int>(u.size()) != g.n)
        throw std::invalid_argument("rayleigh: vector size mismatch");
    double num = 0.0, den = 0.0;
    for (const auto& e : g.edges) {
        const double d = u[e.u] - u[e.v];
        num += e.c * d * d;
    }
    for (int x = 0; x < g.n; ++x) den += u[x] * u[x] * g.mu[x];
    if (den == 0.0) throw ZeroVector("rayleigh: zero vector");
    return num / den;
}

// #{eigenvalues <= lambda}, computed spectrally.
inline int minmax_count(const WeightedGraph& g, double lambda) {
    auto dec = sym_eig(build_laplacian(g), g.n);
    return dec.count_below(lambda + dec.cluster_tol);
}

// ---------------------------------------------------------------------------
// Example graph builders

inline WeightedGraph make_complete_graph(int n, double c = 1.0, double mu = 1.0) {
    WeightedGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(mu);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j, c);
    return g;
}

inline WeightedGraph make_cycle(int n, double c = 1.0, double mu = 1.0) {
    WeightedGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(mu);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, c);
    return g;
}

inline WeightedGraph make_path(int n, double c = 1.0, double mu = 1.0) {
    WeightedGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex(mu);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, c);
    return g;
}

// Two N-cycles x_0..x_{N-1} and y_0..y_{N-1} joined by rungs x_j ~ y_j.
// Vertices 0..N-1 are the x-cycle, N..2N-1 the y-cycle.
inline WeightedGraph make_double_cycle(int N, double c = 1.0, double mu = 1.0) {
    WeightedGraph g;
    for (int i = 0; i < 2 * N; ++i) g.add_vertex(mu);
    for (int i = 0; i < N; ++i) {
        g.add_edge(i, (i + 1) % N, c);
        g.add_edge(N + i, N + (i + 1) % N, c);
        g.add_edge(i, N + i, c);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Group actions and character tables

// A real irreducible block: either a single real irrep, or a conjugate pair
// of complex 1-dimensional irreps folded into one real block (merged = 2,
// chi = twice the real part). dsq() is what enters counting bounds.
struct IrrepBlock {
    std::string name;
    int dim = 1;
    int merged = 1;
    std::vector<double> chi;

    int dsq() const { return merged * dim * dim; }
};

struct GroupAction {
    std::string group_name;
    int n = 0;                           // number of vertices acted on
    std::vector<std::vector<int>> perms; // perms[g][v] = image of v under g; perms[0] = identity
    std::vector<std::string> elem_names;
    std::vector<int> inverse;            // index of g^{-1}
    std::vector<std::vector<int>> product; // product[g][h] = index of g*h
    std::vector<IrrepBlock> irreps;

    int order() const { return static_cast<int>(perms.size()); }
};

namespace detail {

inline void check_permutation(const std::vector<int>& p, int n, const char* what) {
    if (static_cast<int>(p.size()) != n) throw std::invalid_argument(std::string(what) + ": size mismatch");
    std::vector<char> seen(n, 0);
    for (int v : p) {
        if (v < 0 || v >= n || seen[v]) throw std::invalid_argument(std::string(what) + ": not a permutation");
        seen[v] = 1;
    }
}

inline std::vector<int> compose(const std::vector<int>& f, const std::vector<int>& g) {
    std::vector<int> h(f.size());
    for (std::size_t v = 0; v < f.size(); ++v) h[v] = f[g[v]];
    return h;
}

inline std::vector<int> identity_perm(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

inline void finalize_group(GroupAction& a) {
    const int G = a.order();
    // Build the product table from the permutations themselves; requires the
    // action to be faithful, which every action we construct is.
    std::map<std::vector<int>, int> index;
    for (int g = 0; g < G; ++g) {
        if (index.count(a.perms[g]))
            throw std::invalid_argument("GroupAction: duplicate permutation, action not faithful");
        index[a.perms[g]] = g;
    }
    a.product.assign(G, std::vector<int>(G, -1));
    a.inverse.assign(G, -1);
    for (int g = 0; g < G; ++g)
        for (int h = 0; h < G; ++h) {
            auto it = index.find(compose(a.perms[g], a.perms[h]));
            if (it == index.end())
                throw std::invalid_argument("GroupAction: permutations are not closed under composition");
            a.product[g][h] = it->second;
            if (it->second == 0) a.inverse[g] = h;
        }
    // Character table sanity: dimension formula and row orthogonality.
    int dsq_sum = 0;
    for (const auto& ir : a.irreps) dsq_sum += ir.dsq();
    if (dsq_sum != G)
        throw BadCharacterTable("GroupAction: sum of squared dimensions != group order");
    for (std::size_t i = 0; i < a.irreps.size(); ++i)
        for (std::size_t j = i; j < a.irreps.size(); ++j) {
            double dot = 0.0;
            for (int g = 0; g < G; ++g) dot += a.irreps[i].chi[g] * a.irreps[j].chi[g];
            dot /= G;
            const double expect = (i == j) ? static_cast<double>(a.irreps[i].merged) : 0.0;
            if (std::fabs(dot - expect) > 1e-12)
                throw BadCharacterTable("GroupAction: character rows are not orthogonal");
        }
}

} // namespace detail

inline GroupAction trivial_action(int n) {
    GroupAction a;
    a.group_name = "trivial";
    a.n = n;
    a.perms = {detail::identity_perm(n)};
    a.elem_names = {"e"};
    a.irreps.push_back({"trivial", 1, 1, {1.0}});
    detail::finalize_group(a);
    return a;
}

// Cyclic group of order k generated by one vertex permutation. Conjugate
// complex character pairs are folded into real two-block rows so the linear
// algebra stays real; such a block carries merged = 2 and dsq = 2.
inline GroupAction cyclic_action(int k, const std::vector<int>& gen) {
    if (k < 1) throw std::invalid_argument("cyclic_action: k >= 1");
    const int n = static_cast<int>(gen.size());
    detail::check_permutation(gen, n, "cyclic_action generator");
    GroupAction a;
    a.group_name = "Z" + std::to_string(k);
    a.n = n;
    a.perms.resize(k);
    a.perms[0] = detail::identity_perm(n);
    for (int i = 1; i < k; ++i) a.perms[i] = detail::compose(gen, a.perms[i - 1]);
    if (detail::compose(gen, a.perms[k - 1]) != a.perms[0])
        throw std::invalid_argument("cyclic_action: generator order does not divide k");
    for (int i = 0; i < k; ++i) a.elem_names.push_back("g^" + std::to_string(i));

    a.irreps.push_back({"trivial", 1, 1, std::vector<double>(k, 1.0)});
    for (int m = 1; 2 * m < k; ++m) {
        IrrepBlock b{"pair" + std::to_string(m), 1, 2, {}};
        b.chi.resize(k);
        for (int i = 0; i < k; ++i) b.chi[i] = 2.0 * std::cos(2.0 * M_PI * m * i / k);
        a.irreps.push_back(std::move(b));
    }
    if (k % 2 == 0) {
        IrrepBlock b{"sign", 1, 1, {}};
        b.chi.resize(k);
        for (int i = 0; i < k; ++i) b.chi[i] = (i % 2 == 0) ? 1.0 : -1.0;
        a.irreps.push_back(std::move(b));
    }
    detail::finalize_group(a);
    return a;
}

// Dihedral group of order 2k from a rotation r (order k) and a reflection s.
inline GroupAction dihedral_action(int k, const std::vector<int>& r, const std::vector<int>& s) {
    if (k < 1) throw std::invalid_argument("dihedral_action: k >= 1");
    const int n = static_cast<int>(r.size());
    detail::check_permutation(r, n, "dihedral rotation");
    detail::check_permutation(s, n, "dihedral reflection");
    GroupAction a;
    a.group_name = "D" + std::to_string(k);
    a.n = n;
    a.perms.resize(2 * k);
    a.perms[0] = detail::identity_perm(n);
    for (int i = 1; i < k; ++i) a.perms[i] = detail::compose(r, a.perms[i - 1]);
    if (detail::compose(r, a.perms[k - 1]) != a.perms[0])
        throw std::invalid_argument("dihedral_action: rotation order does not divide k");
    if (detail::compose(s, s) != a.perms[0])
        throw std::invalid_argument("dihedral_action: reflection must be an involution");
    // s r s = r^{-1}
    const auto rs = detail::compose(detail::compose(s, r), s);
    const auto rinv = k == 1 ? a.perms[0] : a.perms[k - 1];
    if (rs != rinv) throw std::invalid_argument("dihedral_action: s r s != r^{-1}");
    for (int i = 0; i < k; ++i) a.perms[k + i] = detail::compose(a.perms[i], s); // r^i s
    for (int i = 0; i < k; ++i) a.elem_names.push_back("r^" + std::to_string(i));
    for (int i = 0; i < k; ++i) a.elem_names.push_back("r^" + std::to_string(i) + "s");

    const int G = 2 * k;
    auto row = [&](auto&& fn) {
        std::vector<double> chi(G);
        for (int i = 0; i < k; ++i) chi[i] = fn(i, 0);
        for (int i = 0; i < k; ++i) chi[k + i] = fn(i, 1);
        return chi;
    };
    a.irreps.push_back({"trivial", 1, 1, row([](int, int) { return 1.0; })});
    a.irreps.push_back({"alternating", 1, 1, row([](int, int b) { return b ? -1.0 : 1.0; })});
    if (k % 2 == 0) {
        a.irreps.push_back({"rot_sign", 1, 1, row([](int i, int) { return i % 2 ? -1.0 : 1.0; })});
        a.irreps.push_back(
            {"mixed_sign", 1, 1, row([](int i, int b) { return (i + b) % 2 ? -1.0 : 1.0; })});
    }
    for (int h = 1; 2 * h < k; ++h) {
        a.irreps.push_back({"plane" + std::to_string(h), 2, 1,
                            row([h, k](int i, int b) {
                                return b ? 0.0 : 2.0 * std::cos(2.0 * M_PI * h * i / k);
                            })});
    }
    detail::finalize_group(a);
    return a;
}

// The action must preserve both the vertex measure and the conductances;
// checked eagerly because every counting statement downstream assumes it.
inline void validate_action(const WeightedGraph& g, const GroupAction& a) {
    g.validate();
    if (a.n != g.n) throw std::invalid_argument("validate_action: vertex count mismatch");
    for (const auto& p : a.perms) detail::check_permutation(p, g.n, "action");
    for (const auto& p : a.perms)
        for (int v = 0; v < g.n; ++v)
            if (std::fabs(g.mu[p[v]] - g.mu[v]) > 1e-12)
                throw std::invalid_argument("validate_action: action does not preserve mu");
    std::map<std::pair<int, int>, double> emap;
    for (const auto& e : g.edges) {
        emap[{std::min(e.u, e.v), std::max(e.u, e.v)}] = e.c;
    }
    for (const auto& p : a.perms)
        for (const auto& e : g.edges) {
            const int u = p[e.u], v = p[e.v];
            auto it = emap.find({std::min(u, v), std::max(u, v)});
            if (it == emap.end() || std::fabs(it->second - e.c) > 1e-12)
                throw std::invalid_argument("validate_action: action does not preserve conductances");
        }
}

// Projector onto the isotypic block j, as a dense matrix in the
// mu-symmetrized coordinates (a 0/1-weighted combination of permutation
// matrices; identical entries in raw coordinates since mu is preserved).
inline std::vector<double> isotypic_projector(const GroupAction& a, int j) {
    if (j < 0 || j >= static_cast<int>(a.irreps.size()))
        throw std::invalid_argument("isotypic_projector: bad irrep index");
    const int G = a.order();
    // Completeness check: sum_j d_j chi_j(g) = #G at identity, 0 elsewhere.
    for (int g = 0; g < G; ++g) {
        double s = 0.0;
        for (const auto& ir : a.irreps) s += ir.dim * ir.chi[g];
        const double expect = g == 0 ? static_cast<double>(G) : 0.0;
        if (std::fabs(s - expect) > 1e-8)
            throw BadCharacterTable("isotypic_projector: projectors do not sum to identity");
    }
    const std::size_t n = static_cast<std::size_t>(a.n);
    std::vector<double> p(n * n, 0.0);
    const double scale = static_cast<double>(a.irreps[j].dim) / G;
    for (int g = 0; g < G; ++g) {
        const double w = scale * a.irreps[j].chi[g];
        if (w == 0.0) continue;
        const auto& perm = a.perms[g];
        for (int v = 0; v < a.n; ++v) p[static_cast<std::size_t>(perm[v]) * n + v] += w;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Isotypic counting

struct IsotypicCount {
    std::vector<double> levels;    // clustered eigenvalues, ascending
    std::vector<int> level_mult;   // total multiplicity per level
    std::vector<std::string> irrep_names;
    std::vector<int> irrep_dims;
    std::vector<int> irrep_dsq;
    // mult[j][l] = multiplicity of block j inside level l
    std::vector<std::vector<int>> mult;
    double cluster_tol = 0.0;

    int total() const {
        int s = 0;
        for (int m : level_mult) s += m;
        return s;
    }

    int count_total(double lambda) const {
        int s = 0;
        for (std::size_t l = 0; l < levels.size() && levels[l] <= lambda + cluster_tol; ++l)
            s += level_mult[l];
        return s;
    }

    int count_irrep(int j, double lambda) const {
        int s = 0;
        for (std::size_t l = 0; l < levels.size() && levels[l] <= lambda + cluster_tol; ++l)
            s += mult[j][l];
        return s;
    }
};

// Per-irrep eigenvalue counting functions via projector traces over
// eigenvalue clusters. Traces are exact integers in exact arithmetic; a
// rounding residual above 1e-6 signals broken symmetry or clustering failure.
inline IsotypicCount isotypic_counts(const WeightedGraph& g, const GroupAction& a,
                                     const EigenDecomposition* precomputed = nullptr) {
    validate_action(g, a);
    EigenDecomposition local;
    const EigenDecomposition* dec = precomputed;
    if (!dec) {
        local = sym_eig(build_laplacian(g), g.n);
        dec = &local;
    }
    const int G = a.order();
    const int n = dec->n;
    const auto clusters = dec->clusters();

    IsotypicCount out;
    out.cluster_tol = dec->cluster_tol;
    for (const auto& ir : a.irreps) {
        out.irrep_names.push_back(ir.name);
        out.irrep_dims.push_back(ir.dim);
        out.irrep_dsq.push_back(ir.dsq());
    }
    out.mult.assign(a.irreps.size(), {});

    for (const auto& [b, e] : clusters) {
        // t_g = sum over cluster eigenvectors of <v, v o g>
        std::vector<double> t(G, 0.0);
        for (int g_i = 0; g_i < G; ++g_i) {
            const auto& perm = a.perms[g_i];
            double s = 0.0;
            for (int i = b; i < e; ++i) {
                const double* v = dec->eigenvector(i);
                double dot = 0.0;
                for (int x = 0; x < n; ++x) dot += v[perm[x]] * v[x];
                s += dot;
            }
            t[g_i] = s;
        }
        int assigned = 0;
        for (std::size_t j = 0; j < a.irreps.size(); ++j) {
            double raw = 0.0;
            for (int g_i = 0; g_i < G; ++g_i) raw += a.irreps[j].chi[g_i] * t[g_i];
            raw *= static_cast<double>(a.irreps[j].dim) / G;
            const double rounded = std::round(raw);
            if (std::fabs(raw - rounded) > 1e-6)
                throw NonIntegerTrace("isotypic_counts: non-integer projector trace " +
                                      std::to_string(raw) + " for block " + a.irreps[j].name);
            out.mult[j].push_back(static_cast<int>(rounded));
            assigned += static_cast<int>(rounded);
        }
        if (assigned != e - b)
            throw NonIntegerTrace("isotypic_counts: cluster multiplicities do not sum to its size");
        out.levels.push_back(dec->eigenvalues[b]);
        out.level_mult.push_back(e - b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fundamental domains and the boundary bound

struct FundamentalDomain {
    std::vector<int> F;
    std::vector<int> boundary; // derived; fill via make_fundamental_domain
};

// Boundary of F: vertices of F lying in some non-identity translate of F,
// or adjacent to a vertex of one.
inline std::vector<int> domain_boundary(const WeightedGraph& g, const GroupAction& a,
                                        std::span<const int> F) {
    std::vector<char> in_f(g.n, 0), in_gf(g.n, 0);
    for (int v : F) {
        if (v < 0 || v >= g.n) throw std::invalid_argument("domain_boundary: vertex out of range");
        in_f[v] = 1;
    }
    for (int gi = 1; gi < a.order(); ++gi)
        for (int v : F) in_gf[a.perms[gi][v]] = 1;
    const auto adj = g.adjacency();
    std::vector<int> bd;
    for (int x : F) {
        bool is_bd = in_gf[x] != 0;
        if (!is_bd)
            for (int y : adj[x])
                if (!in_f[y] || in_gf[y]) {
                    is_bd = true;
                    break;
                }
        if (is_bd) bd.push_back(x);
    }
    std::sort(bd.begin(), bd.end());
    bd.erase(std::unique(bd.begin(), bd.end()), bd.end());
    return bd;
}

inline void check_domain_covers(const WeightedGraph& g, const GroupAction& a,
                                std::span<const int> F) {
    std::vector<char> covered(g.n, 0);
    for (int gi = 0; gi < a.order(); ++gi)
        for (int v : F) covered[a.perms[gi][v]] = 1;
    for (int v = 0; v < g.n; ++v)
        if (!covered[v])
            throw std::invalid_argument("fundamental domain translates do not cover the graph");
}

inline FundamentalDomain make_fundamental_domain(const WeightedGraph& g, const GroupAction& a,
                                                 std::vector<int> F) {
    check_domain_covers(g, a, F);
    FundamentalDomain fd;
    fd.boundary = domain_boundary(g, a, F);
    fd.F = std::move(F);
    return fd;
}

struct Lemma51Report {
    int boundary_size = 0;
    int group_order = 0;
    struct PerIrrep {
        std::string name;
        int dsq;
        double max_dev;
        double bound;
    };
    std::vector<PerIrrep> irreps;
    double min_slack = 0.0; // min over grid and irreps of bound - |deviation|
    double worst_lambda = 0.0;
    std::string worst_irrep;
    std::size_t checked = 0;
};

// Checks |N_j(lambda) - (dsq_j / #G) N(lambda)| <= dsq_j * #boundary(F)
// across the grid. The boundary is recomputed from its definition.
inline Lemma51Report lemma51_check(const WeightedGraph& g, const GroupAction& a,
                                   const FundamentalDomain& fd, std::span<const double> grid,
                                   const IsotypicCount* precounted = nullptr) {
    check_domain_covers(g, a, fd.F);
    const auto bd = domain_boundary(g, a, fd.F);
    IsotypicCount local;
    const IsotypicCount* counts = precounted;
    if (!counts) {
        local = isotypic_counts(g, a);
        counts = &local;
    }
    Lemma51Report rep;
    rep.boundary_size = static_cast<int>(bd.size());
    rep.group_order = a.order();
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < counts->irrep_dsq.size(); ++j) {
        rep.irreps.push_back({counts->irrep_names[j], counts->irrep_dsq[j], 0.0,
                              static_cast<double>(counts->irrep_dsq[j]) * rep.boundary_size});
    }
    for (double lambda : grid) {
        const int N = counts->count_total(lambda);
        for (std::size_t j = 0; j < rep.irreps.size(); ++j) {
            const double dev = std::fabs(counts->count_irrep(static_cast<int>(j), lambda) -
                                         static_cast<double>(rep.irreps[j].dsq) * N / a.order());
            rep.irreps[j].max_dev = std::max(rep.irreps[j].max_dev, dev);
            const double slack = rep.irreps[j].bound - dev;
            ++rep.checked;
            if (slack < rep.min_slack) {
                rep.min_slack = slack;
                rep.worst_lambda = lambda;
                rep.worst_irrep = rep.irreps[j].name;
            }
            if (dev > rep.irreps[j].bound + 1e-9)
                throw BoundViolated("lemma51_check: deviation " + std::to_string(dev) +
                                    " exceeds bound for block " + rep.irreps[j].name +
                                    " at lambda=" + std::to_string(lambda));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Torus with the full square symmetry (order-8 dihedral group)

struct TorusD4Report {
    static constexpr int kIrreps = 5;
    std::array<std::string, kIrreps> names{"trivial", "rotation_sign", "axis_sign", "diag_sign",
                                           "planar"};
    std::array<int, kIrreps> dims{1, 1, 1, 1, 2};
    std::vector<double> levels;                          // eigenvalues 4 pi^2 (k1^2+k2^2)
    std::vector<long long> total;                        // cumulative N at each level
    std::array<std::vector<long long>, kIrreps> counts;  // cumulative N_j
    std::vector<long long> boundary;                     // cumulative boundary lattice points
    double max_dev = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();
    double envelope_slope = 0.0;
    bool bound_ok = true;
};

namespace detail {

// The eight plane symmetries of the square lattice, acting on integer pairs.
inline std::array<std::pair<int, int>, 8> d4_images(int k1, int k2) {
    return {{{k1, k2},
             {-k2, k1},
             {-k1, -k2},
             {k2, -k1},
             {k1, -k2},
             {-k1, k2},
             {k2, k1},
             {-k2, -k1}}};
}

// Character rows in the element order of d4_images.
inline const std::array<std::array<double, 8>, 5>& d4_chars() {
    static const std::array<std::array<double, 8>, 5> chi = {{
        {1, 1, 1, 1, 1, 1, 1, 1},
        {1, 1, 1, 1, -1, -1, -1, -1},
        {1, -1, 1, -1, 1, 1, -1, -1},
        {1, -1, 1, -1, -1, -1, 1, 1},
        {2, 0, -2, 0, 0, 0, 0, 0},
    }};
    return chi;
}

} // namespace detail

// Enumerates plane-wave modes with eigenvalue 4 pi^2 |k|^2 <= lambda_max,
// splits every symmetry orbit by characters, and tracks the deviation of
// each N_j from its proportional share against the count of boundary lattice
// points of the sector {k1 >= k2 >= 0}.
inline TorusD4Report torus_d4_counts(double lambda_max) {
    const double T = lambda_max / (4.0 * M_PI * M_PI);
    if (T > 1e8) throw std::invalid_argument("torus_d4_counts: enumeration cap exceeded");
    const int kmax = static_cast<int>(std::floor(std::sqrt(std::max(0.0, T)) + 1e-9));

    // Canonical orbit representatives a >= b >= 0, grouped by |k|^2.
    std::map<long long, std::vector<std::pair<int, int>>> by_norm;
    for (int a = 0; a <= kmax; ++a)
        for (int b = 0; b <= a; ++b) {
            const long long norm = static_cast<long long>(a) * a + static_cast<long long>(b) * b;
            if (static_cast<double>(norm) <= T + 1e-9) by_norm[norm].push_back({a, b});
        }

    TorusD4Report rep;
    const auto& chi = detail::d4_chars();
    std::array<long long, TorusD4Report::kIrreps> cum{};
    long long cum_total = 0, cum_boundary = 0;
    std::vector<std::pair<double, double>> envelope; // (norm, running max dev)
    double run_max = 0.0;

    for (const auto& [norm, reps] : by_norm) {
        for (const auto& [a, b] : reps) {
            // Orbit members and per-element fixed-point counts.
            std::set<std::pair<int, int>> orbit;
            for (const auto& im : detail::d4_images(a, b)) orbit.insert(im);
            std::array<int, 8> fix{};
            for (const auto& pt : orbit) {
                const auto ims = detail::d4_images(pt.first, pt.second);
                for (int g = 0; g < 8; ++g)
                    if (ims[g] == pt) ++fix[g];
            }
            for (int j = 0; j < TorusD4Report::kIrreps; ++j) {
                double m = 0.0;
                for (int g = 0; g < 8; ++g) m += chi[j][g] * fix[g];
                m /= 8.0;
                const double rounded = std::round(m);
                if (std::fabs(m - rounded) > 1e-9)
                    throw NonIntegerTrace("torus_d4_counts: non-integer orbit multiplicity");
                cum[j] += rep.dims[j] * static_cast<long long>(rounded);
            }
            cum_total += static_cast<long long>(orbit.size());
            if (b == 0 || a == b) cum_boundary += 1; // sector boundary: k2 = 0 or k1 = k2 > 0 (origin included)
        }
        rep.levels.push_back(4.0 * M_PI * M_PI * static_cast<double>(norm));
        rep.total.push_back(cum_total);
        rep.boundary.push_back(cum_boundary);
        double level_dev = 0.0;
        for (int j = 0; j < TorusD4Report::kIrreps; ++j) {
            rep.counts[j].push_back(cum[j]);
            const double dev = std::fabs(static_cast<double>(cum[j]) -
                                         rep.dims[j] * rep.dims[j] * static_cast<double>(cum_total) / 8.0);
            level_dev = std::max(level_dev, dev);
            const double slack = static_cast<double>(cum_boundary) - dev;
            rep.min_slack = std::min(rep.min_slack, slack);
            if (dev > static_cast<double>(cum_boundary) + 1e-9) rep.bound_ok = false;
        }
        rep.max_dev = std::max(rep.max_dev, level_dev);
        if (level_dev > run_max && norm > 0) {
            run_max = level_dev;
            envelope.emplace_back(static_cast<double>(norm), level_dev);
        }
    }

    // Log-log slope of the deviation envelope (skipping the small-norm head).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long cnt = 0;
    for (const auto& [norm, dev] : envelope) {
        if (norm <= 10.0 || dev <= 0.0) continue;
        const double x = std::log(norm), y = std::log(dev);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) rep.envelope_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return rep;
}

// ---------------------------------------------------------------------------
// Square-lattice symmetry: Monte Carlo of the trivial-component mass

// Average over random generic frequency pairs (m1, m2) of the integral of
// the symmetrized plane-wave square over the sublevel region
// {4 sin^2(pi xi1) + 4 sin^2(pi xi2) <= lambda}. Converges to one eighth of
// the full lattice mass. The per-sample integral uses a midpoint grid fine
// enough to integrate the trigonometric polynomial exactly away from the
// region boundary.
inline MassEstimate lattice_d4_trivial_mass(double lambda, int m_samples, std::uint64_t seed) {
    if (!(lambda > 0.0) || lambda > 8.0)
        throw std::invalid_argument("lattice_d4_trivial_mass: 0 < lambda <= 8");
    if (m_samples < 1) throw std::invalid_argument("lattice_d4_trivial_mass: m_samples >= 1");
    SplitMix64 rng(seed);
    const int m_cap = 25;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < m_samples; ++s) {
        int m1 = 1 + static_cast<int>(rng.below(m_cap));
        int m2 = 1 + static_cast<int>(rng.below(m_cap));
        while (m1 == m2) m2 = 1 + static_cast<int>(rng.below(m_cap)); // generic orbits only
        const int grid = 16 * m_cap + 64;
        double acc = 0.0;
        for (int i = 0; i < grid; ++i) {
            const double x = (i + 0.5) / grid - 0.5;
            const double sx = 4.0 * std::pow(std::sin(M_PI * x), 2);
            if (sx > lambda) continue;
            const double c1x = std::cos(2.0 * M_PI * m1 * x), c2x = std::cos(2.0 * M_PI * m2 * x);
            for (int j = 0; j < grid; ++j) {
                const double y = (j + 0.5) / grid - 0.5;
                if (sx + 4.0 * std::pow(std::sin(M_PI * y), 2) > lambda) continue;
                const double c1y = std::cos(2.0 * M_PI * m1 * y), c2y = std::cos(2.0 * M_PI * m2 * y);
                const double f = 0.5 * (c1x * c2y + c2x * c1y);
                acc += f * f;
            }
        }
        const double integral = acc / (static_cast<double>(grid) * grid);
        sum += integral;
        sumsq += integral * integral;
    }
    const double mean = sum / m_samples;
    const double var = std::max(0.0, sumsq / m_samples - mean * mean);
    const double se = m_samples > 1 ? std::sqrt(var / (m_samples - 1.0)) : 0.0;
    return {mean, se};
}

} // namespace spectramass
