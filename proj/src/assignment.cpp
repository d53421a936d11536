#include "permot/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace permot::assign {

namespace {

void check_finite(const CostMatrix& cost) {
    for (double v : cost.c)
        if (!std::isfinite(v)) throw invalid_input("assignment: cost entries must be finite");
}

// Shortest-augmenting-path assignment with dual updates (Jonker-Volgenant
// flavour). Returns one optimal matching plus feasible duals.
void jv_solve(const CostMatrix& cost, std::vector<int>& row_of_col, std::vector<double>& u,
              std::vector<double>& v) {
    const int n = cost.n;
    u.assign(size_t(n) + 1, 0.0);
    v.assign(size_t(n) + 1, 0.0);
    // 1-based internal arrays, classic formulation
    std::vector<int> p(size_t(n) + 1, 0), way(size_t(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(size_t(n) + 1, kInf);
        std::vector<char> used(size_t(n) + 1, false);
        do {
            used[size_t(j0)] = true;
            int i0 = p[size_t(j0)], j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[size_t(j)]) continue;
                double cur = cost.at(i0 - 1, j - 1) - u[size_t(i0)] - v[size_t(j)];
                if (cur < minv[size_t(j)]) {
                    minv[size_t(j)] = cur;
                    way[size_t(j)] = j0;
                }
                if (minv[size_t(j)] < delta) {
                    delta = minv[size_t(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[size_t(j)]) {
                    u[size_t(p[size_t(j)])] += delta;
                    v[size_t(j)] -= delta;
                } else {
                    minv[size_t(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[size_t(j0)] != 0);
        do {
            int j1 = way[size_t(j0)];
            p[size_t(j0)] = p[size_t(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    row_of_col.assign(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j) row_of_col[size_t(j - 1)] = p[size_t(j)] - 1;
}

// Bipartite matching on a boolean adjacency via Kuhn's algorithm.
bool try_kuhn(int i, const std::vector<std::vector<int>>& adj, std::vector<char>& seen,
              std::vector<int>& match_col) {
    for (int j : adj[size_t(i)]) {
        if (seen[size_t(j)]) continue;
        seen[size_t(j)] = true;
        if (match_col[size_t(j)] < 0 ||
            try_kuhn(match_col[size_t(j)], adj, seen, match_col)) {
            match_col[size_t(j)] = i;
            return true;
        }
    }
    return false;
}

}  // namespace

AssignmentResult min_cost_assignment(const CostMatrix& cost) {
    check_finite(cost);
    const int n = cost.n;
    std::vector<int> row_of_col;
    std::vector<double> u1, v1;
    jv_solve(cost, row_of_col, u1, v1);

    // Duals in 0-based form.
    std::vector<double> u(u1.begin() + 1, u1.end());
    std::vector<double> v(v1.begin() + 1, v1.end());

    double scale = 1.0;
    for (double c : cost.c) scale = std::max(scale, std::fabs(c));
    const double tight_tol = 1e-9 * scale;

    // Dual feasibility + complementary slackness, certified on every solve.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double red = cost.at(i, j) - u[size_t(i)] - v[size_t(j)];
            if (red < -tight_tol)
                throw std::logic_error("assignment: dual feasibility violated");
        }
    for (int j = 0; j < n; ++j) {
        int i = row_of_col[size_t(j)];
        double red = cost.at(i, j) - u[size_t(i)] - v[size_t(j)];
        if (std::fabs(red) > tight_tol)
            throw std::logic_error("assignment: complementary slackness violated");
    }

    // Every optimal permutation lives on the tight edges; pick the
    // lexicographically smallest one greedily with a feasibility probe.
    std::vector<std::vector<int>> tight(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (cost.at(i, j) - u[size_t(i)] - v[size_t(j)] <= tight_tol)
                tight[size_t(i)].push_back(j);

    std::vector<int> sigma(static_cast<size_t>(n), -1);
    std::vector<char> col_used(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        bool fixed = false;
        for (int j : tight[size_t(i)]) {
            if (col_used[size_t(j)]) continue;
            // Probe: can rows i+1..n-1 still be matched on tight edges?
            std::vector<int> match_col(static_cast<size_t>(n), -1);
            for (int r = 0; r <= i; ++r) {
                int cjt = r < i ? sigma[size_t(r)] : j;
                match_col[size_t(cjt)] = r;
            }
            bool ok = true;
            for (int r = i + 1; r < n && ok; ++r) {
                std::vector<char> seen(static_cast<size_t>(n), false);
                for (int r2 = 0; r2 <= i; ++r2) seen[size_t(r2 < i ? sigma[size_t(r2)] : j)] = true;
                ok = try_kuhn(r, tight, seen, match_col);
            }
            if (ok) {
                sigma[size_t(i)] = j;
                col_used[size_t(j)] = true;
                fixed = true;
                break;
            }
        }
        if (!fixed) throw std::logic_error("assignment: tight subgraph lost a perfect matching");
    }

    AssignmentResult result;
    result.sigma = sigma;
    result.total = 0.0;
    for (int i = 0; i < n; ++i) result.total += cost.at(i, sigma[size_t(i)]);
    result.normalized = result.total / n;
    result.row_dual = std::move(u);
    result.col_dual = std::move(v);
    return result;
}

AssignmentResult min_cost_assignment_bruteforce(const CostMatrix& cost) {
    check_finite(cost);
    const int n = cost.n;
    if (n > 10) throw invalid_input("bruteforce assignment limited to N <= 10");
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_total = kInf;
    do {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += cost.at(i, perm[size_t(i)]);
        // strict improvement keeps the lexicographically first optimum,
        // since next_permutation iterates in lexicographic order
        if (total < best_total) {
            best_total = total;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    AssignmentResult result;
    result.sigma = best;
    result.total = best_total;
    result.normalized = best_total / n;
    return result;
}

KantorovichResult kantorovich_lp(const CostMatrix& cost) {
    check_finite(cost);
    const int n = cost.n;
    if (n > 12) throw invalid_input("kantorovich_lp limited to N <= 12");

    // Transportation simplex on the Birkhoff polytope with unit supplies and
    // demands (the 1/N scaling is applied at the end). Basis is a spanning
    // tree of 2n-1 cells; Bland's rule for anti-cycling.
    std::vector<double> flow(size_t(n) * size_t(n), 0.0);
    std::vector<char> basic(size_t(n) * size_t(n), false);
    auto id = [n](int i, int j) { return size_t(i) * size_t(n) + size_t(j); };

    // Northwest-corner start, padding degenerate cells into the basis.
    {
        std::vector<double> supply(static_cast<size_t>(n), 1.0), demand(static_cast<size_t>(n), 1.0);
        int i = 0, j = 0;
        while (i < n && j < n) {
            double q = std::min(supply[size_t(i)], demand[size_t(j)]);
            flow[id(i, j)] = q;
            basic[id(i, j)] = true;
            supply[size_t(i)] -= q;
            demand[size_t(j)] -= q;
            if (supply[size_t(i)] <= 1e-15 && i < n - 1) ++i;
            else ++j;
        }
    }

    const int max_iters = 20000;
    for (int iter = 0; iter < max_iters; ++iter) {
        // Duals from the basis tree: u_i + v_j = c_ij on basic cells.
        std::vector<double> u(static_cast<size_t>(n), kInf), v(static_cast<size_t>(n), kInf);
        u[0] = 0.0;
        for (bool progress = true; progress;) {
            progress = false;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (!basic[id(i, j)]) continue;
                    if (u[size_t(i)] != kInf && v[size_t(j)] == kInf) {
                        v[size_t(j)] = cost.at(i, j) - u[size_t(i)];
                        progress = true;
                    } else if (v[size_t(j)] != kInf && u[size_t(i)] == kInf) {
                        u[size_t(i)] = cost.at(i, j) - v[size_t(j)];
                        progress = true;
                    }
                }
        }

        // Entering cell: first with negative reduced cost (Bland).
        int ei = -1, ej = -1;
        double scale = 1.0;
        for (double c : cost.c) scale = std::max(scale, std::fabs(c));
        for (int i = 0; i < n && ei < 0; ++i)
            for (int j = 0; j < n; ++j) {
                if (basic[id(i, j)]) continue;
                if (cost.at(i, j) - u[size_t(i)] - v[size_t(j)] < -1e-11 * scale) {
                    ei = i;
                    ej = j;
                    break;
                }
            }
        if (ei < 0) break;  // optimal

        // Find the unique cycle in basis + entering cell via DFS on the
        // bipartite incidence structure, alternating rows and columns.
        std::vector<std::pair<int, int>> cycle;
        {
            std::vector<std::vector<int>> in_row(static_cast<size_t>(n)), in_col(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (basic[id(i, j)]) {
                        in_row[size_t(i)].push_back(j);
                        in_col[size_t(j)].push_back(i);
                    }
            // path of cells from (ei,ej) back to row ei, alternating col/row moves
            std::vector<std::pair<int, int>> path{{ei, ej}};
            std::function<bool(int, int, bool)> dfs = [&](int row, int col, bool move_in_col) {
                if (move_in_col) {
                    for (int i2 : in_col[size_t(col)]) {
                        if (i2 == row) continue;
                        path.emplace_back(i2, col);
                        if (i2 == ei) return true;  // cycle closed at entering row
                        if (dfs(i2, col, false)) return true;
                        path.pop_back();
                    }
                } else {
                    for (int j2 : in_row[size_t(row)]) {
                        if (j2 == col) continue;
                        path.emplace_back(row, j2);
                        if (dfs(row, j2, true)) return true;
                        path.pop_back();
                    }
                }
                return false;
            };
            if (!dfs(ei, ej, true))
                throw std::logic_error("kantorovich_lp: basis cycle not found");
            cycle = std::move(path);
        }

        // Pivot: minus positions are the odd cycle entries.
        double theta = kInf;
        for (size_t t = 1; t < cycle.size(); t += 2)
            theta = std::min(theta, flow[id(cycle[t].first, cycle[t].second)]);
        for (size_t t = 0; t < cycle.size(); ++t) {
            auto [ci, cj] = cycle[t];
            flow[id(ci, cj)] += (t % 2 == 0) ? theta : -theta;
        }
        basic[id(ei, ej)] = true;
        // Leave exactly one zeroed minus cell to keep the tree size at 2n-1.
        bool left = false;
        for (size_t t = 1; t < cycle.size(); t += 2) {
            auto [ci, cj] = cycle[t];
            if (!left && flow[id(ci, cj)] <= 1e-12) {
                basic[id(ci, cj)] = false;
                flow[id(ci, cj)] = 0.0;
                left = true;
            }
        }
        if (!left) throw std::logic_error("kantorovich_lp: degenerate pivot with no leaving cell");
        if (iter == max_iters - 1) throw std::logic_error("kantorovich_lp: simplex did not converge");
    }

    KantorovichResult result;
    result.coupling.assign(size_t(n) * size_t(n), 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            result.coupling[id(i, j)] = flow[id(i, j)] / n;
            total += cost.at(i, j) * flow[id(i, j)];
        }
    result.value = total / n;
    return result;
}

double wasserstein1(const Configuration& a, const Configuration& b) {
    if (a.size() != b.size())
        throw invalid_input("wasserstein1: particle counts differ");
    const int n = a.size();
    CostMatrix cost = CostMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost.at(i, j) = dist(a.x[size_t(i)], b.x[size_t(j)]);
    return min_cost_assignment(cost).normalized;
}

double semidiscrete_cost(const Configuration& samples, const geometry::LatticeCloud& cloud,
                         const std::function<double(const Point&)>& weight) {
    const int n = cloud.size();
    if (samples.size() != n)
        throw invalid_input("semidiscrete_cost: sample count must equal cloud size");
    CostMatrix cost = CostMatrix::zeros(n);
    for (int i = 0; i < n; ++i) {
        double w = weight ? weight(samples.x[size_t(i)]) : 0.0;
        for (int j = 0; j < n; ++j)
            cost.at(i, j) = -dot(samples.x[size_t(i)], cloud.scaled(j)) + w;
    }
    return min_cost_assignment(cost).normalized;
}

}  // namespace permot::assign
