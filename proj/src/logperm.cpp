#include "permot/logperm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "permot/assignment.hpp"

namespace permot::perm {

namespace {

void check_square(const LogMatrix& a) {
    if (a.n < 1) throw invalid_input("LogMatrix: N must be >= 1");
    for (double v : a.a)
        if (!std::isfinite(v)) throw invalid_input("LogMatrix: entries must be finite");
}

// log of a positive __float128 without libquadmath: scale into double range.
double quad_log(__float128 v) {
    double shift = 0.0;
    const __float128 up = __float128(1e300), dn = __float128(1e-300);
    const double log_up = std::log(1e300);
    while (v > up) {
        v *= dn;
        shift += log_up;
    }
    while (v < dn && v > __float128(0)) {
        v *= up;
        shift -= log_up;
    }
    return shift + std::log(double(v));
}

template <typename Numeric>
double to_log(Numeric v) {
    if constexpr (sizeof(Numeric) > 8) return quad_log(v);
    else return std::log(double(v));
}

template <typename Numeric>
constexpr double numeric_eps() {
    return sizeof(Numeric) > 8 ? 2e-34 : 2.3e-16;
}

// One Ryser pass over scaled entries b (row maxima divided out, every entry in
// (0,1]). Numeric is the accumulator type: double first, __float128 when the
// double pass cannot certify rel_tol. Returns false when the cancellation
// certificate eps * abs_mass / result fails the tolerance.
template <typename Numeric>
bool ryser_pass(int n, const std::vector<double>& b, double rel_tol, double& log_result) {
    std::vector<Numeric> rowsum(static_cast<size_t>(n), Numeric(0));
    Numeric acc(0), abs_mass(0);
    const uint64_t count = 1ULL << n;
    uint64_t gray_prev = 0;
    for (uint64_t s = 1; s < count; ++s) {
        uint64_t gray = s ^ (s >> 1);
        uint64_t delta = gray ^ gray_prev;
        int col = std::countr_zero(delta);
        bool added = gray & delta;
        gray_prev = gray;
        if ((s & 0xffffULL) == 0xffffULL) {
            // periodic full refresh against incremental drift
            for (int i = 0; i < n; ++i) {
                Numeric rs(0);
                for (int j = 0; j < n; ++j)
                    if (gray >> j & 1) rs += Numeric(b[size_t(i) * size_t(n) + size_t(j)]);
                rowsum[size_t(i)] = rs;
            }
        } else {
            for (int i = 0; i < n; ++i) {
                Numeric e = Numeric(b[size_t(i) * size_t(n) + size_t(col)]);
                rowsum[size_t(i)] = added ? rowsum[size_t(i)] + e : rowsum[size_t(i)] - e;
            }
        }
        Numeric prod(1);
        for (int i = 0; i < n; ++i) prod *= rowsum[size_t(i)];
        if ((n - std::popcount(gray)) % 2 == 0) acc += prod;
        else acc -= prod;
        abs_mass += prod < Numeric(0) ? -prod : prod;
    }
    if (!(acc > Numeric(0))) return false;
    if (Numeric(numeric_eps<Numeric>()) * abs_mass > Numeric(0.25 * rel_tol) * acc) return false;
    log_result = to_log(acc);
    return true;
}

// Log-domain Sinkhorn balancing of a rows x cols block: returns log scalers
// (r, c) such that exp(a + r_i + c_j) has row sums ~1. Balancing leaves the
// permanent computable exactly (it is multilinear in rows and columns) and
// caps Ryser's inclusion-exclusion mass near the doubly-stochastic floor, so
// the cancellation certificates pass structurally.
void sinkhorn_log(int rows, int cols, const std::vector<double>& a, std::vector<double>& r,
                  std::vector<double>& c) {
    r.assign(static_cast<size_t>(rows), 0.0);
    c.assign(static_cast<size_t>(cols), 0.0);
    const double col_target = std::log(double(rows) / double(cols));
    for (int sweep = 0; sweep < 40; ++sweep) {
        double drift = 0.0;
        for (int i = 0; i < rows; ++i) {
            double lse = kNegInf;
            for (int j = 0; j < cols; ++j)
                lse = log_add(lse, a[size_t(i) * size_t(cols) + size_t(j)] + c[size_t(j)]);
            drift = std::max(drift, std::fabs(lse + r[size_t(i)]));
            r[size_t(i)] = -lse;
        }
        for (int j = 0; j < cols; ++j) {
            double lse = kNegInf;
            for (int i = 0; i < rows; ++i)
                lse = log_add(lse, a[size_t(i) * size_t(cols) + size_t(j)] + r[size_t(i)]);
            c[size_t(j)] = col_target - lse;
        }
        if (drift < 1e-8 && sweep > 2) break;
    }
}

// Signed log-domain pass for per-row spreads beyond the double exponent range;
// O(2^N N^2) log-adds, last resort.
double ryser_log_domain(int n, const std::vector<double>& log_b) {
    SignedLog acc = SignedLog::zero();
    double abs_mass = kNegInf;
    const uint64_t count = 1ULL << n;
    for (uint64_t gray = 1; gray < count; ++gray) {
        double log_term = 0.0;
        for (int i = 0; i < n; ++i) {
            double rs = kNegInf;
            for (int j = 0; j < n; ++j)
                if (gray >> j & 1) rs = log_add(rs, log_b[size_t(i) * size_t(n) + size_t(j)]);
            log_term += rs;
        }
        signed_accumulate(acc, (n - std::popcount(gray)) % 2 == 0 ? 1 : -1, log_term, abs_mass);
    }
    if (acc.sign <= 0 || abs_mass - acc.log_abs > std::log(1e13))
        throw precision_loss("log_permanent: signed log accumulation exhausted precision");
    return acc.log_abs;
}

// Shared minor sweep: for every subset S of the N columns, the product of the
// companion row sums over S contributes with sign (-1)^{(N-1)-|S|} to every
// minor m_j with j not in S.
template <typename Numeric>
bool minors_pass(int n, const std::vector<double>& b, double rel_tol,
                 std::vector<double>& log_minors) {
    const int rows = n - 1;
    std::vector<Numeric> rowsum(static_cast<size_t>(rows), Numeric(0));
    std::vector<Numeric> acc(static_cast<size_t>(n), Numeric(0));
    std::vector<Numeric> abs_mass(static_cast<size_t>(n), Numeric(0));
    const uint64_t count = 1ULL << n;
    uint64_t gray_prev = 0;
    for (uint64_t s = 1; s < count; ++s) {
        uint64_t gray = s ^ (s >> 1);
        uint64_t delta = gray ^ gray_prev;
        int col = std::countr_zero(delta);
        bool added = gray & delta;
        gray_prev = gray;
        if ((s & 0xffffULL) == 0xffffULL) {
            for (int r = 0; r < rows; ++r) {
                Numeric rs(0);
                for (int j = 0; j < n; ++j)
                    if (gray >> j & 1) rs += Numeric(b[size_t(r) * size_t(n) + size_t(j)]);
                rowsum[size_t(r)] = rs;
            }
        } else {
            for (int r = 0; r < rows; ++r) {
                Numeric e = Numeric(b[size_t(r) * size_t(n) + size_t(col)]);
                rowsum[size_t(r)] = added ? rowsum[size_t(r)] + e : rowsum[size_t(r)] - e;
            }
        }
        int bits = std::popcount(gray);
        if (bits > rows) continue;
        Numeric prod(1);
        for (int r = 0; r < rows; ++r) prod *= rowsum[size_t(r)];
        Numeric abs_prod = prod < Numeric(0) ? -prod : prod;
        bool positive = (rows - bits) % 2 == 0;
        for (int j = 0; j < n; ++j) {
            if (gray >> j & 1) continue;
            if (positive) acc[size_t(j)] += prod;
            else acc[size_t(j)] -= prod;
            abs_mass[size_t(j)] += abs_prod;
        }
    }
    log_minors.assign(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        if (!(acc[size_t(j)] > Numeric(0))) return false;
        if (Numeric(numeric_eps<Numeric>()) * abs_mass[size_t(j)] >
            Numeric(0.25 * rel_tol) * acc[size_t(j)])
            return false;
        log_minors[size_t(j)] = to_log(acc[size_t(j)]);
    }
    return true;
}

}  // namespace

void signed_accumulate(SignedLog& acc, int sign, double log_mag, double& log_abs_mass) {
    if (sign == 0 || log_mag == kNegInf) return;
    log_abs_mass = log_add(log_abs_mass, log_mag);
    if (acc.sign == 0) {
        acc.sign = sign;
        acc.log_abs = log_mag;
        return;
    }
    if (acc.sign == sign) {
        acc.log_abs = log_add(acc.log_abs, log_mag);
        return;
    }
    // opposite signs: |exp(u) - exp(v)|
    if (acc.log_abs == log_mag) {
        acc = SignedLog::zero();
        return;
    }
    double hi = std::max(acc.log_abs, log_mag);
    double lo = std::min(acc.log_abs, log_mag);
    int hi_sign = acc.log_abs > log_mag ? acc.sign : sign;
    double diff = -std::expm1(lo - hi);  // in (0,1]
    acc.sign = hi_sign;
    acc.log_abs = hi + std::log(diff);
}

LogMatrix LogMatrix::from_rows(int n, std::vector<double> entries) {
    if (static_cast<int>(entries.size()) != n * n)
        throw invalid_input("LogMatrix: wrong entry count");
    LogMatrix a;
    a.n = n;
    a.a = std::move(entries);
    a.refresh_row_max();
    check_square(a);
    return a;
}

void LogMatrix::refresh_row_max() {
    row_max.assign(static_cast<size_t>(n), kNegInf);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            row_max[size_t(i)] = std::max(row_max[size_t(i)], at(i, j));
}

LogMatrix kernel(const Configuration& conf, const geometry::LatticeCloud& cloud,
                 const CostFunctional& cost, double beta_star) {
    const int n = conf.size();
    if (n != cloud.size())
        throw invalid_input("kernel: configuration and cloud sizes differ");
    std::vector<double> entries(static_cast<size_t>(n) * size_t(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = cost ? -beta_star * cost(conf.x[size_t(i)], cloud.scaled(j))
                            : dot(conf.x[size_t(i)], cloud.points[size_t(j)]);
            entries[size_t(i) * size_t(n) + size_t(j)] = v;
        }
    return LogMatrix::from_rows(n, std::move(entries));
}

double log_permanent_exact(const LogMatrix& a) {
    check_square(a);
    const int n = a.n;
    if (n > 10) throw invalid_input("log_permanent_exact limited to N <= 10");
    double acc = kNegInf;
    std::vector<char> used(static_cast<size_t>(n), false);
    std::vector<double> partial(size_t(n) + 1, 0.0);
    std::vector<int> choice(static_cast<size_t>(n), -1);
    int depth = 0;
    while (depth >= 0) {
        if (depth == n) {
            acc = log_add(acc, partial[size_t(n)]);
            --depth;
            continue;
        }
        int j = choice[size_t(depth)] + 1;
        if (choice[size_t(depth)] >= 0) used[size_t(choice[size_t(depth)])] = false;
        while (j < n && used[size_t(j)]) ++j;
        if (j >= n) {
            choice[size_t(depth)] = -1;
            --depth;
            continue;
        }
        choice[size_t(depth)] = j;
        used[size_t(j)] = true;
        partial[size_t(depth) + 1] = partial[size_t(depth)] + a.at(depth, j);
        ++depth;
    }
    return acc;
}

double log_permanent(const LogMatrix& a, double rel_tol) {
    check_square(a);
    const int n = a.n;
    if (n > 25) throw invalid_input("log_permanent limited to N <= 25");
    if (n == 1) return a.at(0, 0);

    // Sinkhorn balancing first (exact via multilinearity), then a row-max
    // rescale so every entry lands in (0, 1].
    std::vector<double> r, c;
    sinkhorn_log(n, n, a.a, r, c);
    double shift = 0.0;
    for (double v : r) shift -= v;
    for (double v : c) shift -= v;
    std::vector<double> scaled(static_cast<size_t>(n) * size_t(n));
    bool huge_spread = false;
    for (int i = 0; i < n; ++i) {
        double row_peak = kNegInf;
        for (int j = 0; j < n; ++j)
            row_peak = std::max(row_peak, a.at(i, j) + r[size_t(i)] + c[size_t(j)]);
        shift += row_peak;
        for (int j = 0; j < n; ++j) {
            double e = a.at(i, j) + r[size_t(i)] + c[size_t(j)] - row_peak;
            if (e < -700.0) huge_spread = true;
            scaled[size_t(i) * size_t(n) + size_t(j)] = e;
        }
    }
    if (huge_spread) return shift + ryser_log_domain(n, scaled);

    std::vector<double> b = scaled;
    for (double& e : b) e = std::exp(e);
    double log_result = 0.0;
    if (ryser_pass<double>(n, b, rel_tol, log_result)) return shift + log_result;
    if (ryser_pass<__float128>(n, b, rel_tol, log_result)) return shift + log_result;
    // Inclusion-exclusion genuinely cannot certify rel_tol here. Small
    // instances still have the sign-free permutation expansion, which never
    // cancels; larger ones must report the loss instead of a value.
    if (n <= 10) return log_permanent_exact(a);
    throw precision_loss(
        "log_permanent: Ryser cancellation exceeds quad precision at the requested tolerance");
}

std::vector<SignedLog> row_minors(const LogMatrix& a, int row, double rel_tol) {
    check_square(a);
    const int n = a.n;
    if (n > 25) throw invalid_input("row_minors limited to N <= 25");
    if (n == 1) return {SignedLog::from_log(0.0)};  // empty permanent = 1

    std::vector<int> row_index;
    for (int i = 0; i < n; ++i)
        if (i != row) row_index.push_back(i);

    // balance the companion rectangle, then row-max rescale
    const int rows = n - 1;
    std::vector<double> companion(size_t(rows) * size_t(n));
    for (int r = 0; r < rows; ++r)
        for (int j = 0; j < n; ++j)
            companion[size_t(r) * size_t(n) + size_t(j)] = a.at(row_index[size_t(r)], j);
    std::vector<double> rs, cs;
    sinkhorn_log(rows, n, companion, rs, cs);
    double shift = 0.0;
    for (double v : rs) shift -= v;
    for (double v : cs) shift -= v;  // minor j adds back its own c_j below
    std::vector<double> b(size_t(rows) * size_t(n));
    for (int r = 0; r < rows; ++r) {
        double row_peak = kNegInf;
        for (int j = 0; j < n; ++j)
            row_peak = std::max(row_peak,
                                companion[size_t(r) * size_t(n) + size_t(j)] + rs[size_t(r)] +
                                    cs[size_t(j)]);
        shift += row_peak;
        for (int j = 0; j < n; ++j) {
            double e = companion[size_t(r) * size_t(n) + size_t(j)] + rs[size_t(r)] +
                       cs[size_t(j)] - row_peak;
            if (e < -700.0)
                throw precision_loss("row_minors: per-row spread beyond the fast paths");
            b[size_t(r) * size_t(n) + size_t(j)] = std::exp(e);
        }
    }

    std::vector<double> logs;
    if (!minors_pass<double>(n, b, rel_tol, logs) &&
        !minors_pass<__float128>(n, b, rel_tol, logs)) {
        if (n - 1 > 10) throw precision_loss("row_minors: cancellation exhausted precision");
        // sign-free expansion per minor
        std::vector<SignedLog> minors(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            std::vector<double> sub;
            sub.reserve(size_t(n - 1) * size_t(n - 1));
            for (int i = 0; i < n; ++i) {
                if (i == row) continue;
                for (int c = 0; c < n; ++c)
                    if (c != j) sub.push_back(a.at(i, c));
            }
            minors[size_t(j)] =
                SignedLog::from_log(log_permanent_exact(LogMatrix::from_rows(n - 1, std::move(sub))));
        }
        return minors;
    }
    std::vector<SignedLog> minors(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        minors[size_t(j)] = SignedLog::from_log(logs[size_t(j)] + shift + cs[size_t(j)]);
    return minors;
}

RowExpansion expand_row(const std::vector<double>& row_entries,
                        const std::vector<SignedLog>& minors) {
    const int n = static_cast<int>(row_entries.size());
    if (static_cast<int>(minors.size()) != n)
        throw invalid_input("expand_row: size mismatch");
    std::vector<double> terms(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        terms[size_t(j)] = row_entries[size_t(j)] + minors[size_t(j)].log_abs;
    double log_per = log_sum(terms);
    RowExpansion out;
    out.log_per = log_per;
    out.marginal_row.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) out.marginal_row[size_t(j)] = std::exp(terms[size_t(j)] - log_per);
    return out;
}

MarginalMatrix marginal_matrix(const LogMatrix& a) {
    check_square(a);
    const int n = a.n;
    if (n > 14) throw invalid_input("marginal_matrix limited to N <= 14");
    MarginalMatrix m;
    m.n = n;
    m.m.resize(static_cast<size_t>(n) * size_t(n));
    for (int i = 0; i < n; ++i) {
        auto minors = row_minors(a, i);
        std::vector<double> row(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) row[size_t(j)] = a.at(i, j);
        auto exp = expand_row(row, minors);
        for (int j = 0; j < n; ++j)
            m.m[size_t(i) * size_t(n) + size_t(j)] = exp.marginal_row[size_t(j)];
    }
    return m;
}

std::vector<Point> grad_log_permanent(const Configuration& conf,
                                      const geometry::LatticeCloud& cloud) {
    LogMatrix a = kernel(conf, cloud);
    MarginalMatrix m = marginal_matrix(a);
    std::vector<Point> grads;
    grads.reserve(static_cast<size_t>(a.n));
    for (int i = 0; i < a.n; ++i) {
        Point g = Point::zero(cloud.dim);
        for (int j = 0; j < a.n; ++j) g = g + m.at(i, j) * cloud.points[size_t(j)];
        grads.push_back(g);
    }
    return grads;
}

double hamiltonian(const Configuration& conf, const geometry::LatticeCloud& cloud,
                   const std::function<double(const Point&)>& weight) {
    double h = -log_permanent(kernel(conf, cloud)) / cloud.k;
    if (weight)
        for (const Point& x : conf.x) h += weight(x);
    return h;
}

SandwichBounds sandwich_bounds(const Configuration& conf, const geometry::LatticeCloud& cloud) {
    const int n = conf.size();
    assign::CostMatrix cost = assign::CostMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost.at(i, j) = -dot(conf.x[size_t(i)], cloud.points[size_t(j)]) / cloud.k;
    auto opt = assign::min_cost_assignment(cost);
    SandwichBounds sb;
    sb.upper = opt.total;  // = N * C_min
    sb.lower = opt.total - log_factorial(n) / cloud.k;
    sb.value = -log_permanent(kernel(conf, cloud)) / cloud.k;
    return sb;
}

std::vector<double> sample_first_marginal_row(const LogMatrix& a, int sweeps, int burn_in,
                                              Rng& rng) {
    check_square(a);
    const int n = a.n;
    // Start from the maximizing assignment so the chain opens in the bulk.
    assign::CostMatrix cost = assign::CostMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost.at(i, j) = -a.at(i, j);
    std::vector<int> sigma = assign::min_cost_assignment(cost).sigma;

    std::vector<double> freq(static_cast<size_t>(n), 0.0);
    long kept = 0;
    for (int sweep = 0; sweep < burn_in + sweeps; ++sweep) {
        for (int t = 0; t < n; ++t) {
            int i = rng.uniform_int(n);
            int j = rng.uniform_int(n);
            if (i == j) continue;
            double delta = a.at(i, sigma[size_t(j)]) + a.at(j, sigma[size_t(i)]) -
                           a.at(i, sigma[size_t(i)]) - a.at(j, sigma[size_t(j)]);
            if (delta >= 0.0 || std::log(rng.uniform()) < delta)
                std::swap(sigma[size_t(i)], sigma[size_t(j)]);
        }
        if (sweep >= burn_in) {
            freq[size_t(sigma[0])] += 1.0;
            ++kept;
        }
    }
    for (double& f : freq) f /= double(kept);
    return freq;
}

}  // namespace permot::perm
