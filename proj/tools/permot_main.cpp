// permot: permanental point processes, Monge-Ampere potentials and optimal
// transport at desk scale. Subcommands mirror the library modules; every run
// that writes files also writes a manifest with the resolved configuration
// and output digests.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "permot/assignment.hpp"
#include "permot/convexcalc.hpp"
#include "permot/expr.hpp"
#include "permot/geometry.hpp"
#include "permot/gibbs.hpp"
#include "permot/io.hpp"
#include "permot/langevin.hpp"
#include "permot/meanfield.hpp"
#include "permot/verify.hpp"

using namespace permot;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOptions {
    uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
    std::string tolerance_profile = "default";
};

struct Manifest {
    std::string command;
    json config;
    GlobalOptions global;
    std::vector<std::string> outputs;

    void write() const {
        json m;
        m["command"] = command;
        m["config"] = config;
        m["seed"] = global.seed;
        m["threads"] = global.threads;
        m["tolerance_profile"] = global.tolerance_profile;
        m["artifact_version"] = kVersion;
        json digests = json::object();
        for (const auto& path : outputs) {
            char buf[20];
            std::snprintf(buf, sizeof buf, "%016llx",
                          static_cast<unsigned long long>(io::fnv1a64_file(path)));
            digests[std::filesystem::path(path).filename().string()] = buf;
        }
        m["output_digests"] = digests;
        std::ofstream out(global.out_dir + "/manifest.json");
        out << m.dump(2) << "\n";
    }
};

std::string out_path(const GlobalOptions& global, const std::string& name) {
    std::filesystem::create_directories(global.out_dir);
    return global.out_dir + "/" + name;
}

// Run spec file: body (inline json or file), k, beta rule, weight and density
// expressions, support window.
struct RunSpec {
    gibbs::GibbsSpec spec;
    json raw;
};

RunSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open spec file: " + path);
    json j = json::parse(in);
    geometry::ConvexBody body;
    if (j.contains("body_file"))
        body = geometry::body_from_json_file(j["body_file"].get<std::string>());
    else
        body = geometry::body_from_json_text(j.at("body").dump());
    int k = j.at("k").get<int>();
    std::string rule_name = j.value("beta_rule", "equal_k");
    gibbs::BetaRule rule =
        rule_name == "constant" ? gibbs::BetaRule::Constant : gibbs::BetaRule::EqualToK;
    double beta = j.value("beta", 1.0);

    auto support = j.at("support");
    double lo = support.at(0).get<double>(), hi = support.at(1).get<double>();
    Expr weight = Expr::parse(j.value("weight", "0"));
    Expr density = Expr::parse(j.value("density", "1"));
    double lip = j.value("weight_lipschitz", 0.0);
    auto bg = gibbs::WeightedMeasure::interval(
        lo, hi, [density](double x) { return density.eval1(x); },
        [weight](double x) { return weight.eval1(x); }, lip);
    RunSpec rs{gibbs::GibbsSpec::make(std::move(body), k, rule, beta, std::move(bg)), j};
    return rs;
}

grid::GridFunction grid_from_csv(const std::string& path) {
    auto csv = io::read_csv(path);
    if (csv.header.size() != 2) throw invalid_input("expected a 2-column x,value csv");
    grid::GridFunction g;
    g.dim = 1;
    if (csv.rows.size() < 2) throw invalid_input("grid csv needs at least 2 rows");
    g.ax = grid::Axis{csv.rows.front()[0], csv.rows.back()[0],
                      static_cast<int>(csv.rows.size())};
    for (const auto& row : csv.rows) g.values.push_back(row[1]);
    return g;
}

int run_lattice(const GlobalOptions& global, const std::string& body_file, int k) {
    auto body = geometry::body_from_json_file(body_file);
    auto cloud = geometry::lattice_points(body, k);
    std::vector<std::string> header{"index"};
    for (int d = 0; d < cloud.dim; ++d) header.push_back("p_" + std::to_string(d + 1));
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < cloud.size(); ++j) {
        std::vector<double> row{double(j)};
        for (int d = 0; d < cloud.dim; ++d) row.push_back(cloud.points[size_t(j)][d]);
        rows.push_back(std::move(row));
    }
    std::string path = out_path(global, "lattice.csv");
    io::write_csv(path, header, rows);
    std::printf("N = %d lattice points of %dP written to %s\n", cloud.size(), k, path.c_str());
    Manifest m{"lattice", json{{"body", body_file}, {"k", k}}, global, {path}};
    m.write();
    return 0;
}

int run_envelope(const GlobalOptions& global, const std::string& body_file,
                 const std::string& weight_csv, const std::string& out_name) {
    auto body = geometry::body_from_json_file(body_file);
    auto phi0 = grid_from_csv(weight_csv);
    auto env = convexcalc::envelope(phi0, body);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < env.ax.count; ++i)
        rows.push_back({env.ax.node(i), env.values[size_t(i)]});
    std::string path = out_path(global, out_name);
    io::write_csv(path, {"x_1", "envelope"}, rows);
    Manifest m{"envelope", json{{"body", body_file}, {"weight", weight_csv}}, global, {path}};
    m.write();
    return 0;
}

int run_ma(const GlobalOptions& global, const std::string& potential_csv,
           const std::string& cells, const std::string& body_file) {
    auto phi = grid::ConvexGridFunction::certify(grid_from_csv(potential_csv));
    double lo, hi;
    int count;
    if (std::sscanf(cells.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 2)
        throw invalid_input("--cells expects lo:hi:count");
    std::vector<double> breaks;
    for (int i = 0; i < count; ++i) breaks.push_back(lo + (hi - lo) * i / (count - 1));
    geometry::ConvexBody body;
    const geometry::ConvexBody* clamp = nullptr;
    if (!body_file.empty()) {
        body = geometry::body_from_json_file(body_file);
        clamp = &body;
    }
    auto mu = convexcalc::ma_measure(phi, breaks, clamp);
    std::vector<std::vector<double>> rows;
    for (size_t c = 0; c < mu.mass.size(); ++c)
        rows.push_back({mu.support[c][0], mu.mass[c]});
    std::string path = out_path(global, "ma.csv");
    io::write_csv(path, {"cell_center", "ma_mass"}, rows);
    std::printf("total MA mass %.12g written to %s\n", mu.total(), path.c_str());
    Manifest m{"ma", json{{"potential", potential_csv}, {"cells", cells}}, global, {path}};
    m.write();
    return 0;
}

int run_permanent(const GlobalOptions& global, const std::string& kernel_csv) {
    auto csv = io::read_csv(kernel_csv);
    int n = static_cast<int>(csv.rows.size());
    std::vector<double> entries;
    for (const auto& row : csv.rows) {
        if (static_cast<int>(row.size()) != n)
            throw invalid_input("kernel csv must be square");
        for (double v : row) entries.push_back(v);
    }
    auto a = perm::LogMatrix::from_rows(n, std::move(entries));
    double rel_tol = global.tolerance_profile == "strict" ? 1e-12 : 1e-9;
    double lp = perm::log_permanent(a, rel_tol);
    std::printf("log_permanent = %.15g\n", lp);

    assign::CostMatrix cost = assign::CostMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost.at(i, j) = -a.at(i, j);
    auto opt = assign::min_cost_assignment(cost);
    double upper = opt.total;  // N C_min at k = 1
    std::printf("sandwich: %.15g <= %.15g <= %.15g\n", upper - log_factorial(n), -lp, upper);

    std::vector<std::string> header;
    for (int j = 0; j < n; ++j) header.push_back("M_" + std::to_string(j + 1));
    std::vector<std::vector<double>> rows;
    auto m = perm::marginal_matrix(a);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row;
        for (int j = 0; j < n; ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    std::string path = out_path(global, "marginal.csv");
    io::write_csv(path, header, rows);
    Manifest mf{"permanent", json{{"kernel", kernel_csv}}, global, {path}};
    mf.write();
    return 0;
}

int run_assign(const std::string& cost_csv) {
    auto csv = io::read_csv(cost_csv);
    int n = static_cast<int>(csv.rows.size());
    assign::CostMatrix cost = assign::CostMatrix::zeros(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost.at(i, j) = csv.rows[size_t(i)][size_t(j)];
    auto result = assign::min_cost_assignment(cost);
    std::printf("sigma =");
    for (int v : result.sigma) std::printf(" %d", v + 1);
    std::printf("\ntotal = %.15g\nC(sigma) = %.15g\n", result.total, result.normalized);
    return 0;
}

Configuration configuration_from_csv(const std::string& path) {
    auto csv = io::read_csv(path);
    Configuration conf;
    conf.dim = static_cast<int>(csv.header.size());
    for (const auto& row : csv.rows) {
        Point p = Point::zero(conf.dim);
        for (int d = 0; d < conf.dim; ++d) p[d] = row[size_t(d)];
        conf.x.push_back(p);
    }
    return conf;
}

int run_w1(const std::string& a_csv, const std::string& b_csv) {
    auto a = configuration_from_csv(a_csv);
    auto b = configuration_from_csv(b_csv);
    std::printf("w1 = %.15g\n", assign::wasserstein1(a, b));
    return 0;
}

int run_sample(const GlobalOptions& global, const std::string& spec_file, long steps,
               const std::string& out_name) {
    auto rs = load_spec(spec_file);
    gibbs::McmcOptions opt;
    opt.steps = steps;
    opt.burn_in = steps / 10;
    opt.thin = 10;
    opt.seed = global.seed;
    auto result = gibbs::mcmc_sample(rs.spec, opt);
    std::vector<std::string> header;
    int n = rs.spec.cloud.size();
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < rs.spec.background.dim(); ++d)
            header.push_back("x_" + std::to_string(i + 1) +
                             (rs.spec.background.dim() > 1 ? "_" + std::to_string(d + 1) : ""));
    std::vector<std::vector<double>> rows;
    for (const auto& conf : result.samples) {
        std::vector<double> row;
        for (const auto& p : conf.x)
            for (int d = 0; d < conf.dim; ++d) row.push_back(p[d]);
        rows.push_back(std::move(row));
    }
    std::string path = out_path(global, out_name);
    io::write_csv(path, header, rows);
    std::printf("%zu configurations written to %s (acceptance %.3f)\n", rows.size(),
                path.c_str(), result.acceptance_rate);
    Manifest m{"sample", rs.raw, global, {path}};
    m.config["steps"] = steps;
    m.write();
    return 0;
}

std::vector<Point> parse_queries(const std::string& text) {
    std::vector<Point> queries;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) queries.emplace_back(std::stod(cell));
    if (queries.empty()) throw invalid_input("--queries is empty");
    return queries;
}

int run_estimate_potential(const GlobalOptions& global, const std::string& spec_file,
                           const std::string& queries_text, int samples) {
    auto rs = load_spec(spec_file);
    auto queries = parse_queries(queries_text);
    std::vector<gibbs::Estimate> est;
    std::string column;
    if (rs.spec.rule == gibbs::BetaRule::Constant) {
        est = gibbs::estimate_phi_beta(rs.spec, queries, samples, global.seed);
        column = "phi_beta_N";
    } else {
        gibbs::PhiZeroOptions opt;
        opt.sample_count = samples;
        opt.seed = global.seed;
        est = gibbs::estimate_phi_zero(rs.spec, queries, opt);
        column = "phi_N";
    }
    std::vector<std::vector<double>> rows;
    io::Series series{"potential", {}, {}};
    for (size_t q = 0; q < queries.size(); ++q) {
        rows.push_back({queries[q][0], est[q].value, est[q].stderr_jackknife});
        series.x.push_back(queries[q][0]);
        series.y.push_back(est[q].value);
        if (est[q].low_ess)
            std::fprintf(stderr, "warning: low effective sample size at x = %g\n",
                         queries[q][0]);
    }
    std::string path = out_path(global, "potential.csv");
    io::write_csv(path, {"x", column, "stderr"}, rows);
    io::emit_plot_data(global.out_dir, series, "x", column);
    Manifest m{"estimate-potential", rs.raw, global,
               {path, global.out_dir + "/potential.dat"}};
    m.config["samples"] = samples;
    m.write();
    return 0;
}

int run_transport_map(const GlobalOptions& global, const std::string& spec_file,
                      const std::string& queries_text, int samples) {
    auto rs = load_spec(spec_file);
    auto queries = parse_queries(queries_text);
    gibbs::PhiZeroOptions opt;
    opt.sample_count = samples;
    opt.seed = global.seed;
    auto est = gibbs::estimate_transport_map(rs.spec, queries, opt);
    std::vector<std::vector<double>> rows;
    io::Series series{"transport_map", {}, {}};
    for (size_t q = 0; q < queries.size(); ++q) {
        rows.push_back({queries[q][0], est[q].value, est[q].stderr_jackknife});
        series.x.push_back(queries[q][0]);
        series.y.push_back(est[q].value);
    }
    std::string path = out_path(global, "transport_map.csv");
    io::write_csv(path, {"x", "T_N", "stderr"}, rows);
    io::emit_plot_data(global.out_dir, series, "x", "T_N");
    Manifest m{"transport-map", rs.raw, global, {path, global.out_dir + "/transport_map.dat"}};
    m.config["samples"] = samples;
    m.write();
    return 0;
}

int run_quenched(const GlobalOptions& global, const std::string& spec_file,
                 const std::string& queries_text, int outer, int inner,
                 const std::string& cost_name) {
    auto rs = load_spec(spec_file);
    auto queries = parse_queries(queries_text);
    double lo = -rs.spec.body.support(Point(-1.0));
    double hi = rs.spec.body.support(Point(1.0));
    auto nu = [lo, hi](Rng& r) { return Point(r.uniform(lo, hi)); };  // lambda_P
    perm::CostFunctional cost;
    if (cost_name == "quadratic")
        cost = [](const Point& x, const Point& p) {
            double d = x[0] - p[0];
            return d * d;
        };
    else
        cost = [](const Point& x, const Point& p) { return -dot(x, p); };
    gibbs::QuenchedOptions opt;
    opt.outer_reps = outer;
    opt.inner_samples = inner;
    opt.seed = global.seed;
    auto result = gibbs::quenched_estimate(rs.spec, nu, cost, double(rs.spec.k), queries, opt);
    std::vector<std::vector<double>> rows;
    for (size_t q = 0; q < queries.size(); ++q)
        rows.push_back({queries[q][0], result.potential[q].value,
                        result.potential[q].stderr_jackknife, result.map[q].value,
                        result.map[q].stderr_jackknife});
    std::string path = out_path(global, "quenched.csv");
    io::write_csv(path, {"x", "phi_N", "phi_stderr", "T_N", "T_stderr"}, rows);
    Manifest m{"quenched", rs.raw, global, {path}};
    m.config["outer"] = outer;
    m.config["inner"] = inner;
    m.config["cost"] = cost_name;
    m.write();
    return 0;
}

int run_balanced(const GlobalOptions& global, const std::string& space_file,
                 const std::string& body_file, int k, double beta_n, double beta) {
    std::ifstream in(space_file);
    if (!in) throw invalid_input("cannot open space file: " + space_file);
    json j = json::parse(in);
    meanfield::DiscreteSpace space;
    for (const auto& row : j.at("points")) space.points.emplace_back(row.get<double>());
    for (const auto& w : j.at("mu0")) space.mu0.push_back(w.get<double>());
    for (const auto& w : j.at("phi0")) space.phi0.push_back(w.get<double>());
    auto body = geometry::body_from_json_file(body_file);
    auto cloud = geometry::lattice_points(body, k);
    auto h = meanfield::permanental_hamiltonian(cloud);

    std::vector<std::vector<double>> rows;
    if (beta > 0.0) {
        auto state = meanfield::mean_field_fixed_point(space, h, cloud.size(), beta_n, beta);
        std::printf("mean-field fixed point: residual %.3e after %d iterations\n",
                    state.residual, state.iterations);
        for (int i = 0; i < space.size(); ++i)
            rows.push_back({space.points[size_t(i)][0], state.u[size_t(i)]});
    } else {
        auto state =
            meanfield::balanced_fixed_point(space, h, cloud.size(), beta_n, space.mu0);
        std::printf("balanced: residual %.3e after %d iterations\n", state.residual,
                    state.iterations);
        for (int i = 0; i < space.size(); ++i)
            rows.push_back({space.points[size_t(i)][0], state.u[size_t(i)]});
    }
    std::string path = out_path(global, "balanced.csv");
    io::write_csv(path, {"x", "u_N"}, rows);
    Manifest m{"balanced", json{{"space", space_file}, {"betaN", beta_n}, {"beta", beta}},
               global, {path}};
    m.write();
    return 0;
}

int run_solve_ma(const GlobalOptions& global, double beta, const std::string& density_expr,
                 const std::string& weight_expr, const std::string& body_file,
                 const std::string& window_text, const std::string& out_name) {
    meanfield::Ma1dProblem problem;
    problem.beta = beta;
    Expr density = Expr::parse(density_expr);
    Expr weight = Expr::parse(weight_expr);
    problem.rho0 = [density](double x) { return density.eval1(x); };
    problem.phi0 = [weight](double x) { return weight.eval1(x); };
    problem.body = geometry::body_from_json_file(body_file);
    double lo, hi;
    int count;
    if (std::sscanf(window_text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 3)
        throw invalid_input("--window expects lo:hi:count");
    problem.window = grid::Axis{lo, hi, count};
    problem.support_lo = lo;
    problem.support_hi = hi;
    auto sol = meanfield::solve_ma_1d(problem);
    std::printf("residual %.3e after %d Newton iterations\n", sol.residual,
                sol.newton_iterations);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < count; ++i)
        rows.push_back({problem.window.node(i), sol.phi.values[size_t(i)]});
    std::string path = out_path(global, out_name);
    io::write_csv(path, {"x", "phi_beta"}, rows);
    Manifest m{"solve-ma",
               json{{"beta", beta}, {"density", density_expr}, {"weight", weight_expr},
                    {"body", body_file}, {"window", window_text}},
               global, {path}};
    m.write();
    return 0;
}

int run_langevin(const GlobalOptions& global, const std::string& spec_file, double dt, double t,
                 const std::string& noise, const std::string& out_name) {
    auto rs = load_spec(spec_file);
    langevin::SdeParams params;
    params.spec = rs.spec;
    params.dt = dt;
    params.horizon = t;
    params.seed = global.seed;
    params.noise = noise == "double" ? langevin::SdeParams::Noise::DoubledVariance
                                     : langevin::SdeParams::Noise::DetailedBalance;
    auto traj = langevin::integrate(params);
    std::vector<std::string> header{"t"};
    for (int i = 0; i < rs.spec.cloud.size(); ++i) header.push_back("x_" + std::to_string(i + 1));
    std::vector<std::vector<double>> rows;
    for (size_t s = 0; s < traj.states.size(); ++s) {
        std::vector<double> row{traj.times[s]};
        for (const auto& p : traj.states[s].x) row.push_back(p[0]);
        rows.push_back(std::move(row));
    }
    std::string path = out_path(global, out_name);
    io::write_csv(path, header, rows);
    Manifest m{"langevin", rs.raw, global, {path}};
    m.config["dt"] = dt;
    m.config["T"] = t;
    m.config["noise"] = noise;
    m.write();
    return 0;
}

int run_verify(const std::string& suite) {
    auto results = verify::run_suite(suite == "all" ? "" : suite);
    if (results.empty()) {
        std::fprintf(stderr, "no criteria match '%s'\n", suite.c_str());
        return 2;
    }
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%-26s %s  (%.1fs)  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                    r.seconds, r.detail.c_str());
        if (!r.passed) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"permanental point processes, Monge-Ampere potentials and optimal transport"};
    app.require_subcommand(1);
    GlobalOptions global;
    app.add_option("--seed", global.seed, "master RNG seed");
    app.add_option("--threads", global.threads, "worker threads (modules are single-threaded)");
    app.add_option("--out-dir", global.out_dir, "output directory");
    app.add_option("--tolerance-profile", global.tolerance_profile, "strict or default")
        ->check(CLI::IsMember({"strict", "default"}));

    std::string body_file, weight_csv, potential_csv, cells, kernel_csv, cost_csv;
    std::string a_csv, b_csv, spec_file, queries = "0.25,0.5,0.75";
    std::string envelope_out = "envelope.csv", sample_out = "samples.csv";
    std::string phi_out = "phi.csv", traj_out = "trajectory.csv";
    std::string space_file, density_expr = "1", weight_expr = "0", window_text = "0:1:801";
    std::string suite = "all", cost_name = "dot", noise = "balanced";
    int k = 1, samples = 500, outer = 40, inner = 25;
    long steps = 100000;
    double beta_n = 4.0, beta = 0.0, dt = 1e-3, horizon = 1.0;

    auto* lattice = app.add_subcommand("lattice", "enumerate the lattice points of kP");
    lattice->add_option("--body", body_file)->required();
    lattice->add_option("--k", k)->required();

    auto* envelope = app.add_subcommand("envelope", "constrained convex envelope of a weight");
    envelope->add_option("--body", body_file)->required();
    envelope->add_option("--weight", weight_csv)->required();
    envelope->add_option("--out", envelope_out);

    auto* ma = app.add_subcommand("ma", "Alexandrov Monge-Ampere cell masses");
    ma->add_option("--potential", potential_csv)->required();
    ma->add_option("--cells", cells)->required();
    ma->add_option("--body", body_file);

    auto* permanent = app.add_subcommand("permanent", "log-permanent, marginals, sandwich");
    permanent->add_option("--kernel", kernel_csv)->required();

    auto* assign_cmd = app.add_subcommand("assign", "optimal assignment of a cost matrix");
    assign_cmd->add_option("--cost", cost_csv)->required();

    auto* w1 = app.add_subcommand("w1", "Wasserstein-1 between two point lists");
    w1->add_option("--a", a_csv)->required();
    w1->add_option("--b", b_csv)->required();

    auto* sample = app.add_subcommand("sample", "MCMC sample of the Gibbs ensemble");
    sample->add_option("--spec", spec_file)->required();
    sample->add_option("--steps", steps);
    sample->add_option("--out", sample_out);

    auto* estpot = app.add_subcommand("estimate-potential", "potential estimator");
    estpot->add_option("--spec", spec_file)->required();
    estpot->add_option("--queries", queries);
    estpot->add_option("--samples", samples);

    auto* tmap = app.add_subcommand("transport-map", "transport map estimator");
    tmap->add_option("--spec", spec_file)->required();
    tmap->add_option("--queries", queries);
    tmap->add_option("--samples", samples);

    auto* quenched = app.add_subcommand("quenched", "quenched random-allocation estimator");
    quenched->add_option("--spec", spec_file)->required();
    quenched->add_option("--queries", queries);
    quenched->add_option("--outer", outer);
    quenched->add_option("--inner", inner);
    quenched->add_option("--cost", cost_name)->check(CLI::IsMember({"dot", "quadratic"}));

    auto* balanced = app.add_subcommand("balanced", "balanced / mean-field fixed point");
    balanced->add_option("--space", space_file)->required();
    balanced->add_option("--body", body_file)->required();
    balanced->add_option("--k", k);
    balanced->add_option("--betaN", beta_n);
    balanced->add_option("--beta", beta);

    auto* solvema = app.add_subcommand("solve-ma", "deterministic 1d Monge-Ampere solver");
    solvema->add_option("--beta", beta);
    solvema->add_option("--density", density_expr);
    solvema->add_option("--weight", weight_expr);
    solvema->add_option("--body", body_file)->required();
    solvema->add_option("--window", window_text);
    solvema->add_option("--out", phi_out);

    auto* lange = app.add_subcommand("langevin", "Euler-Maruyama particle trajectories");
    lange->add_option("--spec", spec_file)->required();
    lange->add_option("--dt", dt);
    lange->add_option("--T", horizon);
    lange->add_option("--noise", noise)->check(CLI::IsMember({"balanced", "double"}));
    lange->add_option("--out", traj_out);

    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
    verify_cmd->add_option("--suite", suite);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (lattice->parsed()) return run_lattice(global, body_file, k);
        if (envelope->parsed()) return run_envelope(global, body_file, weight_csv, envelope_out);
        if (ma->parsed()) return run_ma(global, potential_csv, cells, body_file);
        if (permanent->parsed()) return run_permanent(global, kernel_csv);
        if (assign_cmd->parsed()) return run_assign(cost_csv);
        if (w1->parsed()) return run_w1(a_csv, b_csv);
        if (sample->parsed()) return run_sample(global, spec_file, steps, sample_out);
        if (estpot->parsed()) return run_estimate_potential(global, spec_file, queries, samples);
        if (tmap->parsed()) return run_transport_map(global, spec_file, queries, samples);
        if (quenched->parsed())
            return run_quenched(global, spec_file, queries, outer, inner, cost_name);
        if (balanced->parsed()) return run_balanced(global, space_file, body_file, k, beta_n, beta);
        if (solvema->parsed())
            return run_solve_ma(global, beta, density_expr, weight_expr, body_file, window_text,
                                phi_out);
        if (lange->parsed())
            return run_langevin(global, spec_file, dt, horizon, noise, traj_out);
        if (verify_cmd->parsed()) return run_verify(suite);
    } catch (const invalid_input& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 1;
    }
    return 2;
}
