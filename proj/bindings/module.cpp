#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "permot/assignment.hpp"
#include "permot/convexcalc.hpp"
#include "permot/geometry.hpp"
#include "permot/gibbs.hpp"
#include "permot/langevin.hpp"
#include "permot/logperm.hpp"
#include "permot/meanfield.hpp"
#include "permot/verify.hpp"

namespace py = pybind11;
using namespace permot;

namespace {

Point to_point(const std::vector<double>& coords) {
    Point p = Point::zero(static_cast<int>(coords.size()));
    for (size_t i = 0; i < coords.size(); ++i) p[int(i)] = coords[i];
    return p;
}

std::vector<double> from_point(const Point& p) {
    std::vector<double> out(static_cast<size_t>(p.dim));
    for (int i = 0; i < p.dim; ++i) out[size_t(i)] = p[i];
    return out;
}

Configuration to_configuration(const std::vector<std::vector<double>>& rows) {
    Configuration conf;
    if (rows.empty()) throw invalid_input("empty configuration");
    conf.dim = static_cast<int>(rows[0].size());
    for (const auto& row : rows) conf.x.push_back(to_point(row));
    return conf;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "permanental point processes, Monge-Ampere potentials and optimal transport";

    py::register_exception<invalid_input>(m, "InvalidInput");
    py::register_exception<precision_loss>(m, "PrecisionLoss");

    py::class_<geometry::ConvexBody>(m, "ConvexBody")
        .def_static("from_vertices",
                    [](int dim, const std::vector<std::vector<double>>& rows) {
                        std::vector<Point> verts;
                        for (const auto& r : rows) verts.push_back(to_point(r));
                        return geometry::ConvexBody::from_vertices(dim, std::move(verts));
                    })
        .def_static("interval", &geometry::ConvexBody::interval)
        .def_static("box", &geometry::ConvexBody::box)
        .def("support", [](const geometry::ConvexBody& b, const std::vector<double>& x) {
            return b.support(to_point(x));
        })
        .def("contains",
             [](const geometry::ConvexBody& b, const std::vector<double>& x, double tol) {
                 return b.contains(to_point(x), tol);
             },
             py::arg("x"), py::arg("tol") = 1e-12)
        .def_property_readonly("volume", &geometry::ConvexBody::volume)
        .def_property_readonly("dim", &geometry::ConvexBody::dim)
        .def_property_readonly("barycenter",
                               [](const geometry::ConvexBody& b) { return from_point(b.barycenter()); })
        .def_property_readonly("invariant_r", &geometry::ConvexBody::invariant_r);

    m.def("lattice_points",
          [](const geometry::ConvexBody& body, int k) {
              auto cloud = geometry::lattice_points(body, k);
              std::vector<std::vector<double>> rows;
              for (const auto& p : cloud.points) rows.push_back(from_point(p));
              return rows;
          },
          py::arg("body"), py::arg("k"));

    m.def("log_permanent",
          [](const std::vector<std::vector<double>>& rows, double rel_tol) {
              int n = static_cast<int>(rows.size());
              std::vector<double> entries;
              for (const auto& r : rows)
                  for (double v : r) entries.push_back(v);
              return perm::log_permanent(perm::LogMatrix::from_rows(n, std::move(entries)),
                                         rel_tol);
          },
          py::arg("log_entries"), py::arg("rel_tol") = 1e-9,
          "log of the permanent of exp(entries), stabilized in the log domain");

    m.def("marginal_matrix", [](const std::vector<std::vector<double>>& rows) {
        int n = static_cast<int>(rows.size());
        std::vector<double> entries;
        for (const auto& r : rows)
            for (double v : r) entries.push_back(v);
        auto mm = perm::marginal_matrix(perm::LogMatrix::from_rows(n, std::move(entries)));
        std::vector<std::vector<double>> out(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[size_t(i)].push_back(mm.at(i, j));
        return out;
    });

    m.def("min_cost_assignment", [](const std::vector<std::vector<double>>& rows) {
        int n = static_cast<int>(rows.size());
        assign::CostMatrix c = assign::CostMatrix::zeros(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c.at(i, j) = rows[size_t(i)][size_t(j)];
        auto r = assign::min_cost_assignment(c);
        return py::make_tuple(r.sigma, r.total, r.normalized);
    });

    m.def("wasserstein1",
          [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
              return assign::wasserstein1(to_configuration(a), to_configuration(b));
          });

    m.def("hamiltonian",
          [](const std::vector<std::vector<double>>& conf, const geometry::ConvexBody& body,
             int k, const std::function<double(double)>& weight) {
              auto cloud = geometry::lattice_points(body, k);
              std::function<double(const Point&)> w;
              if (weight) w = [weight](const Point& p) { return weight(p[0]); };
              return perm::hamiltonian(to_configuration(conf), cloud, w);
          },
          py::arg("configuration"), py::arg("body"), py::arg("k"),
          py::arg("weight") = nullptr);

    m.def("transport_map",
          [](const geometry::ConvexBody& body, int k, const std::vector<double>& queries,
             int samples, uint64_t seed) {
              auto bg = gibbs::WeightedMeasure::uniform_interval(0.0, 1.0);
              auto spec = gibbs::GibbsSpec::make(body, k, gibbs::BetaRule::EqualToK, 0.0, bg);
              std::vector<Point> q;
              for (double x : queries) q.emplace_back(x);
              gibbs::PhiZeroOptions opt;
              opt.sample_count = samples;
              opt.seed = seed;
              auto est = gibbs::estimate_transport_map(spec, q, opt);
              std::vector<std::pair<double, double>> out;
              for (const auto& e : est) out.emplace_back(e.value, e.stderr_jackknife);
              return out;
          },
          py::arg("body"), py::arg("k"), py::arg("queries"), py::arg("samples") = 200,
          py::arg("seed") = 1,
          "Monte-Carlo transport-map estimate for mu0 uniform on [0,1]");

    m.def("solve_ma_1d",
          [](double beta, const std::function<double(double)>& rho0,
             const std::function<double(double)>& phi0, const geometry::ConvexBody& body,
             double window_lo, double window_hi, int nodes, double tol) {
              meanfield::Ma1dProblem problem;
              problem.beta = beta;
              problem.rho0 = rho0;
              problem.phi0 = phi0;
              problem.support_lo = window_lo;
              problem.support_hi = window_hi;
              problem.body = body;
              problem.window = grid::Axis{window_lo, window_hi, nodes};
              problem.tol = tol;
              auto sol = meanfield::solve_ma_1d(problem);
              std::vector<double> xs;
              for (int i = 0; i < nodes; ++i) xs.push_back(problem.window.node(i));
              return py::make_tuple(xs, sol.phi.values, sol.residual);
          },
          py::arg("beta"), py::arg("rho0"), py::arg("phi0"), py::arg("body"),
          py::arg("window_lo"), py::arg("window_hi"), py::arg("nodes") = 801,
          py::arg("tol") = 1e-8);

    m.def("envelope_1d",
          [](const std::function<double(double)>& phi0, const geometry::ConvexBody& body,
             double window_lo, double window_hi, int nodes) {
              auto g = grid::GridFunction::sample1d(grid::Axis{window_lo, window_hi, nodes},
                                                    phi0);
              auto env = convexcalc::envelope(g, body);
              std::vector<double> xs;
              for (int i = 0; i < nodes; ++i) xs.push_back(env.ax.node(i));
              return py::make_tuple(xs, env.values);
          },
          py::arg("phi0"), py::arg("body"), py::arg("window_lo"), py::arg("window_hi"),
          py::arg("nodes") = 801);

    m.def("legendre_1d",
          [](const std::vector<double>& xs, const std::vector<double>& values, double p_lo,
             double p_hi, int p_nodes) {
              if (xs.size() != values.size() || xs.size() < 2)
                  throw invalid_input("legendre_1d: ragged input");
              grid::GridFunction g;
              g.dim = 1;
              g.ax = grid::Axis{xs.front(), xs.back(), static_cast<int>(xs.size())};
              g.values = values;
              auto dual = convexcalc::legendre1d(g, grid::Axis{p_lo, p_hi, p_nodes});
              std::vector<double> ps;
              for (int i = 0; i < p_nodes; ++i) ps.push_back(dual.ax.node(i));
              return py::make_tuple(ps, dual.values);
          });

    m.def("run_acceptance", [](const std::string& filter) {
        auto results = verify::run_suite(filter);
        py::list out;
        for (const auto& r : results)
            out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
    }, py::arg("filter") = "");
}
