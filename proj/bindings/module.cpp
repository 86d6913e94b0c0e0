#include "rsep/bundles.hpp"
#include "rsep/canonical.hpp"
#include "rsep/experiment.hpp"
#include "rsep/graph_io.hpp"
#include "rsep/partition.hpp"
#include "rsep/potential.hpp"
#include "rsep/rng.hpp"
#include "rsep/sep.hpp"
#include "rsep/simulate.hpp"
#include "rsep/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rsep;

namespace {

std::vector<std::uint8_t> config_bits(const Configuration& eta) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(eta.size()));
    for (int i = 0; i < eta.size(); ++i) out[static_cast<std::size_t>(i)] = eta.at(i) ? 1 : 0;
    return out;
}

Configuration config_from_bits(const std::vector<std::uint8_t>& bits) {
    Configuration eta(static_cast<int>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] != 0) eta.set(static_cast<int>(i), true);
    return eta;
}

BoundarySpec spec_from_dicts(const std::vector<VertexId>& vertices,
                             const std::vector<double>& lp, const std::vector<double>& lm) {
    BoundarySpec spec;
    spec.vertices = vertices;
    spec.lambda_plus = lp;
    spec.lambda_minus = lm;
    return spec;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "weighted-graph potential theory and exclusion-process dynamics";

    py::register_exception<Error>(m, "RsepError");

    py::class_<WeightedGraph>(m, "WeightedGraph")
        .def_static(
            "from_edges",
            [](const std::vector<std::tuple<VertexId, VertexId, double>>& edges) {
                std::vector<EdgeInput> in;
                for (const auto& [u, v, c] : edges) in.push_back({u, v, c});
                return WeightedGraph::from_edges(in);
            },
            py::arg("edges"))
        .def_property_readonly("num_vertices", &WeightedGraph::num_vertices)
        .def_property_readonly("num_edges", &WeightedGraph::num_edges)
        .def_property_readonly("vertex_ids", &WeightedGraph::vertex_ids)
        .def("index_of", &WeightedGraph::index_of)
        .def("id_of", &WeightedGraph::id_of)
        .def("weight", &WeightedGraph::weight)
        .def_property_readonly("total_volume", &WeightedGraph::total_volume)
        .def("edges",
             [](const WeightedGraph& g) {
                 std::vector<std::tuple<VertexId, VertexId, double>> out;
                 for (const auto& e : g.edges())
                     out.emplace_back(g.id_of(e.u), g.id_of(e.v), e.c);
                 return out;
             })
        .def("ball", &WeightedGraph::ball, py::arg("center"), py::arg("radius"))
        .def("induced_subgraph",
             [](const WeightedGraph& g, const std::vector<int>& idx) {
                 return g.induced_subgraph(idx);
             })
        .def("__repr__", [](const WeightedGraph& g) {
            return "<WeightedGraph |V|=" + std::to_string(g.num_vertices()) +
                   " |E|=" + std::to_string(g.num_edges()) + ">";
        });

    py::class_<BoundarySpec>(m, "BoundarySpec")
        .def(py::init(&spec_from_dicts), py::arg("vertices"), py::arg("lambda_plus"),
             py::arg("lambda_minus"))
        .def_readonly("vertices", &BoundarySpec::vertices)
        .def_readonly("lambda_plus", &BoundarySpec::lambda_plus)
        .def_readonly("lambda_minus", &BoundarySpec::lambda_minus)
        .def_property_readonly("gamma", &BoundarySpec::gamma)
        .def_property_readonly("delta", &BoundarySpec::delta);

    // generators
    m.def(
        "generate",
        [](const std::string& family, int size, int dim) {
            auto gg = generate_family(family, size, dim);
            return py::make_tuple(gg.graph, gg.analytic_boundary, gg.default_origin);
        },
        py::arg("family"), py::arg("size"), py::arg("dim") = 2,
        "returns (graph, analytic_boundary, default_origin)");

    m.def("graph_to_json",
          [](const WeightedGraph& g, const std::optional<BoundarySpec>& spec) {
              return graph_to_json(g, spec ? &*spec : nullptr);
          },
          py::arg("graph"), py::arg("boundary") = std::nullopt);
    m.def("graph_from_json", [](const std::string& text) {
        auto doc = graph_from_json(text);
        return py::make_tuple(doc.graph, doc.boundary);
    });

    // potential theory
    m.def("dirichlet_energy",
          [](const WeightedGraph& g, const std::vector<double>& f) {
              return dirichlet_energy(g, f);
          });
    m.def(
        "solve_harmonic",
        [](const WeightedGraph& g, const std::vector<int>& boundary,
           const std::vector<double>& values, double tol) {
            auto h = solve_harmonic(g, boundary, values, tol);
            return py::make_tuple(h.values, h.residual);
        },
        py::arg("graph"), py::arg("boundary"), py::arg("values"),
        py::arg("tol") = kDefaultTol, "returns (values, residual)");
    m.def(
        "effective_resistance",
        [](const WeightedGraph& g, VertexId x, VertexId y, double tol) {
            return effective_resistance(g, x, y, tol);
        },
        py::arg("graph"), py::arg("x"), py::arg("y"), py::arg("tol") = kDefaultTol);
    m.def(
        "effective_resistance_sets",
        [](const WeightedGraph& g, const std::vector<int>& a, const std::vector<int>& b,
           double tol) { return effective_resistance(g, a, b, tol); },
        py::arg("graph"), py::arg("set_a"), py::arg("set_b"), py::arg("tol") = kDefaultTol);
    m.def("green_function", [](const WeightedGraph& g, const std::vector<int>& a_set) {
        return green_function(g, a_set);
    });
    m.def(
        "exit_times",
        [](const WeightedGraph& g, const std::vector<int>& a_set, double tol) {
            return exit_times(g, a_set, tol);
        },
        py::arg("graph"), py::arg("a_set"), py::arg("tol") = kDefaultTol);
    m.def(
        "mean_exit_time",
        [](const WeightedGraph& g, VertexId x, const std::vector<int>& a_set, double tol) {
            return mean_exit_time(g, x, a_set, tol);
        },
        py::arg("graph"), py::arg("x"), py::arg("a_set"), py::arg("tol") = kDefaultTol);
    m.def(
        "hitting_time",
        [](const WeightedGraph& g, VertexId x, const std::vector<int>& target, double tol) {
            return hitting_time(g, x, target, tol);
        },
        py::arg("graph"), py::arg("x"), py::arg("target"), py::arg("tol") = kDefaultTol);
    m.def(
        "commute_time",
        [](const WeightedGraph& g, VertexId y, VertexId z, double tol) {
            auto ct = commute_time(g, y, z, tol);
            return py::make_tuple(ct.hitting_sum, ct.identity);
        },
        py::arg("graph"), py::arg("y"), py::arg("z"), py::arg("tol") = kDefaultTol,
        "returns (hitting_sum, volume * R_eff)");
    m.def("flow", [](const WeightedGraph& g, const std::vector<double>& h, VertexId a) {
        return flow(g, h, a);
    });
    m.def(
        "trace_network",
        [](const WeightedGraph& g, const std::vector<int>& boundary, double tol) {
            auto tn = trace_network(g, boundary, tol);
            return py::make_tuple(tn.boundary, tn.chat, tn.kernel());
        },
        py::arg("graph"), py::arg("boundary"), py::arg("tol") = kDefaultTol,
        "returns (boundary_indices, chat, kernel)");
    m.def(
        "stationary_marginal",
        [](const WeightedGraph& g, const BoundarySpec& spec, double tol) {
            auto prof = stationary_marginal(g, spec, tol);
            py::dict out;
            out["rho"] = prof.rho;
            out["flows"] = prof.flows;
            out["energy"] = prof.energy;
            out["route_gap"] = prof.route_gap;
            out["box"] = py::make_tuple(prof.lower_bound, prof.upper_bound);
            return out;
        },
        py::arg("graph"), py::arg("spec"), py::arg("tol") = 1e-8);
    m.def(
        "scaling_report",
        [](const WeightedGraph& g, VertexId origin, const std::vector<int>& radii,
           const std::string& volume_mode, const std::string& exit_mode, double epsilon,
           int pairs, std::uint64_t seed) {
            auto ex = exhaust(g, origin, radii);
            ScalingOptions opts;
            opts.volume_mode =
                volume_mode == "count" ? VolumeMode::Count : VolumeMode::Measure;
            opts.exit_mode = exit_mode == "origin" ? ExitMode::OriginOnly
                                                   : ExitMode::MaxOverBall;
            opts.epsilon = epsilon;
            opts.random_pairs = pairs;
            opts.seed = seed;
            auto rep = scaling_report(g, ex, opts);
            py::list levels;
            for (const auto& row : rep.levels) {
                py::dict jr;
                jr["level"] = row.level;
                jr["radius"] = row.radius;
                jr["volume"] = row.volume;
                jr["exit_time"] = row.exit_time;
                jr["ratio"] = row.ratio;
                jr["probe_min"] = row.probe_min;
                jr["einstein"] = row.einstein;
                jr["sr_ratio"] = row.sr_ratio;
                levels.append(jr);
            }
            py::dict out;
            out["levels"] = levels;
            out["alpha_hat"] = rep.alpha_hat;
            out["beta_hat"] = rep.beta_hat;
            out["alpha_residual"] = rep.alpha_residual;
            out["beta_residual"] = rep.beta_residual;
            out["fit_levels_used"] = rep.fit_levels_used;
            return out;
        },
        py::arg("graph"), py::arg("origin"), py::arg("radii"),
        py::arg("volume_mode") = "measure", py::arg("exit_mode") = "max",
        py::arg("epsilon") = 0.5, py::arg("pairs") = 8, py::arg("seed") = 0);

    // exclusion process
    m.def(
        "active_rates",
        [](const WeightedGraph& g, const std::optional<BoundarySpec>& spec,
           const std::vector<std::uint8_t>& eta) {
            auto rates = active_rates(g, spec ? &*spec : nullptr, config_from_bits(eta));
            py::list out;
            for (const auto& t : rates) {
                py::dict jt;
                jt["kind"] = t.kind == Transition::Kind::Swap ? "swap" : "flip";
                jt["x"] = t.x;
                jt["y"] = t.y;
                jt["rate"] = t.rate;
                out.append(jt);
            }
            return out;
        },
        py::arg("graph"), py::arg("spec"), py::arg("eta"));
    m.def(
        "generator_matrix",
        [](const WeightedGraph& g, const std::optional<BoundarySpec>& spec,
           const std::string& part) {
            GeneratorPart p = part == "exchange" ? GeneratorPart::Exchange
                              : part == "boundary" ? GeneratorPart::Boundary
                                                   : GeneratorPart::Full;
            return Eigen::MatrixXd(generator_matrix(g, spec ? &*spec : nullptr, p));
        },
        py::arg("graph"), py::arg("spec") = std::nullopt, py::arg("part") = "full");
    m.def("hyperplane_states", &hyperplane_states);
    m.def(
        "stationary_distribution",
        [](const Eigen::MatrixXd& q) {
            auto st = stationary_distribution(Eigen::SparseMatrix<double>(q.sparseView()));
            return py::make_tuple(st.weights, st.residual);
        },
        "returns (weights, residual)");
    m.def("one_site_marginals", [](const std::vector<double>& w, int n) {
        return one_site_marginals(w, n);
    });
    m.def(
        "detailed_balance_residual",
        [](const WeightedGraph& g, const std::optional<BoundarySpec>& spec,
           const std::string& part, double alpha, const std::vector<double>& profile) {
            GeneratorPart p = part == "exchange" ? GeneratorPart::Exchange
                              : part == "boundary" ? GeneratorPart::Boundary
                                                   : GeneratorPart::Full;
            auto nu = profile.empty() ? MeasureSpec::product(alpha)
                                      : MeasureSpec::product_profile(profile);
            return detailed_balance_residual(g, spec ? &*spec : nullptr, p, nu);
        },
        py::arg("graph"), py::arg("spec") = std::nullopt, py::arg("part") = "exchange",
        py::arg("alpha") = 0.5, py::arg("profile") = std::vector<double>{});
    m.def(
        "radon_nikodym_swap",
        [](const std::vector<double>& profile, const std::vector<std::uint8_t>& eta, int x,
           int y) {
            return radon_nikodym_ratio(MeasureSpec::product_profile(profile),
                                       config_from_bits(eta), SwapMove{x, y});
        });
    m.def(
        "simulate",
        [](const WeightedGraph& g, const std::optional<BoundarySpec>& spec,
           const std::vector<std::uint8_t>& eta0, double time_scale, double horizon,
           std::uint64_t seed, std::uint64_t stream) {
            SimulateOptions opts;
            opts.time_scale = time_scale;
            opts.horizon = horizon;
            opts.seed = seed;
            opts.stream = stream;
            auto traj = simulate(g, spec ? &*spec : nullptr, config_from_bits(eta0), opts);
            py::list events;
            for (const auto& e : traj.events) {
                py::dict je;
                je["time"] = e.time;
                je["kind"] = e.kind == Transition::Kind::Swap ? "swap" : "flip";
                je["x"] = e.x;
                je["y"] = e.y;
                events.append(je);
            }
            py::dict out;
            out["events"] = events;
            out["final"] = config_bits(traj.final_state);
            out["rng"] = traj.rng_algorithm;
            return out;
        },
        py::arg("graph"), py::arg("spec"), py::arg("eta0"), py::arg("time_scale") = 1.0,
        py::arg("horizon") = 1.0, py::arg("seed") = 0, py::arg("stream") = 0);
    m.def(
        "transient_distribution",
        [](const Eigen::MatrixXd& q, const std::vector<double>& mu0, double t) {
            return transient_distribution(Eigen::SparseMatrix<double>(q.sparseView()), mu0, t);
        });

    // ergodicity machinery
    m.def("bundle_names", &bundle_names);
    m.def(
        "global_average",
        [](const WeightedGraph& g, const std::string& bundle, int anchor, double alpha) {
            GlobalAverage phi(g, make_bundle(bundle), anchor);
            return phi(alpha);
        },
        py::arg("graph"), py::arg("bundle"), py::arg("anchor"), py::arg("alpha"));
    m.def(
        "u_fields",
        [](const WeightedGraph& g, const std::string& bundle, int anchor,
           const std::vector<int>& block, const std::vector<int>& ball,
           const std::vector<std::uint8_t>& eta) {
            UFieldContext ctx(g, make_bundle(bundle), anchor, block, ball);
            auto u = evaluate_u(ctx, config_from_bits(eta));
            return py::make_tuple(u.u_ne, u.u_one, u.u_two);
        },
        "returns (U_N_eps, U1, U2)");
    m.def(
        "build_partition",
        [](const WeightedGraph& g, VertexId p, int block_radius, int ball_radius) {
            auto part = build_partition(g, p, block_radius, ball_radius);
            py::dict out;
            out["reference_block"] = part.reference_block;
            out["blocks"] = part.blocks;
            out["tail"] = part.tail;
            out["ball"] = part.ball;
            out["bridges"] = part.bridges;
            return out;
        });
    m.def("averaging_residual",
          [](const std::vector<std::vector<int>>& blocks,
             const std::vector<std::vector<int>>& tails, const std::vector<double>& values) {
              return averaging_residual(blocks, tails, values);
          });
    m.def(
        "canonical_expectation_pattern",
        [](int n, int k, int support_size, const std::function<double(std::uint32_t)>& obs) {
            return canonical_expectation_local(n, k, support_size, obs);
        });
    m.def("canonical_two_block_gap", &canonical_two_block_gap);
    m.def("two_block_bound", &two_block_bound);
    m.def(
        "verify_two_block_bound",
        [](const std::vector<int>& sizes) {
            py::list out;
            for (const auto& row : verify_two_block_bound(sizes)) {
                py::dict jr;
                jr["m"] = row.m;
                jr["sup_gap"] = row.sup_gap;
                jr["bound"] = row.bound;
                jr["enumeration_gap"] = row.enumeration_gap;
                jr["variance_gap"] = row.variance_gap;
                jr["bound_holds"] = row.bound_holds;
                out.append(jr);
            }
            return out;
        });
    m.def(
        "equivalence_of_ensembles",
        [](const WeightedGraph& g, const std::string& bundle, int anchor,
           const std::vector<int>& sizes) {
            py::list out;
            for (const auto& row :
                 equivalence_of_ensembles_table(g, make_bundle(bundle), anchor, sizes)) {
                py::dict jr;
                jr["size"] = row.set_size;
                jr["sup_gap"] = row.sup_gap;
                out.append(jr);
            }
            return out;
        });
    m.def(
        "mpl_min_eigenvalue",
        [](const WeightedGraph& g, VertexId x, VertexId y, double alpha) {
            return mpl_min_eigenvalue(g, x, y, alpha);
        },
        py::arg("graph"), py::arg("x"), py::arg("y"), py::arg("alpha"));
    m.def(
        "spectral_estimate",
        [](const WeightedGraph& g, const std::optional<BoundarySpec>& spec, double alpha,
           const std::vector<double>& profile, const Eigen::VectorXd& u, double kappa,
           double t_scale, double v_scale) {
            auto nu = profile.empty() ? MeasureSpec::product(alpha)
                                      : MeasureSpec::product_profile(profile);
            auto res = spectral_estimate(g, spec ? &*spec : nullptr, nu, u, kappa, t_scale,
                                         v_scale);
            return py::make_tuple(res.lambda_max, res.normalized);
        },
        py::arg("graph"), py::arg("spec"), py::arg("alpha"), py::arg("profile"),
        py::arg("u_diag"), py::arg("kappa"), py::arg("t_scale"), py::arg("v_scale"));
    m.def(
        "u_one_state_table",
        [](const WeightedGraph& g, const std::string& bundle, int anchor,
           const std::vector<int>& block) {
            return u_one_state_table(g, make_bundle(bundle), anchor, block);
        });
    m.def(
        "verify_boundary_lemmas",
        [](const WeightedGraph& g, const BoundarySpec& spec, int samples,
           std::uint64_t seed) {
            auto rep = verify_boundary_lemmas(g, spec, samples, seed);
            py::dict out;
            out["sup_lhs"] = rep.sup_lhs;
            out["sup_rhs"] = rep.sup_rhs;
            out["sup_holds"] = rep.sup_holds;
            out["asymm_holds"] = rep.asymm_holds;
            out["exchange_holds"] = rep.exchange_holds;
            out["mpl_holds"] = rep.mpl_holds;
            out["box_holds"] = rep.box_holds;
            out["all_hold"] = rep.all_hold();
            return out;
        },
        py::arg("graph"), py::arg("spec"), py::arg("samples") = 128, py::arg("seed") = 0);
    m.def(
        "run_experiment",
        [](const WeightedGraph& g, const std::optional<BoundarySpec>& spec, VertexId origin,
           const py::dict& kwargs) {
            ExperimentConfig cfg;
            if (kwargs.contains("radii")) cfg.radii = kwargs["radii"].cast<std::vector<int>>();
            if (kwargs.contains("levels"))
                cfg.levels = kwargs["levels"].cast<std::vector<int>>();
            if (kwargs.contains("epsilons"))
                cfg.epsilons = kwargs["epsilons"].cast<std::vector<double>>();
            if (kwargs.contains("block_radius"))
                cfg.block_radius = kwargs["block_radius"].cast<int>();
            if (kwargs.contains("bundle")) cfg.bundle = kwargs["bundle"].cast<std::string>();
            if (kwargs.contains("delta")) cfg.delta = kwargs["delta"].cast<double>();
            if (kwargs.contains("horizon")) cfg.horizon = kwargs["horizon"].cast<double>();
            if (kwargs.contains("alpha")) cfg.alpha = kwargs["alpha"].cast<double>();
            if (kwargs.contains("boundary_driven"))
                cfg.boundary_driven = kwargs["boundary_driven"].cast<bool>();
            if (kwargs.contains("initial")) cfg.initial = kwargs["initial"].cast<std::string>();
            if (kwargs.contains("trajectories"))
                cfg.trajectories = kwargs["trajectories"].cast<int>();
            if (kwargs.contains("seed")) cfg.seed = kwargs["seed"].cast<std::uint64_t>();
            if (kwargs.contains("threads")) cfg.threads = kwargs["threads"].cast<int>();
            if (kwargs.contains("volume_mode"))
                cfg.volume_mode = kwargs["volume_mode"].cast<std::string>() == "count"
                                      ? VolumeMode::Count
                                      : VolumeMode::Measure;
            auto rep = run_experiment(g, spec ? &*spec : nullptr, origin, cfg);
            py::list cells;
            for (const auto& cell : rep.cells) {
                py::dict jc;
                jc["level"] = cell.level;
                jc["epsilon"] = cell.epsilon;
                jc["probe"] = cell.probe;
                jc["exceed"] = cell.exceed;
                jc["trials"] = cell.trials;
                jc["p_hat"] = cell.p_hat;
                jc["cp_upper"] = cell.cp_upper;
                jc["decay_stat"] = cell.decay_stat;
                cells.append(jc);
            }
            py::list boundary;
            for (const auto& bc : rep.boundary) {
                py::dict jb;
                jb["level"] = bc.level;
                jb["vertex"] = bc.vertex;
                jb["target"] = bc.target;
                jb["mean"] = bc.mean;
                jb["std_error"] = bc.std_error;
                boundary.append(jb);
            }
            py::dict out;
            out["cells"] = cells;
            out["boundary"] = boundary;
            out["mass_scale"] = rep.mass_scale;
            out["time_scale"] = rep.time_scale;
            return out;
        },
        py::arg("graph"), py::arg("spec"), py::arg("origin"), py::arg("config"));

#ifdef RSEP_VERSION
    m.attr("__version__") = RSEP_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
