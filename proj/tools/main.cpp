#include "rsep/bundles.hpp"
#include "rsep/canonical.hpp"
#include "rsep/experiment.hpp"
#include "rsep/graph_io.hpp"
#include "rsep/keyval.hpp"
#include "rsep/manifest.hpp"
#include "rsep/partition.hpp"
#include "rsep/potential.hpp"
#include "rsep/rng.hpp"
#include "rsep/sep.hpp"
#include "rsep/simulate.hpp"
#include "rsep/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>

using namespace rsep;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string g_command_line;

RunManifest make_manifest(std::uint64_t seed, const std::string& graph_hash,
                          std::map<std::string, double> tolerances,
                          std::vector<std::string> outputs) {
    RunManifest m;
    m.version = kVersion;
    m.command_line = g_command_line;
    m.seed = seed;
    m.graph_hash = graph_hash;
    m.tolerances = std::move(tolerances);
    m.outputs = std::move(outputs);
    return m;
}

void write_machine_output(const std::string& path, const RunManifest& manifest,
                          const json& result) {
    json doc;
    doc["schema"] = 1;
    doc["manifest"] = json::parse(manifest.to_json());
    doc["result"] = result;
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
}

void human_header(const std::string& what) {
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
    std::cout << "resistor-sep " << kVersion << " · " << what << " · " << buf << "Z\n";
}

std::vector<int> indices_of(const WeightedGraph& g, const std::vector<VertexId>& ids) {
    std::vector<int> out;
    out.reserve(ids.size());
    for (auto v : ids) out.push_back(g.index_of(v));
    return out;
}

std::vector<VertexId> parse_id_list(const std::string& text) {
    std::vector<VertexId> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoll(item));
    if (out.empty()) raise(Errc::ValidationError, "empty vertex list");
    return out;
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
    std::string family;
    int level = 0;
    int n = 0;
    int dim = 2;
    int side = 0;
    std::string out;
    std::vector<std::string> reservoirs; // "v:lp:lm"
    std::string boundary_rates;          // "lp:lm[;lp:lm...]" on the natural boundary
};

int cmd_generate(const GenerateArgs& args) {
    int size_arg = args.family == "path"          ? args.n
                   : args.family == "lattice_box" ? args.side
                                                  : args.level;
    auto generated = generate_family(args.family, size_arg, args.dim);
    const auto& g = generated.graph;

    BoundarySpec spec;
    for (const auto& r : args.reservoirs) {
        std::stringstream ss(r);
        std::string v, lp, lm;
        if (!std::getline(ss, v, ':') || !std::getline(ss, lp, ':') || !std::getline(ss, lm))
            raise(Errc::ValidationError, "--reservoir expects v:lambda+:lambda-");
        spec.vertices.push_back(std::stoll(v));
        spec.lambda_plus.push_back(std::stod(lp));
        spec.lambda_minus.push_back(std::stod(lm));
    }
    if (!args.boundary_rates.empty()) {
        std::vector<VertexId> natural = generated.analytic_boundary;
        if (natural.empty()) {
            natural.push_back(g.vertex_ids().front());
            natural.push_back(g.vertex_ids().back());
        }
        std::vector<std::pair<double, double>> rates;
        std::stringstream ss(args.boundary_rates);
        std::string pair_text;
        while (std::getline(ss, pair_text, ';')) {
            auto colon = pair_text.find(':');
            if (colon == std::string::npos)
                raise(Errc::ValidationError, "--boundary-rates expects lp:lm[;lp:lm...]");
            rates.emplace_back(std::stod(pair_text.substr(0, colon)),
                               std::stod(pair_text.substr(colon + 1)));
        }
        for (std::size_t i = 0; i < natural.size(); ++i) {
            auto [lp, lm] = rates[std::min(i, rates.size() - 1)];
            spec.vertices.push_back(natural[i]);
            spec.lambda_plus.push_back(lp);
            spec.lambda_minus.push_back(lm);
        }
    }
    const BoundarySpec* spec_ptr = spec.vertices.empty() ? nullptr : &spec;
    if (spec_ptr != nullptr) spec.validate(g);

    save_graph_file(args.out, g, spec_ptr);
    human_header("generate");
    std::cout << "family=" << args.family << " vertices=" << g.num_vertices()
              << " edges=" << g.num_edges();
    if (!generated.analytic_boundary.empty()) {
        std::cout << " corners=";
        for (std::size_t i = 0; i < generated.analytic_boundary.size(); ++i)
            std::cout << (i ? "," : "") << generated.analytic_boundary[i];
    }
    std::cout << "\nwrote " << args.out << "\n";
    return 0;
}

// --- resistance / exit-time / trace / marginal -------------------------------

int cmd_resistance(const std::string& graph_path, const std::string& set_a,
                   const std::string& set_b, const std::string& out, double tol) {
    auto doc = load_graph_file(graph_path);
    auto a_ids = parse_id_list(set_a);
    auto b_ids = parse_id_list(set_b);
    double r = effective_resistance(doc.graph, indices_of(doc.graph, a_ids),
                                    indices_of(doc.graph, b_ids), tol);

    human_header("resistance");
    std::cout << "R_eff = " << format_double(r) << "\n";
    if (!out.empty()) {
        json result;
        result["r_eff"] = r;
        result["set_a"] = a_ids;
        result["set_b"] = b_ids;
        write_machine_output(
            out, make_manifest(0, graph_content_hash(doc.graph), {{"tol", tol}}, {out}),
            result);
    }
    return 0;
}

int cmd_exit_time(const std::string& graph_path, VertexId start, int radius, bool all_starts,
                  const std::string& out, double tol) {
    auto doc = load_graph_file(graph_path);
    auto ball = doc.graph.ball(start, radius);
    if (ball.empty()) raise(Errc::ValidationError, "radius 0 ball is empty");
    auto times = exit_times(doc.graph, ball, tol);
    double t_origin = 0.0;
    for (std::size_t i = 0; i < ball.size(); ++i)
        if (doc.graph.id_of(ball[i]) == start) t_origin = times[static_cast<int>(i)];
    double t_max = times.maxCoeff();

    human_header("exit-time");
    std::cout << "|B(" << start << "," << radius << ")| = " << ball.size()
              << "  T(origin) = " << format_double(t_origin)
              << "  T(max) = " << format_double(t_max) << "\n";
    if (!out.empty()) {
        json result;
        result["start"] = start;
        result["radius"] = radius;
        result["ball_size"] = ball.size();
        result["exit_time_origin"] = t_origin;
        result["exit_time_max"] = t_max;
        if (all_starts) {
            json per;
            for (std::size_t i = 0; i < ball.size(); ++i)
                per[std::to_string(doc.graph.id_of(ball[i]))] = times[static_cast<int>(i)];
            result["exit_times"] = per;
        }
        write_machine_output(
            out, make_manifest(0, graph_content_hash(doc.graph), {{"tol", tol}}, {out}),
            result);
    }
    return 0;
}

int cmd_trace(const std::string& graph_path, const std::string& boundary_arg,
              const std::string& out, double tol) {
    auto doc = load_graph_file(graph_path);
    std::vector<VertexId> boundary_ids;
    if (!boundary_arg.empty())
        boundary_ids = parse_id_list(boundary_arg);
    else if (doc.boundary)
        boundary_ids = doc.boundary->vertices;
    else
        raise(Errc::EmptyBoundary, "no --boundary given and the graph file has none");

    auto tn = trace_network(doc.graph, indices_of(doc.graph, boundary_ids), tol);
    double worst_row = 0.0;
    for (std::size_t a = 0; a < tn.boundary.size(); ++a)
        worst_row = std::max(
            worst_row, std::abs(tn.chat.row(static_cast<int>(a)).sum() - tn.c_boundary[a]));

    human_header("trace");
    std::cout << "|boundary| = " << tn.boundary.size()
              << "  max |row-sum − c_a| = " << format_double(worst_row) << "\n";
    if (!out.empty()) {
        json result;
        json chat = json::array();
        for (std::size_t a = 0; a < tn.boundary.size(); ++a) {
            json row = json::array();
            for (std::size_t b = 0; b < tn.boundary.size(); ++b)
                row.push_back(tn.chat(static_cast<int>(a), static_cast<int>(b)));
            chat.push_back(row);
        }
        json ids = json::array();
        for (int b : tn.boundary) ids.push_back(doc.graph.id_of(b));
        result["boundary"] = ids;
        result["chat"] = chat;
        result["row_sum_residual"] = worst_row;
        write_machine_output(
            out,
            make_manifest(0,
                          graph_content_hash(doc.graph, doc.boundary ? &*doc.boundary : nullptr),
                          {{"tol", tol}}, {out}),
            result);
    }
    return 0;
}

int cmd_marginal(const std::string& graph_path, const std::string& out, double tol) {
    auto doc = load_graph_file(graph_path);
    if (!doc.boundary)
        raise(Errc::EmptyBoundary, "marginal needs a graph file with a boundary section");
    auto prof = stationary_marginal(doc.graph, *doc.boundary, tol);

    human_header("marginal");
    std::cout << "route gap = " << format_double(prof.route_gap)
              << "  energy = " << format_double(prof.energy) << "  box = ["
              << format_double(prof.lower_bound) << ", " << format_double(prof.upper_bound)
              << "]\n";
    if (!out.empty()) {
        json result;
        json rho;
        for (int i = 0; i < doc.graph.num_vertices(); ++i)
            rho[std::to_string(doc.graph.id_of(i))] = prof.rho[static_cast<std::size_t>(i)];
        result["rho"] = rho;
        json flows;
        for (std::size_t i = 0; i < doc.boundary->vertices.size(); ++i)
            flows[std::to_string(doc.boundary->vertices[i])] = prof.flows[i];
        result["flows"] = flows;
        result["energy"] = prof.energy;
        result["route_gap"] = prof.route_gap;
        result["box"] = {prof.lower_bound, prof.upper_bound};
        write_machine_output(
            out,
            make_manifest(0, graph_content_hash(doc.graph, &*doc.boundary), {{"tol", tol}},
                          {out}),
            result);
    }
    return 0;
}

// --- scaling ------------------------------------------------------------------

int cmd_scaling(const std::string& graph_path, VertexId origin, bool origin_given,
                const std::string& radii_arg, const std::string& volume_mode,
                const std::string& exit_mode, double epsilon, int pairs, std::uint64_t seed,
                const std::string& out, const std::string& csv, double tol) {
    auto doc = load_graph_file(graph_path);
    if (!origin_given) origin = doc.graph.vertex_ids().front();
    std::vector<int> radii;
    for (auto r : parse_id_list(radii_arg)) radii.push_back(static_cast<int>(r));
    auto ex = exhaust(doc.graph, origin, radii);

    ScalingOptions opts;
    opts.volume_mode = volume_mode == "count" ? VolumeMode::Count : VolumeMode::Measure;
    opts.exit_mode = exit_mode == "origin" ? ExitMode::OriginOnly : ExitMode::MaxOverBall;
    opts.epsilon = epsilon;
    opts.random_pairs = pairs;
    opts.seed = seed;
    opts.tol = tol;
    auto report = scaling_report(doc.graph, ex, opts);

    human_header("scaling");
    std::cout << "alpha_hat = " << format_double(report.alpha_hat)
              << "  beta_hat = " << format_double(report.beta_hat) << "  (fit over last "
              << report.fit_levels_used << " levels)\n";
    for (const auto& row : report.levels)
        std::cout << "  r=" << row.radius << " V=" << format_double(row.volume)
                  << " T=" << format_double(row.exit_time)
                  << " T/V=" << format_double(row.ratio) << "\n";

    if (!csv.empty()) {
        CsvWriter w(csv);
        w.row({"level", "radius", "volume", "exit_time", "ratio", "probe_min", "einstein",
               "sr_ratio"});
        for (const auto& row : report.levels)
            w.row({std::to_string(row.level), std::to_string(row.radius),
                   format_double(row.volume), format_double(row.exit_time),
                   format_double(row.ratio), format_double(row.probe_min),
                   format_double(row.einstein), format_double(row.sr_ratio)});
    }
    if (!out.empty()) {
        json result;
        result["alpha_hat"] = report.alpha_hat;
        result["beta_hat"] = report.beta_hat;
        result["alpha_residual"] = report.alpha_residual;
        result["beta_residual"] = report.beta_residual;
        result["fit_levels_used"] = report.fit_levels_used;
        json levels = json::array();
        for (const auto& row : report.levels) {
            json jr;
            jr["level"] = row.level;
            jr["radius"] = row.radius;
            jr["volume"] = row.volume;
            jr["exit_time"] = row.exit_time;
            jr["ratio"] = row.ratio;
            jr["probe_min"] = row.probe_min;
            jr["einstein"] = row.einstein;
            jr["sr_ratio"] = row.sr_ratio;
            levels.push_back(jr);
        }
        result["levels"] = levels;
        write_machine_output(
            out,
            make_manifest(seed, graph_content_hash(doc.graph), {{"tol", tol}}, {out, csv}),
            result);
    }
    return 0;
}

// --- simulate -------------------------------------------------------------------

int cmd_simulate(const std::string& graph_path, double alpha, const std::string& time_scale,
                 double horizon, int trajectories, std::uint64_t seed,
                 const std::string& observe, VertexId obs_center, bool obs_center_given,
                 int obs_radius, int samples, const std::string& out,
                 const std::string& csv) {
    auto doc = load_graph_file(graph_path);
    const auto& g = doc.graph;
    const BoundarySpec* spec = doc.boundary ? &*doc.boundary : nullptr;

    double scale = 1.0;
    if (time_scale == "auto") {
        // Hitting scale: the maximal mean time to reach the reservoirs
        // (boundary-driven) or the vertex farthest from the smallest id.
        std::vector<int> target;
        if (spec != nullptr) {
            target = indices_of(g, spec->vertices);
        } else {
            auto dist = g.distances_from(0);
            int far = 0;
            for (int i = 0; i < g.num_vertices(); ++i)
                if (dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)])
                    far = i;
            target.push_back(far);
        }
        std::vector<char> is_target(static_cast<std::size_t>(g.num_vertices()), 0);
        for (int t : target) is_target[static_cast<std::size_t>(t)] = 1;
        std::vector<int> rest;
        for (int i = 0; i < g.num_vertices(); ++i)
            if (!is_target[static_cast<std::size_t>(i)]) rest.push_back(i);
        scale = exit_times(g, rest).maxCoeff();
    } else {
        scale = std::stod(time_scale);
        if (!(scale > 0.0)) raise(Errc::ValidationError, "--time-scale must be positive");
    }

    if (!obs_center_given) obs_center = g.vertex_ids().front();
    auto block = g.ball(obs_center, obs_radius);
    std::vector<double> sample_times;
    for (int s = 1; s <= samples; ++s)
        sample_times.push_back(horizon * static_cast<double>(s) / samples);

    human_header("simulate");
    std::cout << "time_scale = " << format_double(scale) << "  horizon = " << horizon
              << "  trajectories = " << trajectories << "\n";

    std::unique_ptr<CsvWriter> w;
    if (!csv.empty()) {
        w = std::make_unique<CsvWriter>(csv);
        w->row({"trajectory", "time", "observable", "value"});
    }

    json traj_meta = json::array();
    for (int m = 0; m < trajectories; ++m) {
        PhiloxRng init_rng(derive_seed(seed, "initial-state"), static_cast<std::uint64_t>(m));
        auto eta0 = sample_product(MeasureSpec::product(alpha), g.num_vertices(), init_rng);

        BlockAverageSampler block_avg(block, sample_times);
        OccupationIntegral occupation({g.index_of(obs_center)});
        std::vector<Observer*> obs;
        if (observe == "block-averages") obs = {&block_avg, &occupation};

        SimulateOptions sopts;
        sopts.time_scale = scale;
        sopts.horizon = horizon;
        sopts.seed = derive_seed(seed, "trajectory");
        sopts.stream = static_cast<std::uint64_t>(m);
        sopts.record_events = false;
        auto traj = simulate(g, spec, eta0, sopts, obs);

        if (w && observe == "block-averages") {
            for (std::size_t s = 0; s < sample_times.size(); ++s)
                w->row({std::to_string(m), format_double(sample_times[s]), "block-average",
                        format_double(block_avg.samples()[s])});
            w->row({std::to_string(m), format_double(horizon), "occupation-integral",
                    format_double(occupation.integrals()[0])});
        }
        json jt;
        jt["trajectory"] = m;
        jt["initial_particles"] = eta0.particle_count();
        jt["final_particles"] = traj.final_state.particle_count();
        traj_meta.push_back(jt);
    }

    if (!out.empty()) {
        json result;
        result["time_scale"] = scale;
        result["horizon"] = horizon;
        result["alpha"] = alpha;
        result["rng"] = PhiloxRng::kAlgorithm;
        result["observe"] = observe;
        result["block_center"] = obs_center;
        result["block_radius"] = obs_radius;
        result["trajectories"] = traj_meta;
        write_machine_output(
            out, make_manifest(seed, graph_content_hash(g, spec), {}, {out, csv}), result);
    }
    return 0;
}

// --- verify ---------------------------------------------------------------------

int cmd_verify(const std::string& suite, const std::string& graph_path, const std::string& out,
               std::uint64_t seed, int samples, const std::string& sizes_arg,
               const std::string& bundle_name, int anchor, double threshold) {
    json result;
    bool pass = true;
    std::string graph_hash;

    auto need_graph = [&]() {
        if (graph_path.empty())
            raise(Errc::ValidationError, "suite '" + suite + "' needs --graph");
        auto doc = load_graph_file(graph_path);
        graph_hash = graph_content_hash(doc.graph, doc.boundary ? &*doc.boundary : nullptr);
        return doc;
    };

    if (suite == "mpl") {
        auto doc = need_graph();
        const auto& g = doc.graph;
        double worst = 0.0;
        json rows = json::array();
        for (int x = 0; x < g.num_vertices(); ++x)
            for (int y = x + 1; y < g.num_vertices(); ++y)
                for (double alpha : {0.3, 0.5}) {
                    double lam = mpl_min_eigenvalue(g, g.id_of(x), g.id_of(y), alpha);
                    worst = std::min(worst, lam);
                    json jr;
                    jr["x"] = g.id_of(x);
                    jr["y"] = g.id_of(y);
                    jr["alpha"] = alpha;
                    jr["lambda_min"] = lam;
                    rows.push_back(jr);
                }
        pass = worst >= -1e-10;
        result["pairs"] = rows;
        result["worst_lambda_min"] = worst;
        result["threshold"] = -1e-10;
    } else if (suite == "ensembles") {
        auto doc = need_graph();
        std::vector<int> sizes{4, 6, 8, 12};
        if (!sizes_arg.empty()) {
            sizes.clear();
            for (auto v : parse_id_list(sizes_arg)) sizes.push_back(static_cast<int>(v));
        }
        auto bundle = make_bundle(bundle_name);
        auto rows = equivalence_of_ensembles_table(doc.graph, bundle, anchor, sizes);
        json jrows = json::array();
        for (const auto& row : rows) {
            json jr;
            jr["size"] = row.set_size;
            jr["sup_gap"] = row.sup_gap;
            jr["argmax_k"] = row.argmax_k;
            jrows.push_back(jr);
        }
        bool decreasing_tail = true;
        for (std::size_t i = rows.size() / 2; i + 1 < rows.size(); ++i)
            if (rows[i + 1].sup_gap > rows[i].sup_gap + 1e-15) decreasing_tail = false;
        pass = decreasing_tail && rows.back().sup_gap <= threshold;
        result["rows"] = jrows;
        result["threshold"] = threshold;
        result["eventually_decreasing"] = decreasing_tail;
    } else if (suite == "two-block") {
        std::vector<int> sizes;
        if (!sizes_arg.empty())
            for (auto v : parse_id_list(sizes_arg)) sizes.push_back(static_cast<int>(v));
        else
            for (int m = 1; m <= 14; ++m) sizes.push_back(m);
        auto rows = verify_two_block_bound(sizes);
        json jrows = json::array();
        for (const auto& row : rows) {
            json jr;
            jr["m"] = row.m;
            jr["sup_gap"] = row.sup_gap;
            jr["bound"] = row.bound;
            jr["argmax_k"] = row.argmax_k;
            jr["enumeration_gap"] = row.enumeration_gap;
            jr["variance_gap"] = row.variance_gap;
            jr["mean_gap"] = row.mean_gap;
            jr["bound_holds"] = row.bound_holds;
            jrows.push_back(jr);
            pass = pass && row.bound_holds && row.enumeration_gap <= 1e-12 &&
                   row.variance_gap <= 1e-12 && row.mean_gap <= 1e-12;
        }
        result["rows"] = jrows;
    } else if (suite == "averaging") {
        PhiloxRng rng(derive_seed(seed, "averaging-fuzz"));
        double worst = 0.0;
        for (int trial = 0; trial < samples; ++trial) {
            int n = 5 + static_cast<int>(rng.below(26));
            std::vector<double> values(static_cast<std::size_t>(n));
            for (auto& v : values) v = rng.normal();
            std::vector<int> perm(static_cast<std::size_t>(n));
            std::iota(perm.begin(), perm.end(), 0);
            for (int i = n - 1; i > 0; --i)
                std::swap(perm[static_cast<std::size_t>(i)],
                          perm[static_cast<std::size_t>(
                              rng.below(static_cast<std::uint64_t>(i + 1)))]);
            int bs = 1 + static_cast<int>(rng.below(5));
            std::vector<std::vector<int>> blocks;
            std::size_t pos = 0;
            while (pos + static_cast<std::size_t>(bs) <=
                   static_cast<std::size_t>(n) * 3 / 4) {
                blocks.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                                    perm.begin() + static_cast<std::ptrdiff_t>(pos) + bs);
                pos += static_cast<std::size_t>(bs);
            }
            if (blocks.empty()) {
                blocks.emplace_back(perm.begin(), perm.begin() + bs);
                pos = static_cast<std::size_t>(bs);
            }
            std::vector<std::vector<int>> tails;
            if (pos < static_cast<std::size_t>(n))
                tails.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                                   perm.end());
            worst = std::max(worst, averaging_residual(blocks, tails, values));
        }
        pass = worst <= 1e-12;
        result["samples"] = samples;
        result["worst_residual"] = worst;
        result["threshold"] = 1e-12;
    } else if (suite == "boundary") {
        auto doc = need_graph();
        if (!doc.boundary)
            raise(Errc::EmptyBoundary, "boundary suite needs a graph with reservoirs");
        auto report = verify_boundary_lemmas(doc.graph, *doc.boundary, samples, seed);
        result["sup_lhs"] = report.sup_lhs;
        result["sup_rhs"] = report.sup_rhs;
        result["sup_holds"] = report.sup_holds;
        result["asymm_margin"] = report.asymm_margin;
        result["asymm_holds"] = report.asymm_holds;
        result["exchange_margin"] = report.exchange_margin;
        result["exchange_holds"] = report.exchange_holds;
        result["mpl_margin"] = report.mpl_margin;
        result["mpl_holds"] = report.mpl_holds;
        result["rho_box"] = {report.box_low, report.box_high};
        result["rho_range"] = {report.rho_min, report.rho_max};
        result["box_holds"] = report.box_holds;
        pass = report.all_hold();
    } else if (suite == "spectral") {
        auto doc = need_graph();
        const auto& g = doc.graph;
        auto bundle = make_bundle(bundle_name);
        auto block = g.ball(g.id_of(anchor), 2);
        auto u = u_one_state_table(g, bundle, anchor, block);
        auto nu = MeasureSpec::product(0.5);
        double u_sup = u.cwiseAbs().maxCoeff();
        auto zero = spectral_estimate(g, nullptr, nu, u, 0.0, 1.0, 1.0);
        bool zero_ok = zero.lambda_max == 0.0;
        bool bound_ok = true, monotone_ok = true;
        double prev = 0.0;
        json rows = json::array();
        for (double kappa : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            auto plus = spectral_estimate(g, nullptr, nu, u, kappa, 1.0, 1.0);
            auto minus = spectral_estimate(g, nullptr, nu, -u, kappa, 1.0, 1.0);
            double top = std::max(plus.lambda_max, minus.lambda_max);
            if (plus.normalized > u_sup + 1e-12 || minus.normalized > u_sup + 1e-12)
                bound_ok = false;
            if (top < prev - 1e-11) monotone_ok = false;
            prev = top;
            json jr;
            jr["kappa"] = kappa;
            jr["lambda_plus"] = plus.lambda_max;
            jr["lambda_minus"] = minus.lambda_max;
            rows.push_back(jr);
        }
        pass = zero_ok && bound_ok && monotone_ok;
        result["rows"] = rows;
        result["zero_at_kappa_zero"] = zero_ok;
        result["diagonal_bound_holds"] = bound_ok;
        result["monotone_in_kappa"] = monotone_ok;
        result["u_sup"] = u_sup;
    } else {
        raise(Errc::ValidationError, "unknown suite '" + suite + "'");
    }

    result["suite"] = suite;
    result["pass"] = pass;
    human_header("verify");
    std::cout << "suite=" << suite << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    if (!out.empty())
        write_machine_output(out, make_manifest(seed, graph_hash, {}, {out}), result);
    return pass ? 0 : 1;
}

// --- experiment -------------------------------------------------------------------

int cmd_experiment(const std::string& config_path, const std::string& out,
                   const std::string& json_out, int threads_override) {
    auto kv = load_keyval_file(config_path);
    auto exp = experiment_from_keyval(kv);
    if (threads_override > 0) {
        exp.config.threads = threads_override;
    } else if (exp.config.threads == 0) {
        if (const char* env = std::getenv("RESISTOR_SEP_THREADS"))
            exp.config.threads = std::atoi(env);
    }
    auto doc = load_graph_file(exp.graph);
    VertexId origin =
        exp.origin.empty() ? doc.graph.vertex_ids().front() : std::stoll(exp.origin);
    const BoundarySpec* spec = doc.boundary ? &*doc.boundary : nullptr;

    auto report = run_experiment(doc.graph, spec, origin, exp.config);

    human_header("experiment");
    for (const auto& cell : report.sup_cells)
        std::cout << "level=" << cell.level << " eps=" << cell.epsilon
                  << " sup p=" << format_double(cell.p_hat) << " ["
                  << format_double(cell.wilson_low) << ", " << format_double(cell.wilson_high)
                  << "]"
                  << (cell.exceed == 0 ? " (CP bound " + format_double(cell.cp_upper) + ")"
                                       : "")
                  << "\n";
    for (const auto& bc : report.boundary)
        std::cout << "boundary level=" << bc.level << " a=" << bc.vertex
                  << " mean=" << format_double(bc.mean) << " se="
                  << format_double(bc.std_error) << "\n";

    if (!out.empty()) {
        CsvWriter w(out);
        w.row({"level", "epsilon", "probe", "probe_radius", "exceed", "trials", "p_hat",
               "wilson_low", "wilson_high", "cp_upper", "decay_stat"});
        for (const auto& cell : report.cells)
            w.row({std::to_string(cell.level), format_double(cell.epsilon),
                   std::to_string(cell.probe), std::to_string(cell.probe_ball_radius),
                   std::to_string(cell.exceed), std::to_string(cell.trials),
                   format_double(cell.p_hat), format_double(cell.wilson_low),
                   format_double(cell.wilson_high), format_double(cell.cp_upper),
                   format_double(cell.decay_stat)});
    }
    if (!json_out.empty()) {
        json result;
        json cells = json::array();
        for (const auto& cell : report.cells) {
            json jc;
            jc["level"] = cell.level;
            jc["epsilon"] = cell.epsilon;
            jc["probe"] = cell.probe;
            jc["probe_radius"] = cell.probe_ball_radius;
            jc["exceed"] = cell.exceed;
            jc["trials"] = cell.trials;
            jc["p_hat"] = cell.p_hat;
            jc["wilson"] = {cell.wilson_low, cell.wilson_high};
            jc["cp_upper"] = cell.cp_upper;
            jc["decay_stat"] = cell.decay_stat;
            cells.push_back(jc);
        }
        result["cells"] = cells;
        json bounds = json::array();
        for (const auto& bc : report.boundary) {
            json jb;
            jb["level"] = bc.level;
            jb["vertex"] = bc.vertex;
            jb["target"] = bc.target;
            jb["mean"] = bc.mean;
            jb["std_error"] = bc.std_error;
            bounds.push_back(jb);
        }
        result["boundary"] = bounds;
        result["mass_scale"] = report.mass_scale;
        result["time_scale"] = report.time_scale;
        write_machine_output(
            json_out,
            make_manifest(exp.config.seed, graph_content_hash(doc.graph, spec), {},
                          {out, json_out}),
            result);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) {
        if (i > 0) g_command_line += ' ';
        g_command_line += argv[i];
    }

    CLI::App app{"discrete potential theory and exclusion-process toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "emit a graph JSON document");
    c_gen->add_option("--family", gen.family, "path|lattice_box|sg|vicsek|carpet")->required();
    c_gen->add_option("--level", gen.level, "recursion level (sg/vicsek/carpet)");
    c_gen->add_option("--n", gen.n, "edge count (path)");
    c_gen->add_option("--d", gen.dim, "dimension (lattice_box)");
    c_gen->add_option("--side", gen.side, "side length (lattice_box)");
    c_gen->add_option("--out", gen.out, "output graph JSON")->required();
    c_gen->add_option("--reservoir", gen.reservoirs, "attach reservoir v:lambda+:lambda-");
    c_gen->add_option("--boundary-rates", gen.boundary_rates,
                      "rates lp:lm[;lp:lm...] on the family's natural boundary");

    std::string r_graph, r_a, r_b, r_out;
    double tol = kDefaultTol;
    auto* c_res = app.add_subcommand("resistance", "effective resistance between vertex sets");
    c_res->add_option("--graph", r_graph)->required();
    c_res->add_option("--set-a,--a", r_a, "comma-separated vertex ids")->required();
    c_res->add_option("--set-b,--b", r_b, "comma-separated vertex ids")->required();
    c_res->add_option("--out", r_out);
    c_res->add_option("--tol", tol);

    std::string e_graph, e_out;
    VertexId e_start = 0;
    int e_radius = 1;
    bool e_all = false;
    auto* c_exit = app.add_subcommand("exit-time", "mean exit time from a metric ball");
    c_exit->add_option("--graph", e_graph)->required();
    c_exit->add_option("--start", e_start, "ball center")->required();
    c_exit->add_option("--radius", e_radius)->required();
    c_exit->add_flag("--all-starts", e_all, "emit the exit time of every start");
    c_exit->add_option("--out", e_out);
    c_exit->add_option("--tol", tol);

    std::string t_graph, t_boundary, t_out;
    auto* c_trace = app.add_subcommand("trace", "boundary trace network");
    c_trace->add_option("--graph", t_graph)->required();
    c_trace->add_option("--boundary", t_boundary, "comma-separated ids (default: file)");
    c_trace->add_option("--out", t_out);
    c_trace->add_option("--tol", tol);

    std::string m_graph, m_out;
    auto* c_marg = app.add_subcommand("marginal", "stationary one-site density profile");
    c_marg->add_option("--graph", m_graph)->required();
    c_marg->add_option("--out", m_out);
    c_marg->add_option("--tol", tol);

    std::string s_graph, s_radii, s_vmode = "measure", s_emode = "max", s_out, s_csv;
    VertexId s_origin = 0;
    double s_eps = 0.5;
    int s_pairs = 8;
    std::uint64_t seed = 0;
    auto* c_scale = app.add_subcommand("scaling", "volume/exit-time scaling report");
    c_scale->add_option("--graph", s_graph)->required();
    auto* s_origin_opt = c_scale->add_option("--origin", s_origin);
    c_scale->add_option("--radii", s_radii, "comma-separated, starting at 1")->required();
    c_scale->add_option("--volume-mode", s_vmode, "measure|count");
    c_scale->add_option("--exit-mode", s_emode, "max|origin");
    c_scale->add_option("--epsilon", s_eps);
    c_scale->add_option("--pairs", s_pairs, "random probe pairs per level");
    c_scale->add_option("--seed", seed);
    c_scale->add_option("--out", s_out);
    c_scale->add_option("--csv", s_csv);
    c_scale->add_option("--tol", tol);

    std::string sim_graph, sim_tscale = "1", sim_observe = "block-averages", sim_out, sim_csv;
    double sim_alpha = 0.5, sim_horizon = 1.0;
    int sim_traj = 1;
    VertexId sim_center = 0;
    int sim_radius = 2, sim_samples = 50;
    auto* c_sim = app.add_subcommand("simulate", "exact event-driven exclusion dynamics");
    c_sim->add_option("--graph", sim_graph)->required();
    c_sim->add_option("--alpha", sim_alpha, "product-Bernoulli initial density");
    c_sim->add_option("--time-scale", sim_tscale, "auto or a positive real");
    c_sim->add_option("--horizon", sim_horizon)->required();
    c_sim->add_option("--trajectories", sim_traj);
    c_sim->add_option("--seed", seed);
    c_sim->add_option("--observe", sim_observe, "block-averages|none");
    auto* sim_center_opt = c_sim->add_option("--obs-center", sim_center);
    c_sim->add_option("--obs-radius", sim_radius);
    c_sim->add_option("--samples", sim_samples, "observation times per trajectory");
    c_sim->add_option("--out", sim_out);
    c_sim->add_option("--csv", sim_csv);

    std::string v_suite, v_graph, v_out, v_sizes, v_bundle = "pair";
    int v_samples = 256, v_anchor = 0;
    double v_threshold = 0.05;
    auto* c_ver = app.add_subcommand("verify", "run a verification suite");
    c_ver->add_option("--suite", v_suite, "mpl|ensembles|two-block|averaging|boundary|spectral")
        ->required();
    c_ver->add_option("--graph", v_graph);
    c_ver->add_option("--out", v_out);
    c_ver->add_option("--seed", seed);
    c_ver->add_option("--samples", v_samples);
    c_ver->add_option("--sizes", v_sizes, "comma-separated set sizes");
    c_ver->add_option("--bundle", v_bundle, "occupancy|pair|pair-conductance|edge-product");
    c_ver->add_option("--anchor", v_anchor, "anchor vertex (dense index)");
    c_ver->add_option("--threshold", v_threshold, "final ensembles gap threshold");

    std::string x_config, x_out, x_json;
    int x_threads = 0;
    auto* c_exp = app.add_subcommand("experiment", "Monte Carlo local-ergodicity experiment");
    c_exp->add_option("--config", x_config, "key = value experiment file")->required();
    c_exp->add_option("--out", x_out, "curves CSV");
    c_exp->add_option("--json", x_json, "machine-readable report");
    c_exp->add_option("--threads", x_threads,
                      "worker threads (0 = config, then RESISTOR_SEP_THREADS, then auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_gen->parsed()) return cmd_generate(gen);
        if (c_res->parsed()) return cmd_resistance(r_graph, r_a, r_b, r_out, tol);
        if (c_exit->parsed()) return cmd_exit_time(e_graph, e_start, e_radius, e_all, e_out, tol);
        if (c_trace->parsed()) return cmd_trace(t_graph, t_boundary, t_out, tol);
        if (c_marg->parsed()) return cmd_marginal(m_graph, m_out, tol);
        if (c_scale->parsed())
            return cmd_scaling(s_graph, s_origin, s_origin_opt->count() > 0, s_radii, s_vmode,
                               s_emode, s_eps, s_pairs, seed, s_out, s_csv, tol);
        if (c_sim->parsed())
            return cmd_simulate(sim_graph, sim_alpha, sim_tscale, sim_horizon, sim_traj, seed,
                                sim_observe, sim_center, sim_center_opt->count() > 0, sim_radius,
                                sim_samples, sim_out, sim_csv);
        if (c_ver->parsed())
            return cmd_verify(v_suite, v_graph, v_out, seed, v_samples, v_sizes, v_bundle,
                              v_anchor, v_threshold);
        if (c_exp->parsed()) return cmd_experiment(x_config, x_out, x_json, x_threads);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
