#include "trom/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

#include <json.hpp>

#include "trom/errors.hpp"
#include "trom/io.hpp"
#include "trom/metrics.hpp"

namespace trom::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

ProblemKind parse_kind(const std::string& name) {
    if (name == "heat") return ProblemKind::heat;
    if (name == "wave") return ProblemKind::wave;
    if (name == "maxwell") return ProblemKind::maxwell;
    throw ConfigError("unknown problem '" + name + "' (expected heat, wave or maxwell)");
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) +
                              "'");
    }
}

void apply_problem_defaults(ExperimentConfig& cfg) {
    switch (cfg.problem) {
        case ProblemKind::heat:
            cfg.time = TimeGrid{0.0, kPi, 120};
            cfg.forcing.sigma = 0.4;
            cfg.grbf_shape = 1.0;
            // parameter mode kept complete: 45 training slices
            cfg.tucker_ranks = {40, 60, 45};
            break;
        case ProblemKind::wave:
            cfg.time = TimeGrid{0.0, 8.0 * kPi, 480};
            cfg.forcing.sigma = 0.4;
            cfg.grbf_shape = 1.0;
            cfg.tucker_ranks = {40, 60, 40};
            // even ranks only: the cotangent lift pairs displacement and
            // momentum modes, and odd truncation splits a canonical pair
            cfg.sweep_ranks = {2, 4, 6, 8, 10};
            break;
        case ProblemKind::maxwell:
            cfg.time = TimeGrid{0.0, 2.5, 480};
            cfg.forcing.sigma = 0.1;
            cfg.forcing.period = 2.5;
            cfg.grbf_shape = 1.8;
            cfg.tucker_ranks = {40, 60, 40};
            cfg.sweep_ranks = {2, 3, 4, 5, 6, 7, 8, 9, 10};
            break;
    }
}

struct BuiltProblem {
    ProblemKind kind;
    std::optional<HeatProblem> heat;
    std::optional<WaveProblem> wave;
    std::optional<MaxwellProblem> maxwell;

    std::shared_ptr<const SpdOperator> primary_mass() const {
        switch (kind) {
            case ProblemKind::heat: return heat->fom.m;
            case ProblemKind::wave: return wave->fom.m_w;
            case ProblemKind::maxwell: return maxwell->fom.m_e;
        }
        return nullptr;
    }
};

BuiltProblem build_problem(const ExperimentConfig& cfg) {
    BuiltProblem pb;
    pb.kind = cfg.problem;
    switch (cfg.problem) {
        case ProblemKind::heat:
            pb.heat = build_heat_fom(
                structured_mesh_2d(2.0 * kPi, 2.0 * kPi, cfg.mesh_nodes_per_side), cfg.forcing);
            break;
        case ProblemKind::wave:
            pb.wave = build_wave_fom(uniform_mesh_1d(2.0 * kPi, cfg.mesh_elements), cfg.forcing);
            break;
        case ProblemKind::maxwell:
            pb.maxwell = build_maxwell_fom(uniform_mesh_1d(2.0, cfg.mesh_elements), cfg.forcing);
            break;
    }
    return pb;
}

std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

std::string hash_hex(const std::string& path) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(io::fnv1a64_file(path)));
    return buf;
}

json load_manifest(const ExperimentConfig& cfg) {
    const std::string path = path_in(cfg, "manifest.json");
    std::ifstream in(path);
    if (!in) return json::object();
    json m;
    in >> m;
    return m;
}

void record_artifact(json& manifest, const ExperimentConfig& cfg, const std::string& name) {
    manifest["files"][name] = hash_hex(path_in(cfg, name));
}

void verify_artifact(const json& manifest, const ExperimentConfig& cfg, const std::string& name) {
    const std::string path = path_in(cfg, name);
    if (!fs::exists(path))
        throw IoError("missing artifact " + path + " (run the earlier stage first)");
    if (manifest.contains("files") && manifest["files"].contains(name)) {
        if (manifest["files"][name].get<std::string>() != hash_hex(path))
            throw IoError("artifact " + path + " does not match the manifest (stale stage output)");
    }
}

void save_manifest(const json& manifest, const ExperimentConfig& cfg) {
    std::ofstream out(path_in(cfg, "manifest.json"));
    if (!out) throw IoError("cannot write manifest.json");
    out << manifest.dump(2) << "\n";
}

std::vector<std::string> snapshot_names(ProblemKind kind, const std::string& set) {
    if (kind == ProblemKind::maxwell)
        return {"snapshots_" + set + "_e.trom", "snapshots_" + set + "_b.trom"};
    return {"snapshots_" + set + ".trom"};
}

// --- CSV writers for sweep tables (method column is a string) ---

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "method,rank,param_index,projection_error,rom_error\n";
    char buf[64];
    for (const auto& row : rows) {
        out << row.method << "," << row.rank << "," << row.param_index << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.projection_error);
        out << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.rom_error);
        out << buf << "\n";
    }
}

void write_aggregate_csv(const std::string& path, const std::vector<SweepAggregate>& aggs) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "method,rank,median,q25,q75\n";
    char buf[64];
    for (const auto& agg : aggs) {
        out << agg.method << "," << agg.rank << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", agg.median);
        out << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", agg.q25);
        out << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", agg.q75);
        out << buf << "\n";
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
    }
    check_keys(root, "", {"problem", "output_dir", "mesh", "time", "parameters", "forcing",
                          "tucker", "interpolation", "sweep", "qdeim"});
    if (!root.contains("problem")) throw ConfigError("config is missing the 'problem' key");

    ExperimentConfig cfg;
    cfg.problem = parse_kind(root["problem"].get<std::string>());
    apply_problem_defaults(cfg);

    if (root.contains("output_dir")) cfg.output_dir = root["output_dir"].get<std::string>();

    if (root.contains("mesh")) {
        const json& mesh = root["mesh"];
        check_keys(mesh, "mesh", {"nodes_per_side", "elements"});
        if (mesh.contains("nodes_per_side"))
            cfg.mesh_nodes_per_side = mesh["nodes_per_side"].get<Index>();
        if (mesh.contains("elements")) cfg.mesh_elements = mesh["elements"].get<Index>();
    }
    if (root.contains("time")) {
        const json& time = root["time"];
        check_keys(time, "time", {"t0", "tau", "steps"});
        if (time.contains("t0")) cfg.time.t0 = time["t0"].get<double>();
        if (time.contains("tau")) cfg.time.tau = time["tau"].get<double>();
        if (time.contains("steps")) cfg.time.steps = time["steps"].get<Index>();
        if (!(cfg.time.tau > cfg.time.t0) || cfg.time.steps < 1)
            throw ConfigError("time grid must satisfy tau > t0 and steps >= 1");
    }
    if (root.contains("parameters")) {
        const json& par = root["parameters"];
        check_keys(par, "parameters", {"count", "train", "seed"});
        if (par.contains("count")) cfg.param_count = par["count"].get<Index>();
        if (par.contains("train")) cfg.param_train = par["train"].get<Index>();
        if (par.contains("seed")) cfg.seed = par["seed"].get<std::uint64_t>();
        if (cfg.param_train < 1 || cfg.param_train >= cfg.param_count)
            throw ConfigError("parameters.train must lie in [1, count)");
    }
    if (root.contains("forcing")) {
        const json& forcing = root["forcing"];
        check_keys(forcing, "forcing", {"sigma", "direction", "period"});
        if (forcing.contains("sigma")) cfg.forcing.sigma = forcing["sigma"].get<double>();
        if (forcing.contains("direction"))
            cfg.forcing.direction = forcing["direction"].get<double>();
        if (forcing.contains("period")) cfg.forcing.period = forcing["period"].get<double>();
    }
    if (root.contains("tucker")) {
        const json& tucker = root["tucker"];
        check_keys(tucker, "tucker", {"ranks", "weighted"});
        if (tucker.contains("ranks")) {
            const auto ranks = tucker["ranks"].get<std::vector<Index>>();
            if (ranks.size() != 3) throw ConfigError("tucker.ranks must have three entries");
            std::copy(ranks.begin(), ranks.end(), cfg.tucker_ranks.begin());
        }
        if (tucker.contains("weighted")) cfg.weighted = tucker["weighted"].get<bool>();
    }
    if (root.contains("interpolation")) {
        const json& interp = root["interpolation"];
        check_keys(interp, "interpolation",
                   {"mo_neighbors", "grbf_shape", "grbf_neighbors", "grbf_nugget"});
        if (interp.contains("mo_neighbors"))
            cfg.mo_neighbors = interp["mo_neighbors"].get<Index>();
        if (interp.contains("grbf_shape")) cfg.grbf_shape = interp["grbf_shape"].get<double>();
        if (interp.contains("grbf_neighbors")) {
            const json& nb = interp["grbf_neighbors"];
            if (nb.is_string()) {
                if (nb.get<std::string>() != "global")
                    throw ConfigError("interpolation.grbf_neighbors must be an integer or 'global'");
                cfg.grbf_neighbors.reset();
            } else {
                cfg.grbf_neighbors = nb.get<Index>();
            }
        }
        if (interp.contains("grbf_nugget") && !interp["grbf_nugget"].is_null())
            cfg.grbf_nugget = interp["grbf_nugget"].get<double>();
    }
    if (root.contains("sweep")) {
        const json& sweep = root["sweep"];
        check_keys(sweep, "sweep", {"ranks"});
        if (sweep.contains("ranks")) cfg.sweep_ranks = sweep["ranks"].get<std::vector<Index>>();
    }
    if (root.contains("qdeim")) {
        const json& qd = root["qdeim"];
        check_keys(qd, "qdeim", {"rank"});
        if (qd.contains("rank")) cfg.qdeim_rank = qd["rank"].get<Index>();
    }
    return cfg;
}

void run_generate(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    const auto [train, test] = sample_parameters(
        cfg.problem, cfg.param_count, {cfg.param_train, cfg.param_count - cfg.param_train},
        cfg.seed);
    train.to_csv(path_in(cfg, "params_train.csv"));
    test.to_csv(path_in(cfg, "params_test.csv"));

    const BuiltProblem pb = build_problem(cfg);
    json manifest = load_manifest(cfg);

    if (cfg.problem == ProblemKind::maxwell) {
        const MaxwellSnapshots train_snaps =
            generate_maxwell_snapshots(*pb.maxwell, train, cfg.time);
        const MaxwellSnapshots test_snaps = generate_maxwell_snapshots(*pb.maxwell, test, cfg.time);
        io::write_tensor(path_in(cfg, "snapshots_train_e.trom"), train_snaps.e);
        io::write_tensor(path_in(cfg, "snapshots_train_b.trom"), train_snaps.b);
        io::write_tensor(path_in(cfg, "snapshots_test_e.trom"), test_snaps.e);
        io::write_tensor(path_in(cfg, "snapshots_test_b.trom"), test_snaps.b);
    } else if (cfg.problem == ProblemKind::wave) {
        io::write_tensor(path_in(cfg, "snapshots_train.trom"),
                         generate_wave_snapshots(*pb.wave, train, cfg.time));
        io::write_tensor(path_in(cfg, "snapshots_test.trom"),
                         generate_wave_snapshots(*pb.wave, test, cfg.time));
    } else {
        io::write_tensor(path_in(cfg, "snapshots_train.trom"),
                         generate_heat_snapshots(*pb.heat, train, cfg.time));
        io::write_tensor(path_in(cfg, "snapshots_test.trom"),
                         generate_heat_snapshots(*pb.heat, test, cfg.time));
    }

    for (const char* set : {"train", "test"})
        for (const std::string& name : snapshot_names(cfg.problem, set))
            record_artifact(manifest, cfg, name);
    record_artifact(manifest, cfg, "params_train.csv");
    record_artifact(manifest, cfg, "params_test.csv");
    save_manifest(manifest, cfg);
    std::cout << "generate: wrote snapshots for " << cfg.param_count << " parameters to "
              << cfg.output_dir << "\n";
}

namespace {

TuckerFactors train_one(const Tensor3& x, std::shared_ptr<const SpdOperator> mass,
                        const ExperimentConfig& cfg, const std::string& label) {
    std::array<Index, 3> ranks = cfg.tucker_ranks;
    const auto dims = x.dims();
    for (int k = 0; k < 3; ++k) {
        if (ranks[static_cast<size_t>(k)] > dims[static_cast<size_t>(k)])
            throw UsageError("tucker rank " + std::to_string(ranks[static_cast<size_t>(k)]) +
                             " exceeds data dim " + std::to_string(dims[static_cast<size_t>(k)]) +
                             " (mode " + std::to_string(k + 1) + ")");
    }
    TuckerFactors f = cfg.weighted ? weighted_hosvd(x, mass, ranks) : hosvd(x, ranks);
    const double norm = cfg.weighted ? weighted_frobenius_norm(x, *mass) : frobenius_norm(x);
    const double err = reconstruction_error(x, f);
    std::cout << "train[" << label << "]: ranks (" << ranks[0] << ", " << ranks[1] << ", "
              << ranks[2] << "), relative representation error "
              << (norm > 0 ? err / norm : 0.0) << ", certificate epsilon " << f.epsilon << "\n";
    return f;
}

}  // namespace

void run_train(const ExperimentConfig& cfg) {
    json manifest = load_manifest(cfg);
    for (const std::string& name : snapshot_names(cfg.problem, "train"))
        verify_artifact(manifest, cfg, name);

    const BuiltProblem pb = build_problem(cfg);
    if (cfg.problem == ProblemKind::maxwell) {
        const Tensor3 xe = io::read_tensor(path_in(cfg, "snapshots_train_e.trom"));
        const Tensor3 xb = io::read_tensor(path_in(cfg, "snapshots_train_b.trom"));
        io::write_factors(path_in(cfg, "factors_e.tromf"),
                          train_one(xe, pb.maxwell->fom.m_e, cfg, "e"));
        io::write_factors(path_in(cfg, "factors_b.tromf"),
                          train_one(xb, pb.maxwell->fom.m_b, cfg, "b"));
        record_artifact(manifest, cfg, "factors_e.tromf");
        record_artifact(manifest, cfg, "factors_b.tromf");
    } else {
        const Tensor3 x = io::read_tensor(path_in(cfg, "snapshots_train.trom"));
        io::write_factors(path_in(cfg, "factors.tromf"),
                          train_one(x, pb.primary_mass(), cfg, "state"));
        record_artifact(manifest, cfg, "factors.tromf");
    }
    save_manifest(manifest, cfg);
}

namespace {

struct EvalData {
    BuiltProblem pb;
    ParameterSet train_params;
    ParameterSet test_params;
    Tensor3 train_x, test_x;      // heat/wave
    Tensor3 train_xb, test_xb;    // maxwell magnetic
    TuckerFactors factors;        // heat/wave; maxwell electric
    TuckerFactors factors_b;      // maxwell magnetic
};

GeneralizedIndex query_index(const ExperimentConfig& cfg, const EvalData& data,
                             const std::string& method, bool train_set, Index param,
                             const Vector& mu) {
    if (train_set) return GeneralizedIndex::unit(data.train_params.count(), param);
    if (method == "mo") return mo_index(data.train_params, mu, cfg.mo_neighbors);
    GrbfConfig grbf{cfg.grbf_shape, cfg.grbf_neighbors, cfg.grbf_nugget};
    return grbf_index(data.train_params, mu, grbf);
}

void emit_sv_decay(const ExperimentConfig& cfg, const EvalData& data,
                   const MonolithicBasis& mono) {
    if (data.test_params.count() == 0) return;
    std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
    const Index pick = static_cast<Index>(rng() % static_cast<std::uint64_t>(
                                              data.test_params.count()));
    GrbfConfig grbf{cfg.grbf_shape, cfg.grbf_neighbors, cfg.grbf_nugget};
    const GeneralizedIndex e = grbf_index(data.train_params, data.test_params.sample(pick), grbf);
    const ThinSvd local = thin_svd(local_core(data.factors, e));

    const Index count = std::min<Index>({40, local.sigma.size(), mono.sigma.size()});
    std::vector<std::vector<double>> rows;
    for (Index i = 0; i < count; ++i)
        rows.push_back({static_cast<double>(i + 1), local.sigma[i] / local.sigma[0],
                        mono.sigma[i] / mono.sigma[0]});
    io::write_csv(path_in(cfg, "sv_decay.csv"),
                  {"index", "local_sigma_normalized", "monolithic_sigma_normalized"}, rows);
}

void evaluate_heat_wave(const ExperimentConfig& cfg, const EvalData& data,
                        const EvaluateOptions& options) {
    const bool is_heat = cfg.problem == ProblemKind::heat;
    const auto mass = data.pb.primary_mass();
    const Matrix& op = is_heat ? data.pb.heat->fom.a : data.pb.wave->fom.stiffness;
    const Matrix op_hat_full = precompute_reduced_operator(op, data.factors);

    Index max_rank = 1;
    for (Index r : cfg.sweep_ranks) max_rank = std::max(max_rank, r);
    const MonolithicBasis mono = monolithic_basis(data.train_x, mass, max_rank);
    emit_sv_decay(cfg, data, mono);

    for (const std::string& set : options.sets) {
        const bool train_set = set == "train";
        const ParameterSet& params = train_set ? data.train_params : data.test_params;
        const Tensor3& refs = train_set ? data.train_x : data.test_x;

        SweepFn fn = [&](const std::string& method, Index rank, Index param) {
            const Vector mu = params.sample(param);
            const Matrix ref = refs.slice(param);
            const double ref_norm = trajectory_norm(ref, *mass);

            ReducedModel model;
            double proj = 0.0;
            if (method == "monolithic") {
                MonolithicBasis basis{mono.u.leftCols(rank), mono.sigma, mono.weighting};
                proj = projection_error(ref, basis.u, *mass) / ref_norm;
                model = is_heat ? reduce_heat(data.pb.heat->fom, basis)
                                : reduce_wave(data.pb.wave->fom, basis);
            } else {
                const GeneralizedIndex e = query_index(cfg, data, method, train_set, param, mu);
                const LocalBasis basis = local_basis(data.factors, e, rank, mu);
                proj = projection_error(ref, basis.u, *mass) / ref_norm;
                model = is_heat ? reduce_heat(data.pb.heat->fom, basis, &op_hat_full)
                                : reduce_wave(data.pb.wave->fom, basis, &op_hat_full);
            }
            const RomSolution sol = rom_solve(model, mu, cfg.time);
            const Matrix lifted = is_heat
                                      ? sol.lifted
                                      : cotangent_lift_snapshots(sol.lifted, sol.lifted_b);
            const double rom = trajectory_norm(ref - lifted, *mass) / ref_norm;
            return std::make_pair(proj, rom);
        };

        const SweepResult result =
            rank_sweep(options.methods, cfg.sweep_ranks, params.count(), fn);
        for (const auto& failure : result.failures)
            std::cerr << "evaluate " << set << " failed at " << failure << "\n";
        write_sweep_csv(path_in(cfg, "sweep_" + set + ".csv"), result.rows);
        write_aggregate_csv(path_in(cfg, "sweep_" + set + "_agg.csv"),
                            aggregate_sweep(result.rows));
        if (!result.failures.empty())
            throw NumericalError(std::to_string(result.failures.size()) +
                                 " evaluation cells failed; partial tables were written");
    }
}

void evaluate_maxwell(const ExperimentConfig& cfg, const EvalData& data,
                      const EvaluateOptions& options) {
    const MaxwellFom& fom = data.pb.maxwell->fom;

    // hyper-reduction offline data from the training load snapshots
    Matrix j_snap(fom.m_e->dim(), data.train_params.count());
    for (Index s = 0; s < data.train_params.count(); ++s)
        j_snap.col(s) = fom.j_sp_for(data.train_params.sample(s));
    const QdeimData qdeim = qdeim_offline(j_snap, cfg.qdeim_rank, fom.dof_elements);
    {
        std::vector<std::vector<double>> rows;
        for (Index m = 0; m < qdeim.energy_fraction.size(); ++m)
            rows.push_back({static_cast<double>(m + 1), qdeim.energy_fraction[m]});
        io::write_csv(path_in(cfg, "qdeim_energy.csv"), {"rank", "energy_fraction"}, rows);
        std::cout << "evaluate: Q-DEIM rank " << cfg.qdeim_rank << " captures "
                  << qdeim.energy_fraction[cfg.qdeim_rank - 1]
                  << " of the load energy; selection touches " << qdeim.element_support.size()
                  << " of " << fom.m_b->dim() << " elements\n";
    }

    Index max_rank = 1;
    for (Index r : cfg.sweep_ranks) max_rank = std::max(max_rank, r);
    const MonolithicBasis mono_e = monolithic_basis(data.train_x, fom.m_e, max_rank);
    const MonolithicBasis mono_b = monolithic_basis(data.train_xb, fom.m_b, max_rank);
    emit_sv_decay(cfg, data, mono_e);

    for (const std::string& set : options.sets) {
        const bool train_set = set == "train";
        const ParameterSet& params = train_set ? data.train_params : data.test_params;
        const Tensor3& refs_e = train_set ? data.train_x : data.test_x;
        const Tensor3& refs_b = train_set ? data.train_xb : data.test_xb;

        const Index n_methods = static_cast<Index>(options.methods.size());
        const Index n_ranks = static_cast<Index>(cfg.sweep_ranks.size());
        const Index total = n_methods * n_ranks * params.count();
        std::vector<SweepRow> rows_e(static_cast<size_t>(total));
        std::vector<SweepRow> rows_b(static_cast<size_t>(total));
        std::vector<std::string> failures(static_cast<size_t>(total));

#pragma omp parallel for schedule(dynamic)
        for (Index task = 0; task < total; ++task) {
            const Index per_method = n_ranks * params.count();
            const std::string& method = options.methods[static_cast<size_t>(task / per_method)];
            const Index rank = cfg.sweep_ranks[static_cast<size_t>((task % per_method) /
                                                                   params.count())];
            const Index param = task % params.count();
            SweepRow row_e{method, rank, param, 0.0, 0.0};
            SweepRow row_b{method, rank, param, 0.0, 0.0};
            try {
                const Vector mu = params.sample(param);
                const Matrix ref_e = refs_e.slice(param);
                const Matrix ref_b = refs_b.slice(param);
                const double norm_e = trajectory_norm(ref_e, *fom.m_e);
                const double norm_b = trajectory_norm(ref_b, *fom.m_b);

                Matrix u_e, u_b;
                if (method == "monolithic") {
                    u_e = mono_e.u.leftCols(rank);
                    u_b = mono_b.u.leftCols(rank);
                } else {
                    const GeneralizedIndex e =
                        query_index(cfg, data, method, train_set, param, mu);
                    u_e = local_basis(data.factors, e, rank, mu).u;
                    u_b = local_basis(data.factors_b, e, rank, mu).u;
                }
                const auto [enr_e, enr_b] = curl_enrich(u_e, u_b, fom.delta, *fom.m_e, *fom.m_b);
                row_e.projection_error = projection_error(ref_e, enr_e, *fom.m_e) / norm_e;
                row_b.projection_error = projection_error(ref_b, enr_b, *fom.m_b) / norm_b;

                const ReducedModel model = reduce_maxwell(fom, enr_e, enr_b, qdeim);
                const RomSolution sol = rom_solve(model, mu, cfg.time);
                row_e.rom_error = trajectory_norm(ref_e - sol.lifted, *fom.m_e) / norm_e;
                row_b.rom_error = trajectory_norm(ref_b - sol.lifted_b, *fom.m_b) / norm_b;
            } catch (const std::exception& ex) {
                failures[static_cast<size_t>(task)] =
                    "(" + method + ", " + std::to_string(rank) + ", " + std::to_string(param) +
                    "): " + ex.what();
            }
            rows_e[static_cast<size_t>(task)] = std::move(row_e);
            rows_b[static_cast<size_t>(task)] = std::move(row_b);
        }

        std::vector<std::string> failed;
        std::vector<SweepRow> kept_e, kept_b;
        for (Index task = 0; task < total; ++task) {
            if (failures[static_cast<size_t>(task)].empty()) {
                kept_e.push_back(rows_e[static_cast<size_t>(task)]);
                kept_b.push_back(rows_b[static_cast<size_t>(task)]);
            } else {
                failed.push_back(failures[static_cast<size_t>(task)]);
            }
        }
        for (const auto& failure : failed)
            std::cerr << "evaluate " << set << " failed at " << failure << "\n";
        write_sweep_csv(path_in(cfg, "sweep_" + set + "_e.csv"), kept_e);
        write_sweep_csv(path_in(cfg, "sweep_" + set + "_b.csv"), kept_b);
        write_aggregate_csv(path_in(cfg, "sweep_" + set + "_e_agg.csv"), aggregate_sweep(kept_e));
        write_aggregate_csv(path_in(cfg, "sweep_" + set + "_b_agg.csv"), aggregate_sweep(kept_b));
        if (!failed.empty())
            throw NumericalError(std::to_string(failed.size()) +
                                 " evaluation cells failed; partial tables were written");
    }
}

}  // namespace

void run_evaluate(const ExperimentConfig& cfg, const EvaluateOptions& options) {
    for (const std::string& method : options.methods)
        if (method != "monolithic" && method != "mo" && method != "grbf")
            throw UsageError("unknown method '" + method + "'");
    for (const std::string& set : options.sets)
        if (set != "train" && set != "test")
            throw UsageError("unknown evaluation set '" + set + "'");

    json manifest = load_manifest(cfg);
    for (const char* set : {"train", "test"})
        for (const std::string& name : snapshot_names(cfg.problem, set))
            verify_artifact(manifest, cfg, name);

    EvalData data{build_problem(cfg),
                  ParameterSet::from_csv(path_in(cfg, "params_train.csv")),
                  ParameterSet::from_csv(path_in(cfg, "params_test.csv")),
                  Tensor3(),
                  Tensor3(),
                  Tensor3(),
                  Tensor3(),
                  TuckerFactors{},
                  TuckerFactors{}};

    const auto mass = data.pb.primary_mass();
    if (cfg.problem == ProblemKind::maxwell) {
        verify_artifact(manifest, cfg, "factors_e.tromf");
        verify_artifact(manifest, cfg, "factors_b.tromf");
        data.train_x = io::read_tensor(path_in(cfg, "snapshots_train_e.trom"));
        data.test_x = io::read_tensor(path_in(cfg, "snapshots_test_e.trom"));
        data.train_xb = io::read_tensor(path_in(cfg, "snapshots_train_b.trom"));
        data.test_xb = io::read_tensor(path_in(cfg, "snapshots_test_b.trom"));
        data.factors = io::read_factors(path_in(cfg, "factors_e.tromf"),
                                        cfg.weighted ? data.pb.maxwell->fom.m_e : nullptr);
        data.factors_b = io::read_factors(path_in(cfg, "factors_b.tromf"),
                                          cfg.weighted ? data.pb.maxwell->fom.m_b : nullptr);
        evaluate_maxwell(cfg, data, options);
    } else {
        verify_artifact(manifest, cfg, "factors.tromf");
        data.train_x = io::read_tensor(path_in(cfg, "snapshots_train.trom"));
        data.test_x = io::read_tensor(path_in(cfg, "snapshots_test.trom"));
        data.factors = io::read_factors(path_in(cfg, "factors.tromf"),
                                        cfg.weighted ? mass : nullptr);
        evaluate_heat_wave(cfg, data, options);
    }
    std::cout << "evaluate: wrote sweep tables to " << cfg.output_dir << "\n";
}

}  // namespace trom::cli
