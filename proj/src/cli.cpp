#include "qaoalab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qaoalab/adiabatic.hpp"
#include "qaoalab/compiler.hpp"
#include "qaoalab/csp_io.hpp"
#include "qaoalab/errors.hpp"
#include "qaoalab/postsel.hpp"
#include "qaoalab/qaoa.hpp"
#include "qaoalab/supremacy.hpp"

namespace qaoalab::cli {
namespace {

using json = nlohmann::ordered_json;

struct Common {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::string format = "json";
};

/// Everything a subcommand writes to --out.
struct Record {
    json config = json::object();
    json result = json::object();
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
};

/// Thrown when a run completes but its numerical check fails.
struct CheckFailed {
    std::string what;
};

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

CspInstance load_instance(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".cnf" || ext == ".dimacs") return read_dimacs_file(path);
    return read_csp_file(path);
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "output record path");
    sub->add_option("--format", c.format, "output record format")->check(CLI::IsMember({"json", "csv"}));
}

void flatten(const json& j, const std::string& prefix, std::vector<std::vector<std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
    } else if (j.is_string()) {
        rows.push_back({prefix, j.get<std::string>()});
    } else {
        rows.push_back({prefix, j.dump()});
    }
}

void write_record(const std::string& sub, const Common& c, Record& rec) {
    if (c.out.empty()) return;
    rec.config["subcommand"] = sub;
    rec.config["seed"] = c.seed;
    rec.config["threads"] = c.threads;
    rec.config["format"] = c.format;
    std::ofstream f(c.out);
    if (!f) throw std::invalid_argument("--out: cannot open '" + c.out + "' for writing");
    if (c.format == "json") {
        json doc;
        doc["tool"] = kToolName;
        doc["version"] = kVersion;
        doc["config"] = rec.config;
        doc["result"] = rec.result;
        f << doc.dump(2) << '\n';
        return;
    }
    f << "# " << kToolName << ' ' << kVersion << ' ' << rec.config.dump() << '\n';
    if (rec.csv_header.empty()) {
        rec.csv_header = {"key", "value"};
        rec.csv_rows.clear();
        flatten(rec.result, "", rec.csv_rows);
    }
    auto line = [&f](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
        f << '\n';
    };
    line(rec.csv_header);
    for (const auto& r : rec.csv_rows) line(r);
}

json histogram_json(const std::vector<double>& p, int n) {
    json h = json::object();
    for (Index z = 0; z < p.size(); ++z) {
        if (p[z] > 0) h[to_bitstring(z, n)] = p[z];
    }
    return h;
}

void histogram_rows(Record& rec, const std::vector<double>& p, int n) {
    rec.csv_header = {"z", "probability"};
    for (Index z = 0; z < p.size(); ++z) rec.csv_rows.push_back({to_bitstring(z, n), num(p[z])});
}

struct Options {
    std::string file;
    int p = 1;
    int resolution = 64;
    int rounds = 20;
    std::vector<double> gammas;
    std::vector<double> betas;
    std::int64_t shots = 1000;
    std::int64_t threshold = -1;
    std::string compiled_out;
    double tol = 1e-9;
    std::string schedule = "streaming";
    std::vector<double> s_values;
    int s_steps = 10;
    double s = 0.5;
    double beta = 10.0;
    int L = 0;
    std::int64_t sweeps = 10000;
    int chains = 1;
    bool all_slices = false;
    int anneal_steps = 20;
    double s_final = 0.95;
    std::int64_t samples = 1;
    std::int64_t max_attempts = 100000000;
    double T = 10.0;
    double dt = 0.01;
    double target = -1.0;
    double max_T = 1e5;
};

PimcConfig pimc_config(const Options& o, const Common& c, const CspInstance& inst, double s) {
    PimcConfig cfg;
    cfg.beta = o.beta;
    cfg.s = s;
    cfg.L = o.L > 0 ? o.L : default_slices(inst, o.beta, s);
    cfg.sweeps = o.sweeps;
    cfg.seed = c.seed;
    cfg.chains = o.chains;
    cfg.record_all_slices = o.all_slices;
    cfg.validate();
    return cfg;
}

int cmd_qaoa_opt(const Options& o, const Common& c, std::ostream& out, Record& rec) {
    const auto inst = load_instance(o.file);
    rec.config = {{"instance", o.file}, {"p", o.p}, {"resolution", o.resolution}, {"rounds", o.rounds}};
    if (o.p < 1) throw std::invalid_argument("--p must be >= 1");
    auto best = grid_search(inst, o.resolution, c.threads);
    if (o.p > 1) best = coordinate_optimize(inst, o.p, best.angles.padded(o.p), o.rounds);
    out << "objective " << num(best.objective) << '\n';
    for (int k = 0; k < best.angles.p(); ++k) {
        out << "gamma" << k + 1 << ' ' << num(best.angles.gammas()[static_cast<std::size_t>(k)]) << " beta" << k + 1 << ' '
            << num(best.angles.betas()[static_cast<std::size_t>(k)]) << '\n';
    }
    rec.result = {{"objective", best.objective}, {"gammas", best.angles.gammas()}, {"betas", best.angles.betas()},
                  {"history", best.history}, {"c_max", c_max(inst)}};
    return kSuccess;
}

int cmd_qaoa_sample(const Options& o, const Common& c, std::ostream& out, Record& rec) {
    rec.config = {{"instance", o.file}, {"p", o.p}, {"gamma", o.gammas}, {"beta", o.betas}, {"shots", o.shots}};
    if (o.shots < 1) throw std::invalid_argument("--shots must be >= 1");
    if (static_cast<int>(o.gammas.size()) != o.p) throw std::invalid_argument("--gamma needs exactly p values");
    if (static_cast<int>(o.betas.size()) != o.p) throw std::invalid_argument("--beta needs exactly p values");
    const auto inst = load_instance(o.file);
    const Angles angles(o.gammas, o.betas);
    const auto psi = build_state(inst, angles);
    const auto draws = psi.sample(static_cast<std::size_t>(o.shots), c.seed);
    std::map<Index, std::int64_t> counts;
    for (Index z : draws) ++counts[z];
    json hist = json::object();
    rec.csv_header = {"z", "count", "cost"};
    for (const auto& [z, k] : counts) {
        const auto bits = to_bitstring(z, inst.n());
        out << bits << ' ' << k << '\n';
        hist[bits] = k;
        rec.csv_rows.push_back({bits, std::to_string(k), std::to_string(cost(inst, z))});
    }
    rec.result = {{"expectation", expectation_cost(psi, inst)}, {"counts", hist}};
    return kSuccess;
}

int cmd_fourier_count(const Options& o, const Common& c, std::ostream& out, Record& rec) {
    rec.config = {{"instance", o.file}};
    const auto inst = load_instance(o.file);
    const auto series = matrix_element_series(inst, c.threads);
    const auto hist = recover_histogram(series);
    const auto count = fourier_count(inst, c.threads);
    out << count << '\n';
    json samples = json::array();
    for (const auto& e : series.samples) samples.push_back({e.real(), e.imag()});
    rec.result = {{"count", count}, {"histogram", hist.counts()}, {"denominator", series.denominator}, {"samples", samples}};
    rec.csv_header = {"v", "count"};
    for (int v = 0; v <= inst.m(); ++v) rec.csv_rows.push_back({std::to_string(v), std::to_string(hist.count(v))});
    return kSuccess;
}

int cmd_grover_count(const Options& o, const Common&, std::ostream& out, Record& rec) {
    rec.config = {{"oracle", o.file}, {"threshold", o.threshold}};
    const auto oracle = read_oracle_file(o.file);
    const auto pair = phase_overlap_state(oracle);
    if (o.threshold >= 0) {
        const auto t = threshold_test(oracle, static_cast<Index>(o.threshold));
        const bool greater = t.decision == Threshold::Greater;
        out << (greater ? "greater" : "less-or-equal") << '\n';
        rec.result = {{"greater", greater}, {"boundary", t.raw == Threshold::EqualBoundary}, {"steps", t.steps},
                      {"amplified", {t.amplified.c, t.amplified.s}}};
        return kSuccess;
    }
    int tests = 0;
    const auto M = count_marked(oracle, &tests);
    out << M << '\n';
    rec.result = {{"count", M}, {"threshold_tests", tests}, {"tan_theta", pair.s / pair.c}};
    return kSuccess;
}

int cmd_compile(const Options& o, const Common&, std::ostream& out, Record& rec) {
    rec.config = {{"circuit", o.file}, {"compiled_out", o.compiled_out}};
    const auto circuit = read_circuit_file(o.file);
    const auto compiled = compile(circuit);
    out << "n_total " << compiled.n_total << " aux " << compiled.aux_count << " clauses " << compiled.cost.m() << '\n';
    if (!o.compiled_out.empty()) {
        std::ofstream f(o.compiled_out);
        if (!f) throw std::invalid_argument("--csp-out: cannot open '" + o.compiled_out + "'");
        write_csp(f, compiled.cost);
    }
    rec.result = json::parse(compiled_sidecar_json(compiled));
    rec.result["m"] = compiled.cost.m();
    return kSuccess;
}

int cmd_verify(const Options& o, const Common&, std::ostream& out, Record& rec) {
    rec.config = {{"circuit", o.file}, {"tol", o.tol}, {"schedule", o.schedule}};
    if (!(o.tol > 0)) throw std::invalid_argument("--tol must be > 0");
    const auto circuit = read_circuit_file(o.file);
    const auto compiled = compile(circuit);
    const auto schedule = o.schedule == "layered" ? Schedule::Layered : Schedule::Streaming;
    const auto rep = verify_equivalence(circuit, compiled, o.tol, schedule);
    out << (rep.passed ? "PASS" : "FAIL") << " tv " << num(rep.total_variation) << " max_dev "
        << num(rep.max_pointwise_deviation) << " amp_dev " << num(rep.amplitude_deviation) << '\n';
    rec.result = {{"passed", rep.passed},
                  {"total_variation", rep.total_variation},
                  {"max_pointwise_deviation", rep.max_pointwise_deviation},
                  {"amplitude_deviation", rep.amplitude_deviation},
                  {"amplitude_deviation_free_phase", rep.amplitude_deviation_free_phase},
                  {"n_total", compiled.n_total}};
    if (!rep.passed) throw CheckFailed{"verify: deviation above --tol"};
    return kSuccess;
}

int cmd_spectrum(const Options& o, const Common&, std::ostream& out, Record& rec) {
    std::vector<double> svals = o.s_values;
    if (svals.empty()) {
        if (o.s_steps < 1) throw std::invalid_argument("--s-steps must be >= 1");
        for (int k = 0; k <= o.s_steps; ++k) svals.push_back(static_cast<double>(k) / o.s_steps);
    }
    rec.config = {{"instance", o.file}, {"s", svals}};
    const auto inst = load_instance(o.file);
    rec.csv_header = {"s", "ground_energy", "gap", "stoquastic"};
    json rows = json::array();
    for (double s : svals) {
        const bool stoq = stoquastic_check(hamiltonian_dense(inst, s));
        const auto sd = ground_state(inst, s);
        out << num(s) << ' ' << num(sd.ground_energy) << ' ' << num(sd.gap) << (stoq ? "" : " non-stoquastic") << '\n';
        rows.push_back({{"s", s}, {"ground_energy", sd.ground_energy}, {"gap", sd.gap}, {"stoquastic", stoq}});
        rec.csv_rows.push_back({num(s), num(sd.ground_energy), num(sd.gap), stoq ? "1" : "0"});
        if (!stoq) throw CheckFailed{"adiabatic-spectrum: H(s) is not stoquastic"};
    }
    rec.result = {{"points", rows}};
    return kSuccess;
}

int cmd_pimc(const Options& o, const Common& c, std::ostream& out, Record& rec) {
    const auto inst = load_instance(o.file);
    const auto cfg = pimc_config(o, c, inst, o.s);
    rec.config = {{"instance", o.file}, {"s", cfg.s}, {"beta", cfg.beta}, {"L", cfg.L}, {"sweeps", cfg.sweeps},
                  {"chains", cfg.chains}, {"all_slices", cfg.record_all_slices}};
    const auto res = pimc_sample(inst, cfg, c.threads);
    out << "acceptance " << num(res.acceptance_rate) << " autocorrelation " << num(res.autocorrelation_time)
        << " mean_cost " << num(res.mean_cost) << '\n';
    rec.result = {{"acceptance_rate", res.acceptance_rate}, {"autocorrelation_time", res.autocorrelation_time},
                  {"mean_cost", res.mean_cost}, {"recorded", res.recorded},
                  {"marginal", histogram_json(res.marginal, inst.n())}};
    if (inst.n() <= kDenseQubitLimit) {
        const double tv_gibbs = total_variation(res.marginal, gibbs_distribution(inst, cfg.s, cfg.beta));
        const double tv_trotter = total_variation(res.marginal, trotter_marginal(inst, cfg));
        out << "tv_gibbs " << num(tv_gibbs) << " tv_trotter " << num(tv_trotter) << '\n';
        rec.result["tv_to_gibbs"] = tv_gibbs;
        rec.result["tv_to_trotter"] = tv_trotter;
    }
    histogram_rows(rec, res.marginal, inst.n());
    return kSuccess;
}

int cmd_sqa(const Options& o, const Common& c, std::ostream& out, Record& rec) {
    const auto inst = load_instance(o.file);
    if (o.anneal_steps < 1) throw std::invalid_argument("--steps must be >= 1");
    if (!(o.s_final > 0.0 && o.s_final < 1.0)) throw std::invalid_argument("--s-final must lie in (0, 1)");
    std::vector<double> schedule;
    for (int k = 0; k < o.anneal_steps; ++k) schedule.push_back(o.s_final * k / std::max(1, o.anneal_steps - 1));
    const auto cfg = pimc_config(o, c, inst, o.s_final);
    rec.config = {{"instance", o.file}, {"beta", cfg.beta}, {"L", cfg.L}, {"steps", o.anneal_steps},
                  {"s_final", o.s_final}, {"sweeps_per_step", o.sweeps}};
    const auto res = sqa_anneal(inst, schedule, o.sweeps, cfg);
    out << "best_cost " << res.best_cost << " z " << to_bitstring(res.best_z, inst.n()) << '\n';
    json traj = json::array();
    rec.csv_header = {"s", "mean_cost", "best_cost", "acceptance_rate"};
    for (const auto& st : res.trajectory) {
        traj.push_back({{"s", st.s}, {"mean_cost", st.mean_cost}, {"best_cost", st.best_cost}, {"acceptance_rate", st.acceptance_rate}});
        rec.csv_rows.push_back({num(st.s), num(st.mean_cost), std::to_string(st.best_cost), num(st.acceptance_rate)});
    }
    rec.result = {{"best_cost", res.best_cost}, {"best_z", to_bitstring(res.best_z, inst.n())}, {"trajectory", traj}};
    return kSuccess;
}

int cmd_reject(const Options& o, const Common& c, std::ostream& out, Record& rec) {
    const auto inst = load_instance(o.file);
    if (o.samples < 1) throw std::invalid_argument("--samples must be >= 1");
    const auto cfg = pimc_config(o, c, inst, o.s);
    rec.config = {{"instance", o.file}, {"s", cfg.s}, {"beta", cfg.beta}, {"L", cfg.L}, {"samples", o.samples},
                  {"max_attempts", o.max_attempts}};
    std::mt19937_64 rng(c.seed);
    std::int64_t attempts = 0;
    json drawn = json::array();
    rec.csv_header = {"z", "attempts"};
    for (std::int64_t i = 0; i < o.samples; ++i) {
        const auto r = rejection_sample(inst, cfg, o.max_attempts, rng);
        attempts += r.attempts;
        const auto bits = to_bitstring(r.sample.z, inst.n());
        drawn.push_back(bits);
        rec.csv_rows.push_back({bits, std::to_string(r.attempts)});
        out << bits << '\n';
    }
    out << "mean_attempts " << num(static_cast<double>(attempts) / static_cast<double>(o.samples)) << '\n';
    rec.result = {{"samples", drawn}, {"total_attempts", attempts}, {"log_w_max", log_w_max(inst, cfg)}};
    return kSuccess;
}

int cmd_evolve(const Options& o, const Common&, std::ostream& out, Record& rec) {
    const auto inst = load_instance(o.file);
    rec.config = {{"instance", o.file}, {"T", o.T}, {"dt", o.dt}, {"target", o.target}, {"max_T", o.max_T}};
    double T = o.T;
    if (o.target > 0) {
        const auto sched = find_adiabatic_time(inst, o.dt, o.target, o.T, o.max_T);
        T = sched.T;
        rec.result["doublings"] = sched.doublings;
    }
    const auto psi = adiabatic_evolve(inst, T, o.dt);
    const double fid = optimum_fidelity(inst, psi);
    out << "T " << num(T) << " fidelity " << num(fid) << '\n';
    rec.result["T"] = T;
    rec.result["fidelity"] = fid;
    histogram_rows(rec, psi.probabilities(), inst.n());
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"QAOA, post-selection and adiabatic simulation laboratory", kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Options o;
    Common c;
    using Handler = std::function<int(const Options&, const Common&, std::ostream&, Record&)>;
    std::vector<std::pair<CLI::App*, Handler>> subs;

    auto with_file = [&](const std::string& name, const std::string& desc, const std::string& what, Handler h) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option(what, o.file, what + " file")->required()->check(CLI::ExistingFile);
        add_common(sub, c);
        subs.emplace_back(sub, std::move(h));
        return sub;
    };
    auto pimc_opts = [&](CLI::App* sub) {
        sub->add_option("--beta", o.beta, "inverse temperature");
        sub->add_option("--L", o.L, "Trotter slices (0 picks the default)");
        sub->add_option("--chains", o.chains, "independent chains");
    };

    auto* opt = with_file("qaoa-opt", "optimize QAOA angles", "instance", cmd_qaoa_opt);
    opt->add_option("--p", o.p, "depth");
    opt->add_option("--resolution", o.resolution, "p=1 grid resolution")->check(CLI::PositiveNumber);
    opt->add_option("--rounds", o.rounds, "coordinate rounds for p > 1");

    auto* smp = with_file("qaoa-sample", "sample the QAOA output distribution", "instance", cmd_qaoa_sample);
    smp->add_option("--p", o.p, "depth");
    smp->add_option("--gamma", o.gammas, "cost angles")->required();
    smp->add_option("--beta", o.betas, "mixer angles")->required();
    smp->add_option("--shots", o.shots, "number of samples");

    with_file("fourier-count", "count satisfying assignments from matrix elements", "instance", cmd_fourier_count);

    auto* grv = with_file("grover-count", "count marked items by post-selection", "oracle", cmd_grover_count);
    grv->add_option("--threshold", o.threshold, "run one threshold test at T instead of counting");

    auto* cmp = with_file("compile", "compile a circuit into post-selected QAOA form", "circuit", cmd_compile);
    cmp->add_option("--csp-out", o.compiled_out, "write the compiled cost function here");

    auto* ver = with_file("verify", "check a compiled circuit against direct simulation", "circuit", cmd_verify);
    ver->add_option("--tol", o.tol, "tolerance");
    ver->add_option("--schedule", o.schedule, "compiled simulation order")->check(CLI::IsMember({"streaming", "layered"}));

    auto* spc = with_file("adiabatic-spectrum", "ground energy and gap of H(s)", "instance", cmd_spectrum);
    spc->add_option("--s", o.s_values, "schedule points");
    spc->add_option("--s-steps", o.s_steps, "uniform grid on [0, 1] when --s is absent");

    auto* pim = with_file("pimc", "path-integral Monte Carlo at fixed s", "instance", cmd_pimc);
    pim->add_option("--s", o.s, "schedule point");
    pim->add_option("--sweeps", o.sweeps, "Metropolis sweeps");
    pim->add_flag("--all-slices", o.all_slices, "histogram every slice");
    pimc_opts(pim);

    auto* sqa = with_file("sqa", "simulated quantum annealing", "instance", cmd_sqa);
    sqa->add_option("--steps", o.anneal_steps, "schedule points");
    sqa->add_option("--s-final", o.s_final, "last schedule point");
    sqa->add_option("--sweeps", o.sweeps, "sweeps per schedule point");
    pimc_opts(sqa);

    auto* rej = with_file("reject-sample", "exact worldline rejection sampler", "instance", cmd_reject);
    rej->add_option("--s", o.s, "schedule point");
    rej->add_option("--samples", o.samples, "accepted samples to draw");
    rej->add_option("--max-attempts", o.max_attempts, "attempt budget per sample");
    pimc_opts(rej);

    auto* evo = with_file("evolve", "Schrodinger evolution along H(t/T)", "instance", cmd_evolve);
    evo->add_option("--T", o.T, "total time");
    evo->add_option("--dt", o.dt, "time step");
    evo->add_option("--target", o.target, "double T until this fidelity is reached");
    evo->add_option("--max-T", o.max_T, "largest T tried when doubling");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kValidationError;
    }

    for (auto& [sub, handler] : subs) {
        if (!sub->parsed()) continue;
        Record rec;
        int code = kSuccess;
        try {
            code = handler(o, c, out, rec);
        } catch (const CheckFailed& f) {
            err << f.what << '\n';
            code = kNumericalFailure;
        } catch (const NumericalError& e) {
            err << sub->get_name() << ": " << e.what() << '\n';
            return kNumericalFailure;
        } catch (const std::exception& e) {
            err << sub->get_name() << ": " << e.what() << '\n';
            return kValidationError;
        }
        try {
            write_record(sub->get_name(), c, rec);
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return kValidationError;
        }
        return code;
    }
    return kValidationError;
}

}  // namespace qaoalab::cli
