// coherence-kit: command-line front end for the coherence library.
//
// Exit codes: 0 success, 1 validation failure, 2 a certificate or check came
// out false, 3 numerical failure.

#include <coherence/coherence.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

using namespace coherence;

namespace {

enum ExitCode { exit_ok = 0, exit_validation = 1, exit_check_failed = 2, exit_numerical = 3 };

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Options {
    std::string input;
    std::string output;
    std::string candidate;
    std::string target;
    std::string format = "json";
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::vector<std::string> measures;

    std::string kind = "pure";
    Index n = 2;
    Index m = 0;
    Index split = 0;
    long count = 1;
    Index terms = 4;
    std::vector<Index> sizes{1000, 10000, 100000, 1000000};
    int repetitions = 5;
    std::string method = "subgradient";
    long resolution = 300;
    long max_iters = SubgradientOptions{}.max_iters;
};

// ---------------------------------------------------------------------------
// Input

struct Input {
    std::string path;
    std::string text;
    std::vector<StateFile> states;
};

std::string fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Input load(const std::string& path, const char* flag)
{
    if (path.empty())
        throw ValidationError(std::string(flag) + " is required");
    Input in;
    in.path = path;
    if (path == "-") {
        in.text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw ValidationError("cannot open " + path);
        in.text.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }
    std::istringstream s(in.text);
    try {
        in.states = read_states(s);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
    return in;
}

// ---------------------------------------------------------------------------
// JSON helpers

Json real_json(const RealVector& v)
{
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i)
        a.push_back(v(i));
    return a;
}

Json complex_json(const ComplexVector& v)
{
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i)
        a.push_back(Json::array({v(i).real(), v(i).imag()}));
    return a;
}

Json real_matrix_json(const RealMatrix& m)
{
    Json a = Json::array();
    for (Index i = 0; i < m.rows(); ++i)
        a.push_back(real_json(m.row(i).transpose()));
    return a;
}

Json index_json(const std::vector<Index>& v)
{
    Json a = Json::array();
    for (Index i : v)
        a.push_back(i);
    return a;
}

// ---------------------------------------------------------------------------
// Batch evaluation in input order

/// Evaluates body(i) for every item in parallel. Failures are reported for
/// the lowest failing index, so the outcome does not depend on scheduling.
template <typename Body>
std::vector<Json> map_items(std::size_t count, Body body, std::vector<double>& seconds)
{
    std::vector<Json> out(count);
    std::vector<std::exception_ptr> errors(count);
    seconds.assign(count, 0.0);
    parallel_for(count, [&](std::size_t i) {
        const auto t0 = clock_type::now();
        try {
            out[i] = body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
        seconds[i] = seconds_since(t0);
    });
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

// ---------------------------------------------------------------------------
// Output

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows)
{
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
        return;
    }
    if (j.is_array() && !j.empty() && (j[0].is_object() || (j[0].is_array() && j[0].size() > 2))) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
        return;
    }
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : dump_json(j));
}

std::string render(const Json& report, const std::string& format)
{
    if (format == "json")
        return dump_json(report, 2) + "\n";
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(report, "", rows);
    std::size_t width = 0;
    for (const auto& r : rows)
        width = std::max(width, r.first.size());
    std::ostringstream os;
    for (const auto& r : rows)
        os << std::left << std::setw(static_cast<int>(width)) << r.first << "  " << r.second << "\n";
    return os.str();
}

void emit(const std::string& text, const Options& opt)
{
    if (opt.output.empty() || opt.output == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(opt.output, std::ios::binary);
    if (!f)
        throw ValidationError("cannot write " + opt.output);
    f << text;
}

Json make_report(const std::string& command, const Options& opt, const Input* in)
{
    Json r;
    r["tool"] = tool_name;
    r["version"] = version;
    r["command"] = command;
    r["seed"] = opt.seed;
    if (in) {
        r["input"] = {{"path", in->path}, {"digest", fnv1a64(in->text)}, {"states", in->states.size()}};
    }
    return r;
}

void attach_timings(Json& report, double total, const std::vector<double>& per_item)
{
    report["timings"] = {{"total_seconds", total}, {"per_item_seconds", per_item}};
}

// ---------------------------------------------------------------------------
// measures

Json measures_for(const StateFile& sf, std::size_t index, const std::vector<std::string>& requested)
{
    const bool pure = sf.kind == StateKind::pure || sf.kind == StateKind::bipartite_pure;
    std::vector<std::string> which = requested;
    if (which.empty())
        which = pure ? std::vector<std::string>{"l1", "rel-ent", "robustness", "tr"}
                     : std::vector<std::string>{"l1", "rel-ent", "tr"};

    Json out;
    out["index"] = index;
    out["kind"] = to_string(sf.kind);
    out["dim"] = pure ? sf.pure().dim() : sf.density().dim();
    Json values = Json::object();
    Diagnostics diag;
    for (const std::string& m : which) {
        if (m == "l1") {
            values["l1"] = pure ? c_l1(sf.pure()) : c_l1(sf.density());
        } else if (m == "rel-ent") {
            values["rel-ent"] = pure ? c_rel_entropy(sf.pure()) : c_rel_entropy(sf.density(), &diag);
        } else if (m == "robustness") {
            if (!pure)
                throw ValidationError("state " + std::to_string(index) +
                                      ": measure 'robustness' requires a pure state, got kind '" +
                                      to_string(sf.kind) + "'");
            values["robustness"] = c_robustness_pure(sf.pure());
        } else if (m == "tr") {
            if (pure) {
                const auto r = nearest_incoherent(sf.pure());
                values["tr"] = {{"value", r.c_tr}, {"approximate", false}, {"k", r.k},
                                {"D", real_json(r.D.diag())}};
            } else {
                const auto r = c_tr_subgradient(sf.density());
                values["tr"] = {{"value", r.value}, {"approximate", true}, {"method", "subgradient"},
                                {"iterations", r.iterations}, {"converged", r.converged},
                                {"D", real_json(r.argmin.diag())}};
            }
        } else {
            throw ValidationError("unknown measure '" + m + "' (expected l1, rel-ent, robustness or tr)");
        }
    }
    out["values"] = std::move(values);
    if (!diag.warnings.empty())
        out["warnings"] = diag.warnings;
    return out;
}

int cmd_measures(const Options& opt)
{
    const auto t0 = clock_type::now();
    const Input in = load(opt.input, "--input");
    std::vector<double> seconds;
    Json report = make_report("measures", opt, &in);
    report["measures"] = opt.measures;
    report["results"] = map_items(
        in.states.size(), [&](std::size_t i) { return measures_for(in.states[i], i, opt.measures); },
        seconds);
    attach_timings(report, seconds_since(t0), seconds);
    emit(render(report, opt.format), opt);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// nearest

PureState require_pure(const StateFile& sf, std::size_t index, const char* command)
{
    if (sf.kind == StateKind::pure || sf.kind == StateKind::bipartite_pure)
        return sf.pure();
    throw ValidationError(std::string(command) + ": state " + std::to_string(index) +
                          " has kind '" + to_string(sf.kind) +
                          "'; the closed form needs a pure state (use the oracle command for mixed states)");
}

int cmd_nearest(const Options& opt)
{
    const auto t0 = clock_type::now();
    const Input in = load(opt.input, "--input");
    std::vector<double> seconds;
    Json report = make_report("nearest", opt, &in);
    report["results"] = map_items(in.states.size(), [&](std::size_t i) {
        const PureState x = require_pure(in.states[i], i, "nearest");
        const auto r = nearest_incoherent(x);
        const RealVector& mod = r.canonical.moduli;
        const auto stats = prefix_stats(mod);
        Json out = {{"index", i},
                    {"dim", x.dim()},
                    {"k", r.k},
                    {"q_k", r.q_k},
                    {"c_tr", r.c_tr},
                    {"operator_distance", r.op_dist},
                    {"D", real_json(r.D.diag())},
                    {"thresholds", real_json(stats.q)},
                    {"permutation", index_json(r.canonical.permutation)},
                    {"eigenvector", complex_json(r.v)},
                    {"eigen_residual", eigen_residual(x, r)}};
        if (x.dim() >= 2) {
            const auto flags = rank_shortcuts(mod);
            out["shortcuts"] = {{"rank_one", flags.rank_one}, {"full_rank", flags.full_rank}};
        }
        return out;
    }, seconds);
    attach_timings(report, seconds_since(t0), seconds);
    emit(render(report, opt.format), opt);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// verify

IncoherentState candidate_state(const StateFile& sf, std::size_t index)
{
    if (sf.kind == StateKind::incoherent)
        return sf.incoherent();
    if (sf.kind == StateKind::mixed) {
        const DensityMatrix d = sf.density();
        if (max_offdiagonal(d.matrix()) > default_tolerances.construction)
            throw ValidationError("candidate " + std::to_string(index) + " is not diagonal");
        return IncoherentState(d.diagonal());
    }
    throw ValidationError("candidate " + std::to_string(index) + " has kind '" + to_string(sf.kind) +
                          "', expected 'incoherent' or a diagonal 'mixed' state");
}

int cmd_verify(const Options& opt)
{
    const auto t0 = clock_type::now();
    const Input in = load(opt.input, "--input");
    const Input cand = load(opt.candidate, "--candidate");
    if (cand.states.size() != 1 && cand.states.size() != in.states.size())
        throw DimensionMismatch("--candidate holds " + std::to_string(cand.states.size()) +
                                " states; expected 1 or " + std::to_string(in.states.size()));
    const double tol = opt.tol.value_or(default_tolerances.certificate);
    std::vector<double> seconds;
    Json report = make_report("verify", opt, &in);
    report["candidate"] = {{"path", cand.path}, {"digest", fnv1a64(cand.text)}};
    report["tol"] = tol;
    bool all = true;
    std::vector<char> passed(in.states.size(), 0);
    report["results"] = map_items(in.states.size(), [&](std::size_t i) {
        const StateFile& sf = in.states[i];
        const IncoherentState d = candidate_state(cand.states[cand.states.size() == 1 ? 0 : i], i);
        Json out = {{"index", i}};
        if (sf.kind == StateKind::pure || sf.kind == StateKind::bipartite_pure) {
            const auto cert = verify_pure_optimality(sf.pure(), d, tol);
            out["certificate"] = "pure";
            out["optimal"] = cert.optimal;
            out["margin"] = cert.margin;
            out["argmin"] = cert.argmin;
            out["top_eigenvalue"] = cert.top_eigenvalue;
            out["gap"] = cert.gap;
            out["distance"] = 2.0 * cert.top_eigenvalue;
            passed[i] = cert.optimal;
        } else {
            const auto cert = verify_mixed_invertible(sf.density(), d, tol);
            out["certificate"] = "mixed-invertible";
            out["optimal"] = cert.certified;
            out["margin"] = cert.margin;
            out["trace_norm"] = cert.trace_norm;
            out["positive"] = cert.positive;
            out["negative"] = cert.negative;
            passed[i] = cert.certified;
        }
        return out;
    }, seconds);
    for (char p : passed)
        all = all && p;
    report["all_optimal"] = all;
    attach_timings(report, seconds_since(t0), seconds);
    emit(render(report, opt.format), opt);
    return all ? exit_ok : exit_check_failed;
}

// ---------------------------------------------------------------------------
// entanglement

BipartitePureState require_bipartite(const StateFile& sf, std::size_t index, Index split)
{
    if (sf.kind == StateKind::bipartite_pure)
        return sf.bipartite();
    if (sf.kind == StateKind::pure && split > 0) {
        const PureState x = sf.pure();
        if (x.dim() % split != 0)
            throw DimensionMismatch("state " + std::to_string(index) + ": dimension " +
                                    std::to_string(x.dim()) + " is not divisible by --split " +
                                    std::to_string(split));
        return BipartitePureState::from_vector(x.amplitudes(), split, x.dim() / split);
    }
    throw ValidationError("state " + std::to_string(index) + " has kind '" + to_string(sf.kind) +
                          "'; entanglement needs 'bipartite-pure' (or 'pure' with --split)");
}

int cmd_entanglement(const Options& opt)
{
    const auto t0 = clock_type::now();
    const Input in = load(opt.input, "--input");
    std::vector<double> seconds;
    std::vector<char> holds(in.states.size(), 0);
    Json report = make_report("entanglement", opt, &in);
    report["results"] = map_items(in.states.size(), [&](std::size_t i) {
        const BipartitePureState v = require_bipartite(in.states[i], i, opt.split);
        const SchmidtData sd = schmidt(v);
        const auto nearest = nearest_incoherent(PureState(sd.coefficients.cast<Complex>()));
        const auto bound = check_negativity_bound(v);
        holds[i] = bound.holds;
        return Json{{"index", i},
                    {"dims", {v.dim_a(), v.dim_b()}},
                    {"schmidt", real_json(sd.coefficients)},
                    {"schmidt_rank", sd.rank()},
                    {"e_tr", nearest.c_tr},
                    {"separable_rank", nearest.k},
                    {"separable_weights", real_json(nearest.D.diag())},
                    {"negativity", bound.two_n / 2.0},
                    {"e_r", bound.e_r},
                    {"bound", {{"e_r_le_2n", bound.holds},
                               {"log2_1_plus_2n", bound.old_bound},
                               {"improves", bound.improves}}}};
    }, seconds);
    bool all = true;
    for (char h : holds)
        all = all && h;
    attach_timings(report, seconds_since(t0), seconds);
    emit(render(report, opt.format), opt);
    return all ? exit_ok : exit_check_failed;
}

// ---------------------------------------------------------------------------
// channel-verify

Index square_side(Index dim)
{
    Index n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(dim))));
    if (n * n != dim)
        throw DimensionMismatch("sigma has dimension " + std::to_string(dim) +
                                ", which is not n*n for an n x n system");
    return n;
}

int cmd_channel_verify(const Options& opt)
{
    const auto t0 = clock_type::now();
    const Input in = load(opt.input, "--input");
    std::optional<Input> target;
    if (!opt.target.empty())
        target = load(opt.target, "--target");
    if (target && target->states.size() != 1 && target->states.size() != in.states.size())
        throw DimensionMismatch("--target holds " + std::to_string(target->states.size()) +
                                " states; expected 1 or " + std::to_string(in.states.size()));
    const double tol = opt.tol.value_or(pipeline_tolerance);

    std::vector<double> seconds;
    std::vector<char> ok(in.states.size(), 0);
    Json report = make_report("channel-verify", opt, &in);
    report["tol"] = tol;
    if (target)
        report["target"] = {{"path", target->path}, {"digest", fnv1a64(target->text)}};
    report["results"] = map_items(in.states.size(), [&](std::size_t i) {
        const DensityMatrix sigma = in.states[i].density();
        const Index n = square_side(sigma.dim());
        PipelineReport r;
        std::string target_kind = "uniform";
        if (!target) {
            r = verify_channel_pipeline(sigma, BipartitePureState::maximally_correlated(RealVector(RealVector::Ones(n))));
        } else {
            const StateFile& t = target->states[target->states.size() == 1 ? 0 : i];
            target_kind = to_string(t.kind);
            if (t.kind == StateKind::mixed)
                r = verify_channel_pipeline(sigma, MaxCorrelatedState(t.density()));
            else
                r = verify_channel_pipeline(sigma, require_bipartite(t, i, 0));
        }
        const OmegaChannel omega = omega_channel(sigma, n);
        const ComplexMatrix twirled = diagonal_twirl(sigma.matrix(), n);
        const double idempotence = (diagonal_twirl(twirled, n) - twirled).cwiseAbs().maxCoeff();
        const double min_pt = min_partial_transpose_eigenvalue(twirled, n);
        RealMatrix c(n, n);
        for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b)
                c(a, b) = omega.c(a, b);
        const bool pass = r.offdiag_mass < tol && r.fixed_point_error < tol &&
                          r.completeness_error <= default_tolerances.construction &&
                          idempotence <= tol && min_pt >= -tol;
        ok[i] = pass;
        return Json{{"index", i},
                    {"n", n},
                    {"target", target_kind},
                    {"kraus_operators", omega.kraus().size()},
                    {"completeness_error", r.completeness_error},
                    {"phi_sigma_offdiag_mass", r.offdiag_mass},
                    {"phi_sigma_diagonal", real_json(r.phi_sigma_diagonal)},
                    {"fixed_point_error", r.fixed_point_error},
                    {"twirl_idempotence_error", idempotence},
                    {"twirl_min_pt_eigenvalue", min_pt},
                    {"c", real_matrix_json(c)},
                    {"passed", pass}};
    }, seconds);
    bool all = true;
    for (char p : ok)
        all = all && p;
    report["all_passed"] = all;
    attach_timings(report, seconds_since(t0), seconds);
    emit(render(report, opt.format), opt);
    return all ? exit_ok : exit_check_failed;
}

// ---------------------------------------------------------------------------
// random

StateFile draw(const Options& opt, Rng& rng)
{
    const Index n = opt.n;
    if (opt.kind == "pure")
        return StateFile::from(random_pure(n, rng));
    if (opt.kind == "real-pure")
        return StateFile::from(random_real_pure(n, rng));
    if (opt.kind == "mixed")
        return StateFile::from(random_mixed(n, rng));
    if (opt.kind == "incoherent")
        return StateFile::from(IncoherentState(random_probability(n, rng)));
    if (opt.kind == "real-separable")
        return StateFile::from(random_real_separable(n, opt.terms, rng));
    if (opt.kind == "bipartite-pure") {
        const Index m = opt.m > 0 ? opt.m : n;
        const PureState x = random_pure(m * n, rng);
        return StateFile::from(BipartitePureState::from_vector(x.amplitudes(), m, n));
    }
    throw ValidationError("unknown --kind '" + opt.kind +
                          "' (expected pure, real-pure, mixed, incoherent, real-separable or bipartite-pure)");
}

int cmd_random(const Options& opt)
{
    if (opt.n < 1)
        throw ValidationError("--n must be at least 1");
    if (opt.count < 0)
        throw ValidationError("--count must be non-negative");
    if (opt.terms < 1)
        throw ValidationError("--terms must be at least 1");
    const Rng root(opt.seed);
    std::vector<std::string> lines(static_cast<std::size_t>(opt.count));
    std::vector<std::exception_ptr> errors(lines.size());
    parallel_for(lines.size(), [&](std::size_t i) {
        try {
            Rng rng = root.split(i);
            lines[i] = write_state(draw(opt, rng));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    std::string text;
    for (const auto& l : lines)
        text += l + "\n";
    emit(text, opt);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const Options& opt)
{
    const auto t0 = clock_type::now();
    const BenchReport b = run_bench(opt.sizes, opt.repetitions, opt.seed);
    Json report = make_report("bench", opt, nullptr);
    report["sizes"] = index_json(opt.sizes);
    report["repetitions"] = opt.repetitions;
    Json results = Json::array();
    Json samples = Json::array();
    for (const auto& s : b.samples) {
        results.push_back({{"n", s.n}, {"c_tr", s.c_tr}, {"k", s.k}});
        samples.push_back({{"n", s.n}, {"batch", s.batch}, {"median_seconds", s.median},
                           {"min_seconds", s.min}, {"mean_seconds", s.mean},
                           {"seconds", s.seconds}});
    }
    report["results"] = std::move(results);
    report["timings"] = {{"total_seconds", seconds_since(t0)},
                         {"samples", std::move(samples)},
                         {"loglog_slope", b.slope},
                         {"slope_range", {bench_slope_min, bench_slope_max}},
                         {"scaling_consistent", b.scaling_consistent}};
    emit(render(report, opt.format), opt);
    return exit_ok;
}

// ---------------------------------------------------------------------------
// oracle

int cmd_oracle(const Options& opt)
{
    const auto t0 = clock_type::now();
    const Input in = load(opt.input, "--input");
    if (opt.method != "subgradient" && opt.method != "grid")
        throw ValidationError("unknown --method '" + opt.method + "' (expected subgradient or grid)");
    SubgradientOptions sg;
    sg.max_iters = opt.max_iters;
    if (opt.tol)
        sg.tol = *opt.tol;
    std::vector<double> seconds;
    Json report = make_report("oracle", opt, &in);
    report["method"] = opt.method;
    if (opt.method == "grid")
        report["resolution"] = opt.resolution;
    report["results"] = map_items(in.states.size(), [&](std::size_t i) {
        const StateFile& sf = in.states[i];
        const DensityMatrix rho = sf.density();
        const OracleResult r = opt.method == "grid" ? c_tr_grid(rho, opt.resolution) : c_tr_subgradient(rho, sg);
        Json out = {{"index", i},
                    {"value", r.value},
                    {"approximate", true},
                    {"D", real_json(r.argmin.diag())},
                    {"iterations", r.iterations},
                    {"converged", r.converged}};
        if (opt.method == "grid")
            out["error_bound"] = lattice_error_bound(rho.dim(), opt.resolution);
        if (sf.kind == StateKind::pure || sf.kind == StateKind::bipartite_pure) {
            const double exact = c_tr_pure(sf.pure());
            out["closed_form"] = exact;
            out["difference"] = r.value - exact;
        }
        return out;
    }, seconds);
    attach_timings(report, seconds_since(t0), seconds);
    emit(render(report, opt.format), opt);
    return exit_ok;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv)
{
    CLI::App app{"Coherence measures, nearest incoherent states and their certificates"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_name) + " " + version);
    Options opt;

    auto common = [&](CLI::App* sub, bool with_input) {
        if (with_input)
            sub->add_option("--input,-i", opt.input, "State file (JSON document, array or one per line); - for stdin");
        sub->add_option("--output,-o", opt.output, "Write the report here instead of stdout");
        sub->add_option("--seed", opt.seed, "Seed recorded in the report and used for sampling");
        sub->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"json", "table"}));
    };

    auto* measures = app.add_subcommand("measures", "l1, relative-entropy, robustness and trace-distance coherence");
    common(measures, true);
    measures->add_option("--measure,-m", opt.measures, "Measure to compute (repeatable): l1, rel-ent, robustness, tr")
        ->check(CLI::IsMember({"l1", "rel-ent", "robustness", "tr"}));
    measures->add_option("--tol", opt.tol, "Unused; accepted for a uniform interface");

    auto* nearest = app.add_subcommand("nearest", "Closed-form nearest incoherent state of pure states");
    common(nearest, true);

    auto* verify = app.add_subcommand("verify", "Check optimality of a candidate incoherent state");
    common(verify, true);
    verify->add_option("--candidate,-c", opt.candidate, "Candidate state file (kind incoherent)")->required();
    verify->add_option("--tol", opt.tol, "Certificate tolerance (default 1e-10)");

    auto* ent = app.add_subcommand("entanglement", "Schmidt data, e_tr, negativity and E_r of bipartite pure states");
    common(ent, true);
    ent->add_option("--split", opt.split, "Treat a pure state of dimension m*n as m x n");

    auto* chan = app.add_subcommand("channel-verify", "Run the twirl and Omega channels built from a real PPT state");
    common(chan, true);
    chan->add_option("--target,-t", opt.target,
                     "Maximally correlated input: bipartite-pure state or a mixed core (default: uniform)");
    chan->add_option("--tol", opt.tol, "Check tolerance (default 1e-10)");

    auto* random = app.add_subcommand("random", "Seeded random states, one document per line");
    common(random, false);
    random->add_option("--kind,-k", opt.kind, "pure, real-pure, mixed, incoherent, real-separable, bipartite-pure");
    random->add_option("--n,-n", opt.n, "Dimension (per factor for bipartite and separable kinds)");
    random->add_option("--m", opt.m, "First factor dimension for bipartite-pure (default n)");
    random->add_option("--count", opt.count, "Number of states");
    random->add_option("--terms", opt.terms, "Product terms per real-separable state");

    auto* bench = app.add_subcommand("bench", "Time nearest_incoherent across dimensions");
    common(bench, false);
    bench->add_option("--sizes", opt.sizes, "Dimensions to time")->delimiter(',');
    bench->add_option("--repetitions", opt.repetitions, "Timed repetitions per size");

    auto* oracle = app.add_subcommand("oracle", "Numerical trace-distance coherence for any state");
    common(oracle, true);
    oracle->add_option("--method", opt.method, "subgradient or grid");
    oracle->add_option("--resolution", opt.resolution, "Grid resolution");
    oracle->add_option("--max-iters", opt.max_iters, "Subgradient iteration cap");
    oracle->add_option("--tol", opt.tol, "Subgradient stall tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    if (*measures) return cmd_measures(opt);
    if (*nearest) return cmd_nearest(opt);
    if (*verify) return cmd_verify(opt);
    if (*ent) return cmd_entanglement(opt);
    if (*chan) return cmd_channel_verify(opt);
    if (*random) return cmd_random(opt);
    if (*bench) return cmd_bench(opt);
    if (*oracle) return cmd_oracle(opt);
    return exit_validation;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const NonInvertibleCase& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const CertificateInconclusive& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}
