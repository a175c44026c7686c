#include "lresnet/experiment.hpp"

#include "lresnet/bounds.hpp"
#include "lresnet/construct.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace lresnet {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_json(const json& j, const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << j.dump(2) << '\n';
}

void prepare_out(const json& cfg, const std::string& out_dir) {
    if (out_dir.empty()) return;
    fs::create_directories(out_dir);
    write_json(cfg, fs::path(out_dir) / "config.json");
}

json base_summary(const json& cfg, const char* command) {
    return {{"schema", "lresnet.summary/1"}, {"command", command}, {"config_hash", config_hash(cfg)}};
}

template <class T>
T get_or_throw(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("missing or invalid key '") + key + "': " + e.what());
    }
}

void write_repetition_csv(const RepetitionResult& r, const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "step,t,s_model,s_baseline,converged\n";
    for (const auto& c : r.curve)
        os << c.step << ',' << c.t << ',' << c.model << ',' << c.baseline << ',' << (c.converged ? 1 : 0) << '\n';
}

}  // namespace

RepetitionResult run_repetition(const json& cfg, std::size_t index) {
    const auto target = target_from_json(resolved_target(cfg));
    const std::size_t d = target->dim();
    const ReferenceDistribution ref = reference_from_json(cfg.at("reference"), d);
    const TrainSpec spec = train_spec_from_json(cfg.at("train"));
    const SinkhornParams sp = sinkhorn_from_json(cfg.at("sinkhorn"));
    const json& ex = cfg.at("experiment");
    const auto n_eval = get_or_throw<std::size_t>(ex, "n_eval");
    const auto every = get_or_throw<std::size_t>(ex, "eval_every");
    if (n_eval == 0 || every == 0) throw ConfigError("experiment.n_eval and eval_every must be positive");

    RepetitionResult res;
    res.index = index;
    res.seed = derive_seed(get_or_throw<std::uint64_t>(cfg, "seed"), index);
    auto t0 = std::chrono::steady_clock::now();
    const TrainedStack stack = train_pipeline(*target, ref, spec, res.seed);
    res.final_losses = stack.final_losses();
    res.seconds_train = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    ChainConfig cc;
    cc.h = spec.h();
    cc.K = spec.steps;
    cc.d = d;
    cc.n = n_eval;
    cc.seed = res.seed;
    cc.record_every = every;
    const Cloud init = initial_cloud(ref, cc);
    const Trajectory model = driven_chain(stack_drifts(stack), cc, init);
    const Trajectory base = lmc_chain(*target, cc, init);
    const Cloud Y = target->sample(n_eval, CounterRng(res.seed, kTargetSamples));
    const SinkhornResult yy = sinkhorn_self(Y, sp);
    for (std::size_t s = 0; s < model.steps.size(); ++s) {
        const DivergenceResult dm = sinkhorn_divergence(model.states[s], Y, yy, sp);
        const DivergenceResult db = sinkhorn_divergence(base.states[s], Y, yy, sp);
        res.curve.push_back({model.steps[s], static_cast<double>(model.steps[s]) * cc.h, dm.value, db.value,
                             dm.converged && db.converged});
    }
    res.seconds_eval = seconds_since(t0);
    return res;
}

std::vector<DivergenceRow> aggregate(const std::vector<RepetitionResult>& runs, bool model) {
    std::vector<DivergenceRow> rows;
    if (runs.empty()) return rows;
    for (std::size_t p = 0; p < runs.front().curve.size(); ++p) {
        DivergenceRow row;
        row.t = runs.front().curve[p].t;
        row.n_runs = runs.size();
        double sum = 0.0;
        for (const auto& r : runs) sum += model ? r.curve[p].model : r.curve[p].baseline;
        row.mean = sum / static_cast<double>(runs.size());
        double ss = 0.0;
        for (const auto& r : runs) {
            const double v = (model ? r.curve[p].model : r.curve[p].baseline) - row.mean;
            ss += v * v;
        }
        row.stddev = runs.size() > 1 ? std::sqrt(ss / static_cast<double>(runs.size() - 1)) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

ExperimentResult run_experiment(const json& cfg, const std::string& out_dir) {
    const auto reps = get_or_throw<std::size_t>(cfg.at("experiment"), "repetitions");
    if (reps == 0) throw ConfigError("experiment.repetitions must be at least 1");
    // Validate everything once before spawning workers.
    target_from_json(resolved_target(cfg));
    sinkhorn_from_json(cfg.at("sinkhorn"));
    train_spec_from_json(cfg.at("train"));
    std::size_t threads = cfg.at("experiment").value("threads", std::size_t{0});
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, reps);

    if (!out_dir.empty()) fs::create_directories(fs::path(out_dir) / "runs");
    ExperimentResult out;
    out.runs.resize(reps);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < reps; i = next++) {
            try {
                RepetitionResult r = run_repetition(cfg, i);
                if (!out_dir.empty()) {
                    char name[32];
                    std::snprintf(name, sizeof name, "rep_%03zu.csv", i);
                    write_repetition_csv(r, fs::path(out_dir) / "runs" / name);
                }
                out.runs[i] = std::move(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                next = reps;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    out.model = aggregate(out.runs, true);
    out.baseline = aggregate(out.runs, false);
    return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

json cmd_sample(const json& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto target = target_from_json(resolved_target(cfg));
    const std::size_t d = target->dim();
    const ReferenceDistribution ref = reference_from_json(cfg.at("reference"), d);
    const json& ch = cfg.at("chain");
    ChainConfig cc;
    cc.h = get_or_throw<double>(ch, "h");
    cc.K = get_or_throw<std::size_t>(ch, "K");
    cc.n = get_or_throw<std::size_t>(ch, "n");
    cc.d = d;
    cc.seed = get_or_throw<std::uint64_t>(cfg, "seed");
    cc.record_every = ch.value("record_every", std::size_t{1});
    cc.noise = ch.value("noise", true);
    if (!(cc.h > 0.0) || cc.n == 0) throw ConfigError("chain.h and chain.n must be positive");
    const std::string drift = ch.value("drift", "exact");
    prepare_out(cfg, out_dir);

    const Cloud init = initial_cloud(ref, cc);
    Trajectory traj;
    try {
        if (drift == "exact") {
            traj = lmc_chain(*target, cc, init);
        } else if (drift == "linear") {
            if (!(target->m() > 0.0)) throw ConfigError("linear drift needs a strongly convex target");
            const Fcnn net = linear_drift_net(d, target->m());
            traj = driven_chain(std::vector<DriftMap>(cc.K, drift_from_net(net)), cc, init);
        } else if (drift == "stack") {
            const TrainedStack stack = load_stack(ch.value("stack_dir", ""));
            if (stack.nets.size() != cc.K) throw ConfigError("chain.K must equal the stack length");
            if (std::abs(stack.spec.h() - cc.h) > 1e-15) throw ConfigError("chain.h must equal the stack step size");
            traj = driven_chain(stack_drifts(stack), cc, init);
        } else {
            throw ConfigError("chain.drift must be exact, linear or stack");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!out_dir.empty()) write_trajectory_csv(traj, (fs::path(out_dir) / "trajectory.csv").string());

    const Cloud& Y = traj.final_state();
    const Vec mean = Y.colwise().mean().transpose();
    const Cloud Z = Y.rowwise() - mean.transpose();
    const Vec var = Z.colwise().squaredNorm().transpose() / std::max<double>(1.0, static_cast<double>(Y.rows()) - 1.0);
    json summary = base_summary(cfg, "sample");
    summary["drift"] = drift;
    summary["recorded_states"] = traj.states.size();
    summary["final_mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
    summary["final_variance"] = std::vector<double>(var.data(), var.data() + var.size());
    summary["seconds"] = seconds_since(t0);
    if (!out_dir.empty()) write_json(summary, fs::path(out_dir) / "summary.json");
    return summary;
}

json cmd_experiment(const json& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    prepare_out(cfg, out_dir);
    const ExperimentResult res = run_experiment(cfg, out_dir);
    if (!out_dir.empty()) {
        write_divergence_csv(res.model, (fs::path(out_dir) / "curve_model.csv").string());
        write_divergence_csv(res.baseline, (fs::path(out_dir) / "curve_baseline.csv").string());
    }
    std::vector<double> ts, early;
    for (const auto& r : res.baseline)
        if (r.t <= 2.0 + 1e-12) {
            ts.push_back(r.t);
            early.push_back(r.mean);
        }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, at2 = 0.0;
    for (const auto& r : res.model)
        if (r.t >= 2.0 - 1e-12) {
            if (at2 == 0.0) at2 = r.mean;
            lo = std::min(lo, r.mean);
            hi = std::max(hi, r.mean);
        }
    bool converged = true;
    for (const auto& run : res.runs)
        for (const auto& c : run.curve) converged = converged && c.converged;
    json summary = base_summary(cfg, "experiment");
    summary["kind"] = cfg.at("experiment").value("kind", "gaussian");
    summary["repetitions"] = res.runs.size();
    summary["final_model"] = res.model.back().mean;
    summary["final_baseline"] = res.baseline.back().mean;
    summary["final_ratio"] = res.model.back().mean / res.baseline.back().mean;
    summary["baseline_spearman_0_2"] = ts.size() >= 2 ? spearman(ts, early) : 0.0;
    summary["model_plateau_variation_2_4"] = at2 != 0.0 ? (hi - lo) / at2 : 0.0;
    summary["sinkhorn_converged"] = converged;
    json runs = json::array();
    for (const auto& r : res.runs)
        runs.push_back({{"index", r.index},
                        {"seed", r.seed},
                        {"seconds_train", r.seconds_train},
                        {"seconds_eval", r.seconds_eval}});
    summary["runs"] = runs;
    summary["seconds"] = seconds_since(t0);
    if (!out_dir.empty()) write_json(summary, fs::path(out_dir) / "summary.json");
    return summary;
}

namespace {

json report_json(const BoundReport& r) {
    return {{"regime", regime_name(r.regime)},
            {"term_contraction", r.term_contraction},
            {"term_discretization", r.term_discretization},
            {"term_approximation", r.term_approximation},
            {"total", r.total}};
}

struct BoundInputs {
    double h, m, M, w2_init, eps;
    std::size_t d, K;
};

BoundReport evaluate(const BoundInputs& in) {
    try {
        return w2_bound_perturbed(in.h, in.m, in.M, in.d, in.K, in.w2_init, in.eps);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

json cmd_bounds(const json& cfg, const std::string& out_dir) {
    const json& b = cfg.at("bounds");
    BoundInputs in{get_or_throw<double>(b, "h"),      get_or_throw<double>(b, "m"),
                   get_or_throw<double>(b, "M"),      get_or_throw<double>(b, "w2_init"),
                   get_or_throw<double>(b, "eps"),    get_or_throw<std::size_t>(b, "d"),
                   get_or_throw<std::size_t>(b, "K")};
    prepare_out(cfg, out_dir);
    json summary = base_summary(cfg, "bounds");
    const json sweep = b.value("sweep", json(nullptr));
    if (sweep.is_null()) {
        const BoundReport r = evaluate(in);
        summary["inputs"] = {{"h", in.h}, {"m", in.m}, {"M", in.M}, {"d", in.d},
                             {"K", in.K}, {"w2_init", in.w2_init}, {"eps", in.eps}};
        summary["report"] = report_json(r);
        if (!out_dir.empty()) write_json(summary, fs::path(out_dir) / "bounds.json");
        return summary;
    }
    const std::string param = get_or_throw<std::string>(sweep, "param");
    std::vector<double> values;
    if (sweep.contains("values")) {
        values = sweep.at("values").get<std::vector<double>>();
    } else {
        const double from = get_or_throw<double>(sweep, "from"), to = get_or_throw<double>(sweep, "to");
        const auto count = get_or_throw<std::size_t>(sweep, "count");
        if (count == 0) throw ConfigError("bounds.sweep.count must be positive");
        for (std::size_t i = 0; i < count; ++i)
            values.push_back(count == 1 ? from : from + (to - from) * static_cast<double>(i) / (count - 1));
    }
    std::ofstream os;
    if (!out_dir.empty()) {
        os.open(fs::path(out_dir) / "sweep.csv");
        os.precision(std::numeric_limits<double>::max_digits10);
        os << "h,m,M,d,K,w2_init,eps,regime,term_contraction,term_discretization,term_approximation,total\n";
    }
    std::size_t rows = 0;
    for (double v : values) {
        BoundInputs p = in;
        if (param == "h") p.h = v;
        else if (param == "m") p.m = v;
        else if (param == "M") p.M = v;
        else if (param == "w2_init") p.w2_init = v;
        else if (param == "eps") p.eps = v;
        else if (param == "d") p.d = static_cast<std::size_t>(std::llround(v));
        else if (param == "K") p.K = static_cast<std::size_t>(std::llround(v));
        else throw ConfigError("bounds.sweep.param must be one of h, m, M, d, K, w2_init, eps");
        const BoundReport r = evaluate(p);
        if (os.is_open())
            os << p.h << ',' << p.m << ',' << p.M << ',' << p.d << ',' << p.K << ',' << p.w2_init << ',' << p.eps
               << ',' << regime_name(r.regime) << ',' << r.term_contraction << ',' << r.term_discretization << ','
               << r.term_approximation << ',' << r.total << '\n';
        ++rows;
    }
    summary["sweep_param"] = param;
    summary["rows"] = rows;
    if (!out_dir.empty()) write_json(summary, fs::path(out_dir) / "summary.json");
    return summary;
}

namespace {

struct ConstructCase {
    Fcnn net;
    std::function<Vec(const Vec&)> oracle;
    double box = 1.0;                // probe box half-width
    json formula = json::object();   // formula_params / formula_depth when known
    json extra = json::object();
};

double relu(double x) { return x > 0.0 ? x : 0.0; }

ConstructCase build_case(const json& c) {
    const std::string kind = get_or_throw<std::string>(c, "kind");
    const auto d = get_or_throw<std::size_t>(c, "d");
    if (d == 0) throw ConfigError("construct.d must be positive");
    ConstructCase k;
    const double dd = static_cast<double>(d);
    if (kind == "identity") {
        k.net = identity_net(d);
        k.oracle = [](const Vec& x) { return x; };
        k.box = 2.0;
        k.formula = {{"formula_params", 4 * d}, {"formula_depth", 1}};
    } else if (kind == "l1") {
        k.net = l1_net(d);
        k.oracle = [](const Vec& x) { return Vec::Constant(1, x.lpNorm<1>()); };
        k.box = 2.0;
        k.formula = {{"formula_params", 4 * d}, {"formula_depth", 1}};
    } else if (kind == "indicator") {
        const double r = get_or_throw<double>(c, "r"), delta = get_or_throw<double>(c, "delta");
        k.net = indicator_net(d, r, delta);
        k.oracle = [r, delta](const Vec& x) {
            const double n1 = x.lpNorm<1>();
            return Vec::Constant(1, 1.0 - (relu(n1 - r) - relu(n1 - r - delta)) / delta);
        };
        k.box = r + 2.0 * delta;
        k.formula = {{"formula_params", 4 * d + 7}, {"formula_depth", 3}};
        json probes = json::array();
        for (double rho : {0.5 * r, r + 0.5 * delta, r + 2.0 * delta}) {
            Vec x = Vec::Zero(d);
            x(0) = rho;
            probes.push_back({{"radius", rho}, {"value", realize(k.net, x)(0)}, {"expected", k.oracle(x)(0)}});
        }
        k.extra["probe_radii"] = probes;
    } else if (kind == "cutoff") {
        const double cc = get_or_throw<double>(c, "c");
        k.net = cutoff(identity_net(d), cc);
        k.oracle = [cc](const Vec& x) { return Vec(x.cwiseMax(-cc).cwiseMin(cc)); };
        k.box = 2.0 * cc;
        k.formula = {{"formula_depth", 3}};
    } else if (kind == "mult") {
        const double M = get_or_throw<double>(c, "M"), eps = get_or_throw<double>(c, "eps");
        k.net = mult_net({M, eps, 0});
        k.oracle = [](const Vec& x) { return Vec::Constant(1, x(0) * x(1)); };
        k.box = M;
        k.extra["levels"] = mult_levels(M, eps);
        k.extra["tolerance"] = eps;
    } else if (kind == "elementwise_mult") {
        const double eps = get_or_throw<double>(c, "eps");
        const ElementwiseRange range;
        k.net = elementwise_mult_net(d, range, eps);
        k.oracle = [](const Vec& x) { return Vec(x(0) * x.tail(x.size() - 1)); };
        k.box = 1.0;
        k.extra["tolerance"] = eps;
    } else if (kind == "linear_drift") {
        const double m = get_or_throw<double>(c, "m");
        k.net = linear_drift_net(d, m);
        k.oracle = [m](const Vec& x) { return Vec(-m * x); };
        k.box = 2.0;
        k.formula = {{"formula_params", 4 * d}, {"formula_depth", 1}};
    } else if (kind == "composite") {
        const double m = get_or_throw<double>(c, "m"), M = get_or_throw<double>(c, "M");
        const double r = get_or_throw<double>(c, "r"), eps = get_or_throw<double>(c, "eps");
        // Gaussian potential with precision eigenvalues spread over [m, M]; the local net is exact.
        Vec diag(d);
        for (std::size_t i = 0; i < d; ++i) diag(i) = d == 1 ? m : m + (M - m) * static_cast<double>(i) / (dd - 1.0);
        const Mat P = diag.asDiagonal();
        CompositeInfo info;
        try {
            k.net = composite_drift_net(linear_net(-(P - m * Mat::Identity(d, d))), {r, m, M, eps, 0.0}, &info);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        k.oracle = [P](const Vec& x) { return Vec(-P * x); };
        k.box = r / dd;
        k.extra["tolerance_on_ball"] = 2.0 * eps;
        k.extra["b"] = info.b;
        k.extra["clamp"] = info.clamp;
    } else {
        throw ConfigError("construct.kind must be identity, l1, indicator, cutoff, mult, elementwise_mult, "
                          "linear_drift or composite");
    }
    return k;
}

}  // namespace

json cmd_construct(const json& cfg, const std::string& out_dir) {
    const json& c = cfg.at("construct");
    ConstructCase k;
    try {
        k = build_case(c);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    prepare_out(cfg, out_dir);
    const std::string kind = c.at("kind");
    const std::size_t din = k.net.input_dim();
    double max_err = 0.0;
    std::size_t evaluated = 0;
    auto probe = [&](const Vec& x) {
        max_err = std::max(max_err, (realize(k.net, x) - k.oracle(x)).cwiseAbs().maxCoeff());
        ++evaluated;
    };
    if (kind == "mult") {
        const auto g = get_or_throw<std::size_t>(c, "grid");
        if (g < 2) throw ConfigError("construct.grid must be at least 2");
        Vec x(2);
        for (std::size_t i = 0; i < g; ++i)
            for (std::size_t j = 0; j < g; ++j) {
                x << -k.box + 2.0 * k.box * i / (g - 1), -k.box + 2.0 * k.box * j / (g - 1);
                probe(x);
            }
    } else {
        const auto count = get_or_throw<std::size_t>(c, "probes");
        const CounterRng rng(c.value("seed", std::uint64_t{11}), kUser + 3);
        Vec x(din);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < din; ++j) x(j) = k.box * (2.0 * rng.uniform(0, i, j) - 1.0);
            if (kind == "elementwise_mult") x(0) = rng.uniform(1, i, 0);
            probe(x);
        }
    }
    const ParamCount pc = param_count(k.net);
    json report = base_summary(cfg, "construct");
    report["kind"] = kind;
    report["measured_params"] = pc.nonzero;
    report["dense_params"] = pc.dense;
    report["depth"] = depth(k.net);
    report["formula_params"] = k.formula.value("formula_params", json(nullptr));
    report["formula_depth"] = k.formula.value("formula_depth", json(nullptr));
    report["max_err"] = max_err;
    report["points"] = evaluated;
    report.update(k.extra);
    if (!out_dir.empty()) {
        save_fcnn(k.net, (fs::path(out_dir) / "network.json").string());
        write_json(report, fs::path(out_dir) / "report.json");
    }
    return report;
}

json cmd_train(const json& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto target = target_from_json(resolved_target(cfg));
    const ReferenceDistribution ref = reference_from_json(cfg.at("reference"), target->dim());
    const TrainSpec spec = train_spec_from_json(cfg.at("train"));
    prepare_out(cfg, out_dir);
    const TrainedStack stack = train_pipeline(*target, ref, spec, get_or_throw<std::uint64_t>(cfg, "seed"));
    if (!out_dir.empty()) save_stack(stack, (fs::path(out_dir) / "stack").string());
    std::vector<double> fl = stack.final_losses();
    std::vector<double> sorted = fl;
    std::sort(sorted.begin(), sorted.end());
    json summary = base_summary(cfg, "train");
    summary["steps"] = stack.nets.size();
    summary["first_final_loss"] = fl.front();
    summary["median_final_loss"] = sorted[sorted.size() / 2];
    summary["last_final_loss"] = fl.back();
    summary["seconds"] = seconds_since(t0);
    if (!out_dir.empty()) write_json(summary, fs::path(out_dir) / "summary.json");
    return summary;
}

}  // namespace lresnet
