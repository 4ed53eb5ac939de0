#include "vdm/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vdm/ensemble.hpp"
#include "vdm/evolution.hpp"
#include "vdm/labels.hpp"
#include "vdm/observables.hpp"
#include "vdm/oracles.hpp"

namespace vdm {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << header << "\n";
    }
    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ",";
            out_ << fmt(v);
            first = false;
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

json config_json(const RunConfig& cfg) {
    json j;
    j["experiment"] = cfg.experiment_name();
    j["kernel"] = cfg.kernel == KernelKind::Cavity ? "cavity"
                : cfg.kernel == KernelKind::Bandgap ? "bandgap" : "flat";
    j["gamma"] = cfg.gamma;
    if (cfg.kernel == KernelKind::Cavity) {
        j["delta_c"] = cfg.delta_c;
        j["kappa2"] = cfg.kappa2;
    }
    if (cfg.kernel == KernelKind::Bandgap) {
        j["lambda"] = cfg.lambda;
        j["delta"] = cfg.delta;
        j["beta"] = beta_for_rate(cfg.gamma, cfg.lambda);
        if (!cfg.delta_list.empty()) j["delta_list"] = cfg.delta_list;
    }
    j["omega"] = cfg.omega;
    j["M"] = cfg.m;
    j["dt"] = cfg.dt;
    j["n_steps"] = cfg.n_steps;
    j["record_every"] = cfg.record_every;
    j["steady_tol"] = cfg.steady_tol;
    j["steady_window"] = cfg.steady_window;
    j["steady_max_time"] = cfg.steady_max_time;
    j["tau_max"] = cfg.tau_max;
    j["fit_t_min"] = cfg.fit_t_min;
    j["fit_t_max"] = cfg.fit_t_max;
    j["memory_estimate_bytes"] = ensemble_memory_estimate(cfg.m);
    return j;
}

void write_sidecar(const fs::path& csv_path, json meta) {
    std::ofstream out(csv_path.string() + ".meta.json", std::ios::binary);
    out << meta.dump(2) << "\n";
}

std::string delta_tag(double d) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", d);
    std::string s(buf);
    for (auto& c : s) {
        if (c == '-') c = 'm';
        if (c == '.') c = 'p';
    }
    return s;
}

Mat2 excited_state() {
    Mat2 rho = Mat2::Zero();
    rho(0, 0) = 1.0;
    return rho;
}

struct EnsembleRun {
    std::vector<TrajectoryPoint> traj;
    double trace_drift = 0.0;
    double truncation = 0.0;
    double p_min = 1.0, p_max = 0.0;
    bool populations_physical = true;
};

EnsembleRun run_ensemble(const RunConfig& cfg, const KernelSpec& spec) {
    const KernelSamples samples = sample_kernel(spec, cfg.dt, cfg.m);
    const EvolutionOperator op = build_evolution_operator(samples, cfg.omega, cfg.m);
    VirtualEnsemble ens(excited_state(), cfg.m, cfg.dt);
    EnsembleRun out;
    out.traj = propagate(ens, op, cfg.n_steps, cfg.record_every);
    for (const auto& pt : out.traj) {
        out.trace_drift = std::max(out.trace_drift, std::abs(pt.rho.trace().real() - 1.0)
                                   + std::abs(pt.rho.trace().imag()));
        const double p = excited_population(pt.rho);
        out.p_min = std::min(out.p_min, p);
        out.p_max = std::max(out.p_max, p);
        if (!population_physical(p)) out.populations_physical = false;
    }
    out.truncation = truncation_ratio(spec, samples.window());
    return out;
}

json base_meta(const RunConfig& cfg, const KernelSpec& spec, const Timer& timer) {
    json meta;
    meta["config"] = config_json(cfg);
    meta["window_Tm"] = cfg.dt * (cfg.m - 1);
    meta["kernel_truncation_ratio"] = truncation_ratio(spec, cfg.dt * (cfg.m - 1));
    meta["truncation_above_warn"] =
        truncation_ratio(spec, cfg.dt * (cfg.m - 1)) > cfg.truncation_warn;
    meta["wall_time_s"] = timer.seconds();
    return meta;
}

RunOutputs do_decay(const RunConfig& cfg, const fs::path& dir, bool markov_naming) {
    RunOutputs outputs;
    json rates = json::array();
    const std::string stem = markov_naming ? "decay_markov" : "decay";
    for (double d : cfg.deltas()) {
        Timer timer;
        RunConfig sub = cfg;
        sub.delta = d;
        const KernelSpec spec = sub.kernel_spec();
        const EnsembleRun run = run_ensemble(sub, spec);

        const std::string name = cfg.deltas().size() > 1
            ? stem + "_d" + delta_tag(d) + ".csv" : stem + ".csv";
        const fs::path path = dir / name;
        CsvWriter csv(path, "t,P");
        std::vector<double> t, p;
        for (const auto& pt : run.traj) {
            t.push_back(pt.t);
            p.push_back(excited_population(pt.rho));
            csv.row({pt.t, excited_population(pt.rho)});
        }
        const RateFit fit = fit_decay_rate(t, p, cfg.fit_t_min, cfg.fit_t_max);

        json meta = base_meta(sub, spec, timer);
        meta["delta"] = d;
        meta["fitted_rate"] = fit.rate;
        meta["fit_r_squared"] = fit.r_squared;
        meta["max_trace_drift"] = run.trace_drift;
        meta["population_range"] = {run.p_min, run.p_max};
        meta["populations_physical"] = run.populations_physical;
        write_sidecar(path, meta);
        outputs.files.push_back(path.string());
        rates.push_back({{"delta", d}, {"rate", fit.rate}, {"r_squared", fit.r_squared}});
    }
    if (markov_naming) {
        const fs::path path = dir / "markov_rates.csv";
        CsvWriter csv(path, "delta,rate,r_squared");
        for (const auto& r : rates)
            csv.row({r["delta"].get<double>(), r["rate"].get<double>(),
                     r["r_squared"].get<double>()});
        json meta;
        meta["config"] = config_json(cfg);
        meta["rates"] = rates;
        write_sidecar(path, meta);
        outputs.files.push_back(path.string());
    }
    return outputs;
}

RunOutputs do_driven(const RunConfig& cfg, const fs::path& dir) {
    Timer timer;
    const KernelSpec spec = cfg.kernel_spec();
    const EnsembleRun run = run_ensemble(cfg, spec);
    const fs::path path = dir / "trajectory.csv";
    CsvWriter csv(path, "t,P,Re_coh,Im_coh,trace");
    for (const auto& pt : run.traj) {
        const Complex coh = pt.rho(0, 1);
        csv.row({pt.t, excited_population(pt.rho), coh.real(), coh.imag(),
                 pt.rho.trace().real()});
    }
    json meta = base_meta(cfg, spec, timer);
    meta["max_trace_drift"] = run.trace_drift;
    meta["population_range"] = {run.p_min, run.p_max};
    meta["populations_physical"] = run.populations_physical;
    write_sidecar(path, meta);
    return {{path.string()}};
}

CorrelationResult run_correlation(const RunConfig& cfg, const KernelSpec& spec) {
    const KernelSamples samples = sample_kernel(spec, cfg.dt, cfg.m);
    const EvolutionOperator op = build_evolution_operator(samples, cfg.omega, cfg.m);
    CorrelationSettings settings;
    settings.steady_rel_tol = cfg.steady_tol;
    settings.steady_window = cfg.steady_window;
    settings.steady_max_time = cfg.steady_max_time;
    settings.tau_max = cfg.tau_max;
    return correlation_function(op, excited_state(), settings);
}

json correlation_meta(const CorrelationResult& corr) {
    json j;
    j["t_steady"] = corr.t_steady;
    j["steady_residual"] = corr.steady_residual;
    j["P_ss"] = corr.rho_ss(0, 0).real();
    j["sdag_ss_re"] = corr.sdag_ss.real();
    j["sdag_ss_im"] = corr.sdag_ss.imag();
    j["n_ss"] = corr.n_ss;
    j["C0_re"] = corr.trace.values.front().real();
    return j;
}

RunOutputs do_correlation(const RunConfig& cfg, const fs::path& dir) {
    Timer timer;
    const KernelSpec spec = cfg.kernel_spec();
    const CorrelationResult corr = run_correlation(cfg, spec);
    const fs::path path = dir / "correlation.csv";
    CsvWriter csv(path, "tau,ReC,ImC");
    for (std::size_t k = 0; k < corr.trace.tau.size(); ++k)
        csv.row({corr.trace.tau[k], corr.trace.values[k].real(), corr.trace.values[k].imag()});
    json meta = base_meta(cfg, spec, timer);
    meta["steady"] = correlation_meta(corr);
    write_sidecar(path, meta);
    return {{path.string()}};
}

RunOutputs do_spectrum(const RunConfig& cfg, const fs::path& dir) {
    RunOutputs outputs;
    for (double d : cfg.deltas()) {
        Timer timer;
        RunConfig sub = cfg;
        sub.delta = d;
        const KernelSpec spec = sub.kernel_spec();
        const CorrelationResult corr = run_correlation(sub, spec);
        const Spectrum s = spectrum(corr.trace, cfg.resolved_omega_max(),
                                    cfg.resolved_omega_step());
        const std::string name = cfg.deltas().size() > 1
            ? "spectrum_d" + delta_tag(d) + ".csv" : "spectrum.csv";
        const fs::path path = dir / name;
        CsvWriter csv(path, "omega,S");
        for (std::size_t k = 0; k < s.omega.size(); ++k) csv.row({s.omega[k], s.values[k]});

        json meta = base_meta(sub, spec, timer);
        meta["delta"] = d;
        meta["steady"] = correlation_meta(corr);
        if (cfg.omega > 0.0) {
            const SidePeaks peaks = side_peaks(s, cfg.omega / 2.0);
            meta["peak_plus_omega"] = peaks.omega_plus;
            meta["peak_plus_height"] = peaks.height_plus;
            meta["peak_minus_omega"] = peaks.omega_minus;
            meta["peak_minus_height"] = peaks.height_minus;
            meta["side_peak_ratio"] = peaks.ratio();
        }
        write_sidecar(path, meta);
        outputs.files.push_back(path.string());
    }
    return outputs;
}

RunOutputs do_validate_cavity(const RunConfig& cfg, const fs::path& dir) {
    Timer timer;
    const KernelSpec spec = cfg.kernel_spec();
    const EnsembleRun run = run_ensemble(cfg, spec);

    LindbladSystem sys;
    sys.fock_cutoff = cfg.fock_cutoff;
    sys.rabi = cfg.omega;
    sys.g_ac = std::sqrt(cfg.gamma);
    sys.delta_c = cfg.delta_c;
    sys.kappa_c = cfg.kappa2;
    LindbladBaseline baseline(sys);
    const auto ref = baseline.trajectory(baseline.product_state(excited_state(), 0),
                                         cfg.dt * cfg.record_every,
                                         static_cast<std::int64_t>(run.traj.size()) - 1,
                                         cfg.baseline_substeps);

    const fs::path path = dir / "validate_cavity.csv";
    CsvWriter csv(path, "t,P_alg,P_ref");
    double max_dev = 0.0;
    for (std::size_t k = 0; k < run.traj.size(); ++k) {
        const double pa = excited_population(run.traj[k].rho);
        const double pb = excited_population(ref[k].rho);
        max_dev = std::max(max_dev, std::abs(pa - pb));
        csv.row({run.traj[k].t, pa, pb});
    }
    json meta = base_meta(cfg, spec, timer);
    meta["max_abs_deviation"] = max_dev;
    meta["max_trace_drift"] = run.trace_drift;
    write_sidecar(path, meta);
    std::printf("validate-cavity: max |P_alg - P_ref| = %s\n", fmt(max_dev).c_str());
    return {{path.string()}};
}

RunOutputs do_validate_decay(const RunConfig& cfg, const fs::path& dir) {
    RunOutputs outputs;
    for (double d : cfg.deltas()) {
        Timer timer;
        RunConfig sub = cfg;
        sub.delta = d;
        sub.omega = 0.0;
        const KernelSpec spec = sub.kernel_spec();
        const EnsembleRun run = run_ensemble(sub, spec);
        const KernelSamples samples = sample_kernel(spec, cfg.dt, cfg.m);
        const DecayAmplitude amp = decay_amplitude(samples, cfg.n_steps);
        const auto pop = amp.population();

        const std::string name = cfg.deltas().size() > 1
            ? "validate_decay_d" + delta_tag(d) + ".csv" : "validate_decay.csv";
        const fs::path path = dir / name;
        CsvWriter csv(path, "t,P_alg,P_oracle");
        double max_dev = 0.0;
        for (std::size_t k = 0; k < run.traj.size(); ++k) {
            const auto idx = static_cast<std::size_t>(run.traj[k].t / cfg.dt + 0.5);
            const double pa = excited_population(run.traj[k].rho);
            max_dev = std::max(max_dev, std::abs(pa - pop[idx]));
            csv.row({run.traj[k].t, pa, pop[idx]});
        }
        json meta = base_meta(sub, spec, timer);
        meta["delta"] = d;
        meta["max_abs_deviation"] = max_dev;
        write_sidecar(path, meta);
        std::printf("validate-decay (delta=%s): max |P_alg - P_oracle| = %s\n",
                    fmt(d).c_str(), fmt(max_dev).c_str());
        outputs.files.push_back(path.string());
    }
    return outputs;
}

RunOutputs do_convergence(const RunConfig& cfg, const fs::path& dir) {
    Timer timer;
    // dt-halving ladder at fixed memory window: rung k doubles dt and thins
    // the mesh, so (M-1) must stay divisible by 2.
    struct Rung {
        double dt;
        int m;
        double max_dev;
        double trace_drift;
    };
    std::vector<Rung> rungs;
    int mk = cfg.m;
    double dtk = cfg.dt;
    for (int k = 0; k < cfg.dt_ladder; ++k) {
        rungs.push_back({dtk, mk, 0.0, 0.0});
        if ((mk - 1) % 2 != 0) break;
        mk = (mk - 1) / 2 + 1;
        dtk *= 2.0;
        if (mk < 2) break;
    }

    for (auto& rung : rungs) {
        RunConfig sub = cfg;
        sub.m = rung.m;
        sub.dt = rung.dt;
        sub.n_steps = std::llround(cfg.n_steps * cfg.dt / rung.dt);
        sub.record_every = 1;
        const KernelSpec spec = sub.kernel_spec();
        const EnsembleRun run = run_ensemble(sub, spec);
        rung.trace_drift = run.trace_drift;

        std::vector<double> ref(run.traj.size());
        if (cfg.kernel == KernelKind::Cavity) {
            LindbladSystem sys;
            sys.fock_cutoff = cfg.fock_cutoff;
            sys.rabi = cfg.omega;
            sys.g_ac = std::sqrt(cfg.gamma);
            sys.delta_c = cfg.delta_c;
            sys.kappa_c = cfg.kappa2;
            LindbladBaseline baseline(sys);
            const auto traj = baseline.trajectory(baseline.product_state(excited_state(), 0),
                                                  rung.dt, sub.n_steps, cfg.baseline_substeps);
            for (std::size_t i = 0; i < traj.size(); ++i)
                ref[i] = excited_population(traj[i].rho);
        } else {
            const DecayAmplitude amp =
                decay_amplitude(sample_kernel(spec, rung.dt, rung.m), sub.n_steps);
            ref = amp.population();
        }
        for (std::size_t i = 0; i < run.traj.size(); ++i)
            rung.max_dev = std::max(rung.max_dev,
                                    std::abs(excited_population(run.traj[i].rho) - ref[i]));
    }

    const fs::path path = dir / "convergence.csv";
    CsvWriter csv(path, "dt,M,max_dev,trace_drift");
    for (const auto& rung : rungs) {
        csv.row({rung.dt, static_cast<double>(rung.m), rung.max_dev, rung.trace_drift});
    }
    json meta = base_meta(cfg, cfg.kernel_spec(), timer);
    json jr = json::array();
    for (const auto& rung : rungs)
        jr.push_back({{"dt", rung.dt}, {"M", rung.m}, {"max_dev", rung.max_dev},
                      {"trace_drift", rung.trace_drift}});
    meta["rungs"] = jr;
    if (rungs.size() >= 2) {
        json orders = json::array();
        for (std::size_t i = 0; i + 1 < rungs.size(); ++i)
            orders.push_back(std::log2(rungs[i + 1].max_dev / rungs[i].max_dev));
        meta["orders"] = orders;
    }
    write_sidecar(path, meta);
    return {{path.string()}};
}

}  // namespace

RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& p,
                       double t_min, double t_max) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::int64_t n = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_min || t[k] > t_max || p[k] <= 0.0) continue;
        const double y = std::log(p[k]);
        sx += t[k];
        sy += y;
        sxx += t[k] * t[k];
        sxy += t[k] * y;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("fit_decay_rate: fewer than two usable samples");
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_min || t[k] > t_max || p[k] <= 0.0) continue;
        const double y = std::log(p[k]);
        ss_res += (y - slope * t[k] - intercept) * (y - slope * t[k] - intercept);
        ss_tot += (y - mean) * (y - mean);
    }
    RateFit fit;
    fit.rate = -slope;
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

RunOutputs run_experiment(const RunConfig& cfg, const std::string& out_dir) {
    const fs::path dir(out_dir.empty() ? "." : out_dir);
    fs::create_directories(dir);

    std::printf("run: experiment=%s M=%d (3^M = %lld blocks), memory estimate %lld MB\n",
                cfg.experiment_name().c_str(), cfg.m,
                static_cast<long long>(pow3(cfg.m)),
                static_cast<long long>(ensemble_memory_estimate(cfg.m) / (1024 * 1024)));

    switch (cfg.experiment) {
        case Experiment::Decay: return do_decay(cfg, dir, false);
        case Experiment::Driven: return do_driven(cfg, dir);
        case Experiment::Correlation: return do_correlation(cfg, dir);
        case Experiment::Spectrum: return do_spectrum(cfg, dir);
        case Experiment::ValidateCavity: return do_validate_cavity(cfg, dir);
        case Experiment::ValidateDecay: return do_validate_decay(cfg, dir);
        case Experiment::MarkovLimit: return do_decay(cfg, dir, true);
        case Experiment::Convergence: return do_convergence(cfg, dir);
    }
    throw ConfigError("run_experiment: bad experiment");
}

}  // namespace vdm
