#include "posrep/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include <fmt/format.h>

#include "posrep/error.hpp"
#include "posrep/hankel.hpp"
#include "posrep/lattice.hpp"
#include "posrep/tconstruct.hpp"

namespace posrep {

using ojson = nlohmann::ordered_json;

namespace {

ojson cplx_json(cplx v) { return ojson::array({v.real(), v.imag()}); }

ojson table_json(const ComplexMomentTable& t) {
    ojson rows = ojson::array();
    for (const auto& m : multi_indices_up_to(t.dimension(), t.cutoff())) {
        const auto& e = t.entry(m);
        rows.push_back({{"index", m.str()}, {"re", e.value.real()}, {"im", e.value.imag()},
                        {"provenance", to_string(e.provenance)}});
    }
    ojson j{{"dimension", t.dimension()}, {"cutoff", t.cutoff()}};
    j["abs_normalization"] = t.abs_normalization() ? ojson(*t.abs_normalization()) : ojson(nullptr);
    j["entries"] = std::move(rows);
    return j;
}

ojson dominance_json(const DominanceReport& d) {
    ojson j{{"pass", d.pass}, {"cutoff", d.cutoff}, {"margin", d.margin}};
    j["first_failure"] = d.first_failure ? ojson(d.first_failure->str()) : ojson(nullptr);
    return j;
}

ojson certificate_json(const PositivityCertificate& c) {
    return {{"lower_bound", c.lower_bound}, {"tail", c.tail},         {"grid_min", c.grid_min},
            {"grid_max", c.grid_max},       {"upper_envelope", c.upper_envelope}, {"grid_points", c.grid_points},
            {"certified", c.certified},     {"positive", c.positive}};
}

ojson series_json(const AngularSeries& s) {
    ojson coeff = ojson::array();
    for (std::size_t i = 0; i < s.size(); ++i)
        coeff.push_back(ojson::array({s.indices()[i].str(), s.coefficients()[i].real(), s.coefficients()[i].imag()}));
    return {{"dimension", s.dimension()}, {"cutoff", s.cutoff()}, {"lambda", s.lambda()},
            {"envelope", s.envelope()},   {"gamma", std::move(coeff)}};
}

/// Tracks the current stage and check so that exceptions land in the report.
class Runner {
  public:
    explicit Runner(RunReport& r) : r_(r) {}

    template <class F>
    bool stage(const std::string& name, F&& body) {
        if (r_.failure)
            return false;
        stage_ = name;
        check_ = "execution";
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body();
        } catch (const CheckError& e) {
            fail(exit_check_failure, e.what());
        } catch (const ConfigError& e) {
            fail(exit_config_error, e.what());
        } catch (const std::exception& e) {
            fail(exit_numeric_failure, e.what());
        }
        r_.timings.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return !r_.failure;
    }

    /// Names the check guarding the code that follows.
    void within(const std::string& check) { check_ = check; }

    /// Records a check; the first failing one ends the run after this stage.
    void check(const std::string& name, bool pass, const std::string& detail) {
        r_.checks.push_back({stage_, name, pass, detail});
        if (!pass && !pending_)
            pending_ = Failure{stage_, name, detail, exit_check_failure};
    }

    void finish_stage() {
        if (pending_ && !r_.failure)
            r_.failure = pending_;
    }

    ojson& out() { return r_.stages[stage_]; }
    const std::string& current() const { return stage_; }

  private:
    void fail(int status, const std::string& msg) {
        r_.failure = Failure{stage_, check_, msg, status};
        r_.checks.push_back({stage_, check_, false, msg});
    }

    RunReport& r_;
    std::string stage_;
    std::string check_;
    std::optional<Failure> pending_;
};

QuadratureOptions quad_options(const ExperimentConfig& c) {
    QuadratureOptions o;
    o.tol = c.quad_tol;
    o.rotation_angle = c.angle;
    return o;
}

int completion_nodes(const ExperimentConfig& c, int D) {
    return c.completion_nodes > 0 ? c.completion_nodes : std::max(1, (D + 2) / 2);
}

MultiIndex axis_index(int N, int j, int e) {
    std::vector<int> v(static_cast<std::size_t>(N), 0);
    v[static_cast<std::size_t>(j)] = e;
    return MultiIndex(std::move(v));
}

void run_moment_pipeline(const ExperimentConfig& c, RunReport& rep, Runner& run) {
    const auto spec = c.weight_spec();
    const int N = spec.dimension();
    const int D = c.cutoff_used();
    const bool completed = c.radial == RadialKind::completed;
    const int nodes = completed ? completion_nodes(c, D) : 0;
    const int table_degree = completed ? std::max(D, 2 * nodes - 1) : D;
    const Pipeline p = c.pipeline;
    const bool lattice = std::holds_alternative<AnharmonicLattice>(spec.variant());

    std::optional<ComplexMomentTable> table;
    run.stage("moments", [&] {
        run.within("quadrature");
        table = build_moment_table(spec, table_degree, quad_options(c));
        run.out() = table_json(*table);
        if (lattice && c.angle_check) {
            run.within("contour_independence");
            double worst = 0.0;
            std::string at = "-";
            for (const auto& [m, e] : table->entries()) {
                if (m.degree() % 2 || m.degree() > std::min(D, 4))
                    continue;
                cplx alt = direct_lattice_moment(c.oscillator, m, c.quad_tol.value_or(1e-9), c.check_angle);
                double d = std::abs(alt - e.value) / std::max(1.0, std::abs(e.value));
                if (d > worst) {
                    worst = d;
                    at = m.str();
                }
            }
            run.out()["contour_check"] = {{"angle", c.check_angle}, {"max_relative_difference", worst}, {"at", at}};
            run.check("contour_independence", worst <= c.angle_tol,
                      fmt::format("max relative difference {:.3e} at {} (tolerance {:.1e})", worst, at, c.angle_tol));
        }
        for (const auto& m : multi_indices_up_to(N, D))
            rep.moments.push_back({m, table->at(m), std::nullopt, 0.0, 0.0});
        run.finish_stage();
    });
    if (p == Pipeline::moments || rep.failure)
        return;

    std::optional<RadialMomentModel> model;
    run.stage("bound", [&] {
        auto& out = run.out();
        out["model"] = to_string(c.radial);
        switch (c.radial) {
        case RadialKind::half_gaussian:
            model = RadialMomentModel::iid(RadialModel1D::half_gaussian(), N);
            break;
        case RadialKind::exponential:
            model = RadialMomentModel::iid(RadialModel1D::exponential(), N);
            break;
        case RadialKind::delta:
            model = RadialMomentModel::iid(RadialModel1D::delta(c.delta_B), N);
            out["B"] = c.delta_B;
            break;
        case RadialKind::completed: {
            run.within("completion");
            std::vector<RadialModel1D> factors;
            ojson per = ojson::array();
            for (int j = 0; j < N; ++j) {
                std::vector<double> lower;
                for (int e = 0; e <= 2 * nodes - 1; ++e)
                    lower.push_back(std::abs(table->at(axis_index(N, j, e))));
                lower[0] = 1.0;
                auto seq = complete_sequence(lower);
                auto meas = representing_measure(seq, nodes);
                per.push_back({{"sequence", seq.values()}, {"nodes", meas.nodes}, {"weights", meas.weights}});
                factors.push_back(RadialModel1D(meas));
            }
            out["completion"] = std::move(per);
            model = RadialMomentModel(std::move(factors));
            break;
        }
        case RadialKind::anharmonic: {
            run.within("dominance");
            auto b = anharmonic_bound(c.oscillator, *table, D, c.kinetic, c.max_escalations);
            out["kinetic"] = c.kinetic == KineticForm::derived ? "derived" : "literal";
            out["z_hat"] = b.z_hat;
            out["abs_z"] = b.abs_z;
            out["initial_scale"] = b.initial_scale;
            out["scale"] = b.scale;
            out["escalations"] = b.escalations;
            model = std::move(b.model);
            break;
        }
        }
        out["describe"] = model->describe();
        run.within("dominance");
        auto dom = dominance_check(*table, *model, D);
        out["dominance"] = dominance_json(dom);
        run.check("dominance", dom.pass,
                  dom.pass ? fmt::format("all moments up to degree {} dominated", D)
                           : fmt::format("fails at m = {}", dom.first_failure->str()));
        run.finish_stage();
    });
    if (p == Pipeline::bound || rep.failure)
        return;

    std::optional<TDensity> t;
    run.stage("construct", [&] {
        auto& out = run.out();
        run.within("lambda");
        auto lam = LambdaChoice::fixed(N, c.lambda_value(), c.margin);
        out["lambda"] = {{"value", lam.lambda},
                         {"lambda_min", lambda_min(N)},
                         {"margin", c.margin},
                         {"lower_bound", s_lower_bound(lam.lambda, N)}};
        out["cutoff"] = {{"adaptive", c.adaptive_cutoff_value()},
                         {"requested", c.cutoff ? ojson(*c.cutoff) : ojson(nullptr)},
                         {"used", D},
                         {"tail", tail_bound(lam.lambda, N, D)}};
        run.within("dominance");
        t = construct_t(table->truncated(D), *model, lam, D);
        out["series"] = series_json(t->angular);
        run.within("roundtrip");
        double worst = 0.0;
        for (const auto& m : multi_indices_up_to(N, D)) {
            cplx ref = table->at(m);
            cplx got = t_moment_roundtrip(*t, m);
            double d = std::abs(got - ref) / std::max(std::abs(ref), 1e-300);
            if (ref == cplx(0.0))
                d = std::abs(got);
            worst = std::max(worst, d);
        }
        out["roundtrip_max_relative_error"] = worst;
        run.check("roundtrip", worst <= 1e-9, fmt::format("max relative error {:.3e}", worst));
        run.within("positivity");
        auto cert = certify_positivity(t->angular, c.grid_points, c.exec);
        out["certificate"] = certificate_json(cert);
        run.check("certificate", cert.certified,
                  fmt::format("grid min {:.6g} vs lower bound - tail {:.6g}", cert.grid_min, cert.lower_bound - cert.tail));
        run.check("positivity", cert.positive, fmt::format("grid min {:.6g}", cert.grid_min));
        run.finish_stage();
    });
    if (p == Pipeline::construct || rep.failure)
        return;

    std::optional<ComplexEnsemble> ens;
    run.stage("sample", [&] {
        run.within("sampler");
        ens = sample_ensemble(*t, c.samples, c.seed, c.exec);
        run.out() = {{"n", ens->count}, {"proposals", ens->proposals}, {"acceptance_rate", ens->acceptance_rate()}};
        if (p == Pipeline::sample) {
            std::filesystem::create_directories(c.out_dir);
            write_ensemble_csv(*ens, (std::filesystem::path(c.out_dir) / "samples.csv").string());
            rep.artifacts.push_back("samples.csv");
        }
        run.finish_stage();
    });
    if (p == Pipeline::sample || rep.failure)
        return;

    run.stage("verify", [&] {
        run.within("moment_pulls");
        const int vd = c.verify_degree_used();
        auto v = verify_moments(*ens, *table, vd, c.nsigma, c.exec);
        rep.moments.clear();
        for (const auto& row : v.rows)
            rep.moments.push_back({row.index, row.reference, row.estimate, row.pull_re, row.pull_im});
        run.out() = {{"degree", vd},
                     {"nsigma", v.nsigma},
                     {"pass", v.pass},
                     {"rows", v.rows.size()},
                     {"worst", v.worst ? ojson(v.worst->str()) : ojson(nullptr)},
                     {"worst_pull", v.worst_pull}};
        run.check("moment_pulls", v.pass,
                  fmt::format("worst pull {:.3f} at {} (limit {})", v.worst_pull, v.worst ? v.worst->str() : "-",
                              c.nsigma));
        run.finish_stage();
    });
}

void run_harmonic_pipeline(const ExperimentConfig& c, RunReport& rep, Runner& run) {
    const auto params = c.harmonic_params();
    const int T = params.T;
    const auto Ts = static_cast<std::size_t>(T);
    std::vector<HarmonicMode> modes;

    run.stage("modes", [&] {
        run.within("resonance");
        modes = harmonic_modes(params, c.epsilon, c.omega);
        ojson list = ojson::array();
        for (const auto& h : modes)
            list.push_back({{"k", h.k},
                            {"coordinate", fmt::format("{}_{}", h.sine ? "b" : "a", h.k)},
                            {"s", cplx_json(h.s)},
                            {"rotation", to_string(h.rotation)},
                            {"phase", h.phase},
                            {"variance", h.variance}});
        const int nres = resonant_count(modes);
        run.out() = {{"mu", params.mu}, {"epsilon", c.epsilon}, {"resonant_modes", nres}, {"modes", std::move(list)}};
        bool right_k = false;
        for (const auto& h : modes)
            right_k = right_k || (h.rotation == ModeRotation::resonant && h.k == c.resonant_k);
        run.check("single_resonance", nres == 1 && right_k,
                  fmt::format("{} resonant mode(s); expected exactly k = {}", nres, c.resonant_k));
        run.finish_stage();
    });
    if (rep.failure)
        return;

    std::optional<TrajectoryEnsemble> e1, e2;
    run.stage("sample", [&] {
        run.within("sampler");
        e1 = harmonic_ensemble(params, c.epsilon, c.samples, c.seed, c.omega, c.exec);
        // independent draws for the scaled run
        e2 = harmonic_ensemble(params, c.epsilon * c.epsilon_scale, c.samples, c.seed ^ 0x9E3779B97F4A7C15ull, c.omega,
                               c.exec);
        run.within("fourier_roundtrip");
        double worst = 0.0;
        for (std::size_t i = 0; i < e1->count; ++i) {
            std::span<const cplx> x(e1->trajectories.data() + i * Ts, Ts);
            auto back = fourier_analysis(x);
            double scale = 1.0;
            for (std::size_t j = 0; j < Ts; ++j)
                scale = std::max(scale, std::abs(e1->coefficients[i * Ts + j]));
            for (std::size_t j = 0; j < Ts; ++j)
                worst = std::max(worst, std::abs(back[j] - e1->coefficients[i * Ts + j]) / scale);
        }
        run.out() = {{"n", e1->count}, {"fourier_roundtrip_max_error", worst}};
        run.check("fourier_roundtrip", worst <= 1e-10, fmt::format("max relative error {:.3e}", worst));
        std::filesystem::create_directories(c.out_dir);
        write_trajectories_csv(*e1, (std::filesystem::path(c.out_dir) / "trajectories.csv").string());
        rep.artifacts.push_back("trajectories.csv");
        run.finish_stage();
    });
    if (rep.failure)
        return;

    run.stage("verify", [&] {
        auto& out = run.out();
        run.within("mode_moments");
        const int vd = c.verify_degree.value_or(2);
        auto table = build_moment_table(c.weight_spec(), vd);
        auto pts = ComplexEnsemble::from_points(T, e1->coefficients);
        auto v = verify_moments(pts, table, vd, c.nsigma, c.exec);
        for (const auto& row : v.rows)
            rep.moments.push_back({row.index, row.reference, row.estimate, row.pull_re, row.pull_im});
        out["moments"] = {{"degree", vd},
                          {"pass", v.pass},
                          {"worst", v.worst ? ojson(v.worst->str()) : ojson(nullptr)},
                          {"worst_pull", v.worst_pull}};
        run.check("mode_moments", v.pass,
                  fmt::format("worst pull {:.3f} at {} (limit {})", v.worst_pull, v.worst ? v.worst->str() : "-",
                              c.nsigma));

        run.within("spectrum");
        auto spec1 = real_power_spectrum(*e1);
        std::size_t peak = 0;
        for (std::size_t k = 1; k < spec1.size(); ++k)
            if (spec1[k] > spec1[peak])
                peak = k;
        out["power_spectrum"] = spec1;
        out["peak"] = peak;
        run.check("spectrum_peak", static_cast<int>(peak) == c.resonant_k,
                  fmt::format("power spectrum peaks at k = {}", peak));

        run.within("amplitude_scaling");
        const double a1 = mode_amplitude(*e1, c.resonant_k), a2 = mode_amplitude(*e2, c.resonant_k);
        const double expected = std::sqrt(c.epsilon_scale);
        const double ratio = a1 / a2;
        out["amplitude"] = {{"epsilon", c.epsilon},
                            {"scaled_epsilon", c.epsilon * c.epsilon_scale},
                            {"amplitude", a1},
                            {"scaled_amplitude", a2},
                            {"ratio", ratio},
                            {"expected", expected}};
        run.check("amplitude_scaling", std::abs(ratio / expected - 1.0) <= c.ratio_tol,
                  fmt::format("ratio {:.4f}, expected {:.4f} within {:.0f}%", ratio, expected, 100 * c.ratio_tol));
        run.finish_stage();
    });
}

} // namespace

ojson RunReport::to_json() const {
    ojson j;
    ojson cfg = ojson::object();
    for (const auto& [k, v] : config.echo())
        cfg[k] = v;
    j["config"] = std::move(cfg);
    j["pipeline"] = to_string(config.pipeline);
    j["stages"] = stages;
    ojson cks = ojson::array();
    for (const auto& ck : checks)
        cks.push_back({{"stage", ck.stage}, {"check", ck.name}, {"pass", ck.pass}, {"detail", ck.detail}});
    j["checks"] = std::move(cks);
    ojson rows = ojson::array();
    for (const auto& r : moments) {
        ojson row{{"index", r.index.str()}, {"oracle", cplx_json(r.oracle)}};
        if (r.estimate) {
            row["estimate"] = cplx_json(r.estimate->value);
            row["std_error"] = ojson::array({r.estimate->se_re, r.estimate->se_im});
            row["pull"] = ojson::array({r.pull_re, r.pull_im});
        }
        rows.push_back(std::move(row));
    }
    j["moments"] = std::move(rows);
    j["artifacts"] = artifacts;
    j["verdict"] = pass() ? "pass" : "fail";
    if (failure)
        j["failure"] = {{"stage", failure->stage},
                        {"check", failure->check},
                        {"message", failure->message},
                        {"exit_status", failure->status}};
    else
        j["failure"] = nullptr;
    j["exit_status"] = exit_status();
    return j;
}

RunReport run_pipeline(const ExperimentConfig& config) {
    RunReport rep;
    rep.config = config;
    Runner run(rep);
    try {
        config.validate();
    } catch (const ConfigError& e) {
        rep.failure = Failure{"config", "validation", e.what(), exit_config_error};
        return rep;
    }
    if (config.pipeline == Pipeline::harmonic)
        run_harmonic_pipeline(config, rep, run);
    else
        run_moment_pipeline(config, rep, run);
    return rep;
}

ReportFormat parse_report_format(const std::string& name) {
    if (name == "json")
        return ReportFormat::json;
    if (name == "csv")
        return ReportFormat::csv;
    if (name == "both")
        return ReportFormat::both;
    throw ConfigError(fmt::format("unknown report format '{}'", name));
}

std::string moments_csv(const RunReport& report) {
    std::string s = "index,oracle_re,oracle_im,estimate_re,estimate_im,se_re,se_im,pull_re,pull_im\n";
    for (const auto& r : report.moments) {
        s += fmt::format("{},{:.17g},{:.17g}", r.index.str(), r.oracle.real(), r.oracle.imag());
        if (r.estimate)
            s += fmt::format(",{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.estimate->value.real(),
                             r.estimate->value.imag(), r.estimate->se_re, r.estimate->se_im, r.pull_re, r.pull_im);
        else
            s += ",,,,,,\n";
    }
    return s;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write {}", p.string()));
    out << text;
    if (!out)
        throw std::runtime_error(fmt::format("write failed for {}", p.string()));
}

} // namespace

void emit_report(const RunReport& report, const std::string& dir, ReportFormat format) {
    std::filesystem::path base(dir);
    std::error_code ec;
    std::filesystem::create_directories(base, ec);
    if (ec)
        throw std::runtime_error(fmt::format("cannot create output directory {}: {}", dir, ec.message()));
    if (format != ReportFormat::csv) {
        write_file(base / "report.json", report.to_json().dump(2) + "\n");
        ojson t = ojson::object();
        for (const auto& [stage, sec] : report.timings)
            t[stage] = sec;
        write_file(base / "timings.json", ojson{{"seconds", t}}.dump(2) + "\n");
    }
    if (format != ReportFormat::json)
        write_file(base / "moments.csv", moments_csv(report));
}

} // namespace posrep
