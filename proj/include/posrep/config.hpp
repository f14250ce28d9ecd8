#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posrep/exec.hpp"
#include "posrep/oscillator.hpp"
#include "posrep/radial.hpp"
#include "posrep/weights.hpp"

namespace posrep {

enum class Pipeline { moments, bound, construct, sample, verify, pathint, harmonic };

std::string to_string(Pipeline p);
Pipeline parse_pipeline(const std::string& name);

enum class RadialKind { half_gaussian, exponential, delta, completed, anharmonic };

std::string to_string(RadialKind k);

/// Parsed experiment description. Sections: [run] [weight] [radial]
/// [construct] [sample] [verify] [quadrature] [pathint] [harmonic].
struct ExperimentConfig {
    Pipeline pipeline = Pipeline::verify;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    Exec exec = Exec::parallel;

    // [weight]
    std::string weight_kind = "gaussian_phase";
    std::vector<double> a{1.0};
    std::vector<double> g{1.0};
    OscillatorParams oscillator{};
    double epsilon = 1e-3;
    OmegaConvention omega = OmegaConvention::two_pi_k_over_T;
    std::string table_path;

    // [radial]
    RadialKind radial = RadialKind::half_gaussian;
    double delta_B = 1.0;
    KineticForm kinetic = KineticForm::derived;
    /// nodes of the completed-sequence measure; 0 picks the smallest that
    /// reproduces every moment up to the cutoff
    int completion_nodes = 0;

    // [construct]
    double margin = 1.05;
    std::optional<double> lambda;
    /// requested cutoff; the cutoff used is max(adaptive, requested)
    std::optional<int> cutoff;
    long grid_points = 10000;

    // [sample]
    std::size_t samples = 100000;

    // [verify]
    double nsigma = 4.0;
    /// highest degree compared; defaults to the cutoff used
    std::optional<int> verify_degree;

    // [quadrature]
    std::optional<double> quad_tol;
    std::optional<double> angle;

    // [pathint]
    bool angle_check = true;
    double check_angle = -0.5235987755982988;
    double angle_tol = 1e-6;
    int max_escalations = 40;

    // [harmonic]
    int resonant_k = 1;
    bool tune_mass = true;
    double epsilon_scale = 4.0;
    double ratio_tol = 0.1;

    int dimension() const;
    ComplexWeightSpec weight_spec() const;
    /// Oscillator parameters with the mass tuned to resonance when requested.
    OscillatorParams harmonic_params() const;
    double lambda_value() const;
    int adaptive_cutoff_value() const;
    int cutoff_used() const;
    int verify_degree_used() const;

    /// Throws ConfigError naming the offending key.
    void validate() const;

    /// Normalized key/value echo, sorted by section and key.
    std::map<std::string, std::string> echo() const;
};

ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

} // namespace posrep
