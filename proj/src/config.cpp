#include "posrep/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "posrep/error.hpp"
#include "posrep/tconstruct.hpp"

namespace posrep {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"run", {"pipeline", "seed", "out", "exec"}},
        {"weight", {"kind", "a", "g", "mu", "kappa", "delta", "T", "epsilon", "omega", "table"}},
        {"radial", {"model", "B", "kinetic", "nodes"}},
        {"construct", {"margin", "lambda", "D", "grid_points"}},
        {"sample", {"n"}},
        {"verify", {"nsigma", "degree"}},
        {"quadrature", {"tol", "angle"}},
        {"pathint", {"angle_check", "check_angle", "angle_tol", "max_escalations"}},
        {"harmonic", {"k", "tune_mass", "epsilon_scale", "ratio_tol"}},
    };
    return keys;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? " " : "") + fmt_double(v[i]);
    return s;
}

class Reader {
  public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        auto sec = tree_.get_child_optional(section);
        if (!sec)
            return std::nullopt;
        auto v = sec->get_optional<std::string>(key);
        if (!v)
            return std::nullopt;
        return trim(*v);
    }

    template <class T>
    std::optional<T> get(const std::string& section, const std::string& key) const {
        auto r = raw(section, key);
        if (!r)
            return std::nullopt;
        std::istringstream in(*r);
        T v{};
        in >> v;
        if (!in || !(in >> std::ws).eof())
            throw ConfigError(fmt::format("[{}] {}: cannot parse '{}'", section, key, *r));
        return v;
    }

    std::optional<bool> get_bool(const std::string& section, const std::string& key) const {
        auto r = raw(section, key);
        if (!r)
            return std::nullopt;
        if (*r == "true" || *r == "yes" || *r == "1")
            return true;
        if (*r == "false" || *r == "no" || *r == "0")
            return false;
        throw ConfigError(fmt::format("[{}] {}: expected true or false, got '{}'", section, key, *r));
    }

    std::optional<std::vector<double>> get_list(const std::string& section, const std::string& key) const {
        auto r = raw(section, key);
        if (!r)
            return std::nullopt;
        std::string s = *r;
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream in(s);
        std::vector<double> out;
        double v;
        while (in >> v)
            out.push_back(v);
        if (!(in.eof()) || out.empty())
            throw ConfigError(fmt::format("[{}] {}: expected a list of numbers, got '{}'", section, key, *r));
        return out;
    }

  private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }

    const pt::ptree& tree_;
};

} // namespace

std::string to_string(Pipeline p) {
    static const char* names[] = {"moments", "bound", "construct", "sample", "verify", "pathint", "harmonic"};
    return names[static_cast<int>(p)];
}

Pipeline parse_pipeline(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(Pipeline::harmonic); ++i)
        if (to_string(static_cast<Pipeline>(i)) == name)
            return static_cast<Pipeline>(i);
    throw ConfigError(fmt::format("unknown pipeline '{}'", name));
}

std::string to_string(RadialKind k) {
    static const char* names[] = {"half_gaussian", "exponential", "delta", "completed", "anharmonic"};
    return names[static_cast<int>(k)];
}

ExperimentConfig parse_config_string(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }
    for (const auto& [section, body] : tree) {
        auto it = allowed_keys().find(section);
        if (it == allowed_keys().end())
            throw ConfigError(fmt::format("unknown section [{}]", section));
        if (!body.data().empty())
            throw ConfigError(fmt::format("key '{}' outside any section", section));
        for (const auto& kv : body)
            if (!it->second.count(kv.first))
                throw ConfigError(fmt::format("unknown key '{}' in [{}]", kv.first, section));
    }

    Reader r(tree);
    ExperimentConfig c;
    auto pipeline = r.raw("run", "pipeline");
    if (!pipeline)
        throw ConfigError("[run] pipeline is required");
    c.pipeline = parse_pipeline(*pipeline);
    auto seed = r.get<std::uint64_t>("run", "seed");
    if (!seed)
        throw ConfigError("[run] seed is required");
    c.seed = *seed;
    if (auto v = r.raw("run", "out"))
        c.out_dir = *v;
    if (auto v = r.raw("run", "exec")) {
        if (*v == "serial")
            c.exec = Exec::serial;
        else if (*v == "parallel")
            c.exec = Exec::parallel;
        else
            throw ConfigError("[run] exec: expected serial or parallel");
    }

    if (c.pipeline == Pipeline::pathint)
        c.weight_kind = "anharmonic_lattice";
    if (c.pipeline == Pipeline::harmonic)
        c.weight_kind = "harmonic_fourier";
    if (auto v = r.raw("weight", "kind"))
        c.weight_kind = *v;
    if (auto v = r.get_list("weight", "a"))
        c.a = *v;
    if (auto v = r.get_list("weight", "g"))
        c.g = *v;
    if (auto v = r.get<double>("weight", "mu"))
        c.oscillator.mu = *v;
    if (auto v = r.get<double>("weight", "kappa"))
        c.oscillator.kappa = *v;
    if (auto v = r.get<double>("weight", "delta"))
        c.oscillator.delta = *v;
    if (auto v = r.get<int>("weight", "T"))
        c.oscillator.T = *v;
    if (auto v = r.get<double>("weight", "epsilon"))
        c.epsilon = *v;
    if (auto v = r.raw("weight", "omega")) {
        if (*v == "two_pi_k_over_T")
            c.omega = OmegaConvention::two_pi_k_over_T;
        else if (*v == "literal")
            c.omega = OmegaConvention::literal_k;
        else
            throw ConfigError("[weight] omega: expected two_pi_k_over_T or literal");
    }
    if (auto v = r.raw("weight", "table"))
        c.table_path = *v;

    if (c.weight_kind == "anharmonic_lattice")
        c.radial = RadialKind::anharmonic;
    if (auto v = r.raw("radial", "model")) {
        bool found = false;
        for (int i = 0; i <= static_cast<int>(RadialKind::anharmonic); ++i)
            if (to_string(static_cast<RadialKind>(i)) == *v) {
                c.radial = static_cast<RadialKind>(i);
                found = true;
            }
        if (!found)
            throw ConfigError(fmt::format("[radial] model: unknown model '{}'", *v));
    }
    if (auto v = r.get<double>("radial", "B"))
        c.delta_B = *v;
    if (auto v = r.raw("radial", "kinetic")) {
        if (*v == "derived")
            c.kinetic = KineticForm::derived;
        else if (*v == "literal")
            c.kinetic = KineticForm::literal;
        else
            throw ConfigError("[radial] kinetic: expected derived or literal");
    }
    if (auto v = r.get<int>("radial", "nodes"))
        c.completion_nodes = *v;

    if (auto v = r.get<double>("construct", "margin"))
        c.margin = *v;
    c.lambda = r.get<double>("construct", "lambda");
    c.cutoff = r.get<int>("construct", "D");
    if (auto v = r.get<long>("construct", "grid_points"))
        c.grid_points = *v;

    if (auto v = r.get<double>("sample", "n")) {
        if (!(*v >= 1.0) || *v != std::floor(*v) || *v > 1e9)
            throw ConfigError("[sample] n: expected a positive integer up to 1e9");
        c.samples = static_cast<std::size_t>(*v);
    }

    if (auto v = r.get<double>("verify", "nsigma"))
        c.nsigma = *v;
    c.verify_degree = r.get<int>("verify", "degree");

    c.quad_tol = r.get<double>("quadrature", "tol");
    c.angle = r.get<double>("quadrature", "angle");

    if (auto v = r.get_bool("pathint", "angle_check"))
        c.angle_check = *v;
    if (auto v = r.get<double>("pathint", "check_angle"))
        c.check_angle = *v;
    if (auto v = r.get<double>("pathint", "angle_tol"))
        c.angle_tol = *v;
    if (auto v = r.get<int>("pathint", "max_escalations"))
        c.max_escalations = *v;

    if (auto v = r.get<int>("harmonic", "k"))
        c.resonant_k = *v;
    if (auto v = r.get_bool("harmonic", "tune_mass"))
        c.tune_mass = *v;
    if (auto v = r.get<double>("harmonic", "epsilon_scale"))
        c.epsilon_scale = *v;
    if (auto v = r.get<double>("harmonic", "ratio_tol"))
        c.ratio_tol = *v;

    c.validate();
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot read config '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_string(ss.str());
}

OscillatorParams ExperimentConfig::harmonic_params() const {
    OscillatorParams p = oscillator;
    if (tune_mass)
        p.mu = resonant_mu(resonant_k, p.kappa, p.delta, p.T, omega);
    return p;
}

ComplexWeightSpec ExperimentConfig::weight_spec() const {
    if (weight_kind == "gaussian_phase")
        return ComplexWeightSpec::gaussian_phase(a);
    if (weight_kind == "quartic_phase")
        return ComplexWeightSpec::quartic_phase(g);
    if (weight_kind == "anharmonic_lattice")
        return ComplexWeightSpec::anharmonic_lattice(oscillator);
    if (weight_kind == "harmonic_fourier")
        return ComplexWeightSpec::harmonic_fourier(harmonic_params(), epsilon, omega);
    if (weight_kind == "tabulated") {
        if (table_path.empty())
            throw ConfigError("[weight] table is required for tabulated weights");
        return ComplexWeightSpec::tabulated(read_moment_table_csv(table_path));
    }
    throw ConfigError(fmt::format("[weight] kind: unknown kind '{}'", weight_kind));
}

int ExperimentConfig::dimension() const { return weight_spec().dimension(); }

double ExperimentConfig::lambda_value() const {
    return lambda ? *lambda : margin * lambda_min(dimension());
}

int ExperimentConfig::adaptive_cutoff_value() const { return adaptive_cutoff(lambda_value(), dimension()); }

int ExperimentConfig::cutoff_used() const {
    int D = adaptive_cutoff_value();
    return cutoff ? std::max(D, *cutoff) : D;
}

int ExperimentConfig::verify_degree_used() const { return verify_degree ? *verify_degree : cutoff_used(); }

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& what) { throw ConfigError(what); };
    if (out_dir.empty())
        bad("[run] out must not be empty");
    int N = 0;
    try {
        if (weight_kind == "anharmonic_lattice" || weight_kind == "harmonic_fourier")
            oscillator.validate();
        if (weight_kind == "harmonic_fourier") {
            if (oscillator.T % 2 == 0)
                bad("[weight] T must be odd for harmonic_fourier");
            const int M = (oscillator.T - 1) / 2;
            if (resonant_k < 1 || resonant_k > M)
                bad(fmt::format("[harmonic] k must lie in 1..{}", M));
            if (!(epsilon > 0.0))
                bad("[weight] epsilon must be positive");
        }
        N = weight_spec().dimension();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad(fmt::format("[weight] {}", e.what()));
    }

    if (pipeline == Pipeline::pathint && weight_kind != "anharmonic_lattice")
        bad("pathint pipeline requires [weight] kind = anharmonic_lattice");
    if (pipeline == Pipeline::harmonic) {
        if (weight_kind != "harmonic_fourier")
            bad("harmonic pipeline requires [weight] kind = harmonic_fourier");
        if (!(epsilon_scale > 1.0))
            bad("[harmonic] epsilon_scale must exceed 1");
        if (!(ratio_tol > 0.0 && ratio_tol < 1.0))
            bad("[harmonic] ratio_tol must lie in (0, 1)");
        if (samples < 2)
            bad("[sample] n must be at least 2");
        if (!(nsigma > 0.0))
            bad("[verify] nsigma must be positive");
        return;
    }
    if (radial == RadialKind::anharmonic && weight_kind != "anharmonic_lattice")
        bad("[radial] model = anharmonic needs an anharmonic_lattice weight");
    if (weight_kind == "anharmonic_lattice" && oscillator.T > 3)
        bad("[weight] T > 3 is beyond the lattice quadrature budget");
    if (radial == RadialKind::delta && !(delta_B > 0.0))
        bad("[radial] B must be positive");
    if (completion_nodes < 0)
        bad("[radial] nodes must be >= 0");
    if (max_escalations < 0)
        bad("[pathint] max_escalations must be >= 0");

    if (!(margin > 1.0) || !std::isfinite(margin))
        bad("[construct] margin must exceed 1");
    if (lambda && !(*lambda >= margin * lambda_min(N)))
        bad(fmt::format("[construct] lambda {} is below margin * lambda_min = {}", *lambda, margin * lambda_min(N)));
    if (cutoff && *cutoff < 0)
        bad("[construct] D must be >= 0");
    if (grid_points < 1)
        bad("[construct] grid_points must be positive");
    if (samples < 2)
        bad("[sample] n must be at least 2");
    if (!(nsigma > 0.0))
        bad("[verify] nsigma must be positive");
    if (verify_degree && (*verify_degree < 0 || *verify_degree > cutoff_used()))
        bad(fmt::format("[verify] degree must lie in 0..{} (the cutoff used)", cutoff_used()));
    if (quad_tol && !(*quad_tol > 0.0 && *quad_tol < 1.0))
        bad("[quadrature] tol must lie in (0, 1)");
    if (!(angle_tol > 0.0))
        bad("[pathint] angle_tol must be positive");
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> e;
    e["run.pipeline"] = to_string(pipeline);
    e["run.seed"] = std::to_string(seed);
    e["run.exec"] = exec == Exec::serial ? "serial" : "parallel";
    e["weight.kind"] = weight_kind;
    if (weight_kind == "gaussian_phase")
        e["weight.a"] = join(a);
    else if (weight_kind == "quartic_phase")
        e["weight.g"] = join(g);
    else if (weight_kind == "tabulated")
        e["weight.table"] = table_path;
    else {
        const auto p = weight_kind == "harmonic_fourier" ? harmonic_params() : oscillator;
        e["weight.mu"] = fmt_double(p.mu);
        e["weight.kappa"] = fmt_double(p.kappa);
        e["weight.delta"] = fmt_double(p.delta);
        e["weight.T"] = std::to_string(p.T);
    }
    if (weight_kind == "harmonic_fourier") {
        e["weight.epsilon"] = fmt_double(epsilon);
        e["weight.omega"] = omega == OmegaConvention::literal_k ? "literal" : "two_pi_k_over_T";
        e["harmonic.k"] = std::to_string(resonant_k);
        e["harmonic.tune_mass"] = tune_mass ? "true" : "false";
        e["harmonic.epsilon_scale"] = fmt_double(epsilon_scale);
        e["harmonic.ratio_tol"] = fmt_double(ratio_tol);
        e["sample.n"] = std::to_string(samples);
        e["verify.nsigma"] = fmt_double(nsigma);
        return e;
    }
    e["radial.model"] = to_string(radial);
    if (radial == RadialKind::delta)
        e["radial.B"] = fmt_double(delta_B);
    if (radial == RadialKind::anharmonic)
        e["radial.kinetic"] = kinetic == KineticForm::derived ? "derived" : "literal";
    if (radial == RadialKind::completed)
        e["radial.nodes"] = std::to_string(completion_nodes);
    e["construct.margin"] = fmt_double(margin);
    e["construct.lambda"] = fmt_double(lambda_value());
    e["construct.D"] = std::to_string(cutoff_used());
    e["construct.grid_points"] = std::to_string(grid_points);
    e["sample.n"] = std::to_string(samples);
    e["verify.nsigma"] = fmt_double(nsigma);
    e["verify.degree"] = std::to_string(verify_degree_used());
    if (quad_tol)
        e["quadrature.tol"] = fmt_double(*quad_tol);
    if (angle)
        e["quadrature.angle"] = fmt_double(*angle);
    if (weight_kind == "anharmonic_lattice") {
        e["pathint.angle_check"] = angle_check ? "true" : "false";
        e["pathint.check_angle"] = fmt_double(check_angle);
        e["pathint.angle_tol"] = fmt_double(angle_tol);
        e["pathint.max_escalations"] = std::to_string(max_escalations);
    }
    return e;
}

} // namespace posrep
