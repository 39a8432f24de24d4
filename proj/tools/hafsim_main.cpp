// Command-line front end: toy-model parameter sweeps, exact probability
// tables, sampling runs, hafnian evaluation, and the cross-route validation
// suite. All outputs are machine-readable (CSV or JSON).
//
// Exit status: 0 on success, 1 on validation failure, 2 on configuration
// errors.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hafsim/gaussian.hpp"
#include "hafsim/hafnian.hpp"
#include "hafsim/model.hpp"
#include "hafsim/oracle.hpp"
#include "hafsim/sampler.hpp"
#include "hafsim/stats.hpp"
#include "hafsim/symplectic.hpp"

namespace {

using nlohmann::json;
using namespace hafsim;

constexpr int kExitSuccess = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

struct SweepSpec {
    std::string variable = "gamma"; // or "T"
    double from = 0.01;
    double to = 3.0;
    int points = 60;
    bool log_scale = true;
};

struct RunConfig {
    std::string mode;
    ToyParams toy;
    double t_eff = 0.1;
    SweepSpec sweep;
    int cutoff = -1; // -1: pick from the tail estimate
    std::uint64_t seed = 1;
    int count = 1000;
    std::string output_path;
    std::string input_path;      // hafnian matrix file
    std::string covariance_path; // extra validate input
    std::string probs_path;      // extra validate input
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestionError("cannot open config file: " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw IngestionError(std::string("config JSON: parse failure: ") + e.what());
    }
    try {
        if (doc.contains("mode")) cfg.mode = doc["mode"].get<std::string>();
        if (doc.contains("toy")) {
            const auto& t = doc["toy"];
            if (t.contains("hbar_omega")) cfg.toy.hbar_omega = t["hbar_omega"].get<double>();
            if (t.contains("epsilon")) cfg.toy.epsilon = t["epsilon"].get<double>();
            if (t.contains("gamma")) cfg.toy.gamma = t["gamma"].get<double>();
            if (t.contains("N0")) cfg.toy.N0 = t["N0"].get<double>();
            if (t.contains("Q0")) cfg.toy.Q0 = t["Q0"].get<double>();
        }
        if (doc.contains("T_eff")) cfg.t_eff = doc["T_eff"].get<double>();
        if (doc.contains("sweep")) {
            const auto& s = doc["sweep"];
            if (s.contains("variable")) cfg.sweep.variable = s["variable"].get<std::string>();
            if (s.contains("from")) cfg.sweep.from = s["from"].get<double>();
            if (s.contains("to")) cfg.sweep.to = s["to"].get<double>();
            if (s.contains("points")) cfg.sweep.points = s["points"].get<int>();
            if (s.contains("log_scale")) cfg.sweep.log_scale = s["log_scale"].get<bool>();
        }
        if (doc.contains("cutoff")) cfg.cutoff = doc["cutoff"].get<int>();
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("count")) cfg.count = doc["count"].get<int>();
        if (doc.contains("output_path")) cfg.output_path = doc["output_path"].get<std::string>();
        if (doc.contains("input_path")) cfg.input_path = doc["input_path"].get<std::string>();
    } catch (const json::exception& e) {
        throw IngestionError(std::string("config JSON: malformed field: ") + e.what());
    }
}

void validate_config(const RunConfig& cfg) {
    cfg.toy.validate();
    if (cfg.sweep.points < 2) {
        throw DomainError("config: sweep.points must be at least 2");
    }
    if (!(cfg.sweep.from < cfg.sweep.to)) {
        throw DomainError("config: sweep.from must be below sweep.to");
    }
    if (cfg.sweep.variable != "gamma" && cfg.sweep.variable != "T") {
        throw DomainError("config: sweep.variable must be 'gamma' or 'T'");
    }
    if (cfg.sweep.log_scale && cfg.sweep.from <= 0.0) {
        throw DomainError("config: log-scale sweeps need a positive lower end");
    }
    if (cfg.t_eff < 0.0) {
        throw DomainError("config: T_eff must be nonnegative");
    }
    if (cfg.count < 0) {
        throw DomainError("config: count must be nonnegative");
    }
}

// Output helper: file when a path is set, stdout otherwise.
class OutputStream {
  public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw IngestionError("cannot open output file: " + path);
            }
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::vector<double> sweep_grid(const SweepSpec& sweep) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(sweep.points));
    for (int k = 0; k < sweep.points; ++k) {
        const double t = static_cast<double>(k) / (sweep.points - 1);
        if (sweep.log_scale) {
            grid.push_back(sweep.from * std::pow(sweep.to / sweep.from, t));
        } else {
            grid.push_back(sweep.from + t * (sweep.to - sweep.from));
        }
    }
    return grid;
}

CovarianceMatrix photon_covariance(const ToyParams& toy, double t_eff) {
    const auto H = build_toy_hamiltonian(toy);
    return marginal_photon(covariance_from_quasiparticles(solve_bdg(H), H.layout, t_eff));
}

int pick_cutoff(const RunConfig& cfg, const CovarianceMatrix& photon) {
    if (cfg.cutoff >= 0) return cfg.cutoff;
    return suggest_total_cutoff(photon);
}

// ------------------------------- toy-sweep ---------------------------------

int run_toy_sweep(const RunConfig& cfg) {
    OutputStream out(cfg.output_path);
    out.get() << "sweep_value,eta,alpha_abs,alpha_c,alpha_max,r_eff,q_eff\n";

    int good_rows = 0;
    for (double value : sweep_grid(cfg.sweep)) {
        ToyParams toy = cfg.toy;
        double t_eff = cfg.t_eff;
        if (cfg.sweep.variable == "gamma") {
            toy.gamma = value;
        } else {
            t_eff = value;
        }
        try {
            const auto stats = single_mode_stats(photon_covariance(toy, t_eff), 0);
            out.get() << fmt(value) << ',' << fmt(stats.eta) << ','
                      << fmt(std::abs(stats.alpha)) << ',' << fmt(stats.alpha_c) << ','
                      << fmt(stats.alpha_max) << ',' << fmt(stats.r_eff) << ','
                      << fmt(stats.q_eff) << '\n';
            ++good_rows;
        } catch (const InstabilityError&) {
            // Unstable grid points become failed rows, not fatal errors.
            out.get() << fmt(value) << ",nan,nan,nan,nan,nan,nan\n";
        }
    }
    if (good_rows == 0) {
        std::cerr << "toy-sweep: every grid point is thermodynamically unstable\n";
        return kExitValidationFailure;
    }
    return kExitSuccess;
}

// --------------------------------- probs -----------------------------------

int run_probs(const RunConfig& cfg) {
    const auto photon = photon_covariance(cfg.toy, cfg.t_eff);
    const auto table = enumerate_distribution(photon, pick_cutoff(cfg, photon));
    OutputStream out(cfg.output_path);
    save_table(table, photon.layout.m_ph, out.get());
    return kExitSuccess;
}

// --------------------------------- sample ----------------------------------

int run_sample(const RunConfig& cfg) {
    const auto photon = photon_covariance(cfg.toy, cfg.t_eff);
    const auto table = enumerate_distribution(photon, pick_cutoff(cfg, photon));
    const auto samples = draw_samples(table, cfg.seed, cfg.count);
    OutputStream out(cfg.output_path);
    write_samples_csv(samples, out.get());
    return kExitSuccess;
}

// -------------------------------- hafnian ----------------------------------

Matrix load_symmetric_matrix(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw IngestionError(std::string("matrix JSON: parse failure: ") + e.what());
    }
    int n = 0;
    try {
        n = doc.at("n").get<int>();
        const auto& entries = doc.at("entries");
        if (n < 0 || entries.size() != static_cast<std::size_t>(n) * n) {
            throw IngestionError("matrix JSON: need n^2 row-major entries");
        }
        Matrix m(n, n);
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j, ++idx) {
                const auto& e = entries[idx];
                if (!e.is_array() || e.size() != 2) {
                    throw IngestionError("matrix JSON: entries must be [re, im] pairs");
                }
                m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw IngestionError(std::string("matrix JSON: missing field: ") + e.what());
    }
}

int run_hafnian(const RunConfig& cfg) {
    Matrix m;
    if (cfg.input_path.empty()) {
        m = load_symmetric_matrix(std::cin);
    } else {
        std::ifstream in(cfg.input_path);
        if (!in) {
            throw IngestionError("cannot open matrix file: " + cfg.input_path);
        }
        m = load_symmetric_matrix(in);
    }
    const Complex h = hafnian_trace(m);
    OutputStream out(cfg.output_path);
    out.get() << fmt(h.real()) << ' ' << fmt(h.imag()) << '\n';
    return kExitSuccess;
}

// -------------------------------- validate ---------------------------------

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
};

class CheckList {
  public:
    void run(const std::string& name, double residual, double tolerance) {
        CheckResult r;
        r.name = name;
        r.residual = residual;
        r.tolerance = tolerance;
        r.pass = residual <= tolerance;
        results_.push_back(std::move(r));
    }
    void skip(const std::string& name, const std::string& why) {
        CheckResult r;
        r.name = name;
        r.skipped = true;
        r.pass = true;
        r.note = why;
        results_.push_back(std::move(r));
    }
    bool all_passed() const {
        for (const auto& r : results_) {
            if (!r.pass) return false;
        }
        return true;
    }
    json report() const {
        json checks = json::array();
        for (const auto& r : results_) {
            json c;
            c["name"] = r.name;
            c["pass"] = r.pass;
            if (r.skipped) {
                c["skipped"] = true;
                c["note"] = r.note;
            } else {
                c["residual"] = r.residual;
                c["tolerance"] = r.tolerance;
            }
            checks.push_back(std::move(c));
        }
        json doc;
        doc["checks"] = std::move(checks);
        doc["passed"] = all_passed();
        return doc;
    }

  private:
    std::vector<CheckResult> results_;
};

int run_validate(const RunConfig& cfg) {
    CheckList checks;

    const auto H = build_toy_hamiltonian(cfg.toy);
    checks.run("toy_hermiticity", (H.mat - H.mat.adjoint()).cwiseAbs().maxCoeff(), 1e-12);

    const auto R = solve_bdg(H);
    checks.run("bdg_pseudo_unitarity", check_pseudo_unitarity(R), 1e-10);

    {
        const int M = H.layout.total();
        Matrix D = Matrix::Zero(2 * M, 2 * M);
        D.diagonal().head(M) = R.energies.cast<Complex>();
        D.diagonal().tail(M) = R.energies.cast<Complex>();
        const Matrix full = R.full();
        checks.run("bdg_diagonalization",
                   (full.adjoint() * H.mat * full - D).cwiseAbs().maxCoeff(), 1e-9);
    }

    {
        const auto f = bloch_messiah(R);
        checks.run("bloch_messiah_reconstruction",
                   (f.reconstruct() - R.full()).cwiseAbs().maxCoeff(), 1e-9);
    }

    const double t_route = cfg.t_eff > 0.0 ? cfg.t_eff : 0.25;
    {
        const auto a = covariance_from_quasiparticles(R, H.layout, t_route);
        const auto b = covariance_via_coth(H, t_route);
        checks.run("covariance_route_equivalence",
                   (a.full() - b.full()).cwiseAbs().maxCoeff(), 1e-9);
    }

    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        BogoliubovTransform rotated = R;
        for (int j = 0; j < R.modes(); ++j) {
            const Complex phase = std::exp(Complex(0.0, angle(rng)));
            rotated.U.col(j) *= phase;
            rotated.V.col(j) *= phase;
        }
        const auto a = covariance_from_quasiparticles(R, H.layout, t_route);
        const auto b = covariance_from_quasiparticles(rotated, H.layout, t_route);
        checks.run("quasiparticle_phase_invariance",
                   (a.full() - b.full()).cwiseAbs().maxCoeff(), 1e-10);
    }

    const auto photon = photon_covariance(cfg.toy, cfg.t_eff);
    checks.run("covariance_physicality", photon.physicality_residual(), 1e-9);

    {
        const int cutoff = pick_cutoff(cfg, photon);
        const auto table = enumerate_distribution(photon, cutoff);
        // Deficit must sit in [-1e-9, 1e-6]: an excess above one is reported
        // as an out-of-band residual.
        const double residual =
            table.deficit >= -1e-9 ? std::max(table.deficit, 0.0) : 1.0;
        checks.run("normalization_deficit", residual, 1e-6);
    }

    {
        std::mt19937_64 rng(12345);
        double worst = 0.0;
        for (int n : {2, 4, 6, 8, 10, 12}) {
            Matrix m(n, n);
            std::normal_distribution<double> dist(0.0, 1.0);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
            }
            m = 0.5 * (m + m.transpose()).eval();
            const Complex a = hafnian_matching(m);
            const Complex b = hafnian_trace(m);
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
        checks.run("hafnian_engine_agreement", worst, 1e-9);
    }

    if (H.layout.total() == 2 && cfg.t_eff > 0.0) {
        const int max_total = std::min(pick_cutoff(cfg, photon), 10);
        try {
            const auto state = fock_density_matrix_auto(H, cfg.t_eff, max_total);
            const auto series = series_probabilities(photon, max_total);
            double worst = 0.0;
            for (const auto& pattern : patterns_up_to_total(photon.layout.m_ph, max_total)) {
                const double a = pattern_probability(photon, pattern);
                const double b = oracle_probability(state, pattern);
                const double c = series.probability(pattern);
                worst = std::max({worst, std::abs(a - b), std::abs(a - c), std::abs(b - c)});
            }
            checks.run("triple_route_agreement", worst, 1e-7);
        } catch (const TruncationError& e) {
            checks.skip("triple_route_agreement", e.what());
        }
    } else {
        checks.skip("triple_route_agreement",
                    "needs a two-mode system at positive effective temperature");
    }

    if (!cfg.covariance_path.empty()) {
        const auto loaded = load_covariance_file(cfg.covariance_path);
        checks.run("covariance_file_physicality", loaded.physicality_residual(), 1e-9);
    }

    if (!cfg.probs_path.empty()) {
        std::ifstream in(cfg.probs_path);
        if (!in) {
            throw IngestionError("cannot open probability table: " + cfg.probs_path);
        }
        int m_ph = 0;
        const auto loaded = load_table(in, &m_ph);
        if (m_ph != photon.layout.m_ph) {
            throw IngestionError("probability table mode count does not match the config");
        }
        const auto recomputed = enumerate_distribution(photon, loaded.cutoff);
        double worst = std::abs(recomputed.deficit - loaded.deficit);
        for (const auto& [pattern, p] : loaded.entries) {
            worst = std::max(worst, std::abs(recomputed.probability(pattern) - p));
        }
        checks.run("probs_file_agreement", worst, 1e-12);
    }

    OutputStream out(cfg.output_path);
    out.get() << checks.report().dump(2) << "\n";
    return checks.all_passed() ? kExitSuccess : kExitValidationFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint photon statistics of Gaussian atom-photon cavity states"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--output", cfg.output_path, "output file (default stdout)");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--hbar-omega", cfg.toy.hbar_omega, "photon bare energy");
        sub->add_option("--epsilon", cfg.toy.epsilon, "atomic bare energy");
        sub->add_option("--gamma", cfg.toy.gamma, "interaction strength");
        sub->add_option("--n0", cfg.toy.N0, "condensate occupation");
        sub->add_option("--q0", cfg.toy.Q0, "coherent-mode photon number");
        sub->add_option("--t-eff", cfg.t_eff, "effective temperature");
        sub->add_option("--cutoff", cfg.cutoff, "total-photon cutoff");
        sub->add_option("--count", cfg.count, "number of samples");
    };

    auto* sweep = app.add_subcommand("toy-sweep", "sweep gamma or T and tabulate correlators");
    add_common(sweep);
    sweep->add_option("--sweep-variable", cfg.sweep.variable, "gamma or T");
    sweep->add_option("--sweep-from", cfg.sweep.from, "sweep lower end");
    sweep->add_option("--sweep-to", cfg.sweep.to, "sweep upper end");
    sweep->add_option("--sweep-points", cfg.sweep.points, "number of grid points");
    sweep->add_flag("--log-scale,!--linear-scale", cfg.sweep.log_scale, "grid spacing");

    auto* probs = app.add_subcommand("probs", "enumerate the pattern distribution");
    add_common(probs);

    auto* sample = app.add_subcommand("sample", "draw occupation-pattern samples");
    add_common(sample);

    auto* hafnian = app.add_subcommand("hafnian", "evaluate the hafnian of a JSON matrix");
    add_common(hafnian);
    hafnian->add_option("--input", cfg.input_path, "matrix JSON file (default stdin)");

    auto* validate = app.add_subcommand("validate", "run the cross-route check suite");
    add_common(validate);
    validate->add_option("--covariance", cfg.covariance_path,
                         "covariance JSON to check for physicality");
    validate->add_option("--probs", cfg.probs_path,
                         "probability table JSON to re-derive and compare");

    // Parse twice so explicit flags override config-file values.
    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            RunConfig from_file;
            apply_config_file(from_file, config_path);
            from_file.covariance_path = cfg.covariance_path;
            from_file.probs_path = cfg.probs_path;
            cfg = from_file;
            app.clear();
            app.parse(argc, argv);
        }
        validate_config(cfg);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitConfigError;
    } catch (const Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (sweep->parsed()) return run_toy_sweep(cfg);
        if (probs->parsed()) return run_probs(cfg);
        if (sample->parsed()) return run_sample(cfg);
        if (hafnian->parsed()) return run_hafnian(cfg);
        if (validate->parsed()) return run_validate(cfg);
    } catch (const IngestionError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    }
    return kExitConfigError;
}
