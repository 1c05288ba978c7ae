// rplab: restricted-projection laboratory.
//
// Subcommands: gen, certify, sweep, verify, oracle-check, exponent.
// Exit codes: 0 ok / verdict pass, 2 config error, 3 certification failure,
// 4 verdict fail, 5 oracle mismatch.
// RPLAB_SEED overrides config seeds.

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rplab/concentration.hpp"
#include "rplab/errors.hpp"
#include "rplab/experiments.hpp"
#include "rplab/frostman.hpp"
#include "rplab/generators.hpp"
#include "rplab/grid_index.hpp"
#include "rplab/io.hpp"
#include "rplab/rng.hpp"

namespace {

using namespace rplab;

// Accepts plain decimals, p/q fractions, and 2^-k / 3^-k powers.
double parse_real(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const double num = std::stod(text.substr(0, slash));
        const double den = std::stod(text.substr(slash + 1));
        if (den == 0.0) throw InvalidInput("division by zero in '" + text + "'");
        return num / den;
    }
    const auto caret = text.find('^');
    if (caret != std::string::npos) {
        const double base = std::stod(text.substr(0, caret));
        const double expo = std::stod(text.substr(caret + 1));
        return std::pow(base, expo);
    }
    return std::stod(text);
}

std::optional<uint64_t> env_seed() {
    const char* raw = std::getenv("RPLAB_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    return std::strtoull(raw, nullptr, 10);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct GenCli {
    std::string preset = "grid";
    int n = 2;
    std::string delta0 = "1/16";
    int depth = 4;
    std::vector<std::string> axes;
    std::string direction = "0,0,1";
    int k = 2;
    double r_star = 0.5;
    size_t count = 1024;
    double alpha_target = 1.0;
    uint64_t seed = 1;
    std::string out;
    double certify_alpha = 0.0;
    bool require_cert = false;
    double cap = std::numeric_limits<double>::infinity();
};

GeneratorSpec build_generator(const GenCli& cli) {
    const double delta0 = parse_real(cli.delta0);
    if (cli.preset == "grid") return GridGen{cli.n, delta0};
    if (cli.preset == "cantor") {
        CantorGen gen;
        gen.n = cli.n;
        gen.depth = cli.depth;
        for (const std::string& axis : cli.axes) {
            const auto parts = split(axis, ':');
            if (parts.size() != 2) throw InvalidInput("--axis expects base:d1,d2,... got '" + axis + "'");
            CantorAxis ca;
            ca.base = std::stoi(parts[0]);
            ca.digits.clear();
            for (const std::string& digit : split(parts[1], ',')) ca.digits.push_back(std::stoi(digit));
            gen.axes.push_back(std::move(ca));
        }
        return gen;
    }
    if (cli.preset == "segment") {
        SegmentGen gen;
        gen.n = cli.n;
        gen.delta0 = delta0;
        gen.direction.clear();
        for (const std::string& c : split(cli.direction, ',')) gen.direction.push_back(parse_real(c));
        return gen;
    }
    if (cli.preset == "kernel-line") return KernelLineGen{cli.n, cli.k, cli.r_star, delta0};
    if (cli.preset == "random") return RandomGen{cli.n, cli.count, cli.alpha_target, cli.seed};
    throw InvalidInput("unknown preset '" + cli.preset + "'");
}

int cmd_gen(const GenCli& cli) {
    GeneratorSpec spec = build_generator(cli);
    if (const auto seed = env_seed()) {
        if (auto* rg = std::get_if<RandomGen>(&spec)) rg->seed = *seed;
    }
    const FiniteMeasure mu = generate(spec);
    if (cli.out.empty()) throw InvalidInput("gen: output file required (-o)");
    write_measure_csv(mu, cli.out);
    std::cout << "wrote " << mu.size() << " atoms to " << cli.out << "\n";
    std::cout << "designed alpha " << fmt_g17(designed_alpha(spec)) << ", lattice pitch "
              << fmt_g17(generator_delta0(spec)) << "\n";

    if (cli.certify_alpha > 0.0) {
        CertifyOptions opts;
        opts.cap = cli.cap;
        const FrostmanCertificate cert = frostman_certify(mu, cli.certify_alpha, generator_delta0(spec), opts);
        std::cout << "certificate: alpha " << fmt_g17(cert.alpha) << ", c0 " << fmt_g17(cert.c0) << ", "
                  << (cert.passed ? "passed" : "failed") << "\n";
        if (cli.require_cert && !cert.passed) return 3;
    }
    return 0;
}

struct CertifyCli {
    std::string in;
    int n = 2;
    double alpha = 1.0;
    std::string delta0 = "1/16";
    std::string policy = "atoms";
    double cap = std::numeric_limits<double>::infinity();
    std::string out;
};

int cmd_certify(const CertifyCli& cli) {
    std::vector<std::string> warnings;
    const FiniteMeasure mu = ingest(cli.in, cli.n, &warnings);
    for (const std::string& w : warnings) std::cerr << "ingest: " << w << "\n";
    CertifyOptions opts;
    opts.cap = cli.cap;
    if (cli.policy == "atoms-grid") {
        opts.policy = CenterPolicy::AtomsPlusGrid;
    } else if (cli.policy != "atoms") {
        throw InvalidInput("certify: policy must be atoms or atoms-grid");
    }
    const FrostmanCertificate cert = frostman_certify(mu, cli.alpha, parse_real(cli.delta0), opts);
    const Json j = certificate_json(cert);
    if (!cli.out.empty()) write_text_file(cli.out, j.dump(2) + "\n");
    std::cout << "c0 " << fmt_g17(cert.c0) << " over " << cert.scales.size() << " scales, "
              << (cert.passed ? "passed" : "failed") << "\n";
    return cert.passed ? 0 : 3;
}

struct SweepCli {
    std::string config;
    std::string in;
    std::string out_dir = ".";
    int threads = 0;
    // flag overrides; NaN/negative sentinels mean "not set"
    int theorem = 0;
    int n = -1;
    int k = -1;
    std::string t, delta, alpha, c0, delta0, epsilon, eta, eta_mult;
    std::string r_min, r_max;
    long r_count = -1;
    std::string sample;
    long long seed = -1;
    std::string e_cap, g_cap, slack, iii_quota;
    std::string fit_deltas;
};

struct ResolvedSweep {
    SweepConfig cfg;
    FiniteMeasure mu;
    std::optional<GeneratorSpec> source_spec;
    std::string source_file;
};

ResolvedSweep resolve_sweep(const SweepCli& cli) {
    ResolvedSweep out;
    Json config = Json::object();
    if (!cli.config.empty()) {
        std::ifstream in(cli.config);
        if (!in) throw InvalidInput("cannot open config: " + cli.config);
        in >> config;
        if (config.contains("version") && config.at("version").get<int>() != 1)
            throw InvalidInput("config: unsupported version");
    }

    if (!config.empty()) {
        Json params = config;
        out.cfg = sweep_config_from_json(params);
    }
    SweepConfig& cfg = out.cfg;
    if (cli.theorem > 0) cfg.family = static_cast<Family>(cli.theorem);
    if (cli.n >= 0) cfg.n = cli.n;
    if (cli.k >= 0) cfg.k = cli.k;
    if (!cli.t.empty()) cfg.t = parse_real(cli.t);
    if (!cli.delta.empty()) cfg.delta = parse_real(cli.delta);
    if (!cli.alpha.empty()) cfg.alpha = parse_real(cli.alpha);
    if (!cli.c0.empty()) cfg.c0 = parse_real(cli.c0);
    if (!cli.delta0.empty()) cfg.delta0 = parse_real(cli.delta0);
    if (!cli.epsilon.empty()) cfg.epsilon = parse_real(cli.epsilon);
    if (!cli.eta.empty()) cfg.eta = parse_real(cli.eta);
    if (!cli.eta_mult.empty()) cfg.eta_mult = parse_real(cli.eta_mult);
    if (!cli.r_min.empty()) cfg.r_grid.min = parse_real(cli.r_min);
    if (!cli.r_max.empty()) cfg.r_grid.max = parse_real(cli.r_max);
    if (cli.r_count > 0) cfg.r_grid.count = static_cast<size_t>(cli.r_count);
    if (!cli.sample.empty()) {
        if (cli.sample == "all") {
            cfg.sample = SamplePolicy::all();
        } else {
            cfg.sample = SamplePolicy::random_k(std::stoull(cli.sample), cfg.seed);
        }
    }
    if (cli.seed >= 0) cfg.seed = static_cast<uint64_t>(cli.seed);
    if (!cli.e_cap.empty()) cfg.e_cap = parse_real(cli.e_cap);
    if (!cli.g_cap.empty()) cfg.g_cap = parse_real(cli.g_cap);
    if (!cli.slack.empty()) cfg.slack = parse_real(cli.slack);
    if (!cli.iii_quota.empty()) cfg.iii_quota = parse_real(cli.iii_quota);
    if (!cli.fit_deltas.empty()) {
        cfg.fit_exponents = true;
        cfg.fit_deltas.clear();
        for (const std::string& field : split(cli.fit_deltas, ',')) cfg.fit_deltas.push_back(parse_real(field));
    }
    if (const auto seed = env_seed()) cfg.seed = *seed;

    // Source: --in CSV beats the config's source object.
    if (!cli.in.empty()) {
        out.source_file = cli.in;
        std::vector<std::string> warnings;
        const int ambient_n = cfg.family == Family::Thm1 ? 2 : cfg.n;
        out.mu = ingest(cli.in, ambient_n, &warnings);
        for (const std::string& w : warnings) std::cerr << "ingest: " << w << "\n";
    } else if (config.contains("source")) {
        const Json& src = config.at("source");
        if (src.is_object() && src.contains("type") && src.at("type") == "file") {
            for (const auto& [key, value] : src.items())
                if (key != "type" && key != "path" && key != "n")
                    throw InvalidInput("source(file): unknown key '" + key + "'");
            out.source_file = src.at("path").get<std::string>();
            std::vector<std::string> warnings;
            out.mu = ingest(out.source_file, src.at("n").get<int>(), &warnings);
            for (const std::string& w : warnings) std::cerr << "ingest: " << w << "\n";
        } else {
            GeneratorSpec spec = generator_spec_from_json(src);
            if (const auto seed = env_seed()) {
                if (auto* rg = std::get_if<RandomGen>(&spec)) rg->seed = *seed;
            }
            out.source_spec = spec;
            out.mu = generate(spec);
            if (cfg.delta0 <= 0.0) cfg.delta0 = generator_delta0(spec);
            if (cfg.alpha <= 0.0) cfg.alpha = designed_alpha(spec);
        }
    } else {
        throw InvalidInput("no source: pass --in FILE or a config with a source object");
    }
    return out;
}

void write_report_files(const SweepReport& rep, const ResolvedSweep& rs, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    Json j = sweep_report_json(rep);
    if (rs.source_spec) {
        j["source"] = generator_spec_json(*rs.source_spec);
    } else {
        j["source"] = Json{{"type", "file"}, {"path", rs.source_file}};
    }
    const auto dir = std::filesystem::path(out_dir);
    write_text_file((dir / "report.json").string(), j.dump(2) + "\n");
    write_text_file((dir / "report.csv").string(), sweep_report_csv(rep));
    write_text_file((dir / "report.dat").string(), sweep_plot_data(rep));
}

int cmd_sweep(const SweepCli& cli, bool with_verdict) {
    if (cli.threads > 0) omp_set_num_threads(cli.threads);
    ResolvedSweep rs = resolve_sweep(cli);
    const SweepReport rep = with_verdict ? verify(rs.mu, rs.cfg) : sweep(rs.mu, rs.cfg);
    write_report_files(rep, rs, cli.out_dir);
    std::cout << "swept " << rep.per_r.size() << " r values; exceptional fraction "
              << fmt_g17(rep.exceptional_fraction) << "\n";
    for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    if (!with_verdict) return 0;
    std::cout << "verdict: part_i " << (rep.verdict.part_i ? "pass" : "fail") << ", part_ii "
              << (rep.verdict.part_ii ? "pass" : "fail") << ", part_iii "
              << (rep.verdict.part_iii ? "pass" : "fail") << ", hypothesis "
              << (rep.verdict.hypothesis_ok ? "ok" : "violated") << "\n";
    return rep.verdict.pass ? 0 : 4;
}

struct OracleCli {
    size_t n_points = 1000;
    uint64_t seed = 2024;
    bool inject_bug = false;
};

int cmd_oracle_check(const OracleCli& cli) {
    if (cli.n_points > 5000) throw InvalidInput("oracle-check: size bound is 5000 points");
    SplitMix64 rng(mix_seed(cli.seed, 0x0c11ULL));
    std::vector<double> coords;
    coords.reserve(cli.n_points * 3);
    while (coords.size() < cli.n_points * 3) {
        double p[3];
        double s = 0.0;
        for (double& x : p) {
            x = 2.0 * rng.next_double() - 1.0;
            s += x * x;
        }
        if (s <= 1.0) coords.insert(coords.end(), p, p + 3);
    }
    const FiniteMeasure mu = uniform_on_flat(2, std::move(coords));

    const std::vector<ProjectionSpec> specs{PiTR{1.0, 0.37}, PK{2, 2, 0.61}, RepPush{2, 1.5, 0.8}};
    const std::vector<double> deltas{1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32};
    for (const ProjectionSpec& spec : specs) {
        for (double delta : deltas) {
            const std::vector<double> proj = project_all(mu, spec);
            const int img = image_dim(spec);
            const GridIndex grid(proj.data(), mu.size(), img, delta);
            const ConcentrationProfile slow = concentration_profile_oracle(mu, spec, delta);
            std::vector<uint32_t> scratch;
            for (size_t i = 0; i < mu.size(); ++i) {
                std::vector<double> center(proj.data() + i * static_cast<size_t>(img),
                                           proj.data() + (i + 1) * static_cast<size_t>(img));
                if (cli.inject_bug) center[0] += delta;  // off-by-one cell
                const double fast = grid.mass_within(center.data(), delta, mu.weights, scratch);
                if (fast != slow.values[i]) {
                    std::cout << "mismatch: spec " << projection_spec_json(spec).dump() << " delta "
                              << fmt_g17(delta) << " atom " << i << ": accelerated " << fmt_g17(fast)
                              << " vs oracle " << fmt_g17(slow.values[i]) << "\n";
                    return 5;
                }
            }
        }
    }
    std::cout << "accelerated counts match the exhaustive oracle on " << mu.size() << " points, "
              << specs.size() << " specs, " << deltas.size() << " scales\n";
    return 0;
}

struct ExponentCli {
    std::string in;
    int n = 2;
    int theorem = 3;
    int k = 1;
    std::string t = "0";
    double r = 0.61;
    std::string deltas;
    std::string sample;
    uint64_t seed = 7;
};

int cmd_exponent(const ExponentCli& cli) {
    std::vector<std::string> warnings;
    const FiniteMeasure mu = ingest(cli.in, cli.n, &warnings);
    for (const std::string& w : warnings) std::cerr << "ingest: " << w << "\n";

    ProjectionSpec spec = PK{cli.n, cli.k, cli.r};
    if (cli.theorem == 1) spec = PiTR{parse_real(cli.t), cli.r};
    if (cli.theorem == 2) spec = RepPush{cli.n, parse_real(cli.t), cli.r};

    std::vector<double> deltas;
    for (const std::string& field : split(cli.deltas, ',')) deltas.push_back(parse_real(field));
    SamplePolicy policy = SamplePolicy::all();
    if (!cli.sample.empty() && cli.sample != "all")
        policy = SamplePolicy::random_k(std::stoull(cli.sample), cli.seed);
    const double slope = exponent_fit(mu, spec, deltas, policy);
    std::cout << "fitted exponent " << fmt_g17(slope) << " over " << deltas.size() << " scales\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rplab: projection families, Frostman certificates, concentration sweeps"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: all cores)");

    GenCli gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a point cloud CSV");
    gen_cmd->add_option("--preset", gen.preset, "grid|cantor|segment|kernel-line|random");
    gen_cmd->add_option("--n", gen.n, "ambient n (points live in R^{n+1})");
    gen_cmd->add_option("--delta0", gen.delta0, "lattice pitch (accepts 1/128, 2^-7)");
    gen_cmd->add_option("--depth", gen.depth, "cantor digit depth");
    gen_cmd->add_option("--axis", gen.axes, "cantor axis base:d1,d2,... (repeat n+1 times)");
    gen_cmd->add_option("--direction", gen.direction, "segment direction x,y,z");
    gen_cmd->add_option("--k", gen.k, "kernel-line projection order");
    gen_cmd->add_option("--r-star", gen.r_star, "kernel-line parameter");
    gen_cmd->add_option("--count", gen.count, "random preset atom target");
    gen_cmd->add_option("--alpha-target", gen.alpha_target, "random preset exponent");
    gen_cmd->add_option("--seed", gen.seed, "random preset seed");
    gen_cmd->add_option("-o,--out", gen.out, "output CSV")->required();
    gen_cmd->add_option("--certify", gen.certify_alpha, "certify this alpha after generating");
    gen_cmd->add_flag("--require-cert", gen.require_cert, "exit 3 when certification fails");
    gen_cmd->add_option("--cap", gen.cap, "certification c0 cap");

    CertifyCli cert;
    CLI::App* cert_cmd = app.add_subcommand("certify", "frostman-certify a point cloud");
    cert_cmd->add_option("--in", cert.in, "input CSV")->required();
    cert_cmd->add_option("--n", cert.n, "ambient n");
    cert_cmd->add_option("--alpha", cert.alpha, "exponent")->required();
    cert_cmd->add_option("--delta0", cert.delta0, "bottom scale")->required();
    cert_cmd->add_option("--policy", cert.policy, "atoms|atoms-grid");
    cert_cmd->add_option("--cap", cert.cap, "c0 cap");
    cert_cmd->add_option("-o,--out", cert.out, "certificate JSON path");

    SweepCli sweep_cli;
    auto add_sweep_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", sweep_cli.config, "JSON config (flags override)");
        cmd->add_option("--in", sweep_cli.in, "point cloud CSV source");
        cmd->add_option("--out", sweep_cli.out_dir, "output directory");
        cmd->add_option("--theorem", sweep_cli.theorem, "1|2|3");
        cmd->add_option("--n", sweep_cli.n, "ambient n");
        cmd->add_option("--k", sweep_cli.k, "projection order (theorem 3)");
        cmd->add_option("--t", sweep_cli.t, "expansion time");
        cmd->add_option("--delta", sweep_cli.delta, "scale");
        cmd->add_option("--alpha", sweep_cli.alpha, "Frostman exponent");
        cmd->add_option("--c0", sweep_cli.c0, "claimed Frostman constant");
        cmd->add_option("--delta0", sweep_cli.delta0, "certification floor");
        cmd->add_option("--epsilon", sweep_cli.epsilon, "theorem epsilon");
        cmd->add_option("--eta", sweep_cli.eta, "bad-threshold knob (default epsilon/20)");
        cmd->add_option("--eta-mult", sweep_cli.eta_mult, "bad-threshold exponent multiplier (default 18)");
        cmd->add_option("--r-min", sweep_cli.r_min, "r grid start");
        cmd->add_option("--r-max", sweep_cli.r_max, "r grid end");
        cmd->add_option("--r-count", sweep_cli.r_count, "r grid size");
        cmd->add_option("--sample", sweep_cli.sample, "all or a sample size");
        cmd->add_option("--seed", sweep_cli.seed, "sweep seed");
        cmd->add_option("--e-cap", sweep_cli.e_cap, "exceptional fraction cap");
        cmd->add_option("--g-cap", sweep_cli.g_cap, "good-set deficiency cap");
        cmd->add_option("--slack", sweep_cli.slack, "part (iii) slack multiplier");
        cmd->add_option("--iii-quota", sweep_cli.iii_quota, "part (iii) quota");
        cmd->add_option("--fit-deltas", sweep_cli.fit_deltas, "comma list of scales for per-r exponent fits");
    };
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "r-sweep without a verdict");
    add_sweep_options(sweep_cmd);
    CLI::App* verify_cmd = app.add_subcommand("verify", "r-sweep plus the three-part verdict");
    add_sweep_options(verify_cmd);

    OracleCli oracle;
    CLI::App* oracle_cmd = app.add_subcommand("oracle-check", "accelerated-vs-oracle equivalence");
    oracle_cmd->add_option("--n-points", oracle.n_points, "point count (max 5000)");
    oracle_cmd->add_option("--seed", oracle.seed, "point seed");
    oracle_cmd->add_flag("--inject-bug", oracle.inject_bug, "self-test: misplace query cells")
        ->group("");  // hidden

    ExponentCli expo;
    CLI::App* expo_cmd = app.add_subcommand("exponent", "fit log2 median m^delta against log2 delta");
    expo_cmd->add_option("--in", expo.in, "input CSV")->required();
    expo_cmd->add_option("--n", expo.n, "ambient n");
    expo_cmd->add_option("--theorem", expo.theorem, "family: 1|2|3");
    expo_cmd->add_option("--k", expo.k, "projection order");
    expo_cmd->add_option("--t", expo.t, "expansion time");
    expo_cmd->add_option("--r", expo.r, "family parameter");
    expo_cmd->add_option("--deltas", expo.deltas, "comma list, e.g. 2^-9,2^-8,2^-7,2^-6")->required();
    expo_cmd->add_option("--sample", expo.sample, "all or a sample size");
    expo_cmd->add_option("--seed", expo.seed, "sample seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (threads > 0) omp_set_num_threads(threads);
    sweep_cli.threads = threads;

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (cert_cmd->parsed()) return cmd_certify(cert);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_cli, false);
        if (verify_cmd->parsed()) return cmd_sweep(sweep_cli, true);
        if (oracle_cmd->parsed()) return cmd_oracle_check(oracle);
        if (expo_cmd->parsed()) return cmd_exponent(expo);
    } catch (const FitUndefined& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
