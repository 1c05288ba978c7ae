#include "rplab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rplab/errors.hpp"

namespace rplab {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot open for writing: " + path);
    out << content;
    if (!out) throw InvalidInput("write failed: " + path);
}

void write_measure_csv(const FiniteMeasure& mu, const std::string& path) {
    std::string out;
    out.reserve(mu.size() * 64);
    const int d = mu.dim();
    for (int j = 1; j <= d; ++j) {
        out += "x" + std::to_string(j);
        out += ',';
    }
    out += "weight\n";
    for (size_t i = 0; i < mu.size(); ++i) {
        const auto p = mu.point(i);
        for (int j = 0; j < d; ++j) {
            out += fmt_g17(p[static_cast<size_t>(j)]);
            out += ',';
        }
        out += fmt_g17(mu.weights[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    for (std::string& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    }
    return fields;
}

double parse_field(const std::string& field, long line) {
    if (field.empty()) throw ParseError("empty field", line);
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + field + "'", line);
    }
    if (pos != field.size()) throw ParseError("trailing junk in '" + field + "'", line);
    if (!std::isfinite(v)) throw ParseError("non-finite value '" + field + "'", line);
    return v;
}

}  // namespace

FiniteMeasure read_measure_csv(const std::string& path, int expected_n, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);
    const int d = expected_n + 1;

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    ++lineno;
    const std::vector<std::string> header = split_csv_line(line);
    const bool has_weight = !header.empty() && header.back() == "weight";
    const int cols = static_cast<int>(header.size());
    if (cols != d + (has_weight ? 1 : 0))
        throw ParseError("expected header x1,...,x" + std::to_string(d) + "[,weight]", 1);
    for (int j = 0; j < d; ++j) {
        if (header[static_cast<size_t>(j)] != "x" + std::to_string(j + 1))
            throw ParseError("unexpected header column '" + header[static_cast<size_t>(j)] + "'", 1);
    }

    std::vector<double> coords;
    std::vector<double> weights;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != cols)
            throw ParseError("expected " + std::to_string(cols) + " fields, got " + std::to_string(fields.size()),
                             lineno);
        for (int j = 0; j < d; ++j) coords.push_back(parse_field(fields[static_cast<size_t>(j)], lineno));
        if (has_weight) {
            const double w = parse_field(fields[static_cast<size_t>(d)], lineno);
            if (w < 0.0) throw ParseError("negative weight", lineno);
            weights.push_back(w);
        }
    }
    if (coords.empty()) throw ParseError("no data rows", lineno);

    FiniteMeasure mu;
    mu.ambient_n = expected_n;
    mu.coords = std::move(coords);
    if (has_weight) {
        double sum = 0.0;
        for (double w : weights) sum += w;
        if (!(sum > 0.0)) throw InvalidInput("ingest: weights sum to zero");
        if (std::abs(sum - 1.0) > 1e-9) {
            if (warnings)
                warnings->push_back("weight sum " + fmt_g17(sum) + " renormalized to 1");
        }
        for (double& w : weights) w /= sum;
        mu.weights = std::move(weights);
    } else {
        const size_t n_pts = mu.coords.size() / static_cast<size_t>(d);
        mu.weights.assign(n_pts, 1.0 / static_cast<double>(n_pts));
    }
    mu.require_unit_ball();
    return mu;
}

Json certificate_json(const FrostmanCertificate& cert) {
    Json scales = Json::array();
    for (const ScaleRecord& rec : cert.scales) {
        scales.push_back(Json{{"delta", rec.delta},
                              {"max_mass", rec.max_mass},
                              {"exact", rec.exact},
                              {"witnessed_mass", rec.witnessed}});
    }
    return Json{{"alpha", cert.alpha},
                {"c0", cert.c0},
                {"delta0", cert.delta0},
                {"scales", scales},
                {"passed", cert.passed},
                {"center_policy", cert.center_policy == CenterPolicy::Atoms ? "atoms" : "atoms_plus_grid"},
                {"cap", std::isfinite(cert.cap) ? Json(cert.cap) : Json("inf")},
                {"note", cert.note}};
}

Json projection_spec_json(const ProjectionSpec& spec) {
    if (const auto* p = std::get_if<PiTR>(&spec)) return Json{{"family", "pi_tr"}, {"t", p->t}, {"r", p->r}};
    if (const auto* p = std::get_if<PK>(&spec))
        return Json{{"family", "pk"}, {"n", p->n}, {"k", p->k}, {"r", p->r}};
    const auto& p = std::get<RepPush>(spec);
    return Json{{"family", "rep_push"}, {"n", p.n}, {"t", p.t}, {"r", p.r}};
}

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& ctx) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw InvalidInput(ctx + ": unknown key '" + key + "'");
    }
}

}  // namespace

Json generator_spec_json(const GeneratorSpec& spec) {
    if (const auto* g = std::get_if<GridGen>(&spec))
        return Json{{"type", "grid"}, {"n", g->n}, {"delta0", g->delta0}};
    if (const auto* g = std::get_if<CantorGen>(&spec)) {
        Json axes = Json::array();
        for (const CantorAxis& axis : g->axes) axes.push_back(Json{{"base", axis.base}, {"digits", axis.digits}});
        return Json{{"type", "cantor"}, {"n", g->n}, {"depth", g->depth}, {"axes", axes}};
    }
    if (const auto* g = std::get_if<SegmentGen>(&spec))
        return Json{{"type", "segment"}, {"n", g->n}, {"direction", g->direction}, {"delta0", g->delta0}};
    if (const auto* g = std::get_if<KernelLineGen>(&spec))
        return Json{{"type", "kernel_line"}, {"n", g->n}, {"k", g->k}, {"r_star", g->r_star}, {"delta0", g->delta0}};
    const auto& g = std::get<RandomGen>(spec);
    return Json{{"type", "random"},
                {"n", g.n},
                {"count", g.count},
                {"alpha_target", g.alpha_target},
                {"seed", g.seed}};
}

GeneratorSpec generator_spec_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("type")) throw InvalidInput("source: expected an object with a 'type' key");
    const std::string type = j.at("type").get<std::string>();
    if (type == "grid") {
        check_keys(j, {"type", "n", "delta0"}, "source(grid)");
        return GridGen{j.at("n").get<int>(), j.at("delta0").get<double>()};
    }
    if (type == "cantor") {
        check_keys(j, {"type", "n", "depth", "axes"}, "source(cantor)");
        CantorGen g;
        g.n = j.at("n").get<int>();
        g.depth = j.at("depth").get<int>();
        for (const Json& ja : j.at("axes")) {
            check_keys(ja, {"base", "digits"}, "source(cantor).axes[]");
            CantorAxis axis;
            axis.base = ja.at("base").get<int>();
            axis.digits = ja.at("digits").get<std::vector<int>>();
            g.axes.push_back(std::move(axis));
        }
        return g;
    }
    if (type == "segment") {
        check_keys(j, {"type", "n", "direction", "delta0"}, "source(segment)");
        return SegmentGen{j.at("n").get<int>(), j.at("direction").get<Vec>(), j.at("delta0").get<double>()};
    }
    if (type == "kernel_line") {
        check_keys(j, {"type", "n", "k", "r_star", "delta0"}, "source(kernel_line)");
        return KernelLineGen{j.at("n").get<int>(), j.at("k").get<int>(), j.at("r_star").get<double>(),
                             j.at("delta0").get<double>()};
    }
    if (type == "random") {
        check_keys(j, {"type", "n", "count", "alpha_target", "seed"}, "source(random)");
        return RandomGen{j.at("n").get<int>(), j.at("count").get<size_t>(), j.at("alpha_target").get<double>(),
                         j.at("seed").get<uint64_t>()};
    }
    throw InvalidInput("source: unknown type '" + type + "'");
}

void write_profile_csv(const ConcentrationProfile& prof, const std::string& path) {
    std::string out = "point_index,m_delta\n";
    for (size_t i = 0; i < prof.sample.size(); ++i) {
        out += std::to_string(prof.sample[i]);
        out += ',';
        out += fmt_g17(prof.values[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

Json profile_sidecar_json(const ConcentrationProfile& prof) {
    return Json{{"spec", projection_spec_json(prof.spec)},
                {"delta", prof.delta},
                {"quantiles",
                 Json{{"median", prof.quantiles.median},
                      {"p90", prof.quantiles.p90},
                      {"p99", prof.quantiles.p99},
                      {"max", prof.quantiles.max}}}};
}

Json sweep_config_json(const SweepConfig& cfg) {
    Json sample;
    if (cfg.sample.kind == SamplePolicy::Kind::All) {
        sample = Json{{"type", "all"}};
    } else {
        sample = Json{{"type", "random"}, {"k", cfg.sample.k}, {"seed", cfg.sample.seed}};
    }
    Json j{{"theorem", static_cast<int>(cfg.family)},
           {"n", cfg.n},
           {"k", cfg.k},
           {"t", cfg.t},
           {"delta", cfg.delta},
           {"alpha", cfg.alpha},
           {"c0", cfg.c0},
           {"delta0", cfg.delta0},
           {"epsilon", cfg.epsilon},
           {"eta", cfg.eta},
           {"eta_mult", cfg.eta_mult},
           {"r_grid", Json{{"count", cfg.r_grid.count}, {"min", cfg.r_grid.min}, {"max", cfg.r_grid.max}}},
           {"sample_policy", sample},
           {"seed", cfg.seed},
           {"e_cap", cfg.e_cap},
           {"g_cap", cfg.g_cap},
           {"slack", cfg.slack},
           {"iii_quota", cfg.iii_quota},
           {"fit_exponents", cfg.fit_exponents}};
    if (cfg.fit_exponents) j["fit_deltas"] = cfg.fit_deltas;
    return j;
}

SweepConfig sweep_config_from_json(const Json& j) {
    check_keys(j,
               {"version", "source", "theorem", "n", "k", "t", "delta", "alpha", "c0", "delta0", "epsilon", "eta",
                "eta_mult", "r_grid", "sample_policy", "seed", "e_cap", "g_cap", "slack", "iii_quota",
                "fit_exponents", "fit_deltas", "threads", "output_dir"},
               "config");
    SweepConfig cfg;
    if (j.contains("theorem")) {
        const int theorem = j.at("theorem").get<int>();
        if (theorem < 1 || theorem > 3) throw InvalidInput("config: theorem must be 1, 2, or 3");
        cfg.family = static_cast<Family>(theorem);
    }
    if (j.contains("n")) cfg.n = j.at("n").get<int>();
    if (j.contains("k")) cfg.k = j.at("k").get<int>();
    if (j.contains("t")) cfg.t = j.at("t").get<double>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("c0")) cfg.c0 = j.at("c0").get<double>();
    if (j.contains("delta0")) cfg.delta0 = j.at("delta0").get<double>();
    if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
    if (j.contains("eta")) cfg.eta = j.at("eta").get<double>();
    if (j.contains("eta_mult")) cfg.eta_mult = j.at("eta_mult").get<double>();
    if (j.contains("r_grid")) {
        const Json& rg = j.at("r_grid");
        check_keys(rg, {"count", "min", "max"}, "config.r_grid");
        cfg.r_grid.count = rg.at("count").get<size_t>();
        cfg.r_grid.min = rg.at("min").get<double>();
        cfg.r_grid.max = rg.at("max").get<double>();
    }
    if (j.contains("sample_policy")) {
        const Json& sp = j.at("sample_policy");
        check_keys(sp, {"type", "k", "seed"}, "config.sample_policy");
        const std::string type = sp.at("type").get<std::string>();
        if (type == "all") {
            cfg.sample = SamplePolicy::all();
        } else if (type == "random") {
            cfg.sample = SamplePolicy::random_k(sp.at("k").get<size_t>(),
                                                sp.contains("seed") ? sp.at("seed").get<uint64_t>() : 0);
        } else {
            throw InvalidInput("config.sample_policy: unknown type '" + type + "'");
        }
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("e_cap")) cfg.e_cap = j.at("e_cap").get<double>();
    if (j.contains("g_cap")) cfg.g_cap = j.at("g_cap").get<double>();
    if (j.contains("slack")) cfg.slack = j.at("slack").get<double>();
    if (j.contains("iii_quota")) cfg.iii_quota = j.at("iii_quota").get<double>();
    if (j.contains("fit_exponents")) cfg.fit_exponents = j.at("fit_exponents").get<bool>();
    if (j.contains("fit_deltas")) cfg.fit_deltas = j.at("fit_deltas").get<std::vector<double>>();
    return cfg;
}

Json sweep_report_json(const SweepReport& rep) {
    Json per_r = Json::array();
    for (const PerR& row : rep.per_r) {
        per_r.push_back(Json{{"r", row.r},
                             {"bad_mass", row.bad_mass},
                             {"max_conc", row.max_conc},
                             {"p99_conc", row.p99_conc},
                             {"flagged", row.flagged},
                             {"deficiency", row.deficiency},
                             {"restricted_median", std::isnan(row.restricted_median) ? Json() : Json(row.restricted_median)},
                             {"restricted_p99", std::isnan(row.restricted_p99) ? Json() : Json(row.restricted_p99)},
                             {"restricted_max", std::isnan(row.restricted_max) ? Json() : Json(row.restricted_max)},
                             {"iii_samples", row.iii_samples},
                             {"iii_within", row.iii_within}});
    }
    Json exceptional = Json::array();
    for (const auto& [lo, hi] : rep.exceptional) exceptional.push_back(Json::array({lo, hi}));

    Json j{{"version", 1},
           {"config", sweep_config_json(rep.config)},
           {"certificate", certificate_json(rep.cert)},
           {"c0_used", rep.c0_used},
           {"hypothesis_ok", rep.hypothesis_ok},
           {"warnings", rep.warnings},
           {"threshold", rep.threshold},
           {"bound_value", rep.bound_value},
           {"flag_level", rep.flag_level},
           {"per_r", per_r},
           {"exceptional", exceptional},
           {"exceptional_measure", rep.exceptional_measure},
           {"exceptional_fraction", rep.exceptional_fraction}};
    if (!rep.fitted_exponents.empty()) {
        Json fits = Json::array();
        for (const auto& [r, slope] : rep.fitted_exponents) fits.push_back(Json::array({r, slope}));
        j["fitted_exponents"] = fits;
    }
    if (rep.verdict.evaluated) {
        j["verdict"] = Json{{"part_i", rep.verdict.part_i},
                            {"part_ii", rep.verdict.part_ii},
                            {"part_iii", rep.verdict.part_iii},
                            {"hypothesis_ok", rep.verdict.hypothesis_ok},
                            {"pass", rep.verdict.pass},
                            {"exceptional_fraction", rep.verdict.exceptional_fraction},
                            {"worst_deficiency", rep.verdict.worst_deficiency},
                            {"pooled_iii_fraction", rep.verdict.pooled_iii_fraction}};
    }
    return j;
}

std::string sweep_report_csv(const SweepReport& rep) {
    std::string out = "r,bad_mass,max_conc,p99_conc,flagged\n";
    for (const PerR& row : rep.per_r) {
        out += fmt_g17(row.r);
        out += ',';
        out += fmt_g17(row.bad_mass);
        out += ',';
        out += fmt_g17(row.max_conc);
        out += ',';
        out += fmt_g17(row.p99_conc);
        out += ',';
        out += row.flagged ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string sweep_plot_data(const SweepReport& rep) {
    std::string out = "# r bad_mass\n";
    for (const PerR& row : rep.per_r) {
        out += fmt_g17(row.r);
        out += ' ';
        out += fmt_g17(row.bad_mass);
        out += '\n';
    }
    return out;
}

}  // namespace rplab
