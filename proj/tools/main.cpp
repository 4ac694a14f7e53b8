// wmf: model selection by bootstrap maximum frequency, prediction-weighted
// maximum frequency, and classical criteria, plus the simulation harness,
// marginal screening, and a screening+selection classifier pipeline.
//
// Exit codes: 0 success, 2 usage/input error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <wmf/csv.hpp>
#include <wmf/errors.hpp>
#include <wmf/estimators.hpp>
#include <wmf/glm.hpp>
#include <wmf/path.hpp>
#include <wmf/resample.hpp>
#include <wmf/rng.hpp>
#include <wmf/selection.hpp>
#include <wmf/simulate.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// serialization helpers

// JSON emitter with every float at 17 significant digits (non-finite -> null).
void dump17(const json& j, std::ostream& out, int indent) {
    const std::string pad(indent, ' ');
    const std::string pad2(indent + 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out << ",\n";
                first = false;
                out << pad2 << json(key).dump() << ": ";
                dump17(value, out, indent + 2);
            }
            out << "\n" << pad << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            bool first = true;
            for (const auto& value : j) {
                if (!first) out << ",\n";
                first = false;
                out << pad2;
                dump17(value, out, indent + 2);
            }
            out << "\n" << pad << "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v))
                out << wmf::format_double(v);
            else
                out << "null";
            return;
        }
        default:
            out << j.dump();
            return;
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw wmf::InputError("cannot write " + path.string());
    dump17(j, out, 0);
    out << "\n";
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw wmf::InputError("cannot write " + path.string());
    return out;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::vector<int> to_1based(const wmf::IndexSet& model) {
    std::vector<int> out;
    out.reserve(model.size());
    for (int j : model) out.push_back(j + 1);
    return out;
}

// ---------------------------------------------------------------------------
// configuration

struct RunConfig {
    std::string command;
    std::string data, response, train, test;
    std::vector<std::string> methods;
    std::string penalty = "alasso";
    std::string bootstrap;  // empty = scheme default for the penalty
    int B = 100;
    int K = 10;
    double gamma = 1.0;
    std::vector<double> lambda2_grid = {0.0, 0.01, 0.1, 1.0, 10.0};
    double c = 1.0;
    std::uint64_t seed = 0;
    int max_steps = 0;  // 0 = min(p, n-1)
    int dn = 0;         // 0 = floor(n / log n)
    int threads = 1;
    std::string out = ".";
    int scenario = 1;
    std::vector<int> n_list = {100, 300, 500};
    int R = 100;
    double threshold = 0.5;
    std::string config_path;
};

// option handles, so config-file values never override explicit flags
struct Bound {
    CLI::Option* data = nullptr;
    CLI::Option* response = nullptr;
    CLI::Option* train = nullptr;
    CLI::Option* test = nullptr;
    CLI::Option* method = nullptr;
    CLI::Option* penalty = nullptr;
    CLI::Option* bootstrap = nullptr;
    CLI::Option* B = nullptr;
    CLI::Option* K = nullptr;
    CLI::Option* gamma = nullptr;
    CLI::Option* lambda2_grid = nullptr;
    CLI::Option* c = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* max_steps = nullptr;
    CLI::Option* dn = nullptr;
    CLI::Option* threads = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* scenario = nullptr;
    CLI::Option* n_list = nullptr;
    CLI::Option* R = nullptr;
    CLI::Option* threshold = nullptr;
};

void add_common(CLI::App* sub, RunConfig& run, Bound& b, bool with_seed) {
    b.penalty = sub->add_option("--penalty", run.penalty, "alasso or aenet")
                    ->check(CLI::IsMember({"alasso", "aenet"}));
    b.bootstrap =
        sub->add_option("--bootstrap", run.bootstrap, "paired or residual")
            ->check(CLI::IsMember({"paired", "residual"}));
    b.B = sub->add_option("-B", run.B, "bootstrap replicates")
              ->check(CLI::PositiveNumber);
    b.K = sub->add_option("-K", run.K, "cross-validation folds")
              ->check(CLI::Range(2, 1000000));
    b.gamma = sub->add_option("--gamma", run.gamma, "adaptive weight exponent")
                  ->check(CLI::NonNegativeNumber);
    b.lambda2_grid = sub->add_option("--lambda2-grid", run.lambda2_grid,
                                     "candidate ridge levels (comma separated)")
                         ->delimiter(',');
    b.c = sub->add_option("--c", run.c, "weight temperature in [1,2]")
              ->check(CLI::Range(1.0, 2.0));
    if (with_seed) b.seed = sub->add_option("--seed", run.seed, "master seed");
    b.max_steps = sub->add_option("--max-steps", run.max_steps, "path step cap")
                      ->check(CLI::NonNegativeNumber);
    b.threads = sub->add_option("--threads", run.threads, "worker threads")
                    ->check(CLI::PositiveNumber);
    b.out = sub->add_option("--out", run.out, "output directory");
    sub->add_option("--config", run.config_path,
                    "JSON config or manifest (flags take precedence)");
}

// fill unset options from a config file / manifest
void merge_config(const RunConfig& parsed, RunConfig& run, const Bound& b) {
    if (parsed.config_path.empty()) return;
    std::ifstream in(parsed.config_path);
    if (!in) throw wmf::InputError("config file not found: " + parsed.config_path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw wmf::InputError("config parse failure: " + std::string(e.what()));
    }
    if (j.contains("settings")) j = j["settings"];  // manifests nest settings

    auto unset = [](CLI::Option* opt) { return opt != nullptr && opt->count() == 0; };
    auto get_methods = [](const json& v) {
        std::vector<std::string> m;
        if (v.is_string())
            m.push_back(v.get<std::string>());
        else
            for (const auto& s : v) m.push_back(s.get<std::string>());
        return m;
    };

    try {
        if (j.contains("data") && unset(b.data)) run.data = j["data"];
        if (j.contains("response") && unset(b.response)) run.response = j["response"];
        if (j.contains("train") && unset(b.train)) run.train = j["train"];
        if (j.contains("test") && unset(b.test)) run.test = j["test"];
        if (j.contains("method") && unset(b.method))
            run.methods = get_methods(j["method"]);
        if (j.contains("penalty") && unset(b.penalty)) run.penalty = j["penalty"];
        if (j.contains("bootstrap") && unset(b.bootstrap))
            run.bootstrap = j["bootstrap"];
        if (j.contains("B") && unset(b.B)) run.B = j["B"];
        if (j.contains("K") && unset(b.K)) run.K = j["K"];
        if (j.contains("gamma") && unset(b.gamma)) run.gamma = j["gamma"];
        if (j.contains("lambda2-grid") && unset(b.lambda2_grid))
            run.lambda2_grid = j["lambda2-grid"].get<std::vector<double>>();
        if (j.contains("c") && unset(b.c)) run.c = j["c"];
        if (j.contains("seed") && unset(b.seed)) run.seed = j["seed"];
        if (j.contains("max-steps") && unset(b.max_steps)) run.max_steps = j["max-steps"];
        if (j.contains("dn") && unset(b.dn)) run.dn = j["dn"];
        if (j.contains("threads") && unset(b.threads)) run.threads = j["threads"];
        if (j.contains("out") && unset(b.out)) run.out = j["out"];
        if (j.contains("scenario") && unset(b.scenario)) run.scenario = j["scenario"];
        if (j.contains("n-list") && unset(b.n_list))
            run.n_list = j["n-list"].get<std::vector<int>>();
        if (j.contains("R") && unset(b.R)) run.R = j["R"];
        if (j.contains("threshold") && unset(b.threshold))
            run.threshold = j["threshold"];
    } catch (const json::exception& e) {
        throw wmf::InputError("config value error: " + std::string(e.what()));
    }
}

void require_seed(const RunConfig& run, const Bound& b) {
    if (b.seed != nullptr && b.seed->count() == 0 && run.config_path.empty())
        throw wmf::InputError("--seed is required (directly or via --config)");
    // when a config was given, a missing "seed" key leaves the default 0,
    // which is a legitimate seed; only the fully unspecified case is an error
}

wmf::PenaltySpec make_penalty(const RunConfig& run) {
    wmf::PenaltySpec p;
    p.scheme = (run.penalty == "aenet") ? wmf::PenaltyScheme::aenet
                                        : wmf::PenaltyScheme::alasso;
    p.gamma = run.gamma;
    p.lambda2 = 0.0;
    return p;
}

wmf::BootstrapScheme make_scheme(const RunConfig& run) {
    wmf::BootstrapScheme s;
    std::string kind = run.bootstrap;
    if (kind.empty()) kind = (run.penalty == "aenet") ? "residual" : "paired";
    s.kind = (kind == "residual") ? wmf::BootstrapScheme::Kind::residual
                                  : wmf::BootstrapScheme::Kind::paired;
    return s;
}

json settings_json(const RunConfig& run) {
    json s;
    if (!run.data.empty()) s["data"] = run.data;
    if (!run.response.empty()) s["response"] = run.response;
    if (!run.train.empty()) s["train"] = run.train;
    if (!run.test.empty()) s["test"] = run.test;
    if (run.methods.size() == 1)
        s["method"] = run.methods.front();
    else if (!run.methods.empty())
        s["method"] = run.methods;
    s["penalty"] = run.penalty;
    s["bootstrap"] = run.bootstrap.empty()
                         ? ((run.penalty == "aenet") ? "residual" : "paired")
                         : run.bootstrap;
    s["B"] = run.B;
    s["K"] = run.K;
    s["gamma"] = run.gamma;
    s["lambda2-grid"] = run.lambda2_grid;
    s["c"] = run.c;
    s["seed"] = run.seed;
    s["max-steps"] = run.max_steps;
    if (run.command == "screen" || run.command == "classify") s["dn"] = run.dn;
    s["threads"] = run.threads;
    s["out"] = run.out;
    if (run.command == "simulate") {
        s["scenario"] = run.scenario;
        s["n-list"] = run.n_list;
        s["R"] = run.R;
    }
    if (run.command == "classify") s["threshold"] = run.threshold;
    return s;
}

void write_manifest(const RunConfig& run, const fs::path& dir,
                    const std::vector<std::string>& outputs,
                    json extra = json::object()) {
    json m;
    m["command"] = run.command;
    m["settings"] = settings_json(run);
    for (const auto& [key, value] : extra.items()) m[key] = value;
    m["outputs"] = outputs;
    m["created"] = timestamp();
    write_json(dir / "manifest.json", m);
}

fs::path ensure_outdir(const RunConfig& run) {
    fs::path dir(run.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw wmf::InputError("cannot create output directory " + dir.string());
    return dir;
}

std::vector<std::string> column_names(const wmf::Dataset& d) {
    if (!d.names.empty()) return d.names;
    std::vector<std::string> names;
    for (int j = 0; j < d.p(); ++j) names.push_back("x" + std::to_string(j + 1));
    return names;
}

// ---------------------------------------------------------------------------
// shared output writers

void write_path_csv(const fs::path& file, const wmf::SolutionPath& path,
                    const std::vector<std::string>& names, bool with_intercept) {
    auto out = open_csv(file);
    out << "step,lambda,size";
    if (with_intercept) out << ",intercept";
    for (const auto& n : names) out << "," << n;
    out << "\n";
    for (const auto& pt : path.points) {
        out << pt.step << "," << wmf::format_double(pt.lambda) << ","
            << pt.active_set.size();
        if (with_intercept) out << "," << wmf::format_double(pt.intercept);
        for (int j = 0; j < pt.coefficients.size(); ++j)
            out << "," << wmf::format_double(pt.coefficients[j]);
        out << "\n";
    }
}

void write_profile_csv(const fs::path& file, const wmf::SelectionResult& res) {
    auto out = open_csv(file);
    out << "dim,mf_freq,mcv,weight,wmf\n";
    for (const auto& d : res.diagnostics)
        out << d.dim << "," << wmf::format_double(d.mf_freq) << ","
            << wmf::format_double(d.mcv) << "," << wmf::format_double(d.weight)
            << "," << wmf::format_double(d.wmf) << "\n";
}

void write_selection_json(const fs::path& file, const RunConfig& run,
                          const wmf::SelectionResult& res,
                          const std::vector<std::string>& names,
                          std::optional<double> lambda2) {
    json j;
    j["command"] = "select";
    j["method"] = res.method;
    j["penalty"] = run.penalty;
    j["dimension"] = res.dimension;
    j["variables"] = to_1based(res.model);  // 1-based column positions
    json nm = json::array();
    for (int v : res.model) nm.push_back(names[v]);
    j["names"] = nm;
    j["sigma2"] = res.sigma2;
    j["lambda"] = res.lambda;
    if (lambda2.has_value()) j["lambda2"] = *lambda2;
    json diag = json::array();
    for (const auto& d : res.diagnostics) {
        json row;
        row["dim"] = d.dim;
        row["mf_freq"] = d.mf_freq;
        row["mcv"] = d.mcv;
        row["weight"] = d.weight;
        row["wmf"] = d.wmf;
        diag.push_back(row);
    }
    j["diagnostics"] = diag;
    j["seed"] = run.seed;
    write_json(file, j);
}

// ---------------------------------------------------------------------------
// select

const std::set<std::string> kLinearMethods = {"wmf", "mf",  "bic",    "ebic",
                                              "gic", "cp",  "cv-min", "cv-1se"};
const std::set<std::string> kGlmMethods = {"wmf", "mf", "bic", "ebic", "gic"};

int cmd_select(RunConfig& run) {
    if (run.data.empty()) throw wmf::InputError("select requires --data");
    if (run.methods.empty()) run.methods = {"wmf"};
    const std::string method = run.methods.front();
    const fs::path dir = ensure_outdir(run);

    const wmf::LoadedCsv loaded = wmf::load_csv(run.data, run.response);
    run.response = loaded.response;
    std::vector<std::string> outputs;

    if (loaded.binary) {
        if (!kGlmMethods.count(method))
            throw wmf::InputError("method '" + method +
                                  "' is unavailable for binary responses");
        if (run.penalty != "alasso")
            throw wmf::InputError("binary responses support --penalty alasso only");
        if (!run.bootstrap.empty() && run.bootstrap != "paired")
            throw wmf::InputError("binary responses use the paired bootstrap");

        wmf::GlmDataset d{loaded.data.X, loaded.data.y};
        const auto names = column_names(loaded.data);
        wmf::CvConfig cv;
        cv.K = run.K;
        cv.c = run.c;

        // common path on the full data for path.csv and criterion methods
        wmf::CoefficientVector pilot;
        try {
            pilot = wmf::logistic_mle(d);
        } catch (const wmf::NumericError&) {
            pilot = wmf::logistic_ridge(d, 1e-2);
        }
        wmf::Vector w(d.p());
        for (int j = 0; j < d.p(); ++j)
            w[j] = std::pow(std::max(std::abs(pilot.values[j]), 1e-8), -run.gamma);
        const auto grid = wmf::glm_lambda_grid(d, w);
        const wmf::SolutionPath path = wmf::logistic_adaptive_lasso_path(d, w, grid);

        wmf::SelectionResult res;
        if (method == "wmf")
            res = wmf::glm_wmf_select(d, run.B, cv, run.seed, run.gamma);
        else if (method == "mf")
            res = wmf::mf_select(wmf::glm_mf_table(d, run.gamma, run.B, run.seed));
        else
            res = wmf::glm_criterion_select(d, path, method);

        write_selection_json(dir / "selection.json", run, res, names, std::nullopt);
        outputs.push_back("selection.json");
        write_path_csv(dir / "path.csv", path, names, true);
        outputs.push_back("path.csv");
        if (!res.diagnostics.empty()) {
            write_profile_csv(dir / "wmf_profile.csv", res);
            outputs.push_back("wmf_profile.csv");
        }
        write_manifest(run, dir, outputs);
        return 0;
    }

    if (!kLinearMethods.count(method))
        throw wmf::InputError("unknown method '" + method + "'");

    const wmf::Dataset& d = loaded.data;
    const auto names = column_names(d);
    wmf::PenaltySpec penalty = make_penalty(run);
    std::optional<double> lambda2;
    if (penalty.scheme == wmf::PenaltyScheme::aenet) {
        if (run.lambda2_grid.empty())
            throw wmf::InputError("aenet requires a nonempty --lambda2-grid");
        penalty.lambda2 =
            (run.lambda2_grid.size() == 1)
                ? run.lambda2_grid.front()
                : wmf::tune_lambda2_bic(d, penalty, run.lambda2_grid);
        lambda2 = penalty.lambda2;
    }
    const wmf::BootstrapScheme scheme = make_scheme(run);
    const int max_steps =
        (run.max_steps > 0) ? run.max_steps : wmf::default_max_steps(d);
    wmf::CvConfig cv;
    cv.K = run.K;
    cv.c = run.c;
    cv.seed = wmf::derive_seed(run.seed, 0, 2);

    const wmf::SolutionPath path = wmf::fit_path(d, penalty, max_steps);

    wmf::SelectionResult res;
    if (method == "wmf")
        res = wmf::wmf_select(d, penalty, scheme, run.B, cv, run.seed);
    else if (method == "mf")
        res = wmf::mf_select(wmf::mf_table(d, penalty, scheme, run.B, run.seed));
    else
        res = wmf::criterion_select(d, path, method, cv);

    write_selection_json(dir / "selection.json", run, res, names, lambda2);
    outputs.push_back("selection.json");
    write_path_csv(dir / "path.csv", path, names, false);
    outputs.push_back("path.csv");
    if (!res.diagnostics.empty()) {
        write_profile_csv(dir / "wmf_profile.csv", res);
        outputs.push_back("wmf_profile.csv");
    }
    write_manifest(run, dir, outputs);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(RunConfig& run) {
    if (run.scenario < 0 || run.scenario > 6)
        throw wmf::InputError("scenario must be 0 (logistic example) through 6");
    if (run.methods.empty()) run.methods = {"wmf"};
    if (run.n_list.empty()) throw wmf::InputError("simulate requires --n-list");
    if (run.R < 1) throw wmf::InputError("R must be positive");

    const wmf::ScenarioSpec spec = wmf::make_scenario(run.scenario);
    const auto& allowed = spec.logistic ? kGlmMethods : kLinearMethods;
    for (const auto& m : run.methods)
        if (!allowed.count(m))
            throw wmf::InputError("method '" + m + "' is unavailable for scenario " +
                                  std::to_string(run.scenario));

    wmf::HarnessConfig cfg;
    cfg.penalty = make_penalty(run);
    cfg.scheme = make_scheme(run);
    cfg.cv.K = run.K;
    cfg.cv.c = run.c;
    cfg.B = run.B;
    cfg.gamma = run.gamma;
    cfg.threads = run.threads;
    if (cfg.penalty.scheme == wmf::PenaltyScheme::aenet)
        cfg.lambda2_grid = run.lambda2_grid;

    const auto summaries = wmf::run_replications(spec, run.methods, run.n_list,
                                                 run.R, run.seed, cfg);

    const fs::path dir = ensure_outdir(run);
    auto out = open_csv(dir / "metrics.csv");
    out << "scenario,n,method,metric,value\n";
    for (const auto& s : summaries) {
        const std::pair<const char*, double> rows[] = {
            {"proportion_correct", s.proportion_correct},
            {"avg_false_nonzeros", s.avg_false_nonzeros},
            {"avg_false_zeros", s.avg_false_zeros},
            {"avg_model_size", s.avg_model_size},
        };
        for (const auto& [name, value] : rows)
            out << s.scenario << "," << s.n << "," << s.method << "," << name << ","
                << wmf::format_double(value) << "\n";
    }
    out.close();

    json extra;
    json dims = json::array();
    for (int n : run.n_list) {
        const wmf::ScenarioDims sd = wmf::scenario_dims(spec, n);
        json row;
        row["n"] = n;
        row["p"] = sd.p;
        row["p0"] = sd.p0;
        dims.push_back(row);
    }
    extra["dimensions"] = dims;
    json completed = json::array();
    for (const auto& s : summaries) {
        json row;
        row["n"] = s.n;
        row["method"] = s.method;
        row["replications"] = s.replications;
        row["completed"] = s.completed;
        completed.push_back(row);
    }
    extra["completed"] = completed;
    write_manifest(run, dir, {"metrics.csv"}, extra);
    return 0;
}

// ---------------------------------------------------------------------------
// screen

int cmd_screen(RunConfig& run) {
    if (run.data.empty()) throw wmf::InputError("screen requires --data");
    const wmf::LoadedCsv loaded = wmf::load_csv(run.data, run.response);
    run.response = loaded.response;
    const int dn = (run.dn > 0) ? run.dn : wmf::default_dn(loaded.data.n());
    run.dn = dn;
    const wmf::ScreenResult res =
        wmf::sis_screen(loaded.data.X, loaded.data.y, dn);
    const auto names = column_names(loaded.data);

    const fs::path dir = ensure_outdir(run);
    auto out = open_csv(dir / "screen.csv");
    out << "rank,variable,name,score\n";
    for (size_t r = 0; r < res.kept.size(); ++r) {
        const int j = res.kept[r];
        out << (r + 1) << "," << (j + 1) << "," << names[j] << ","
            << wmf::format_double(res.scores[j]) << "\n";
    }
    out.close();
    write_manifest(run, dir, {"screen.csv"});
    return 0;
}

// ---------------------------------------------------------------------------
// classify

struct GlmSplit {
    wmf::GlmDataset data;
    std::vector<std::string> names;
};

GlmSplit load_binary(const std::string& path, const std::string& response,
                     const char* which) {
    const wmf::LoadedCsv loaded = wmf::load_csv(path, response);
    if (!loaded.binary)
        throw wmf::InputError(std::string(which) +
                              " response is not binary {0,1}: " + path);
    return {wmf::GlmDataset{loaded.data.X, loaded.data.y},
            column_names(loaded.data)};
}

wmf::Matrix take_columns(const wmf::Matrix& X, const wmf::IndexSet& cols) {
    wmf::Matrix out(X.rows(), static_cast<int>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k) out.col(k) = X.col(cols[k]);
    return out;
}

int cmd_classify(RunConfig& run) {
    if (run.train.empty() || run.test.empty())
        throw wmf::InputError("classify requires --train and --test");
    if (run.methods.empty()) run.methods = {"wmf", "bic"};
    for (const auto& m : run.methods)
        if (!kGlmMethods.count(m))
            throw wmf::InputError("method '" + m + "' is unavailable for classify");
    if (!(run.threshold > 0.0 && run.threshold < 1.0))
        throw wmf::InputError("threshold must lie strictly inside (0,1)");

    const GlmSplit train = load_binary(run.train, run.response, "train");
    const GlmSplit test = load_binary(run.test, run.response, "test");
    if (train.data.p() != test.data.p())
        throw wmf::InputError("train and test have different column counts");

    const int dn = (run.dn > 0) ? run.dn : wmf::default_dn(train.data.n());
    run.dn = dn;
    const wmf::ScreenResult screened =
        wmf::sis_screen(train.data.X, train.data.y, dn);
    wmf::IndexSet kept = screened.kept;
    std::sort(kept.begin(), kept.end());

    wmf::GlmDataset strain{take_columns(train.data.X, kept), train.data.y};
    wmf::GlmDataset stest{take_columns(test.data.X, kept), test.data.y};

    wmf::CvConfig cv;
    cv.K = run.K;
    cv.c = run.c;

    const fs::path dir = ensure_outdir(run);
    auto table = open_csv(dir / "results.csv");
    table << "criteria,ten_fold_cv_error,test_error,n_selected\n";
    std::vector<std::string> outputs = {"results.csv"};

    for (const auto& method : run.methods) {
        wmf::SelectionResult res;
        if (method == "wmf") {
            res = wmf::glm_wmf_select(strain, run.B, cv, run.seed, run.gamma);
        } else if (method == "mf") {
            res = wmf::mf_select(
                wmf::glm_mf_table(strain, run.gamma, run.B, run.seed));
        } else {
            wmf::CoefficientVector pilot;
            try {
                pilot = wmf::logistic_mle(strain);
            } catch (const wmf::NumericError&) {
                pilot = wmf::logistic_ridge(strain, 1e-2);
            }
            wmf::Vector w(strain.p());
            for (int j = 0; j < strain.p(); ++j)
                w[j] =
                    std::pow(std::max(std::abs(pilot.values[j]), 1e-8), -run.gamma);
            const auto grid = wmf::glm_lambda_grid(strain, w);
            const wmf::SolutionPath path =
                wmf::logistic_adaptive_lasso_path(strain, w, grid);
            res = wmf::glm_criterion_select(strain, path, method);
        }

        // unpenalized refit on the selected columns, ridge fallback
        wmf::GlmDataset fitdata{take_columns(strain.X, res.model), strain.y};
        wmf::CoefficientVector refit;
        try {
            refit = wmf::logistic_mle(fitdata);
        } catch (const wmf::NumericError&) {
            refit = wmf::logistic_ridge(fitdata, 1e-4);
        }

        const double cv_rate = wmf::glm_mcv(strain, res.model, run.K, "misclass",
                                            wmf::derive_seed(run.seed, 0, 3));

        const wmf::Matrix Xt = take_columns(stest.X, res.model);
        wmf::Vector prob(stest.n());
        for (int i = 0; i < stest.n(); ++i) {
            const double eta =
                refit.intercept.value_or(0.0) + Xt.row(i).dot(refit.values);
            prob[i] = 1.0 / (1.0 + std::exp(-eta));
        }
        const std::vector<int> labels = wmf::classify(prob, run.threshold);
        int test_errors = 0;
        for (int i = 0; i < stest.n(); ++i)
            if (labels[i] != static_cast<int>(stest.y[i])) ++test_errors;

        table << method << ","
              << wmf::format_double(cv_rate * strain.n()) << "," << test_errors
              << "," << res.model.size() << "\n";

        const std::string pred_name = "predictions_" + method + ".csv";
        auto pred = open_csv(dir / pred_name);
        pred << "row,probability,label,actual\n";
        for (int i = 0; i < stest.n(); ++i)
            pred << (i + 1) << "," << wmf::format_double(prob[i]) << "," << labels[i]
                 << "," << static_cast<int>(stest.y[i]) << "\n";
        outputs.push_back(pred_name);

        const std::string sel_name = "selected_" + method + ".csv";
        auto sel = open_csv(dir / sel_name);
        sel << "variable,name\n";
        for (int local : res.model)
            sel << (kept[local] + 1) << "," << train.names[kept[local]] << "\n";
        outputs.push_back(sel_name);
    }
    table.close();
    write_manifest(run, dir, outputs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bootstrap maximum-frequency model selection"};
    app.require_subcommand(1);

    RunConfig run;
    Bound b;

    CLI::App* sel = app.add_subcommand(
        "select", "Select a model for one dataset and write diagnostics");
    {
        b.data = sel->add_option("--data", run.data, "input CSV");
        b.response = sel->add_option("--response", run.response, "response column");
        b.method = sel->add_option("--method", run.methods,
                                   "wmf, mf, bic, ebic, gic, cp, cv-min, cv-1se");
        add_common(sel, run, b, true);
    }

    CLI::App* sim = app.add_subcommand(
        "simulate", "Run a replicated scenario study and write metrics");
    Bound bs;
    {
        bs.scenario = sim->add_option("--scenario", run.scenario,
                                      "0 (logistic example) through 6");
        bs.n_list = sim->add_option("--n-list", run.n_list,
                                    "sample sizes (comma separated)")
                        ->delimiter(',');
        bs.R = sim->add_option("-R", run.R, "replications per n");
        bs.method = sim->add_option("--method", run.methods,
                                    "methods to compare (repeatable)");
        add_common(sim, run, bs, true);
    }

    CLI::App* scr =
        app.add_subcommand("screen", "Rank variables by marginal association");
    Bound bc;
    {
        bc.data = scr->add_option("--data", run.data, "input CSV");
        bc.response = scr->add_option("--response", run.response, "response column");
        bc.dn = scr->add_option("--dn", run.dn, "variables to keep");
        bc.out = scr->add_option("--out", run.out, "output directory");
        scr->add_option("--config", run.config_path, "JSON config or manifest");
    }

    CLI::App* cls = app.add_subcommand(
        "classify", "Screen, select, refit, and classify a held-out set");
    Bound bk;
    {
        bk.train = cls->add_option("--train", run.train, "training CSV");
        bk.test = cls->add_option("--test", run.test, "test CSV");
        bk.response = cls->add_option("--response", run.response, "response column");
        bk.dn = cls->add_option("--dn", run.dn, "screened dimension");
        bk.method = cls->add_option("--method", run.methods,
                                    "selection methods (repeatable)");
        bk.threshold =
            cls->add_option("--threshold", run.threshold, "label threshold");
        add_common(cls, run, bk, true);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sel->parsed()) {
            run.command = "select";
            merge_config(run, run, b);
            require_seed(run, b);
            return cmd_select(run);
        }
        if (sim->parsed()) {
            run.command = "simulate";
            merge_config(run, run, bs);
            require_seed(run, bs);
            return cmd_simulate(run);
        }
        if (scr->parsed()) {
            run.command = "screen";
            merge_config(run, run, bc);
            return cmd_screen(run);
        }
        if (cls->parsed()) {
            run.command = "classify";
            merge_config(run, run, bk);
            require_seed(run, bk);
            return cmd_classify(run);
        }
        std::cerr << "no command given\n";
        return 2;
    } catch (const wmf::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const wmf::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
}
