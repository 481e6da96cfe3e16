#include "renal/harness.hpp"

#include "renal/errors.hpp"
#include "renal/generators.hpp"
#include "renal/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace renal {

namespace {

using json = nlohmann::ordered_json;

const char* const kBuiltinNames[] = {"arma1", "arma2", "garch",        "se",
                                     "sc",    "stpp",  "stpp-gaussian"};

bool is_builtin(const std::string& name) {
    for (const char* n : kBuiltinNames) {
        if (name == n) return true;
    }
    return false;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Seed roles within one trial; keeps every random draw addressable.
enum Role : std::uint64_t {
    kRoleNull = 0,
    kRoleNullPartner = 1,
    kRoleAlt = 2,
    kRoleTrain = 3,
    kRoleTrainRetry = 4,
    kRoleMmd = 5,
};

}  // namespace

// ============================================================
// Processes
// ============================================================

void ProcessSpec::validate() const {
    if (empty()) return;
    if (is_csv()) {
        if (window < 2) throw ConfigError("csv window must be >= 2");
        return;
    }
    if (!is_builtin(name)) {
        throw ConfigError("unknown process '" + name + "'");
    }
    if (name != "stpp" && name != "stpp-gaussian" && n < 2) {
        throw ConfigError("simulated series length n must be >= 2");
    }
}

ObservationSequence realize_process(const ProcessSpec& spec, std::uint64_t seed) {
    if (spec.is_csv()) {
        throw ConfigError("csv process must be resolved by the experiment runner");
    }
    if (spec.name == "arma1") return simulate_arma(ArmaSpec::preset1(), spec.n, seed);
    if (spec.name == "arma2") return simulate_arma(ArmaSpec::preset2(), spec.n, seed);
    if (spec.name == "garch") return simulate_garch(GarchSpec{}, spec.n, seed);
    if (spec.name == "se") {
        HawkesSpec h = HawkesSpec::self_exciting();
        // n is the expected event count: horizon = n / stationary rate,
        // where the rate is mu / (1 - alpha/beta).
        h.horizon = static_cast<double>(spec.n) * (1.0 - h.alpha / h.beta) / h.mu;
        return simulate_hawkes_se(h, seed);
    }
    if (spec.name == "sc") {
        HawkesSpec h = HawkesSpec::self_correcting();
        // Same contract; the long-run rate of the self-correcting process is
        // the drift balance alpha / beta.
        h.horizon = static_cast<double>(spec.n) * h.beta / h.alpha;
        return simulate_self_correcting(h, seed);
    }
    if (spec.name == "stpp") return simulate_stpp(StppSpec::standard_diffusion(), seed);
    if (spec.name == "stpp-gaussian") {
        return simulate_stpp(StppSpec::gaussian_offset(), seed);
    }
    throw ConfigError("unknown process '" + spec.name + "'");
}

MethodSpec parse_method(const std::string& text) {
    if (text == "renal") return {Method::renal, 0};
    if (text == "mmd") return {Method::mmd, 0};
    if (text == "scott") return {Method::scott, 0};
    if (text.rfind("ewd:", 0) == 0) {
        const std::string arg = text.substr(4);
        int m = 0;
        const auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), m);
        if (ec != std::errc() || p != arg.data() + arg.size() || m < 2) {
            throw ConfigError("ewd method needs an integer bin count >= 2, got '" +
                              arg + "'");
        }
        return {Method::ewd, m};
    }
    for (const char* reserved : {"el", "pt-qw", "s-cvm", "stein", "ksd"}) {
        if (text == reserved) {
            throw ConfigError("method '" + text +
                              "' is reserved for merged external results and is "
                              "not implemented");
        }
    }
    throw ConfigError("unknown method '" + text + "'");
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
    if (null_process.empty()) throw ConfigError("null_process is required");
    null_process.validate();
    alt_process.validate();
    parse_method(method);
    try {
        train_cfg.validate();
        bin_cfg.validate();
        mmd_cfg.validate();
    } catch (const InvalidInputError& e) {
        throw ConfigError(e.what());
    }
}

// ============================================================
// CSV data files
// ============================================================

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_number(const std::string& field, int line, std::size_t column) {
    double v = 0.0;
    const char* b = field.data();
    const char* e = b + field.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || !std::isfinite(v)) {
        throw ParseError("malformed number '" + field + "' at line " +
                             std::to_string(line) + ", column " +
                             std::to_string(column + 1),
                         line);
    }
    return v;
}

}  // namespace

ObservationSequence load_csv(const std::string& path, SeriesKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file '" + path + "'", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_fields(line);
    if (header.empty() || header[0] != "t" || header.size() < 2) {
        throw ParseError("header must be t,x1,...,xd", 1);
    }
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (header[j] != "x" + std::to_string(j)) {
            throw ParseError("header must be t,x1,...,xd; column " +
                                 std::to_string(j + 1) + " is '" + header[j] + "'",
                             1);
        }
    }
    const std::size_t d = header.size() - 1;

    std::vector<double> ts;
    std::vector<double> vals;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (in.peek() == std::ifstream::traits_type::eof()) break;
            throw ParseError("empty line " + std::to_string(line_no), line_no);
        }
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != d + 1) {
            throw ParseError("expected " + std::to_string(d + 1) + " fields, got " +
                                 std::to_string(fields.size()) + " at line " +
                                 std::to_string(line_no),
                             line_no);
        }
        const double t = parse_number(fields[0], line_no, 0);
        if (!ts.empty() && t <= ts.back()) {
            throw InvalidInputError(
                "timestamps must increase strictly: line " + std::to_string(line_no) +
                " has t=" + fmt17(t) + " after t=" + fmt17(ts.back()));
        }
        ts.push_back(t);
        for (std::size_t j = 0; j < d; ++j) {
            vals.push_back(parse_number(fields[j + 1], line_no, j + 1));
        }
    }
    if (ts.size() < 2) {
        throw InsufficientDataError("'" + path + "' holds fewer than two observations");
    }

    const Eigen::Index n = static_cast<Eigen::Index>(ts.size());
    Eigen::VectorXd timestamps(n);
    Eigen::MatrixXd values(n, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < n; ++i) {
        timestamps(i) = ts[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            values(i, j) = vals[static_cast<std::size_t>(i) * d +
                                static_cast<std::size_t>(j)];
        }
    }
    return make_sequence(std::move(timestamps), std::move(values), kind);
}

void save_csv(const ObservationSequence& seq, const std::string& path) {
    seq.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "t";
    for (Eigen::Index j = 0; j < seq.dim(); ++j) out << ",x" << (j + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < seq.size(); ++i) {
        out << fmt17(seq.timestamps(i));
        for (Eigen::Index j = 0; j < seq.dim(); ++j) {
            out << ',' << fmt17(seq.values(i, j));
        }
        out << "\n";
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

// ============================================================
// Config JSON
// ============================================================

namespace {

json process_to_json(const ProcessSpec& spec) {
    if (spec.empty()) return nullptr;
    json j;
    if (spec.is_csv()) {
        j["csv"] = spec.csv_path;
        j["kind"] = spec.csv_kind == SeriesKind::event ? "event" : "regular";
        j["window"] = spec.window;
    } else {
        j["name"] = spec.name;
        j["n"] = spec.n;
    }
    return j;
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

ProcessSpec process_from_json(const json& j, const std::string& where) {
    ProcessSpec spec;
    if (j.is_null()) {
        spec.name.clear();
        return spec;
    }
    if (j.is_string()) {
        spec.name = j.get<std::string>();
        return spec;
    }
    if (!j.is_object()) {
        throw ConfigError(where + " must be a name, an object, or null");
    }
    check_keys(j, {"name", "n", "csv", "kind", "window"}, where);
    if (j.contains("csv")) {
        spec.csv_path = j.at("csv").get<std::string>();
        if (j.contains("kind")) {
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "event") {
                spec.csv_kind = SeriesKind::event;
            } else if (kind == "regular") {
                spec.csv_kind = SeriesKind::regular;
            } else {
                throw ConfigError("kind must be 'regular' or 'event' in " + where);
            }
        }
        if (j.contains("window")) spec.window = j.at("window").get<int>();
        return spec;
    }
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    if (j.contains("n")) spec.n = j.at("n").get<int>();
    return spec;
}

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["null_process"] = process_to_json(cfg.null_process);
    j["alt_process"] = process_to_json(cfg.alt_process);
    j["method"] = cfg.method;
    j["trials"] = cfg.trials;
    j["alpha"] = cfg.alpha;
    j["hidden_dim"] = cfg.hidden_dim;
    j["clone_null"] = cfg.clone_null;
    j["train_cfg"] = {{"learning_rate", cfg.train_cfg.learning_rate},
                      {"epochs", cfg.train_cfg.epochs},
                      {"optimizer", cfg.train_cfg.optimizer},
                      {"bptt_window", cfg.train_cfg.bptt_window}};
    j["bin_cfg"] = {{"candidate_bins", cfg.bin_cfg.candidate_bins},
                    {"lambda", cfg.bin_cfg.lambda},
                    {"max_states", cfg.bin_cfg.max_states},
                    {"min_nonzero_fraction", cfg.bin_cfg.min_nonzero_fraction}};
    j["mmd_cfg"] = {{"n_subsequences", cfg.mmd_cfg.n_subsequences},
                    {"n_permutations", cfg.mmd_cfg.n_permutations}};
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
    return config_json(cfg).dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        check_keys(j,
                   {"null_process", "alt_process", "method", "trials", "alpha",
                    "hidden_dim", "clone_null", "train_cfg", "bin_cfg", "mmd_cfg",
                    "seed"},
                   "config");
        if (j.contains("null_process")) {
            cfg.null_process = process_from_json(j.at("null_process"), "null_process");
        }
        if (j.contains("alt_process")) {
            cfg.alt_process = process_from_json(j.at("alt_process"), "alt_process");
        }
        if (j.contains("method")) cfg.method = j.at("method").get<std::string>();
        if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
        if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
        if (j.contains("hidden_dim")) cfg.hidden_dim = j.at("hidden_dim").get<int>();
        if (j.contains("clone_null")) cfg.clone_null = j.at("clone_null").get<bool>();
        if (j.contains("train_cfg")) {
            const json& t = j.at("train_cfg");
            check_keys(t, {"learning_rate", "epochs", "optimizer", "bptt_window"},
                       "train_cfg");
            if (t.contains("learning_rate")) {
                cfg.train_cfg.learning_rate = t.at("learning_rate").get<double>();
            }
            if (t.contains("epochs")) cfg.train_cfg.epochs = t.at("epochs").get<int>();
            if (t.contains("optimizer")) {
                cfg.train_cfg.optimizer = t.at("optimizer").get<std::string>();
            }
            if (t.contains("bptt_window")) {
                cfg.train_cfg.bptt_window = t.at("bptt_window").get<int>();
            }
        }
        if (j.contains("bin_cfg")) {
            const json& b = j.at("bin_cfg");
            check_keys(b,
                       {"candidate_bins", "lambda", "max_states",
                        "min_nonzero_fraction"},
                       "bin_cfg");
            if (b.contains("candidate_bins")) {
                cfg.bin_cfg.candidate_bins =
                    b.at("candidate_bins").get<std::vector<int>>();
            }
            if (b.contains("lambda")) cfg.bin_cfg.lambda = b.at("lambda").get<double>();
            if (b.contains("max_states")) {
                cfg.bin_cfg.max_states = b.at("max_states").get<std::int64_t>();
            }
            if (b.contains("min_nonzero_fraction")) {
                cfg.bin_cfg.min_nonzero_fraction =
                    b.at("min_nonzero_fraction").get<double>();
            }
        }
        if (j.contains("mmd_cfg")) {
            const json& m = j.at("mmd_cfg");
            check_keys(m, {"n_subsequences", "n_permutations"}, "mmd_cfg");
            if (m.contains("n_subsequences")) {
                cfg.mmd_cfg.n_subsequences = m.at("n_subsequences").get<int>();
            }
            if (m.contains("n_permutations")) {
                cfg.mmd_cfg.n_permutations = m.at("n_permutations").get<int>();
            }
        }
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

// ============================================================
// Reports
// ============================================================

std::string report_to_json(const AccuracyReport& report) {
    json j;
    j["version"] = 1;
    j["config_echo"] = config_json(report.config);
    j["type1_accuracy"] = report.type1_accuracy;    // NaN serializes as null
    j["type2_accuracy"] = report.type2_accuracy;
    j["average_accuracy"] = report.average_accuracy;
    j["excluded_trials"] = report.excluded_trials;
    json trials = json::array();
    for (const TrialRecord& rec : report.per_trial) {
        json r;
        r["trial"] = rec.trial;
        r["scenario"] = rec.scenario;
        r["statistic"] = rec.statistic;
        r["dof"] = rec.dof;
        r["p_value"] = rec.p_value;
        r["reject"] = rec.reject;
        trials.push_back(std::move(r));
    }
    j["per_trial"] = std::move(trials);
    return j.dump(2) + "\n";
}

std::string report_to_csv(const AccuracyReport& report) {
    std::string out = "trial,scenario,statistic,dof,p_value,reject\n";
    for (const TrialRecord& rec : report.per_trial) {
        out += std::to_string(rec.trial);
        out += ',';
        out += rec.scenario;
        out += ',';
        out += fmt17(rec.statistic);
        out += ',';
        out += std::to_string(rec.dof);
        out += ',';
        out += fmt17(rec.p_value);
        out += rec.reject ? ",1\n" : ",0\n";
    }
    return out;
}

void emit_report(const AccuracyReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << report_to_json(report);
    if (!out) throw IoError("failed writing '" + path + "'");
}

// ============================================================
// Experiment runner
// ============================================================

namespace {

// A process with any file dependency resolved, ready for per-trial draws.
struct ResolvedProcess {
    ProcessSpec spec;
    ObservationSequence full;  // loaded CSV when spec.is_csv()

    ObservationSequence draw(std::uint64_t seed) const {
        if (!spec.is_csv()) return realize_process(spec, seed);
        const Eigen::Index n = full.size();
        const Eigen::Index w = spec.window;
        if (n < w) {
            throw InsufficientDataError("'" + spec.csv_path +
                                        "' is shorter than the window length");
        }
        Rng rng(seed);
        const auto span = static_cast<std::uint64_t>(n - w + 1);
        const auto start = static_cast<Eigen::Index>(rng.next_u64() % span);
        ObservationSequence out;
        out.kind = full.kind;
        out.timestamps = full.timestamps.segment(start, w);
        out.values = full.values.middleRows(start, w);
        return out;
    }
};

ResolvedProcess resolve_process(const ProcessSpec& spec) {
    ResolvedProcess rp;
    rp.spec = spec;
    if (spec.is_csv()) rp.full = load_csv(spec.csv_path, spec.csv_kind);
    return rp;
}

TrialRecord make_record(int trial, const char* scenario, const TestReport& rep) {
    TrialRecord rec;
    rec.trial = trial;
    rec.scenario = scenario;
    rec.statistic = rep.statistic;
    rec.dof = rep.dof;
    rec.p_value = rep.p_value;
    rec.reject = rep.reject;
    return rec;
}

TrialRecord evaluate_pair(const ExperimentConfig& cfg, const MethodSpec& method,
                          const EmbeddingModel* model,
                          const ObservationSequence& d0,
                          const ObservationSequence& d1, int trial,
                          const char* scenario, std::uint64_t mmd_seed) {
    switch (method.method) {
        case Method::renal:
            return make_record(trial, scenario,
                               run_renal_test(d0, d1, *model, cfg.bin_cfg, cfg.alpha));
        case Method::mmd: {
            MmdConfig mc = cfg.mmd_cfg;
            mc.seed = mmd_seed;
            const MmdResult res = mmd_test(d0, d1, mc, cfg.alpha);
            TrialRecord rec;
            rec.trial = trial;
            rec.scenario = scenario;
            rec.statistic = res.statistic;
            rec.dof = 0;
            rec.p_value = res.p_value;
            rec.reject = res.reject;
            return rec;
        }
        case Method::ewd:
        case Method::scott: {
            const Eigen::MatrixXd emb0 = embed_sequence(*model, d0);
            const Eigen::MatrixXd emb1 = embed_sequence(*model, d1);
            Eigen::MatrixXd pooled(emb0.rows() + emb1.rows(), emb0.cols());
            pooled << emb0, emb1;
            const BinGrid grid = method.method == Method::ewd
                                     ? ewd_bins(pooled, method.ewd_m)
                                     : scott_bins(pooled);
            const std::vector<std::int64_t> s0 = assign_bins(emb0, grid);
            const std::vector<std::int64_t> s1 = assign_bins(emb1, grid);
            const ChiSquareStat stat = chi_square_statistic_from_states(s0, s1);
            TestReport rep = decide(stat, cfg.alpha);
            return make_record(trial, scenario, rep);
        }
    }
    throw InternalError("unhandled method");
}

struct TrialOutcome {
    std::vector<TrialRecord> records;
    int excluded = 0;
    std::exception_ptr error;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, const MethodSpec& method,
                       const ResolvedProcess& null_proc,
                       const ResolvedProcess& alt_proc, int trial) {
    TrialOutcome out;
    const auto t = static_cast<std::uint64_t>(trial);
    const ObservationSequence d0 = null_proc.draw(derive_seed(cfg.seed, {t, kRoleNull}));
    const ObservationSequence d1_null =
        cfg.clone_null ? d0 : null_proc.draw(derive_seed(cfg.seed, {t, kRoleNullPartner}));
    ObservationSequence d1_alt;
    const bool has_alt = cfg.has_alt();
    if (has_alt) d1_alt = alt_proc.draw(derive_seed(cfg.seed, {t, kRoleAlt}));
    const int pairs = has_alt ? 2 : 1;

    EmbeddingModel model;
    if (method.method != Method::mmd) {
        TrainConfig tc = cfg.train_cfg;
        tc.bptt_window =
            std::min<int>(tc.bptt_window, static_cast<int>(d0.size()) - 1);
        tc.seed = derive_seed(cfg.seed, {t, kRoleTrain});
        try {
            model = train(d0, cfg.hidden_dim, tc).model;
        } catch (const DivergenceError&) {
            tc.seed = derive_seed(cfg.seed, {t, kRoleTrainRetry});
            try {
                model = train(d0, cfg.hidden_dim, tc).model;
            } catch (const DivergenceError&) {
                out.excluded = pairs;
                return out;
            }
        }
    }

    const std::uint64_t mmd_seed = derive_seed(cfg.seed, {t, kRoleMmd});
    try {
        out.records.push_back(
            evaluate_pair(cfg, method, &model, d0, d1_null, trial, "h0", mmd_seed));
    } catch (const DegenerateDataError&) {
        ++out.excluded;
    }
    if (has_alt) {
        try {
            out.records.push_back(evaluate_pair(cfg, method, &model, d0, d1_alt,
                                                trial, "h1", mmd_seed));
        } catch (const DegenerateDataError&) {
            ++out.excluded;
        }
    }
    return out;
}

}  // namespace

AccuracyReport run_experiment(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    const MethodSpec method = parse_method(cfg.method);
    const ResolvedProcess null_proc = resolve_process(cfg.null_process);
    ResolvedProcess alt_proc;
    if (cfg.has_alt()) alt_proc = resolve_process(cfg.alt_process);

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int trial = next.fetch_add(1);
            if (trial >= cfg.trials) break;
            TrialOutcome& slot = outcomes[static_cast<std::size_t>(trial)];
            try {
                slot = run_trial(cfg, method, null_proc, alt_proc, trial);
            } catch (...) {
                slot.error = std::current_exception();
            }
        }
    };
    const int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    AccuracyReport report;
    report.config = cfg;
    std::int64_t h0 = 0, h0_accepts = 0, h1 = 0, h1_rejects = 0;
    for (const TrialOutcome& outcome : outcomes) {
        if (outcome.error) std::rethrow_exception(outcome.error);
        report.excluded_trials += outcome.excluded;
        for (const TrialRecord& rec : outcome.records) {
            if (rec.scenario == "h0") {
                ++h0;
                if (!rec.reject) ++h0_accepts;
            } else {
                ++h1;
                if (rec.reject) ++h1_rejects;
            }
            report.per_trial.push_back(rec);
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.type1_accuracy =
        h0 > 0 ? static_cast<double>(h0_accepts) / static_cast<double>(h0) : nan;
    report.type2_accuracy =
        h1 > 0 ? static_cast<double>(h1_rejects) / static_cast<double>(h1) : nan;
    report.average_accuracy =
        h0 + h1 > 0 ? static_cast<double>(h0_accepts + h1_rejects) /
                          static_cast<double>(h0 + h1)
                    : nan;
    return report;
}

std::vector<AccuracyReport> run_lambda_ablation(const ExperimentConfig& base_cfg,
                                                const std::vector<double>& lambdas,
                                                int threads) {
    if (lambdas.empty()) throw ConfigError("lambda sweep needs at least one value");
    std::vector<AccuracyReport> reports;
    reports.reserve(lambdas.size());
    for (const double lambda : lambdas) {
        ExperimentConfig cfg = base_cfg;
        cfg.bin_cfg.lambda = lambda;
        reports.push_back(run_experiment(cfg, threads));
    }
    return reports;
}

std::string ablation_csv(const std::vector<double>& lambdas,
                         const std::vector<AccuracyReport>& reports) {
    if (lambdas.size() != reports.size()) {
        throw InvalidInputError("lambda list and report list differ in length");
    }
    std::string out = "lambda,type1,type2\n";
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        out += fmt17(lambdas[i]);
        out += ',';
        out += fmt17(reports[i].type1_accuracy);
        out += ',';
        out += fmt17(reports[i].type2_accuracy);
        out += '\n';
    }
    return out;
}

}  // namespace renal
