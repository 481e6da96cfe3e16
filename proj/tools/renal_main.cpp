#include "renal/errors.hpp"
#include "renal/harness.hpp"
#include "renal/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using renal::ConfigError;
using renal::ObservationSequence;
using renal::SeriesKind;

SeriesKind parse_kind(const std::string& text) {
    if (text == "regular") return SeriesKind::regular;
    if (text == "event") return SeriesKind::event;
    throw ConfigError("kind must be 'regular' or 'event', got '" + text + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw renal::IoError("cannot open '" + path + "' for reading");
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw renal::IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw renal::IoError("failed writing '" + path + "'");
}

// Bin-selection preset for directly tested data, chosen by its shape.
renal::BinSelectionConfig preset_for(const ObservationSequence& seq) {
    if (seq.kind == SeriesKind::regular) return renal::BinSelectionConfig::time_series();
    if (seq.dim() >= 3) return renal::BinSelectionConfig::stpp();
    return renal::BinSelectionConfig::tpp();
}

struct SimulateOpts {
    std::string process;
    int n = 500;
    std::uint64_t seed = 1;
    std::string out;
};

int run_simulate(const SimulateOpts& opt) {
    renal::ProcessSpec spec;
    spec.name = opt.process;
    spec.n = opt.n;
    spec.validate();
    const ObservationSequence seq = renal::realize_process(spec, opt.seed);
    renal::save_csv(seq, opt.out);
    std::cout << "wrote " << seq.size() << " observations (" << seq.dim()
              << " column" << (seq.dim() == 1 ? "" : "s") << ") to " << opt.out
              << "\n";
    return 0;
}

struct TrainOpts {
    std::string csv;
    std::string kind = "regular";
    std::string process;
    int n = 500;
    int hidden_dim = 4;
    double learning_rate = 1e-3;
    int epochs = 100;
    std::string optimizer = "adam";
    int bptt_window = 32;
    std::uint64_t seed = 1;
    std::string out;
};

ObservationSequence training_sequence(const TrainOpts& opt) {
    if (!opt.csv.empty() && !opt.process.empty()) {
        throw ConfigError("give either --data or --process, not both");
    }
    if (!opt.csv.empty()) return renal::load_csv(opt.csv, parse_kind(opt.kind));
    if (!opt.process.empty()) {
        renal::ProcessSpec spec;
        spec.name = opt.process;
        spec.n = opt.n;
        spec.validate();
        return renal::realize_process(spec, renal::derive_seed(opt.seed, {0}));
    }
    throw ConfigError("training needs --data or --process");
}

int run_train(const TrainOpts& opt) {
    const ObservationSequence seq = training_sequence(opt);
    renal::TrainConfig tc;
    tc.learning_rate = opt.learning_rate;
    tc.epochs = opt.epochs;
    tc.optimizer = opt.optimizer;
    tc.seed = opt.seed;
    tc.bptt_window = std::min<int>(opt.bptt_window, static_cast<int>(seq.size()) - 1);
    const renal::TrainResult result = renal::train(seq, opt.hidden_dim, tc);
    renal::save_model(result.model, opt.out);
    std::cout << "trained on " << seq.size() << " observations; final loss "
              << result.loss_curve.back() << "; model saved to " << opt.out << "\n";
    return 0;
}

struct TestOpts {
    std::string d0_path;
    std::string d1_path;
    std::string kind = "regular";
    std::string model_path;
    std::string method = "renal";
    double alpha = 0.05;
    double lambda = -1.0;  // <0: preset value
    int hidden_dim = 4;
    double learning_rate = 1e-3;
    int epochs = 100;
    std::string optimizer = "adam";
    std::uint64_t seed = 1;
    std::string out;
};

int run_test(const TestOpts& opt) {
    const SeriesKind kind = parse_kind(opt.kind);
    const ObservationSequence d0 = renal::load_csv(opt.d0_path, kind);
    const ObservationSequence d1 = renal::load_csv(opt.d1_path, kind);
    const renal::MethodSpec method = renal::parse_method(opt.method);

    nlohmann::ordered_json j;
    j["method"] = opt.method;
    if (method.method == renal::Method::mmd) {
        renal::MmdConfig mc;
        mc.seed = opt.seed;
        const renal::MmdResult res = renal::mmd_test(d0, d1, mc, opt.alpha);
        j["statistic"] = res.statistic;
        j["p_value"] = res.p_value;
        j["alpha"] = opt.alpha;
        j["reject"] = res.reject;
        j["bandwidth"] = res.bandwidth;
        j["window_len"] = res.window_len;
    } else {
        renal::EmbeddingModel model;
        if (!opt.model_path.empty()) {
            model = renal::load_model(opt.model_path);
        } else {
            renal::TrainConfig tc;
            tc.learning_rate = opt.learning_rate;
            tc.epochs = opt.epochs;
            tc.optimizer = opt.optimizer;
            tc.seed = opt.seed;
            tc.bptt_window = std::min<int>(32, static_cast<int>(d0.size()) - 1);
            model = renal::train(d0, opt.hidden_dim, tc).model;
        }
        renal::TestReport rep;
        if (method.method == renal::Method::renal) {
            renal::BinSelectionConfig bc = preset_for(d0);
            if (opt.lambda >= 0.0) bc.lambda = opt.lambda;
            rep = renal::run_renal_test(d0, d1, model, bc, opt.alpha);
        } else {
            const Eigen::MatrixXd emb0 = renal::embed_sequence(model, d0);
            const Eigen::MatrixXd emb1 = renal::embed_sequence(model, d1);
            Eigen::MatrixXd pooled(emb0.rows() + emb1.rows(), emb0.cols());
            pooled << emb0, emb1;
            const renal::BinGrid grid = method.method == renal::Method::ewd
                                            ? renal::ewd_bins(pooled, method.ewd_m)
                                            : renal::scott_bins(pooled);
            const auto s0 = renal::assign_bins(emb0, grid);
            const auto s1 = renal::assign_bins(emb1, grid);
            rep = renal::decide(renal::chi_square_statistic_from_states(s0, s1),
                                opt.alpha);
        }
        j["statistic"] = rep.statistic;
        j["dof"] = rep.dof;
        j["critical_value"] = rep.critical_value;
        j["p_value"] = rep.p_value;
        j["alpha"] = rep.alpha;
        j["reject"] = rep.reject;
        j["occupied_states"] = rep.occupied_states;
        j["bins_per_dim"] = rep.bins_per_dim;
    }
    const std::string text = j.dump(2) + "\n";
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        write_file(opt.out, text);
    }
    return 0;
}

struct ExperimentOpts {
    std::string config_path;
    std::string out = "report.json";
    bool csv_twin = false;
    int threads = 1;
    // Optional overrides; negative or empty means "keep the config file value".
    std::int64_t seed = -1;
    double alpha = -1.0;
    std::string method;
    int trials = -1;
};

std::string csv_twin_path(const std::string& out) {
    const std::string suffix = ".json";
    if (out.size() > suffix.size() &&
        out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return out.substr(0, out.size() - suffix.size()) + ".csv";
    }
    return out + ".csv";
}

int run_experiment_cmd(const ExperimentOpts& opt) {
    renal::ExperimentConfig cfg = renal::config_from_json(read_file(opt.config_path));
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.alpha >= 0.0) cfg.alpha = opt.alpha;
    if (!opt.method.empty()) cfg.method = opt.method;
    if (opt.trials >= 0) cfg.trials = opt.trials;
    cfg.validate();

    const renal::AccuracyReport report = renal::run_experiment(cfg, opt.threads);
    renal::emit_report(report, opt.out);
    if (opt.csv_twin) {
        write_file(csv_twin_path(opt.out), renal::report_to_csv(report));
    }
    std::cout << "type1=" << report.type1_accuracy
              << " type2=" << report.type2_accuracy
              << " average=" << report.average_accuracy
              << " excluded=" << report.excluded_trials << "\n"
              << "report written to " << opt.out << "\n";
    return 0;
}

struct AblateOpts {
    std::string config_path;
    std::vector<double> lambdas;
    std::string out = "ablation.csv";
    int threads = 1;
};

int run_ablate(const AblateOpts& opt) {
    const renal::ExperimentConfig cfg =
        renal::config_from_json(read_file(opt.config_path));
    const std::vector<renal::AccuracyReport> reports =
        renal::run_lambda_ablation(cfg, opt.lambdas, opt.threads);
    write_file(opt.out, renal::ablation_csv(opt.lambdas, reports));
    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::cout << "lambda=" << opt.lambdas[i]
                  << " type1=" << reports[i].type1_accuracy
                  << " type2=" << reports[i].type2_accuracy << "\n";
    }
    std::cout << "sweep written to " << opt.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transition-discrepancy goodness-of-fit testing for sequence models"};
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Sample a builtin process to CSV");
    simulate->add_option("--process", sim.process,
                         "arma1|arma2|garch|se|sc|stpp|stpp-gaussian")
        ->required();
    simulate->add_option("--n", sim.n,
                         "series length; expected event count for se/sc");
    simulate->add_option("--seed", sim.seed, "random seed");
    simulate->add_option("--out", sim.out, "output CSV path")->required();

    TrainOpts tr;
    CLI::App* train = app.add_subcommand("train", "Fit an embedding model");
    train->add_option("--data", tr.csv, "training CSV");
    train->add_option("--kind", tr.kind, "regular|event");
    train->add_option("--process", tr.process, "builtin process instead of a CSV");
    train->add_option("--n", tr.n, "length when simulating");
    train->add_option("--hidden-dim", tr.hidden_dim, "embedding width");
    train->add_option("--lr", tr.learning_rate, "learning rate");
    train->add_option("--epochs", tr.epochs, "training epochs");
    train->add_option("--optimizer", tr.optimizer, "adam|sgd");
    train->add_option("--bptt", tr.bptt_window, "truncation window");
    train->add_option("--seed", tr.seed, "random seed");
    train->add_option("--out", tr.out, "model JSON path")->required();

    TestOpts te;
    CLI::App* test = app.add_subcommand("test", "Two-sample test on CSV sequences");
    test->add_option("--d0", te.d0_path, "reference CSV")->required();
    test->add_option("--d1", te.d1_path, "candidate CSV")->required();
    test->add_option("--kind", te.kind, "regular|event");
    test->add_option("--model", te.model_path, "pretrained model JSON");
    test->add_option("--method", te.method, "renal|mmd|ewd:<m>|scott");
    test->add_option("--alpha", te.alpha, "significance level");
    test->add_option("--lambda", te.lambda, "smoothness weight override");
    test->add_option("--hidden-dim", te.hidden_dim, "embedding width");
    test->add_option("--lr", te.learning_rate, "learning rate");
    test->add_option("--epochs", te.epochs, "training epochs");
    test->add_option("--optimizer", te.optimizer, "adam|sgd");
    test->add_option("--seed", te.seed, "random seed");
    test->add_option("--out", te.out, "write the JSON result here");

    ExperimentOpts ex;
    CLI::App* experiment =
        app.add_subcommand("experiment", "Run a repeated-trial accuracy study");
    experiment->add_option("--config", ex.config_path, "experiment config JSON")
        ->required();
    experiment->add_option("--out", ex.out, "report JSON path");
    experiment->add_flag("--csv", ex.csv_twin, "also write a flat per-trial CSV");
    experiment->add_option("--threads", ex.threads, "worker threads");
    experiment->add_option("--seed", ex.seed, "override config seed");
    experiment->add_option("--alpha", ex.alpha, "override config alpha");
    experiment->add_option("--method", ex.method, "override config method");
    experiment->add_option("--trials", ex.trials, "override config trials");

    AblateOpts ab;
    CLI::App* ablate =
        app.add_subcommand("ablate", "Sweep the smoothness weight lambda");
    ablate->add_option("--config", ab.config_path, "experiment config JSON")
        ->required();
    ablate->add_option("--lambdas", ab.lambdas, "comma-separated lambda values")
        ->required()
        ->delimiter(',');
    ablate->add_option("--out", ab.out, "sweep CSV path");
    ablate->add_option("--threads", ab.threads, "worker threads");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return run_simulate(sim);
        if (train->parsed()) return run_train(tr);
        if (test->parsed()) return run_test(te);
        if (experiment->parsed()) return run_experiment_cmd(ex);
        if (ablate->parsed()) return run_ablate(ab);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const renal::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const renal::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const renal::InternalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const renal::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
