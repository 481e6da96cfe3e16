#pragma once

#include "renal/baselines.hpp"
#include "renal/embedding.hpp"
#include "renal/gof.hpp"
#include "renal/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace renal {

// Data source for one side of an experiment: a named builtin process, or
// contiguous windows cut from a CSV file. An empty name and path means the
// side is absent (no alternative scenario).
struct ProcessSpec {
    std::string name;       // arma1, arma2, garch, se, sc, stpp, stpp-gaussian
    int n = 500;            // steps for regular series; expected event count
                            // for se/sc (horizon scaled by the long-run rate);
                            // ignored by the fixed-horizon stpp presets

    std::string csv_path;   // when set, windows of this file replace `name`
    SeriesKind csv_kind = SeriesKind::regular;
    int window = 400;       // CSV window length

    bool empty() const { return name.empty() && csv_path.empty(); }
    bool is_csv() const { return !csv_path.empty(); }
    void validate() const;
};

// Simulates one sequence from a builtin process spec. CSV specs are
// resolved inside run_experiment, where the file is loaded once.
ObservationSequence realize_process(const ProcessSpec& spec, std::uint64_t seed);

enum class Method { renal, mmd, ewd, scott };

struct MethodSpec {
    Method method = Method::renal;
    int ewd_m = 0;  // bins per dimension for the fixed-grid method
};

// Parses "renal", "mmd", "ewd:<m>", "scott". Identifiers reserved for
// external result merging (el, pt-qw, s-cvm, stein, ksd) are rejected as
// not implemented; anything else is unknown. Both throw ConfigError.
MethodSpec parse_method(const std::string& text);

struct ExperimentConfig {
    ProcessSpec null_process;
    ProcessSpec alt_process;       // may be empty: calibration-only run
    std::string method = "renal";
    int trials = 100;
    double alpha = 0.05;
    int hidden_dim = 4;
    bool clone_null = false;       // same-sequence null pairs (d1 := d0)
    TrainConfig train_cfg;
    BinSelectionConfig bin_cfg = BinSelectionConfig::tpp();
    MmdConfig mmd_cfg;
    std::uint64_t seed = 1;

    bool has_alt() const { return !alt_process.empty(); }
    void validate() const;
};

// One tested pair. scenario is "h0" (both sequences from the null process)
// or "h1" (null versus alternative). For MMD, dof is 0 and statistic is the
// unbiased squared-MMD estimate.
struct TrialRecord {
    int trial = 0;
    std::string scenario;
    double statistic = 0.0;
    std::int64_t dof = 0;
    double p_value = 0.0;
    bool reject = false;
};

struct AccuracyReport {
    double type1_accuracy = 0.0;   // accept rate over h0 pairs
    double type2_accuracy = 0.0;   // reject rate over h1 pairs; NaN if none ran
    double average_accuracy = 0.0; // correct decisions over all pairs
    int excluded_trials = 0;       // pairs dropped after a failed retry
    std::vector<TrialRecord> per_trial;
    ExperimentConfig config;       // resolved configuration, echoed in reports
};

// Runs the trial protocol: per trial, draws a null sequence d0 and a
// same-process partner (role-indexed seeds derived from cfg.seed and the
// trial number), plus an alternative draw when configured; trains the
// embedding once per trial on d0 (embedding methods), evaluates the chosen
// method on the h0 pair and the h1 pair, and tallies decisions. A training
// divergence is retried once with a perturbed seed; a second failure (or a
// degenerate bin selection) excludes the affected pairs with a count.
// Reports are byte-identical for a fixed config regardless of `threads`.
AccuracyReport run_experiment(const ExperimentConfig& cfg, int threads = 1);

// Re-runs the experiment once per lambda, overriding bin_cfg.lambda.
std::vector<AccuracyReport> run_lambda_ablation(const ExperimentConfig& base_cfg,
                                                const std::vector<double>& lambdas,
                                                int threads = 1);

// Plot-ready sweep summary: header lambda,type1,type2 and one row per entry.
std::string ablation_csv(const std::vector<double>& lambdas,
                         const std::vector<AccuracyReport>& reports);

// ============================================================
// Data files
// ============================================================

// CSV with header t,x1,...,xd and one observation per line. Numbers are
// written with 17 significant digits, so doubles round-trip exactly.
// Loading rejects malformed fields (ParseError with the line number) and
// non-increasing timestamps (line of the first inversion in the message).
ObservationSequence load_csv(const std::string& path, SeriesKind kind);
void save_csv(const ObservationSequence& seq, const std::string& path);

// ============================================================
// Reports and configs
// ============================================================

// Canonical JSON document: {version, config_echo, type1_accuracy,
// type2_accuracy, average_accuracy, excluded_trials, per_trial}. Key order
// and number formatting are fixed, so equal reports serialize to equal
// bytes. Accuracies that never ran serialize as null.
std::string report_to_json(const AccuracyReport& report);

// Flat per-trial table: trial,scenario,statistic,dof,p_value,reject.
std::string report_to_csv(const AccuracyReport& report);

// Writes report_to_json(report) to `path`; IoError if unwritable.
void emit_report(const AccuracyReport& report, const std::string& path);

// Experiment config as canonical JSON, and back. The parser fills omitted
// fields with defaults and rejects unknown keys.
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

}  // namespace renal
