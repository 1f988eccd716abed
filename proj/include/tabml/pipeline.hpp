#pragma once

#include <tabml/classic.hpp>
#include <tabml/eval.hpp>
#include <tabml/generator.hpp>
#include <tabml/neural.hpp>
#include <tabml/preprocess.hpp>
#include <tabml/table.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tabml {

inline constexpr int kModelSchemaVersion = 1;

// Where the experiment's rows come from: the synthetic generator or a CSV
// with a schema file. Relative paths resolve against the config file's
// directory.
struct DataConfig {
    std::string source = "generate";  // "generate" | "csv"
    std::string csvPath;
    std::string schemaPath;
    std::size_t rows = 9483;
    double noise = 0.05;
};

// One roster entry: a classic spec or (kind == Neural) the network settings.
struct ModelEntry {
    ModelKind kind = ModelKind::Logistic;
    std::map<std::string, double> hyper;       // classic kinds
    std::vector<std::size_t> hiddenLayers;     // neural; empty = default stack
    double learningRate = 0.01;                // neural
    std::size_t epochs = 100;                  // neural
    std::size_t batchSize = 32;                // neural
};

struct PipelineConfig {
    DataConfig data;
    ImputeStrategy imputation = ImputeStrategy::Mean;
    EncodingMode encoding = EncodingMode::Integer;
    double pThreshold = 0.05;
    double corrThreshold = 0.9;
    bool scaling = true;
    double testFraction = 0.2;
    std::size_t cvK = 10;  // 0 disables cross-validation
    std::uint64_t masterSeed = 8;
    std::string outputDir = "out";
    std::vector<ModelEntry> roster;  // defaults to all eight kinds
};

// The default configuration: generated cohort, mean imputation, integer
// encoding, p threshold 0.05, correlation threshold 0.9, min-max scaling,
// 80/20 split, 10-fold CV, and the full eight-model roster.
PipelineConfig defaultConfig();

// Strict JSON round-trip: unknown keys are ConfigErrors at every level.
PipelineConfig configFromJson(const std::string& text);
std::string configToJson(const PipelineConfig& config);
PipelineConfig loadConfig(const std::string& path);

// FNV-1a digest of the canonical (defaults-resolved) config JSON. Paths are
// hashed as written, so relocating a config directory keeps the digest.
std::string configDigest(const PipelineConfig& config);

// --- Trained models ----------------------------------------------------------

struct TrainedModel {
    ModelKind kind = ModelKind::Logistic;
    ClassicModel classic;    // meaningful unless kind == Neural
    NetworkParams network;   // meaningful when kind == Neural
    std::vector<std::string> classLabels;
    PreprocessState preprocess;
    std::uint64_t seed = 0;
    std::string configDigest;
};

Labels predictModel(const TrainedModel& model, const Matrix& X);
std::optional<Matrix> modelProbabilities(const TrainedModel& model, const Matrix& X);

// Versioned JSON model files. Corrupt files raise DataError with the byte
// offset; an unsupported schema_version raises DataError naming it.
std::string modelToJson(const TrainedModel& model);
TrainedModel modelFromJson(const std::string& text);
void saveModel(const TrainedModel& model, const std::string& path);
TrainedModel loadModel(const std::string& path);

// --- The experiment ----------------------------------------------------------

struct ExperimentOutput {
    EvaluationReport report;
    std::vector<std::pair<std::string, TrainedModel>> models;  // name -> model
};

// Runs load -> split -> preprocess -> train -> evaluate -> report, writing
// report.json, report.csv, both SVG figures, and one model file per roster
// entry under outputDir (CLI --out overrides the config value). configDir
// anchors relative data paths. A stage failure writes
// outputDir/report_partial.json naming the stage, then rethrows.
ExperimentOutput runExperiment(const PipelineConfig& config, const std::string& configDir,
                               const std::string& outputOverride = "");

// Trains the roster entry with the given kind on the experiment's training
// split and returns it (used by the `train` subcommand).
TrainedModel trainSingleModel(const PipelineConfig& config, const std::string& configDir,
                              ModelKind kind);

// --- Prediction on new rows --------------------------------------------------

struct PatientPrediction {
    std::string label;
    // (class label, probability) in class order, when the model defines them.
    std::optional<std::vector<std::pair<std::string, double>>> probabilities;
};

// Replays the model's fitted preprocessing on a single-row table and
// predicts. Throws DataError listing every expected feature column the row
// is missing.
PatientPrediction predictPatient(const TrainedModel& model, const Table& row);

// Builds the single-row table for --set key=value pairs, typing each value
// against the model's fitted columns (numeric values must parse; everything
// else is categorical).
Table rowFromPairs(const TrainedModel& model,
                   const std::vector<std::pair<std::string, std::string>>& pairs);

// --- Report serialization ----------------------------------------------------

std::string reportToJson(const EvaluationReport& report);
EvaluationReport reportFromJson(const std::string& text);
std::string reportToCsv(const EvaluationReport& report);

// Writes report.json, report.csv, and the two SVGs into outputDir.
void writeReportFiles(const EvaluationReport& report, const std::string& outputDir);

// --- Small file helpers ------------------------------------------------------

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& content);
std::string resolvePath(const std::string& baseDir, const std::string& path);

}  // namespace tabml
