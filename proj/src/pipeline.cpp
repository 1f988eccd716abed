#include <tabml/pipeline.hpp>

#include <tabml/errors.hpp>
#include <tabml/figures.hpp>
#include <tabml/rng.hpp>
#include <tabml/text.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tabml {
namespace {

using nlohmann::json;

template <typename Fn>
auto withFoldContext(std::size_t fold, Fn&& fn) {
    const std::string prefix = "fold " + std::to_string(fold) + ": ";
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const DataError& e) {
        throw DataError(prefix + e.what());
    } catch (const NumericError& e) {
        throw NumericError(prefix + e.what());
    }
}

Table loadData(const PipelineConfig& config, const std::string& configDir) {
    if (config.data.source == "generate") {
        GeneratorSettings settings;
        settings.nRows = config.data.rows;
        settings.noiseRate = config.data.noise;
        settings.seed = deriveSeed(config.masterSeed, streams::kGenerate);
        return generateCohort(settings);
    }
    const auto schema = loadSchema(resolvePath(configDir, config.data.schemaPath));
    return loadCsv(resolvePath(configDir, config.data.csvPath), schema);
}

PreprocessOptions preprocessOptions(const PipelineConfig& config, std::size_t pcaComponents) {
    PreprocessOptions options;
    options.imputation = config.imputation;
    options.encoding = config.encoding;
    options.pThreshold = config.pThreshold;
    options.corrThreshold = config.corrThreshold;
    options.scaling = config.scaling;
    options.pcaComponents = pcaComponents;
    return options;
}

// Trains one roster entry on an already-preprocessed matrix. The preprocess
// state and class roster are attached by the caller.
TrainedModel fitEntry(const ModelEntry& entry, const Matrix& X, const Labels& y, int nClasses,
                      std::uint64_t seed) {
    TrainedModel model;
    model.kind = entry.kind;
    model.seed = seed;
    if (entry.kind == ModelKind::Neural) {
        NetworkConfig net;
        net.inputDim = static_cast<std::size_t>(X.cols());
        net.outputDim = static_cast<std::size_t>(nClasses);
        net.hiddenLayers = entry.hiddenLayers;
        net.learningRate = entry.learningRate;
        net.epochs = entry.epochs;
        net.batchSize = entry.batchSize;
        net.seed = seed;
        model.network = trainNetwork(initNetwork(net), X, oneHot(y, nClasses), net).params;
        return model;
    }
    ClassifierSpec spec;
    spec.kind = entry.kind;
    spec.hyper = entry.hyper;
    spec.seed = seed;
    model.classic = fitClassifier(spec, X, y, nClasses);
    return model;
}

// Unique report/file name per roster entry: the kind name, with -2, -3, ...
// appended for repeats.
std::vector<std::string> rosterNames(const std::vector<ModelEntry>& roster) {
    std::map<std::string, int> counts;
    std::vector<std::string> names;
    for (const ModelEntry& entry : roster) {
        const std::string base = modelKindName(entry.kind);
        const int count = ++counts[base];
        names.push_back(count == 1 ? base : base + "-" + std::to_string(count));
    }
    return names;
}

// Everything the training and evaluation phases consume, fitted on the
// training split only.
struct PreparedData {
    Table table;
    std::vector<std::size_t> trainRows;
    std::vector<std::size_t> testRows;
    FitResult fit;
    Matrix trainX;
    Labels trainY;
    Matrix testX;
    Labels testY;
    std::string digest;
};

PreparedData prepareData(const PipelineConfig& config, const std::string& configDir,
                         std::string& stage) {
    PreparedData data;
    data.digest = configDigest(config);

    stage = "load";
    data.table = loadData(config, configDir);

    stage = "split";
    auto [trainRows, testRows] =
        splitIndices(data.table.rowCount(), config.testFraction,
                     deriveSeed(config.masterSeed, streams::kSplit));
    data.trainRows = std::move(trainRows);
    data.testRows = std::move(testRows);
    const Table train = data.table.selectRows(data.trainRows);
    const Table test = data.table.selectRows(data.testRows);

    stage = "preprocess";
    data.fit = fitPreprocess(train, preprocessOptions(config, 2));
    data.trainX = applyPreprocess(train, data.fit.state);
    data.trainY = encodeTarget(train, data.fit.classLabels);
    data.testX = applyPreprocess(test, data.fit.state);
    data.testY = encodeTarget(test, data.fit.classLabels);
    return data;
}

struct FoldData {
    Matrix trainX;
    Labels trainY;
    Matrix testX;
    Labels testY;
    int nClasses = 0;
};

// Per-fold pipeline replay: imputation, encoders, selection, and scaling are
// all refitted on the fold's training rows.
std::vector<FoldData> prepareFolds(const Table& table, const PipelineConfig& config) {
    const std::string targetName = table.schemaAt(table.targetIndex()).name;
    const EncoderMap targetEncoder = fitEncoder(table, targetName, EncodingMode::Integer);
    const auto& labels = table.column(targetName).labels();
    Labels fullY(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        fullY[r] = targetEncoder.indexOf(labels[r]);
    }
    const FoldPlan plan =
        stratifiedKFold(fullY, config.cvK, deriveSeed(config.masterSeed, streams::kFolds));

    std::vector<FoldData> folds;
    for (std::size_t f = 0; f < plan.k; ++f) {
        std::vector<std::size_t> trainRows;
        std::vector<std::size_t> testRows;
        for (std::size_t r = 0; r < plan.assignments.size(); ++r) {
            (plan.assignments[r] == f ? testRows : trainRows).push_back(r);
        }
        folds.push_back(withFoldContext(f, [&] {
            const Table train = table.selectRows(trainRows);
            const Table test = table.selectRows(testRows);
            const FitResult fit = fitPreprocess(train, preprocessOptions(config, 0));
            FoldData fold;
            fold.trainX = applyPreprocess(train, fit.state);
            fold.trainY = encodeTarget(train, fit.classLabels);
            fold.testX = applyPreprocess(test, fit.state);
            fold.testY = encodeTarget(test, fit.classLabels);
            fold.nClasses = static_cast<int>(fit.classLabels.size());
            return fold;
        }));
    }
    return folds;
}

void writePartialReport(const std::string& outDir, const std::string& stage,
                        const std::string& error) {
    try {
        json partial;
        partial["stage"] = stage;
        partial["error"] = error;
        std::filesystem::create_directories(outDir);
        writeTextFile((std::filesystem::path(outDir) / "report_partial.json").string(),
                      partial.dump(2) + "\n");
    } catch (...) {
        // The original error is the one worth reporting.
    }
}

}  // namespace

Labels predictModel(const TrainedModel& model, const Matrix& X) {
    if (model.kind == ModelKind::Neural) return predictNetwork(model.network, X);
    return predictClassic(model.classic, X);
}

std::optional<Matrix> modelProbabilities(const TrainedModel& model, const Matrix& X) {
    if (model.kind == ModelKind::Neural) return forward(model.network, X).probabilities;
    return predictProbabilities(model.classic, X);
}

ExperimentOutput runExperiment(const PipelineConfig& config, const std::string& configDir,
                               const std::string& outputOverride) {
    const std::string outDir =
        outputOverride.empty() ? resolvePath(configDir, config.outputDir) : outputOverride;
    std::string stage = "load";
    try {
        PreparedData data = prepareData(config, configDir, stage);
        const int nClasses = static_cast<int>(data.fit.classLabels.size());
        const std::vector<std::string> names = rosterNames(config.roster);

        stage = "cross_validate";
        std::vector<FoldData> folds;
        if (config.cvK >= 2) folds = prepareFolds(data.table, config);

        stage = "train";
        EvaluationReport report;
        report.seed = config.masterSeed;
        report.configDigest = data.digest;
        report.classLabels = data.fit.classLabels;
        report.selectedFeatures = data.fit.state.selectedFeatures;

        ExperimentOutput output;
        std::vector<Labels> holdoutPredictions;
        for (std::size_t m = 0; m < config.roster.size(); ++m) {
            const ModelEntry& entry = config.roster[m];
            const std::uint64_t modelSeed =
                deriveSeed(config.masterSeed, streams::kModelBase + m);
            TrainedModel model = fitEntry(entry, data.trainX, data.trainY, nClasses,
                                          deriveSeed(modelSeed, 0));
            model.classLabels = data.fit.classLabels;
            model.preprocess = data.fit.state;
            model.configDigest = data.digest;

            ModelResult result;
            result.name = names[m];
            const Labels predicted = predictModel(model, data.testX);
            result.holdout = computeMetrics(predicted, data.testY, nClasses);
            for (std::size_t f = 0; f < folds.size(); ++f) {
                result.foldAccuracies.push_back(withFoldContext(f, [&] {
                    const FoldData& fold = folds[f];
                    const TrainedModel foldModel =
                        fitEntry(entry, fold.trainX, fold.trainY, fold.nClasses,
                                 deriveSeed(modelSeed, f + 1));
                    const Labels foldPredicted = predictModel(foldModel, fold.testX);
                    return computeMetrics(foldPredicted, fold.testY, fold.nClasses).accuracy;
                }));
            }
            if (!result.foldAccuracies.empty()) {
                result.cvMean = meanOf(result.foldAccuracies);
                result.cvStd = sampleStdOf(result.foldAccuracies);
            }
            for (std::size_t c = 0; c < result.holdout.precisionDefined.size(); ++c) {
                if (result.holdout.precisionDefined[c] == 0) {
                    report.warnings.push_back(result.name + ": class '" +
                                              data.fit.classLabels[c] +
                                              "' was never predicted on the holdout split");
                }
            }
            report.models.push_back(std::move(result));
            holdoutPredictions.push_back(predicted);
            output.models.emplace_back(names[m], std::move(model));
        }

        stage = "evaluate";
        if (data.fit.state.pca && data.testX.rows() > 0) {
            std::size_t best = 0;
            for (std::size_t m = 1; m < report.models.size(); ++m) {
                if (report.models[m].holdout.accuracy > report.models[best].holdout.accuracy) {
                    best = m;
                }
            }
            report.pcaPoints = pcaTransform(data.testX, *data.fit.state.pca);
            report.pcaPredicted = holdoutPredictions[best];
            report.pcaModel = report.models[best].name;
        }

        stage = "report";
        writeReportFiles(report, outDir);
        const std::filesystem::path modelsDir = std::filesystem::path(outDir) / "models";
        std::filesystem::create_directories(modelsDir);
        for (const auto& [name, model] : output.models) {
            saveModel(model, (modelsDir / (name + ".json")).string());
        }

        std::string log;
        log += "config digest: " + data.digest + "\n";
        log += "rows: " + std::to_string(data.table.rowCount()) + ", train " +
               std::to_string(data.trainRows.size()) + ", test " +
               std::to_string(data.testRows.size()) + "\n";
        log += "selected features: " + std::to_string(data.fit.state.selectedFeatures.size()) +
               "\n";
        for (const ModelResult& result : report.models) {
            log += result.name + ": holdout accuracy " + formatDouble(result.holdout.accuracy);
            if (!result.foldAccuracies.empty()) {
                log += ", cv mean " + formatDouble(result.cvMean) + " (std " +
                       formatDouble(result.cvStd) + ")";
            }
            log += "\n";
        }
        for (const std::string& warning : report.warnings) log += "warning: " + warning + "\n";
        writeTextFile((std::filesystem::path(outDir) / "run.log").string(), log);

        output.report = std::move(report);
        return output;
    } catch (const std::exception& e) {
        writePartialReport(outDir, stage, e.what());
        throw;
    }
}

TrainedModel trainSingleModel(const PipelineConfig& config, const std::string& configDir,
                              ModelKind kind) {
    std::size_t index = config.roster.size();
    for (std::size_t m = 0; m < config.roster.size(); ++m) {
        if (config.roster[m].kind == kind) {
            index = m;
            break;
        }
    }
    if (index == config.roster.size()) {
        throw ConfigError("model kind '" + modelKindName(kind) + "' is not in the config roster");
    }
    std::string stage;
    PreparedData data = prepareData(config, configDir, stage);
    const int nClasses = static_cast<int>(data.fit.classLabels.size());
    const std::uint64_t modelSeed = deriveSeed(config.masterSeed, streams::kModelBase + index);
    TrainedModel model = fitEntry(config.roster[index], data.trainX, data.trainY, nClasses,
                                  deriveSeed(modelSeed, 0));
    model.classLabels = data.fit.classLabels;
    model.preprocess = data.fit.state;
    model.configDigest = data.digest;
    return model;
}

PatientPrediction predictPatient(const TrainedModel& model, const Table& row) {
    if (row.rowCount() != 1) throw DataError("predictPatient: expected exactly one row");
    const Matrix X = applyPreprocess(row, model.preprocess);
    const Labels predicted = predictModel(model, X);
    const auto classIndex = static_cast<std::size_t>(predicted[0]);
    if (classIndex >= model.classLabels.size()) {
        throw DataError("predictPatient: predicted class out of range");
    }
    PatientPrediction out;
    out.label = model.classLabels[classIndex];
    const auto probabilities = modelProbabilities(model, X);
    if (probabilities) {
        std::vector<std::pair<std::string, double>> list;
        for (std::size_t c = 0; c < model.classLabels.size(); ++c) {
            list.emplace_back(model.classLabels[c],
                              (*probabilities)(0, static_cast<Eigen::Index>(c)));
        }
        out.probabilities = std::move(list);
    }
    return out;
}

Table rowFromPairs(const TrainedModel& model,
                   const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<ColumnSchema> schema;
    std::vector<Column> columns;
    std::vector<std::string> seen;
    for (const auto& [key, value] : pairs) {
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw DataError("duplicate feature '" + key + "'");
        }
        seen.push_back(key);

        bool numeric = false;
        for (const auto& [column, fill] : model.preprocess.imputeValues) {
            if (column == key) {
                numeric = true;
                break;
            }
        }
        bool categorical = false;
        for (const EncoderMap& encoder : model.preprocess.encoders) {
            if (encoder.column == key) {
                categorical = true;
                break;
            }
        }
        if (!numeric && !categorical) {
            throw DataError("unknown feature '" + key + "'");
        }

        ColumnSchema columnSchema;
        columnSchema.name = key;
        Column column;
        column.missing.assign(1, 0);
        if (numeric) {
            double parsed = 0.0;
            if (!tryParseDouble(value, parsed)) {
                throw DataError("feature '" + key + "': cannot parse '" + value +
                                "' as a number");
            }
            columnSchema.kind = ColumnKind::Numeric;
            column.values = std::vector<double>{parsed};
        } else {
            columnSchema.kind = ColumnKind::Categorical;
            column.values = std::vector<std::string>{value};
        }
        schema.push_back(columnSchema);
        columns.push_back(std::move(column));
    }
    return Table::fromColumns(schema, columns);
}

std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw DataError("read from '" + path + "' failed");
    return buffer.str();
}

void writeTextFile(const std::string& path, const std::string& content) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw DataError("write to '" + path + "' failed");
}

std::string resolvePath(const std::string& baseDir, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || baseDir.empty()) return path;
    return (std::filesystem::path(baseDir) / p).lexically_normal().string();
}

}  // namespace tabml
