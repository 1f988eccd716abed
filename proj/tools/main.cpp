#include <tabml/errors.hpp>
#include <tabml/pipeline.hpp>
#include <tabml/text.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

using tabml::ConfigError;
using tabml::DataError;

std::string parentDir(const std::string& path) {
    return std::filesystem::path(path).parent_path().string();
}

int runGenerate(std::size_t rows, double noise, std::uint64_t seed, const std::string& outPath,
                const std::string& schemaPath) {
    tabml::GeneratorSettings settings;
    settings.nRows = rows;
    settings.noiseRate = noise;
    settings.seed = seed;
    const tabml::Table cohort = tabml::generateCohort(settings);
    tabml::saveCsv(cohort, outPath);
    std::cout << "wrote " << cohort.rowCount() << " rows to " << outPath << "\n";
    if (!schemaPath.empty()) {
        tabml::writeTextFile(schemaPath, tabml::schemaToJson(tabml::cohortSchema()));
        std::cout << "wrote schema to " << schemaPath << "\n";
    }
    return 0;
}

int runExperimentCommand(const std::string& configPath, const std::string& outDir) {
    const tabml::PipelineConfig config = tabml::loadConfig(configPath);
    const tabml::ExperimentOutput output =
        tabml::runExperiment(config, parentDir(configPath), outDir);
    for (const tabml::ModelResult& result : output.report.models) {
        std::cout << result.name << ": holdout accuracy "
                  << tabml::formatDouble(result.holdout.accuracy);
        if (!result.foldAccuracies.empty()) {
            std::cout << ", cv mean " << tabml::formatDouble(result.cvMean);
        }
        std::cout << "\n";
    }
    return 0;
}

int runTrain(const std::string& configPath, const std::string& kindName,
             const std::string& outPath) {
    const tabml::PipelineConfig config = tabml::loadConfig(configPath);
    const tabml::ModelKind kind = tabml::modelKindFromName(kindName);
    const tabml::TrainedModel model =
        tabml::trainSingleModel(config, parentDir(configPath), kind);
    tabml::saveModel(model, outPath);
    std::cout << "saved " << kindName << " model to " << outPath << "\n";
    return 0;
}

// Types each CSV column from the model's fitted preprocessing state; columns
// the model never saw ride along as ignored identifiers.
tabml::Table loadPatientRow(const tabml::TrainedModel& model, const std::string& rowPath) {
    std::vector<tabml::ColumnSchema> schema;
    for (const std::string& name : tabml::csvHeader(rowPath)) {
        tabml::ColumnSchema column;
        column.name = name;
        column.kind = tabml::ColumnKind::Categorical;
        column.role = tabml::ColumnRole::Identifier;
        for (const auto& [imputeColumn, value] : model.preprocess.imputeValues) {
            if (imputeColumn == name) {
                column.kind = tabml::ColumnKind::Numeric;
                column.role = tabml::ColumnRole::Feature;
            }
        }
        for (const tabml::EncoderMap& encoder : model.preprocess.encoders) {
            if (encoder.column == name) {
                column.kind = tabml::ColumnKind::Categorical;
                column.role = tabml::ColumnRole::Feature;
            }
        }
        schema.push_back(column);
    }
    return tabml::loadCsv(rowPath, schema);
}

int runPredict(const std::string& modelPath, const std::string& rowPath,
               const std::vector<std::string>& setPairs) {
    if (rowPath.empty() == setPairs.empty()) {
        throw ConfigError("predict: pass exactly one of --row or --set");
    }
    const tabml::TrainedModel model = tabml::loadModel(modelPath);

    tabml::Table row;
    if (!rowPath.empty()) {
        row = loadPatientRow(model, rowPath);
    } else {
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const std::string& item : setPairs) {
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw ConfigError("predict: --set expects key=value, got '" + item + "'");
            }
            pairs.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        }
        row = tabml::rowFromPairs(model, pairs);
    }

    const tabml::PatientPrediction prediction = tabml::predictPatient(model, row);
    nlohmann::json out;
    out["label"] = prediction.label;
    if (prediction.probabilities) {
        nlohmann::json probabilities;
        for (const auto& [label, p] : *prediction.probabilities) probabilities[label] = p;
        out["probabilities"] = probabilities;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int runReport(const std::string& inDir) {
    const std::filesystem::path dir(inDir);
    const tabml::EvaluationReport report =
        tabml::reportFromJson(tabml::readTextFile((dir / "report.json").string()));
    tabml::writeReportFiles(report, inDir);
    std::cout << "re-emitted report files in " << inDir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabular medication-classification experiments"};
    app.require_subcommand(1);

    auto* generate = app.add_subcommand("generate", "write a synthetic patient cohort CSV");
    std::size_t rows = 9483;
    double noise = 0.05;
    std::uint64_t seed = 1;
    std::string generateOut;
    std::string generateSchema;
    generate->add_option("--rows", rows, "number of rows");
    generate->add_option("--noise", noise, "label flip probability in [0, 1)");
    generate->add_option("--seed", seed, "generator seed");
    generate->add_option("--out", generateOut, "output CSV path")->required();
    generate->add_option("--schema", generateSchema, "also write the schema JSON here");

    auto* run = app.add_subcommand("run", "run the full experiment from a config file");
    std::string runConfig;
    std::string runOut;
    run->add_option("--config", runConfig, "config JSON path")->required();
    run->add_option("--out", runOut, "output directory (overrides the config)");

    auto* train = app.add_subcommand("train", "train a single model from a config file");
    std::string trainConfig;
    std::string trainModel;
    std::string trainOut;
    train->add_option("--config", trainConfig, "config JSON path")->required();
    train->add_option("--model", trainModel, "model kind to train")->required();
    train->add_option("--out", trainOut, "model file path")->required();

    auto* predict = app.add_subcommand("predict", "predict the medication for one patient row");
    std::string predictModel;
    std::string predictRow;
    std::vector<std::string> predictSet;
    predict->add_option("--model", predictModel, "model file path")->required();
    predict->add_option("--row", predictRow, "single-row CSV path");
    predict->add_option("--set", predictSet, "inline key=value feature");

    auto* report = app.add_subcommand("report", "re-emit report files from report.json");
    std::string reportIn;
    report->add_option("--in", reportIn, "experiment output directory")->required();

    auto* config = app.add_subcommand("config", "config file helpers");
    config->require_subcommand(1);
    auto* configInit = config->add_subcommand("init", "print the default config JSON");

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return runGenerate(rows, noise, seed, generateOut, generateSchema);
        if (run->parsed()) return runExperimentCommand(runConfig, runOut);
        if (train->parsed()) return runTrain(trainConfig, trainModel, trainOut);
        if (predict->parsed()) return runPredict(predictModel, predictRow, predictSet);
        if (report->parsed()) return runReport(reportIn);
        if (configInit->parsed()) {
            std::cout << tabml::configToJson(tabml::defaultConfig());
            return 0;
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const tabml::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
