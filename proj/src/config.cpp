#include <tabml/pipeline.hpp>

#include <tabml/errors.hpp>
#include <tabml/text.hpp>

#include <json.hpp>

#include <cstdint>
#include <initializer_list>
#include <string>

namespace tabml {
namespace {

using nlohmann::json;

void requireObject(const json& value, const std::string& where) {
    if (!value.is_object()) throw ConfigError("config: " + where + " must be an object");
}

void rejectUnknownKeys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
    }
}

std::string getString(const json& obj, const char* key, const std::string& fallback,
                      const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& value = obj.at(key);
    if (!value.is_string()) throw ConfigError("config: " + where + "." + key + " must be a string");
    return value.get<std::string>();
}

double getDouble(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& value = obj.at(key);
    if (!value.is_number()) throw ConfigError("config: " + where + "." + key + " must be a number");
    return value.get<double>();
}

bool getBool(const json& obj, const char* key, bool fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& value = obj.at(key);
    if (!value.is_boolean()) throw ConfigError("config: " + where + "." + key + " must be a boolean");
    return value.get<bool>();
}

std::uint64_t getUnsigned(const json& obj, const char* key, std::uint64_t fallback,
                          const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& value = obj.at(key);
    if (!value.is_number_unsigned()) {
        throw ConfigError("config: " + where + "." + key + " must be a non-negative integer");
    }
    return value.get<std::uint64_t>();
}

ModelEntry modelEntryFromJson(const json& value, std::size_t index) {
    const std::string where = "models[" + std::to_string(index) + "]";
    requireObject(value, where);
    ModelEntry entry;
    entry.kind = modelKindFromName(getString(value, "kind", "", where));
    if (entry.kind == ModelKind::Neural) {
        rejectUnknownKeys(value, {"kind", "hidden_layers", "learning_rate", "epochs", "batch_size"},
                          where);
        if (value.contains("hidden_layers")) {
            const json& layers = value.at("hidden_layers");
            if (!layers.is_array()) {
                throw ConfigError("config: " + where + ".hidden_layers must be an array");
            }
            for (const json& width : layers) {
                if (!width.is_number_unsigned() || width.get<std::uint64_t>() == 0) {
                    throw ConfigError("config: " + where +
                                      ".hidden_layers entries must be positive integers");
                }
                entry.hiddenLayers.push_back(width.get<std::size_t>());
            }
        }
        entry.learningRate = getDouble(value, "learning_rate", entry.learningRate, where);
        if (!(entry.learningRate > 0.0)) {
            throw ConfigError("config: " + where + ".learning_rate must be positive");
        }
        entry.epochs = getUnsigned(value, "epochs", entry.epochs, where);
        entry.batchSize = getUnsigned(value, "batch_size", entry.batchSize, where);
        if (entry.epochs == 0) throw ConfigError("config: " + where + ".epochs must be positive");
        return entry;
    }
    rejectUnknownKeys(value, {"kind", "hyper"}, where);
    entry.hyper = hyperparameterDefaults(entry.kind);
    if (value.contains("hyper")) {
        const json& hyper = value.at("hyper");
        requireObject(hyper, where + ".hyper");
        for (const auto& item : hyper.items()) {
            auto slot = entry.hyper.find(item.key());
            if (slot == entry.hyper.end()) {
                throw ConfigError("config: unknown hyperparameter '" + item.key() + "' for " +
                                  modelKindName(entry.kind));
            }
            if (!item.value().is_number()) {
                throw ConfigError("config: " + where + ".hyper." + item.key() +
                                  " must be a number");
            }
            slot->second = item.value().get<double>();
        }
    }
    return entry;
}

json modelEntryToJson(const ModelEntry& entry) {
    json value;
    value["kind"] = modelKindName(entry.kind);
    if (entry.kind == ModelKind::Neural) {
        value["hidden_layers"] = entry.hiddenLayers;
        value["learning_rate"] = entry.learningRate;
        value["epochs"] = entry.epochs;
        value["batch_size"] = entry.batchSize;
        return value;
    }
    json hyper = json::object();
    std::map<std::string, double> resolved = hyperparameterDefaults(entry.kind);
    for (const auto& [key, val] : entry.hyper) {
        if (resolved.find(key) == resolved.end()) {
            throw ConfigError("config: unknown hyperparameter '" + key + "' for " +
                              modelKindName(entry.kind));
        }
        resolved[key] = val;
    }
    for (const auto& [key, val] : resolved) hyper[key] = val;
    value["hyper"] = hyper;
    return value;
}

}  // namespace

PipelineConfig defaultConfig() {
    PipelineConfig config;
    for (ModelKind kind : {ModelKind::Logistic, ModelKind::Lda, ModelKind::Knn,
                           ModelKind::NaiveBayes, ModelKind::DecisionTree,
                           ModelKind::RandomForest, ModelKind::Svm, ModelKind::Neural}) {
        ModelEntry entry;
        entry.kind = kind;
        if (kind != ModelKind::Neural) entry.hyper = hyperparameterDefaults(kind);
        config.roster.push_back(entry);
    }
    return config;
}

PipelineConfig configFromJson(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: invalid JSON at byte " + std::to_string(e.byte) + ": " +
                          e.what());
    }
    requireObject(root, "document");
    rejectUnknownKeys(root, {"data", "preprocess", "evaluation", "seed", "output_dir", "models"},
                      "document");

    PipelineConfig config = defaultConfig();

    if (root.contains("data")) {
        const json& data = root.at("data");
        requireObject(data, "data");
        rejectUnknownKeys(data, {"source", "csv_path", "schema_path", "rows", "noise"}, "data");
        config.data.source = getString(data, "source", config.data.source, "data");
        if (config.data.source != "generate" && config.data.source != "csv") {
            throw ConfigError("config: data.source must be 'generate' or 'csv'");
        }
        config.data.csvPath = getString(data, "csv_path", config.data.csvPath, "data");
        config.data.schemaPath = getString(data, "schema_path", config.data.schemaPath, "data");
        config.data.rows = getUnsigned(data, "rows", config.data.rows, "data");
        config.data.noise = getDouble(data, "noise", config.data.noise, "data");
        if (config.data.source == "csv") {
            if (config.data.csvPath.empty()) throw ConfigError("config: data.csv_path is required");
            if (config.data.schemaPath.empty()) {
                throw ConfigError("config: data.schema_path is required");
            }
        } else {
            if (config.data.rows == 0) throw ConfigError("config: data.rows must be positive");
            if (!(config.data.noise >= 0.0 && config.data.noise < 1.0)) {
                throw ConfigError("config: data.noise must lie in [0, 1)");
            }
        }
    }

    if (root.contains("preprocess")) {
        const json& pre = root.at("preprocess");
        requireObject(pre, "preprocess");
        rejectUnknownKeys(
            pre, {"imputation", "encoding", "p_threshold", "correlation_threshold", "scaling"},
            "preprocess");
        config.imputation = imputeStrategyFromName(
            getString(pre, "imputation", imputeStrategyName(config.imputation), "preprocess"));
        config.encoding = encodingModeFromName(
            getString(pre, "encoding", encodingModeName(config.encoding), "preprocess"));
        config.pThreshold = getDouble(pre, "p_threshold", config.pThreshold, "preprocess");
        config.corrThreshold =
            getDouble(pre, "correlation_threshold", config.corrThreshold, "preprocess");
        config.scaling = getBool(pre, "scaling", config.scaling, "preprocess");
        if (!(config.pThreshold > 0.0 && config.pThreshold <= 1.0)) {
            throw ConfigError("config: preprocess.p_threshold must lie in (0, 1]");
        }
        if (!(config.corrThreshold > 0.0 && config.corrThreshold <= 1.0)) {
            throw ConfigError("config: preprocess.correlation_threshold must lie in (0, 1]");
        }
    }

    if (root.contains("evaluation")) {
        const json& eval = root.at("evaluation");
        requireObject(eval, "evaluation");
        rejectUnknownKeys(eval, {"test_fraction", "cv_folds"}, "evaluation");
        config.testFraction = getDouble(eval, "test_fraction", config.testFraction, "evaluation");
        config.cvK = getUnsigned(eval, "cv_folds", config.cvK, "evaluation");
        if (!(config.testFraction > 0.0 && config.testFraction < 1.0)) {
            throw ConfigError("config: evaluation.test_fraction must lie in (0, 1)");
        }
        if (config.cvK == 1) {
            throw ConfigError("config: evaluation.cv_folds must be 0 (off) or at least 2");
        }
    }

    config.masterSeed = getUnsigned(root, "seed", config.masterSeed, "document");
    config.outputDir = getString(root, "output_dir", config.outputDir, "document");
    if (config.outputDir.empty()) throw ConfigError("config: output_dir must not be empty");

    if (root.contains("models")) {
        const json& models = root.at("models");
        if (!models.is_array()) throw ConfigError("config: models must be an array");
        if (models.empty()) throw ConfigError("config: models must not be empty");
        config.roster.clear();
        for (std::size_t i = 0; i < models.size(); ++i) {
            config.roster.push_back(modelEntryFromJson(models[i], i));
        }
    }
    return config;
}

std::string configToJson(const PipelineConfig& config) {
    json root;
    root["data"]["source"] = config.data.source;
    root["data"]["csv_path"] = config.data.csvPath;
    root["data"]["schema_path"] = config.data.schemaPath;
    root["data"]["rows"] = config.data.rows;
    root["data"]["noise"] = config.data.noise;
    root["preprocess"]["imputation"] = imputeStrategyName(config.imputation);
    root["preprocess"]["encoding"] = encodingModeName(config.encoding);
    root["preprocess"]["p_threshold"] = config.pThreshold;
    root["preprocess"]["correlation_threshold"] = config.corrThreshold;
    root["preprocess"]["scaling"] = config.scaling;
    root["evaluation"]["test_fraction"] = config.testFraction;
    root["evaluation"]["cv_folds"] = config.cvK;
    root["seed"] = config.masterSeed;
    root["output_dir"] = config.outputDir;
    json models = json::array();
    for (const ModelEntry& entry : config.roster) models.push_back(modelEntryToJson(entry));
    root["models"] = models;
    return root.dump(2) + "\n";
}

PipelineConfig loadConfig(const std::string& path) {
    std::string text;
    try {
        text = readTextFile(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return configFromJson(text);
}

std::string configDigest(const PipelineConfig& config) {
    const std::string canonical = configToJson(config);
    return toHex(fnv1a64(canonical));
}

}  // namespace tabml
