#include <tabml/pipeline.hpp>

#include <tabml/errors.hpp>
#include <tabml/figures.hpp>
#include <tabml/text.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace tabml {
namespace {

using nlohmann::json;

const json& need(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw DataError("report file: missing " + where + "." + key);
    }
    return obj.at(key);
}

json metricsTo(const Metrics& metrics) {
    json value;
    value["accuracy"] = metrics.accuracy;
    json confusion = json::array();
    for (Eigen::Index r = 0; r < metrics.confusion.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < metrics.confusion.cols(); ++c) {
            row.push_back(metrics.confusion(r, c));
        }
        confusion.push_back(row);
    }
    value["confusion"] = confusion;
    value["precision"] = metrics.precision;
    json defined = json::array();
    for (std::uint8_t flag : metrics.precisionDefined) defined.push_back(flag != 0);
    value["precision_defined"] = defined;
    value["macro_precision"] = metrics.macroPrecision;
    return value;
}

Metrics metricsFrom(const json& value, const std::string& where) {
    Metrics metrics;
    metrics.accuracy = need(value, "accuracy", where).get<double>();
    metrics.macroPrecision = need(value, "macro_precision", where).get<double>();
    const json& confusion = need(value, "confusion", where);
    if (!confusion.is_array()) throw DataError("report file: " + where + ".confusion malformed");
    const auto n = static_cast<Eigen::Index>(confusion.size());
    metrics.confusion.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = confusion[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw DataError("report file: " + where + ".confusion must be square");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            metrics.confusion(r, c) = row[static_cast<std::size_t>(c)].get<int>();
        }
    }
    metrics.precision = need(value, "precision", where).get<std::vector<double>>();
    for (const json& flag : need(value, "precision_defined", where)) {
        metrics.precisionDefined.push_back(flag.get<bool>() ? 1 : 0);
    }
    if (metrics.precision.size() != static_cast<std::size_t>(n) ||
        metrics.precisionDefined.size() != static_cast<std::size_t>(n)) {
        throw DataError("report file: " + where + " precision length mismatch");
    }
    return metrics;
}

std::string csvField(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string reportToJson(const EvaluationReport& report) {
    json root;
    root["seed"] = report.seed;
    root["config_digest"] = report.configDigest;
    root["class_labels"] = report.classLabels;
    root["selected_features"] = report.selectedFeatures;
    root["warnings"] = report.warnings;
    json models = json::array();
    for (const ModelResult& model : report.models) {
        json entry;
        entry["name"] = model.name;
        entry["holdout"] = metricsTo(model.holdout);
        json cv;
        cv["fold_accuracies"] = model.foldAccuracies;
        cv["mean"] = model.cvMean;
        cv["std"] = model.cvStd;
        entry["cv"] = cv;
        models.push_back(entry);
    }
    root["models"] = models;
    if (report.pcaPoints.rows() > 0) {
        json points = json::array();
        for (Eigen::Index r = 0; r < report.pcaPoints.rows(); ++r) {
            points.push_back({report.pcaPoints(r, 0), report.pcaPoints(r, 1)});
        }
        root["pca"]["points"] = points;
        root["pca"]["predicted"] = report.pcaPredicted;
        root["pca"]["model"] = report.pcaModel;
    }
    return root.dump(2) + "\n";
}

EvaluationReport reportFromJson(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError("report file: invalid JSON at byte " + std::to_string(e.byte) + ": " +
                        e.what());
    }
    EvaluationReport report;
    report.seed = need(root, "seed", "document").get<std::uint64_t>();
    report.configDigest = need(root, "config_digest", "document").get<std::string>();
    report.classLabels = need(root, "class_labels", "document").get<std::vector<std::string>>();
    report.selectedFeatures =
        need(root, "selected_features", "document").get<std::vector<std::string>>();
    report.warnings = need(root, "warnings", "document").get<std::vector<std::string>>();
    const json& models = need(root, "models", "document");
    if (!models.is_array()) throw DataError("report file: models must be an array");
    for (std::size_t i = 0; i < models.size(); ++i) {
        const std::string where = "models[" + std::to_string(i) + "]";
        const json& entry = models[i];
        ModelResult result;
        result.name = need(entry, "name", where).get<std::string>();
        result.holdout = metricsFrom(need(entry, "holdout", where), where + ".holdout");
        const json& cv = need(entry, "cv", where);
        result.foldAccuracies =
            need(cv, "fold_accuracies", where + ".cv").get<std::vector<double>>();
        result.cvMean = need(cv, "mean", where + ".cv").get<double>();
        result.cvStd = need(cv, "std", where + ".cv").get<double>();
        report.models.push_back(std::move(result));
    }
    if (root.contains("pca")) {
        const json& pca = root.at("pca");
        const json& points = need(pca, "points", "pca");
        report.pcaPoints.resize(static_cast<Eigen::Index>(points.size()), 2);
        for (std::size_t r = 0; r < points.size(); ++r) {
            const json& point = points[r];
            if (!point.is_array() || point.size() != 2) {
                throw DataError("report file: pca.points entries must be [x, y]");
            }
            report.pcaPoints(static_cast<Eigen::Index>(r), 0) = point[0].get<double>();
            report.pcaPoints(static_cast<Eigen::Index>(r), 1) = point[1].get<double>();
        }
        report.pcaPredicted = need(pca, "predicted", "pca").get<Labels>();
        if (report.pcaPredicted.size() != static_cast<std::size_t>(report.pcaPoints.rows())) {
            throw DataError("report file: pca.predicted length mismatch");
        }
        report.pcaModel = need(pca, "model", "pca").get<std::string>();
    }
    return report;
}

std::string reportToCsv(const EvaluationReport& report) {
    std::string out = "model,metric,fold,value\n";
    auto addRow = [&out](const std::string& model, const std::string& metric,
                         const std::string& fold, double value) {
        out += csvField(model) + "," + csvField(metric) + "," + fold + "," +
               formatDouble(value) + "\n";
    };
    for (const ModelResult& model : report.models) {
        addRow(model.name, "holdout_accuracy", "", model.holdout.accuracy);
        addRow(model.name, "macro_precision", "", model.holdout.macroPrecision);
        for (std::size_t c = 0; c < model.holdout.precision.size(); ++c) {
            const std::string label =
                c < report.classLabels.size() ? report.classLabels[c] : std::to_string(c);
            addRow(model.name, "precision:" + label, "", model.holdout.precision[c]);
        }
        for (std::size_t f = 0; f < model.foldAccuracies.size(); ++f) {
            addRow(model.name, "cv_accuracy", std::to_string(f), model.foldAccuracies[f]);
        }
        if (!model.foldAccuracies.empty()) {
            addRow(model.name, "cv_mean", "", model.cvMean);
            addRow(model.name, "cv_std", "", model.cvStd);
        }
    }
    return out;
}

void writeReportFiles(const EvaluationReport& report, const std::string& outputDir) {
    std::filesystem::create_directories(outputDir);
    const std::filesystem::path dir(outputDir);
    writeTextFile((dir / "report.json").string(), reportToJson(report));
    writeTextFile((dir / "report.csv").string(), reportToCsv(report));
    writeTextFile((dir / "accuracy_comparison.svg").string(), accuracyBarChart(report));
    if (report.pcaPoints.rows() > 0) {
        writeTextFile((dir / "pca_scatter.svg").string(),
                      pcaScatterPlot(report.pcaPoints, report.pcaPredicted, report.classLabels));
    }
}

}  // namespace tabml
