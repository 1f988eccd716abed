#include <tabml/pipeline.hpp>

#include <tabml/errors.hpp>
#include <tabml/rng.hpp>

#include <json.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace tabml {
namespace {

using nlohmann::json;

const json& requireKey(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw DataError("model file: missing " + where + "." + key);
    }
    return obj.at(key);
}

// Non-finite values (absent-class log priors and intercepts) travel as null.
json numberTo(double value) {
    if (std::isfinite(value)) return json(value);
    return json(nullptr);
}

double numberFrom(const json& value, const std::string& where) {
    if (value.is_null()) return -std::numeric_limits<double>::infinity();
    if (!value.is_number()) throw DataError("model file: " + where + " must be a number");
    return value.get<double>();
}

json vectorTo(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(numberTo(v[i]));
    return arr;
}

Vector vectorFrom(const json& value, const std::string& where) {
    if (!value.is_array()) throw DataError("model file: " + where + " must be an array");
    Vector v(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = numberFrom(value[i], where);
    }
    return v;
}

json matrixTo(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(numberTo(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Matrix matrixFrom(const json& value, const std::string& where) {
    if (!value.is_array()) throw DataError("model file: " + where + " must be an array of rows");
    const auto nRows = static_cast<Eigen::Index>(value.size());
    if (nRows == 0) return Matrix(0, 0);
    if (!value[0].is_array()) {
        throw DataError("model file: " + where + " rows must be arrays");
    }
    const auto nCols = static_cast<Eigen::Index>(value[0].size());
    Matrix m(nRows, nCols);
    for (Eigen::Index r = 0; r < nRows; ++r) {
        const json& row = value[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != nCols) {
            throw DataError("model file: " + where + " rows have inconsistent lengths");
        }
        for (Eigen::Index c = 0; c < nCols; ++c) {
            m(r, c) = numberFrom(row[static_cast<std::size_t>(c)], where);
        }
    }
    return m;
}

std::vector<std::string> stringListFrom(const json& value, const std::string& where) {
    if (!value.is_array()) throw DataError("model file: " + where + " must be an array");
    std::vector<std::string> out;
    for (const json& item : value) {
        if (!item.is_string()) throw DataError("model file: " + where + " must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

Labels labelsFrom(const json& value, const std::string& where) {
    if (!value.is_array()) throw DataError("model file: " + where + " must be an array");
    Labels out;
    for (const json& item : value) {
        if (!item.is_number_integer()) {
            throw DataError("model file: " + where + " must hold integers");
        }
        out.push_back(item.get<int>());
    }
    return out;
}

std::vector<double> doubleListFrom(const json& value, const std::string& where) {
    if (!value.is_array()) throw DataError("model file: " + where + " must be an array");
    std::vector<double> out;
    for (const json& item : value) out.push_back(numberFrom(item, where));
    return out;
}

int intFrom(const json& value, const std::string& where) {
    if (!value.is_number_integer()) throw DataError("model file: " + where + " must be an integer");
    return value.get<int>();
}

// --- Trees (nested node objects) ---------------------------------------------

json treeNodeTo(const TreeModel& tree, int index) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    json value;
    value["histogram"] = node.histogram;
    value["leaf"] = node.leaf;
    if (node.leaf) {
        value["label"] = node.label;
        return value;
    }
    value["feature"] = node.feature;
    value["threshold"] = node.threshold;
    value["left"] = treeNodeTo(tree, node.left);
    value["right"] = treeNodeTo(tree, node.right);
    return value;
}

int treeNodeFrom(const json& value, TreeModel& tree, const std::string& where) {
    if (!value.is_object()) throw DataError("model file: " + where + " must be an object");
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    {
        TreeNode& node = tree.nodes.back();
        node.histogram = doubleListFrom(requireKey(value, "histogram", where), where + ".histogram");
        const json& leaf = requireKey(value, "leaf", where);
        if (!leaf.is_boolean()) throw DataError("model file: " + where + ".leaf must be a boolean");
        node.leaf = leaf.get<bool>();
        if (node.leaf) {
            node.label = intFrom(requireKey(value, "label", where), where + ".label");
            return index;
        }
        node.feature = intFrom(requireKey(value, "feature", where), where + ".feature");
        node.threshold = numberFrom(requireKey(value, "threshold", where), where + ".threshold");
    }
    // Recursion may grow the arena, so re-address the node after each child.
    const int left = treeNodeFrom(requireKey(value, "left", where), tree, where + ".left");
    tree.nodes[static_cast<std::size_t>(index)].left = left;
    const int right = treeNodeFrom(requireKey(value, "right", where), tree, where + ".right");
    tree.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
}

json treeTo(const TreeModel& tree) {
    json value;
    value["n_classes"] = tree.nClasses;
    value["root"] = treeNodeTo(tree, 0);
    return value;
}

TreeModel treeFrom(const json& value, const std::string& where) {
    TreeModel tree;
    tree.nClasses = intFrom(requireKey(value, "n_classes", where), where + ".n_classes");
    treeNodeFrom(requireKey(value, "root", where), tree, where + ".root");
    return tree;
}

// --- Per-kind parameter blocks ------------------------------------------------

json paramsTo(const TrainedModel& model) {
    json params;
    switch (model.kind) {
        case ModelKind::Logistic: {
            const auto& m = std::get<LogisticModel>(model.classic.params);
            params["weights"] = matrixTo(m.weights);
            params["bias"] = vectorTo(m.bias);
            break;
        }
        case ModelKind::Lda: {
            const auto& m = std::get<LdaModel>(model.classic.params);
            params["coef"] = matrixTo(m.coef);
            params["intercept"] = vectorTo(m.intercept);
            break;
        }
        case ModelKind::Knn: {
            const auto& m = std::get<KnnModel>(model.classic.params);
            params["train_x"] = matrixTo(m.trainX);
            params["train_y"] = m.trainY;
            params["k"] = m.k;
            params["p"] = m.p;
            params["n_classes"] = m.nClasses;
            break;
        }
        case ModelKind::NaiveBayes: {
            const auto& m = std::get<NaiveBayesModel>(model.classic.params);
            params["means"] = matrixTo(m.means);
            params["variances"] = matrixTo(m.variances);
            params["log_priors"] = vectorTo(m.logPriors);
            break;
        }
        case ModelKind::DecisionTree: {
            params = treeTo(std::get<TreeModel>(model.classic.params));
            break;
        }
        case ModelKind::RandomForest: {
            const auto& m = std::get<ForestModel>(model.classic.params);
            params["n_classes"] = m.nClasses;
            json trees = json::array();
            for (const TreeModel& tree : m.trees) trees.push_back(treeTo(tree));
            params["trees"] = trees;
            break;
        }
        case ModelKind::Svm: {
            const auto& m = std::get<SvmModel>(model.classic.params);
            params["weights"] = matrixTo(m.weights);
            params["bias"] = vectorTo(m.bias);
            break;
        }
        case ModelKind::Neural: {
            json layers = json::array();
            for (std::size_t l = 0; l < model.network.weights.size(); ++l) {
                json layer;
                layer["weights"] = matrixTo(model.network.weights[l]);
                layer["bias"] = vectorTo(model.network.biases[l]);
                layers.push_back(layer);
            }
            params["layers"] = layers;
            break;
        }
    }
    return params;
}

void paramsFrom(const json& params, TrainedModel& model) {
    const std::string where = "params";
    switch (model.kind) {
        case ModelKind::Logistic: {
            LogisticModel m;
            m.weights = matrixFrom(requireKey(params, "weights", where), "params.weights");
            m.bias = vectorFrom(requireKey(params, "bias", where), "params.bias");
            if (m.bias.size() != m.weights.rows()) {
                throw DataError("model file: params.bias length mismatch");
            }
            model.classic = {ModelKind::Logistic, m};
            break;
        }
        case ModelKind::Lda: {
            LdaModel m;
            m.coef = matrixFrom(requireKey(params, "coef", where), "params.coef");
            m.intercept = vectorFrom(requireKey(params, "intercept", where), "params.intercept");
            if (m.intercept.size() != m.coef.rows()) {
                throw DataError("model file: params.intercept length mismatch");
            }
            model.classic = {ModelKind::Lda, m};
            break;
        }
        case ModelKind::Knn: {
            KnnModel m;
            m.trainX = matrixFrom(requireKey(params, "train_x", where), "params.train_x");
            m.trainY = labelsFrom(requireKey(params, "train_y", where), "params.train_y");
            m.k = intFrom(requireKey(params, "k", where), "params.k");
            m.p = numberFrom(requireKey(params, "p", where), "params.p");
            m.nClasses = intFrom(requireKey(params, "n_classes", where), "params.n_classes");
            if (static_cast<Eigen::Index>(m.trainY.size()) != m.trainX.rows()) {
                throw DataError("model file: params.train_y length mismatch");
            }
            model.classic = {ModelKind::Knn, m};
            break;
        }
        case ModelKind::NaiveBayes: {
            NaiveBayesModel m;
            m.means = matrixFrom(requireKey(params, "means", where), "params.means");
            m.variances = matrixFrom(requireKey(params, "variances", where), "params.variances");
            m.logPriors = vectorFrom(requireKey(params, "log_priors", where), "params.log_priors");
            if (m.variances.rows() != m.means.rows() || m.variances.cols() != m.means.cols() ||
                m.logPriors.size() != m.means.rows()) {
                throw DataError("model file: params class-statistic shape mismatch");
            }
            model.classic = {ModelKind::NaiveBayes, m};
            break;
        }
        case ModelKind::DecisionTree: {
            model.classic = {ModelKind::DecisionTree, treeFrom(params, where)};
            break;
        }
        case ModelKind::RandomForest: {
            ForestModel m;
            m.nClasses = intFrom(requireKey(params, "n_classes", where), "params.n_classes");
            const json& trees = requireKey(params, "trees", where);
            if (!trees.is_array()) throw DataError("model file: params.trees must be an array");
            for (std::size_t t = 0; t < trees.size(); ++t) {
                m.trees.push_back(treeFrom(trees[t], "params.trees[" + std::to_string(t) + "]"));
            }
            model.classic = {ModelKind::RandomForest, m};
            break;
        }
        case ModelKind::Svm: {
            SvmModel m;
            m.weights = matrixFrom(requireKey(params, "weights", where), "params.weights");
            m.bias = vectorFrom(requireKey(params, "bias", where), "params.bias");
            if (m.bias.size() != m.weights.rows()) {
                throw DataError("model file: params.bias length mismatch");
            }
            model.classic = {ModelKind::Svm, m};
            break;
        }
        case ModelKind::Neural: {
            const json& layers = requireKey(params, "layers", where);
            if (!layers.is_array() || layers.empty()) {
                throw DataError("model file: params.layers must be a non-empty array");
            }
            for (std::size_t l = 0; l < layers.size(); ++l) {
                const std::string layerWhere = "params.layers[" + std::to_string(l) + "]";
                Matrix w = matrixFrom(requireKey(layers[l], "weights", layerWhere),
                                      layerWhere + ".weights");
                Vector b = vectorFrom(requireKey(layers[l], "bias", layerWhere),
                                      layerWhere + ".bias");
                if (b.size() != w.rows()) {
                    throw DataError("model file: " + layerWhere + " bias length mismatch");
                }
                if (l > 0 && w.cols() != model.network.weights.back().rows()) {
                    throw DataError("model file: " + layerWhere + " width mismatch");
                }
                model.network.weights.push_back(std::move(w));
                model.network.biases.push_back(std::move(b));
            }
            break;
        }
    }
}

// --- Preprocess state ----------------------------------------------------------

json preprocessTo(const PreprocessState& state) {
    json value;
    json imputes = json::array();
    for (const auto& [column, fill] : state.imputeValues) {
        imputes.push_back({{"column", column}, {"value", fill}});
    }
    value["impute_values"] = imputes;
    json encoders = json::array();
    for (const EncoderMap& encoder : state.encoders) {
        encoders.push_back({{"column", encoder.column},
                            {"categories", encoder.categories},
                            {"mode", encodingModeName(encoder.mode)}});
    }
    value["encoders"] = encoders;
    value["selected_features"] = state.selectedFeatures;
    value["scaling"] = state.scaling;
    if (state.scaling) {
        value["scaler"] = {{"min", vectorTo(state.scaler.min)}, {"max", vectorTo(state.scaler.max)}};
    }
    if (state.pca) {
        value["pca"] = {{"mean", vectorTo(state.pca->mean)},
                        {"components", matrixTo(state.pca->components)},
                        {"eigenvalues", vectorTo(state.pca->eigenvalues)}};
    }
    return value;
}

PreprocessState preprocessFrom(const json& value) {
    const std::string where = "preprocess";
    PreprocessState state;
    const json& imputes = requireKey(value, "impute_values", where);
    if (!imputes.is_array()) throw DataError("model file: preprocess.impute_values must be an array");
    for (const json& item : imputes) {
        state.imputeValues.emplace_back(
            requireKey(item, "column", "preprocess.impute_values").get<std::string>(),
            numberFrom(requireKey(item, "value", "preprocess.impute_values"),
                       "preprocess.impute_values.value"));
    }
    const json& encoders = requireKey(value, "encoders", where);
    if (!encoders.is_array()) throw DataError("model file: preprocess.encoders must be an array");
    for (const json& item : encoders) {
        EncoderMap encoder;
        encoder.column = requireKey(item, "column", "preprocess.encoders").get<std::string>();
        encoder.categories = stringListFrom(requireKey(item, "categories", "preprocess.encoders"),
                                            "preprocess.encoders.categories");
        encoder.mode = encodingModeFromName(
            requireKey(item, "mode", "preprocess.encoders").get<std::string>());
        state.encoders.push_back(std::move(encoder));
    }
    state.selectedFeatures = stringListFrom(requireKey(value, "selected_features", where),
                                            "preprocess.selected_features");
    const json& scaling = requireKey(value, "scaling", where);
    if (!scaling.is_boolean()) throw DataError("model file: preprocess.scaling must be a boolean");
    state.scaling = scaling.get<bool>();
    if (state.scaling) {
        const json& scaler = requireKey(value, "scaler", where);
        state.scaler.min = vectorFrom(requireKey(scaler, "min", "preprocess.scaler"),
                                      "preprocess.scaler.min");
        state.scaler.max = vectorFrom(requireKey(scaler, "max", "preprocess.scaler"),
                                      "preprocess.scaler.max");
        if (state.scaler.min.size() != state.scaler.max.size()) {
            throw DataError("model file: preprocess.scaler min/max length mismatch");
        }
    }
    if (value.contains("pca")) {
        const json& pca = value.at("pca");
        PcaState p;
        p.mean = vectorFrom(requireKey(pca, "mean", "preprocess.pca"), "preprocess.pca.mean");
        p.components = matrixFrom(requireKey(pca, "components", "preprocess.pca"),
                                  "preprocess.pca.components");
        p.eigenvalues = vectorFrom(requireKey(pca, "eigenvalues", "preprocess.pca"),
                                   "preprocess.pca.eigenvalues");
        state.pca = std::move(p);
    }
    return state;
}

}  // namespace

std::string modelToJson(const TrainedModel& model) {
    json root;
    root["schema_version"] = kModelSchemaVersion;
    root["kind"] = modelKindName(model.kind);
    root["class_labels"] = model.classLabels;
    root["preprocess"] = preprocessTo(model.preprocess);
    root["params"] = paramsTo(model);
    root["metadata"]["seed"] = model.seed;
    root["metadata"]["config_digest"] = model.configDigest;
    root["metadata"]["rng_version"] = kRngVersion;
    return root.dump(2) + "\n";
}

TrainedModel modelFromJson(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError("model file: invalid JSON at byte " + std::to_string(e.byte) + ": " +
                        e.what());
    }
    if (!root.is_object()) throw DataError("model file: document must be an object");
    const json& version = requireKey(root, "schema_version", "document");
    if (!version.is_number_integer() || version.get<int>() != kModelSchemaVersion) {
        throw DataError("model file: unsupported schema_version " + version.dump() +
                        "; expected " + std::to_string(kModelSchemaVersion));
    }
    TrainedModel model;
    model.kind = modelKindFromName(requireKey(root, "kind", "document").get<std::string>());
    model.classLabels =
        stringListFrom(requireKey(root, "class_labels", "document"), "class_labels");
    if (model.classLabels.size() < 2) {
        throw DataError("model file: class_labels must hold at least two classes");
    }
    model.preprocess = preprocessFrom(requireKey(root, "preprocess", "document"));
    paramsFrom(requireKey(root, "params", "document"), model);
    const json& metadata = requireKey(root, "metadata", "document");
    const json& seed = requireKey(metadata, "seed", "metadata");
    if (!seed.is_number_unsigned()) throw DataError("model file: metadata.seed must be unsigned");
    model.seed = seed.get<std::uint64_t>();
    model.configDigest = requireKey(metadata, "config_digest", "metadata").get<std::string>();
    return model;
}

void saveModel(const TrainedModel& model, const std::string& path) {
    writeTextFile(path, modelToJson(model));
}

TrainedModel loadModel(const std::string& path) {
    return modelFromJson(readTextFile(path));
}

}  // namespace tabml
