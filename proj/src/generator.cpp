#include <tabml/generator.hpp>

#include <tabml/rng.hpp>

#include <cmath>
#include <cstdio>

namespace tabml {
namespace {

const std::vector<std::string> kMedicationClasses = {
    "Diet and Lifestyle Modification",
    "Secretagogues",
    "Biguanides",
    "Insulin",
};

// Every rule feature is drawn in bands that leave an empty gap around its
// decision thresholds, so the planted labels have clean margins.

// Fasting glucose: thresholds 105, 128, 152, 200; bands [70,100), [110,123),
// [133,147), [157,195), [205,250).
double drawFasting(Xorshift64Star& rng) {
    static const double kBandProbs[5] = {0.30, 0.13, 0.28, 0.15, 0.14};
    static const double kLow[5] = {70.0, 110.0, 133.0, 157.0, 205.0};
    static const double kHigh[5] = {100.0, 123.0, 147.0, 195.0, 250.0};
    const double pick = rng.nextDouble();
    std::size_t band = 4;
    double cumulative = 0.0;
    for (std::size_t b = 0; b < 4; ++b) {
        cumulative += kBandProbs[b];
        if (pick < cumulative) {
            band = b;
            break;
        }
    }
    const double u = rng.nextDouble();
    return kLow[band] + u * (kHigh[band] - kLow[band]);
}

// Two-hour glucose-load response: threshold 230; [95,215) and [245,400).
double drawTwoHour(Xorshift64Star& rng) {
    const bool high = rng.nextDouble() < 0.12;
    const double u = rng.nextDouble();
    return high ? 245.0 + u * 155.0 : 95.0 + u * 120.0;
}

// BMI: threshold 34; [17,32) and [36,45).
double drawBmi(Xorshift64Star& rng) {
    const bool high = rng.nextDouble() < 0.12;
    const double u = rng.nextDouble();
    return high ? 36.0 + u * 9.0 : 17.0 + u * 15.0;
}

// Years since diagnosis: threshold 10; [0,9) and [11,25).
double drawDuration(Xorshift64Star& rng) {
    const bool longStanding = rng.nextDouble() < 0.35;
    const double u = rng.nextDouble();
    return longStanding ? 11.0 + u * 14.0 : u * 9.0;
}

// scale = 1 / step; multiplying first keeps results on clean decimal values.
double roundTo(double value, double scale) { return std::round(value * scale) / scale; }

std::string patientName(std::size_t row) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "P%06zu", row + 1);
    return buffer;
}

}  // namespace

const std::vector<std::string>& medicationClasses() { return kMedicationClasses; }

std::vector<ColumnSchema> cohortSchema() {
    return {
        {"Name of patient", ColumnKind::Categorical, ColumnRole::Identifier},
        {"Fasting", ColumnKind::Numeric, ColumnRole::Feature},
        {"2 Hours after Glucose Load", ColumnKind::Numeric, ColumnRole::Feature},
        {"BMI", ColumnKind::Numeric, ColumnRole::Feature},
        {"Duration", ColumnKind::Numeric, ColumnRole::Feature},
        {"Age", ColumnKind::Numeric, ColumnRole::Feature},
        {"Sex", ColumnKind::Categorical, ColumnRole::Feature},
        {"Blood pressure", ColumnKind::Numeric, ColumnRole::Feature},
        {"Plasma Creatinine", ColumnKind::Numeric, ColumnRole::Feature},
        {"High Cholesterols", ColumnKind::Categorical, ColumnRole::Feature},
        {"Heart Diseases", ColumnKind::Categorical, ColumnRole::Feature},
        {"Kidney Diseases", ColumnKind::Categorical, ColumnRole::Feature},
        {"Blurry Vision", ColumnKind::Categorical, ColumnRole::Feature},
        {"Medications", ColumnKind::Categorical, ColumnRole::Target},
    };
}

std::string plantedLabel(double fasting, double twoHour, double bmi, double duration,
                         bool kidneyDisease, bool highCholesterol, bool heartDisease) {
    // Escalation ladder: the most severe marker decides, and every marker
    // only ever pushes toward a more intensive tier.
    if (kidneyDisease) return kMedicationClasses[3];       // Insulin
    if (fasting >= 200.0) return kMedicationClasses[3];
    if (twoHour >= 230.0) return kMedicationClasses[2];    // Biguanides
    if (bmi >= 34.0) return kMedicationClasses[2];
    if (fasting >= 152.0) return kMedicationClasses[2];
    if (fasting < 105.0) return kMedicationClasses[0];     // Diet and Lifestyle Modification
    if (duration >= 10.0) return kMedicationClasses[1];    // Secretagogues
    if (highCholesterol) return kMedicationClasses[1];
    if (heartDisease) return kMedicationClasses[1];
    if (fasting >= 128.0) return kMedicationClasses[1];
    return kMedicationClasses[0];
}

Table generateCohort(const GeneratorSettings& settings) {
    if (settings.nRows < 1) throw DataError("generateCohort: need at least one row");
    if (!(settings.noiseRate >= 0.0 && settings.noiseRate < 1.0)) {
        throw ConfigError("generateCohort: noise rate must lie in [0, 1)");
    }

    const std::size_t n = settings.nRows;
    std::vector<std::string> names(n);
    std::vector<double> fasting(n);
    std::vector<double> twoHour(n);
    std::vector<double> bmi(n);
    std::vector<double> duration(n);
    std::vector<double> age(n);
    std::vector<std::string> sex(n);
    std::vector<double> bloodPressure(n);
    std::vector<double> creatinine(n);
    std::vector<std::string> highChol(n);
    std::vector<std::string> heartDis(n);
    std::vector<std::string> kidneyDis(n);
    std::vector<std::string> vision(n);
    std::vector<std::string> medications(n);

    Xorshift64Star rng(settings.seed);
    for (std::size_t r = 0; r < n; ++r) {
        names[r] = patientName(r);
        // A fixed number of draws per row, in schema order, so the feature
        // stream is identical across noise rates.
        fasting[r] = roundTo(drawFasting(rng), 1.0);
        twoHour[r] = roundTo(drawTwoHour(rng), 1.0);
        bmi[r] = roundTo(drawBmi(rng), 10.0);
        duration[r] = roundTo(drawDuration(rng), 1.0);
        age[r] = roundTo(rng.nextUniform(25.0, 80.0), 1.0);
        sex[r] = rng.nextBernoulli(0.5) ? "female" : "male";
        bloodPressure[r] = roundTo(rng.nextUniform(90.0, 180.0), 1.0);
        creatinine[r] = roundTo(rng.nextUniform(0.5, 3.0), 100.0);
        highChol[r] = rng.nextBernoulli(0.30) ? "yes" : "no";
        heartDis[r] = rng.nextBernoulli(0.25) ? "yes" : "no";
        kidneyDis[r] = rng.nextBernoulli(0.15) ? "yes" : "no";
        vision[r] = rng.nextBernoulli(0.35) ? "yes" : "no";

        std::string label =
            plantedLabel(fasting[r], twoHour[r], bmi[r], duration[r], kidneyDis[r] == "yes",
                         highChol[r] == "yes", heartDis[r] == "yes");
        // The flip draw is consumed unconditionally, for the same reason.
        const bool flip = rng.nextDouble() < settings.noiseRate;
        const std::uint64_t pick = rng.nextBelow(3);
        if (flip) {
            std::vector<std::string> others;
            for (const std::string& cls : kMedicationClasses) {
                if (cls != label) others.push_back(cls);
            }
            label = others[static_cast<std::size_t>(pick)];
        }
        medications[r] = std::move(label);
    }

    auto numericColumn = [n](std::vector<double> values) {
        Column col;
        col.values = std::move(values);
        col.missing.assign(n, 0);
        return col;
    };
    auto textColumn = [n](std::vector<std::string> values) {
        Column col;
        col.values = std::move(values);
        col.missing.assign(n, 0);
        return col;
    };

    std::vector<Column> columns;
    columns.push_back(textColumn(std::move(names)));
    columns.push_back(numericColumn(std::move(fasting)));
    columns.push_back(numericColumn(std::move(twoHour)));
    columns.push_back(numericColumn(std::move(bmi)));
    columns.push_back(numericColumn(std::move(duration)));
    columns.push_back(numericColumn(std::move(age)));
    columns.push_back(textColumn(std::move(sex)));
    columns.push_back(numericColumn(std::move(bloodPressure)));
    columns.push_back(numericColumn(std::move(creatinine)));
    columns.push_back(textColumn(std::move(highChol)));
    columns.push_back(textColumn(std::move(heartDis)));
    columns.push_back(textColumn(std::move(kidneyDis)));
    columns.push_back(textColumn(std::move(vision)));
    columns.push_back(textColumn(std::move(medications)));
    return Table::fromColumns(cohortSchema(), std::move(columns));
}

}  // namespace tabml
