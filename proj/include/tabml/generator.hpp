#pragma once

#include <tabml/table.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace tabml {

// Synthetic diabetes-medication cohort: 13 feature columns (one of them a
// patient-name identifier) plus the 'Medications' target over four classes.
// The label follows plantedLabel below, then flips to one of the other three
// classes with probability noiseRate, so the best achievable accuracy is
// exactly 1 - noiseRate.
struct GeneratorSettings {
    std::size_t nRows = 9483;
    double noiseRate = 0.05;
    std::uint64_t seed = 0;
};

// The four medication classes, in planted-rule order.
const std::vector<std::string>& medicationClasses();

// Schema of the generated table: name, kind, and role per column.
std::vector<ColumnSchema> cohortSchema();

// Deterministic decision list over exactly seven of the twelve non-identifier
// features (fasting glucose, two-hour glucose, BMI, duration, kidney disease,
// high cholesterol, heart disease); the remaining five are noise.
std::string plantedLabel(double fasting, double twoHour, double bmi, double duration,
                         bool kidneyDisease, bool highCholesterol, bool heartDisease);

Table generateCohort(const GeneratorSettings& settings);

}  // namespace tabml
