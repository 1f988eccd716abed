#include <tabml/figures.hpp>

#include <tabml/errors.hpp>
#include <tabml/text.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace tabml {
namespace {

const std::vector<std::string> kPalette = {
    "#4878a8", "#e1812c", "#3a923a", "#c03d3e",
    "#9372b2", "#845b53", "#d684bd", "#7f7f7f",
};

// Fixed-precision coordinate text keeps the files byte-stable.
std::string num(double value, double step = 0.01) {
    return formatDouble(std::round(value / step) * step);
}

std::string xmlEscape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string svgText(double x, double y, const std::string& text, const std::string& attrs) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" " + attrs + ">" +
           xmlEscape(text) + "</text>\n";
}

}  // namespace

std::string accuracyBarChart(const EvaluationReport& report) {
    if (report.models.empty()) throw DataError("accuracyBarChart: empty report");

    std::vector<const ModelResult*> ordered;
    for (const ModelResult& model : report.models) ordered.push_back(&model);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ModelResult* a, const ModelResult* b) {
                         if (a->holdout.accuracy != b->holdout.accuracy) {
                             return a->holdout.accuracy > b->holdout.accuracy;
                         }
                         return a->name < b->name;
                     });

    const double left = 62.0;
    const double right = 620.0;
    const double top = 46.0;
    const double bottom = 320.0;
    const double plotWidth = right - left;
    const double plotHeight = bottom - top;
    const double slot = plotWidth / static_cast<double>(ordered.size());

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\">\n";
    svg += "<rect width=\"640\" height=\"400\" fill=\"#ffffff\"/>\n";
    svg += svgText(320, 24, "Holdout accuracy by model",
                   "font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\" "
                   "fill=\"#222222\"");

    for (int tick = 0; tick <= 5; ++tick) {
        const double value = tick * 0.2;
        const double y = bottom - value * plotHeight;
        svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(right) +
               "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += svgText(left - 8, y + 4, num(value, 0.1),
                       "font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" "
                       "fill=\"#555555\"");
    }

    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const ModelResult& model = *ordered[i];
        const double accuracy = model.holdout.accuracy;
        const double x = left + slot * (static_cast<double>(i) + 0.2);
        const double barWidth = slot * 0.6;
        const double barHeight = accuracy * plotHeight;
        const double y = bottom - barHeight;
        svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(barWidth) +
               "\" height=\"" + num(barHeight) + "\" fill=\"" +
               kPalette[i % kPalette.size()] + "\"/>\n";
        svg += svgText(x + barWidth / 2.0, y - 6, num(accuracy, 0.001),
                       "font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" "
                       "fill=\"#222222\"");
        const double labelX = x + barWidth / 2.0;
        svg += "<text x=\"" + num(labelX) + "\" y=\"" + num(bottom + 14) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" "
               "fill=\"#222222\" transform=\"rotate(-30 " +
               num(labelX) + " " + num(bottom + 14) + ")\">" + xmlEscape(model.name) +
               "</text>\n";
    }

    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(right) +
           "\" y2=\"" + num(bottom) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "</svg>\n";
    return svg;
}

std::string pcaScatterPlot(const Matrix& points, const Labels& predicted,
                           const std::vector<std::string>& classNames) {
    if (points.rows() != static_cast<Eigen::Index>(predicted.size())) {
        throw DataError("pcaScatterPlot: point/label count mismatch");
    }
    if (points.cols() < 2) throw DataError("pcaScatterPlot: need two components");

    const double left = 56.0;
    const double right = 470.0;
    const double top = 44.0;
    const double bottom = 430.0;

    double minX = 0.0;
    double maxX = 1.0;
    double minY = 0.0;
    double maxY = 1.0;
    if (points.rows() > 0) {
        minX = points.col(0).minCoeff();
        maxX = points.col(0).maxCoeff();
        minY = points.col(1).minCoeff();
        maxY = points.col(1).maxCoeff();
    }
    const double padX = (maxX - minX) > 0.0 ? 0.05 * (maxX - minX) : 1.0;
    const double padY = (maxY - minY) > 0.0 ? 0.05 * (maxY - minY) : 1.0;
    minX -= padX;
    maxX += padX;
    minY -= padY;
    maxY += padY;

    auto mapX = [&](double v) { return left + (v - minX) / (maxX - minX) * (right - left); };
    auto mapY = [&](double v) { return bottom - (v - minY) / (maxY - minY) * (bottom - top); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"480\" "
           "viewBox=\"0 0 680 480\">\n";
    svg += "<rect width=\"680\" height=\"480\" fill=\"#ffffff\"/>\n";
    svg += svgText(263, 24, "Test rows in the first two principal components",
                   "font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\" "
                   "fill=\"#222222\"");
    svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" +
           num(right - left) + "\" height=\"" + num(bottom - top) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += svgText((left + right) / 2.0, 462, "component 1",
                   "font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                   "fill=\"#555555\"");
    svg += "<text x=\"20\" y=\"" + num((top + bottom) / 2.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
           "fill=\"#555555\" transform=\"rotate(-90 20 " +
           num((top + bottom) / 2.0) + ")\">component 2</text>\n";

    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        const auto cls = static_cast<std::size_t>(predicted[static_cast<std::size_t>(r)]);
        svg += "<circle cx=\"" + num(mapX(points(r, 0))) + "\" cy=\"" +
               num(mapY(points(r, 1))) + "\" r=\"3\" fill=\"" +
               kPalette[cls % kPalette.size()] + "\" fill-opacity=\"0.7\"/>\n";
    }

    for (std::size_t c = 0; c < classNames.size(); ++c) {
        const double y = 60.0 + 22.0 * static_cast<double>(c);
        svg += "<rect x=\"486\" y=\"" + num(y - 9) +
               "\" width=\"12\" height=\"12\" fill=\"" + kPalette[c % kPalette.size()] +
               "\"/>\n";
        svg += svgText(504, y + 2, classNames[c],
                       "font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"start\" "
                       "fill=\"#222222\"");
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace tabml
