#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gridsa/scenario_gen.hpp"

namespace gridsa {

struct ConfusionMatrix {
    long tp = 0;
    long fn = 0;
    long fp = 0;
    long tn = 0;
    SecurityLabel positive_class = SecurityLabel::Secure;

    long total() const { return tp + fn + fp + tn; }
};

struct EvalReport {
    ConfusionMatrix confusion;
    double precision = 0.0;
    double recall = 0.0;
    double specificity = 0.0;
    double f1 = 0.0;
    double g_mean = 0.0;
    bool degenerate = false;  // set when any 0/0 denominator was coerced to 0

    std::string to_csv_row() const;
    static std::string csv_header();
    std::string to_json() const;
};

EvalReport evaluate(const std::vector<int>& predictions, const std::vector<int>& labels,
                    SecurityLabel positive_class = SecurityLabel::Secure);

EvalReport evaluate_confusion(const ConfusionMatrix& confusion);

}  // namespace gridsa
