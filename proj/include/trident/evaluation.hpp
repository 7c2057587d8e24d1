#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trident/core_types.hpp"

namespace trident::eval {

// Binary confusion counts with drone as the positive class.
struct ConfusionMatrix {
    long tp = 0, fp = 0, tn = 0, fn = 0;

    long total() const { return tp + fp + tn + fn; }
    void add(int truth_present, int predicted_present) {
        if (truth_present && predicted_present) ++tp;
        else if (!truth_present && predicted_present) ++fp;
        else if (!truth_present && !predicted_present) ++tn;
        else ++fn;
    }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp; fp += o.fp; tn += o.tn; fn += o.fn;
        return *this;
    }
};

struct MetricsReport {
    // All in percent.
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double macro_f1 = 0.0;
    bool degenerate = false;  // some ratio had a zero denominator
    double detection_time_ms = 0.0;

    struct Slice {
        std::string key;  // e.g. "lighting=daylight"
        ConfusionMatrix cm;
        double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0,
               macro_f1 = 0.0;
    };
    std::vector<Slice> slices;
};

// Exact rational metric arithmetic up to the final double division;
// zero-denominator ratios come back as 0 with the degenerate flag set.
MetricsReport metrics_from_confusion(const ConfusionMatrix& cm);

// Per-condition slicing over (truth, prediction, tags) records.
struct SampleOutcome {
    PresenceFlag truth;
    PresenceFlag predicted;
    ConditionTags tags;
};
MetricsReport evaluate_outcomes(const std::vector<SampleOutcome>& outcomes,
                                ConfusionMatrix* out_cm = nullptr);

// Serialization. The text report uses key: value sections; JSON carries the
// same content machine-readably. Confusion CSV rows use the class-index
// convention (drone = class 0).
std::string report_to_text(const MetricsReport& r, const std::string& title);
std::string report_to_json(const MetricsReport& r, const std::string& title);
std::string confusion_to_csv(const ConfusionMatrix& cm);
void write_text_file(const std::filesystem::path& path, const std::string& body);

}  // namespace trident::eval
