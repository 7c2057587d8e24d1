#include "trident/evaluation.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace trident::eval {

namespace {

struct Ratio {
    double value = 0.0;
    bool degenerate = false;
};

Ratio ratio(long num, long den) {
    if (den == 0) return {0.0, true};
    return {static_cast<double>(num) / static_cast<double>(den), false};
}

Ratio f1_from(Ratio p, Ratio r) {
    if (p.degenerate || r.degenerate || p.value + r.value == 0.0)
        return {0.0, true};
    return {2.0 * p.value * r.value / (p.value + r.value), false};
}

void fill_basic(const ConfusionMatrix& cm, double& acc, double& prec,
                double& rec, double& f1, double& macro, bool* degenerate) {
    const Ratio a = ratio(cm.tp + cm.tn, cm.total());
    const Ratio p = ratio(cm.tp, cm.tp + cm.fp);
    const Ratio r = ratio(cm.tp, cm.tp + cm.fn);
    const Ratio f = f1_from(p, r);
    // Negative class treated as positive for the macro average.
    const Ratio pn = ratio(cm.tn, cm.tn + cm.fn);
    const Ratio rn = ratio(cm.tn, cm.tn + cm.fp);
    const Ratio fn = f1_from(pn, rn);

    acc = 100.0 * a.value;
    prec = 100.0 * p.value;
    rec = 100.0 * r.value;
    f1 = 100.0 * f.value;
    macro = 100.0 * 0.5 * (f.value + fn.value);
    if (degenerate)
        *degenerate = a.degenerate || p.degenerate || r.degenerate ||
                      f.degenerate || fn.degenerate;
}

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw std::invalid_argument("empty confusion matrix");
    MetricsReport r;
    fill_basic(cm, r.accuracy, r.precision, r.recall, r.f1, r.macro_f1,
               &r.degenerate);
    return r;
}

MetricsReport evaluate_outcomes(const std::vector<SampleOutcome>& outcomes,
                                ConfusionMatrix* out_cm) {
    ConfusionMatrix cm;
    for (const auto& o : outcomes) cm.add(o.truth.value, o.predicted.value);
    MetricsReport report = metrics_from_confusion(cm);
    if (out_cm) *out_cm = cm;

    auto add_slice = [&](const std::string& key, auto pred) {
        ConfusionMatrix scm;
        for (const auto& o : outcomes)
            if (pred(o.tags)) scm.add(o.truth.value, o.predicted.value);
        if (scm.total() == 0) return;
        MetricsReport::Slice s;
        s.key = key;
        s.cm = scm;
        fill_basic(scm, s.accuracy, s.precision, s.recall, s.f1, s.macro_f1,
                   nullptr);
        report.slices.push_back(std::move(s));
    };
    add_slice("lighting=daylight",
              [](const ConditionTags& t) { return t.lighting == Lighting::daylight; });
    add_slice("lighting=sunset",
              [](const ConditionTags& t) { return t.lighting == Lighting::sunset; });
    add_slice("location=urban",
              [](const ConditionTags& t) { return t.location == Location::urban; });
    add_slice("location=non_urban",
              [](const ConditionTags& t) { return t.location == Location::non_urban; });
    return report;
}

namespace {

void append_metrics(std::ostringstream& out, double acc, double prec,
                    double rec, double f1, double macro,
                    const ConfusionMatrix& cm) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "accuracy: %.2f\nprecision: %.2f\nrecall: %.2f\nf1: %.2f\n"
                  "macro_f1: %.2f\n",
                  acc, prec, rec, f1, macro);
    out << buf;
    out << "tp: " << cm.tp << "\nfp: " << cm.fp << "\ntn: " << cm.tn
        << "\nfn: " << cm.fn << "\n";
}

}  // namespace

std::string report_to_text(const MetricsReport& r, const std::string& title) {
    std::ostringstream out;
    out << "[" << title << "]\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "accuracy: %.2f\nprecision: %.2f\nrecall: %.2f\nf1: %.2f\n"
                  "macro_f1: %.2f\ndegenerate: %s\n",
                  r.accuracy, r.precision, r.recall, r.f1, r.macro_f1,
                  r.degenerate ? "true" : "false");
    out << buf;
    if (r.detection_time_ms > 0.0) {
        std::snprintf(buf, sizeof(buf), "detection_time_ms: %.3f\n",
                      r.detection_time_ms);
        out << buf;
    }
    for (const auto& s : r.slices) {
        out << "\n[" << title << " / " << s.key << "]\n";
        append_metrics(out, s.accuracy, s.precision, s.recall, s.f1, s.macro_f1,
                       s.cm);
    }
    return out.str();
}

std::string report_to_json(const MetricsReport& r, const std::string& title) {
    nlohmann::json j;
    j["title"] = title;
    j["accuracy"] = r.accuracy;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["macro_f1"] = r.macro_f1;
    j["degenerate"] = r.degenerate;
    if (r.detection_time_ms > 0.0) j["detection_time_ms"] = r.detection_time_ms;
    nlohmann::json slices = nlohmann::json::object();
    for (const auto& s : r.slices) {
        nlohmann::json js;
        js["accuracy"] = s.accuracy;
        js["precision"] = s.precision;
        js["recall"] = s.recall;
        js["f1"] = s.f1;
        js["macro_f1"] = s.macro_f1;
        js["confusion"] = {{"tp", s.cm.tp}, {"fp", s.cm.fp}, {"tn", s.cm.tn},
                           {"fn", s.cm.fn}};
        slices[s.key] = js;
    }
    j["slices"] = slices;
    return j.dump(2) + "\n";
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
    // Rows/cols in class-index order: drone = class 0, no-drone = class 1.
    std::ostringstream out;
    out << "actual\\predicted,drone,no_drone\n";
    out << "drone," << cm.tp << "," << cm.fn << "\n";
    out << "no_drone," << cm.fp << "," << cm.tn << "\n";
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << body;
    if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace trident::eval
