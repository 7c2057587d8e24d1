#pragma once

#include <functional>
#include <string>
#include <vector>

namespace trident::bench {

// Wall-clock per-stage latency statistics over repeated runs. Work is pinned
// to a single lane (one OpenMP thread) so numbers are stable.
struct StageStats {
    std::string name;
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
};

struct LatencyReport {
    std::vector<StageStats> stages;
    StageStats end_to_end;
    int iterations = 0;
    int warmup = 0;
    // Preprocessing stages include file access; model/fusion stages run on
    // in-memory tensors only.
    std::string notes;
};

struct Stage {
    std::string name;
    // Called once per iteration with the iteration index.
    std::function<void(int)> run;
};

// Runs `warmup` untimed passes then `iterations` timed passes over the stage
// list in order. iterations must be at least 30 and warmup at least 5.
LatencyReport benchmark_stages(const std::vector<Stage>& stages, int iterations,
                               int warmup);

std::string latency_to_text(const LatencyReport& r);
std::string latency_to_json(const LatencyReport& r);

}  // namespace trident::bench
