#pragma once

// Speaker datasets: one utterance per (participant, trial), produced either
// by people or by the simulated speaker.
//
// CSV schema (header required, column order free):
//   participant_id,trial,horizon,action1,action2,action3,utterance
// An optional attention_check column marks rows that are dropped on load.
// Simulated datasets add a `weight` column holding the speaker probability.

#include "pragbandit/domain.hpp"
#include "pragbandit/harness/config.hpp"

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace pragbandit {

struct DatasetRecord {
    std::string participant_id;
    int trial = 0;
    int horizon = 1;
    State state;
    Utterance utterance;
    /// Contribution to weighted means: 1 for observed utterances, the speaker
    /// probability for expectation-style simulated records.
    double weight = 1.0;
};

struct LoadOptions {
    /// Accept any horizon >= 1 instead of the experiment's {1, 2, 4}.
    bool any_horizon = false;
};

inline constexpr int kExperimentHorizons[] = {1, 2, 4};

/// Parses a dataset; errors carry "source:line". Rows flagged by a truthy
/// attention_check column are skipped.
std::vector<DatasetRecord> read_dataset(std::istream& in, const std::string& source, LoadOptions opts = {});
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, LoadOptions opts = {});

void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records);

struct SimulationOptions {
    std::vector<int> horizons = {1, 2, 4};
    /// 0: one record per (horizon, state, utterance) weighted by the speaker
    /// probability. n > 0: n sampled utterances per (horizon, state), each
    /// weighted 1.
    int samples_per_state = 0;
};

/// Runs the speaker (cfg.beta_s1, cfg.utterances, cfg.true_weights) on every
/// start state of cfg.state_size for each horizon.
std::vector<DatasetRecord> simulate_dataset(const HarnessConfig& cfg, const SimulationOptions& opts = {});

}  // namespace pragbandit
