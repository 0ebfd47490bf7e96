#pragma once

#include "pragbandit/harness/config.hpp"
#include "pragbandit/harness/dataset.hpp"
#include "pragbandit/pragmatic_listener.hpp"
#include "pragbandit/social_rl.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pragbandit {

enum class ListenerId { Individual, Literal, KnownH, H1, H4, LatentH };

std::string_view listener_name(ListenerId id);
ListenerId parse_listener(std::string_view name);
bool is_pragmatic(ListenerId id);

/// Literal, Known-H, H=1, H=4, Latent-H.
std::vector<ListenerId> evaluation_listeners();
/// Individual followed by the evaluation listeners.
std::vector<ListenerId> regret_listeners();

/// Listener models sharing one memoized speaker likelihood.
class ListenerBank {
public:
    explicit ListenerBank(const HarnessConfig& cfg);
    ListenerBank(const HarnessConfig& cfg, double beta_s1);

    const HarnessConfig& config() const { return cfg_; }
    const PragmaticListener& pragmatic() const { return *l1_; }

    /// Reward belief a listener holds after hearing u in s. Literal
    /// descriptions condition exactly; literal instructions and the
    /// individual learner carry no reward information (uniform).
    Belief belief(ListenerId id, const Utterance& u, const State& s, int record_horizon) const;

    /// Mean over all start states of the reward the listener's policy earns
    /// under the configured true weights.
    double future_reward(ListenerId id, const Utterance& u, const State& s, int record_horizon) const;
    double belief_future_reward(const Belief& b) const;
    double literal_future_reward(const Utterance& u) const;

    /// Learner driven by this listener's interpretation. Literal
    /// descriptions become soft-conditioned social priors; literal
    /// instructions override the policy when available.
    Learner learner(ListenerId id, const Utterance& u, const State& s, int record_horizon) const;

private:
    HarnessConfig cfg_;
    std::vector<State> states_;
    std::shared_ptr<const PragmaticListener> l1_;
};

// ---------------------------------------------------------------- evaluation

struct EvalRow {
    std::size_t record;
    ListenerId listener;
    double future_reward;
    double pragmatic_gain;  // future_reward minus the literal listener's
};

enum class UtteranceKind { All, Instruction, Description };
std::string_view kind_name(UtteranceKind k);

struct EvalSummaryRow {
    ListenerId listener;
    int horizon;  // 0 pools every horizon
    UtteranceKind kind;
    double mean_future_reward;
    double sd_future_reward;
    double mean_gain;
    double sd_gain;
    std::size_t n;
    double total_weight;
};

struct EvalResult {
    std::vector<EvalRow> rows;
    std::vector<EvalSummaryRow> summary;

    /// Summary lookup; nullopt when the group is empty.
    std::optional<EvalSummaryRow> find(ListenerId id, int horizon = 0, UtteranceKind kind = UtteranceKind::All) const;
};

EvalResult eval_listeners(const std::vector<DatasetRecord>& records, const HarnessConfig& cfg,
                          const std::vector<ListenerId>& listeners = evaluation_listeners());
EvalResult eval_listeners(const std::vector<DatasetRecord>& records, const ListenerBank& bank,
                          const std::vector<ListenerId>& listeners = evaluation_listeners());

void write_eval_rows(std::ostream& out, const std::vector<DatasetRecord>& records, const EvalResult& r);
void write_eval_summary(std::ostream& out, const EvalResult& r);

// -------------------------------------------------------------------- regret

struct RegretEpisodeRow {
    std::size_t record;
    ListenerId listener;
    int trial;
    double cumulative_regret;
};

struct ListenerRegret {
    ListenerId listener;
    std::vector<double> mean_regret;             // per step, weighted over records
    std::vector<double> mean_cumulative_regret;  // per step
    double mean_total;
    double sd_total;
    std::size_t episodes;
};

struct RegretResult {
    std::vector<RegretEpisodeRow> episodes;
    std::vector<ListenerRegret> listeners;
    /// Filled only when traces were requested; aligned with `episodes`.
    std::vector<RegretTrace> traces;

    const ListenerRegret& of(ListenerId id) const;
};

struct RegretOptions {
    std::vector<ListenerId> listeners = regret_listeners();
    bool keep_traces = false;
};

/// cfg.episode.trials episodes per record and listener. Episode seeds depend
/// on (cfg.seed, record, trial) only, so every listener faces the same
/// state sequence.
RegretResult regret_suite(const std::vector<DatasetRecord>& records, const HarnessConfig& cfg,
                          const RegretOptions& opts = {});

void write_regret_episodes(std::ostream& out, const std::vector<DatasetRecord>& records, const RegretResult& r);
void write_regret_curves(std::ostream& out, const RegretResult& r);
void write_regret_summary(std::ostream& out, const RegretResult& r);
/// Columns: record,listener,trial,step,state,action,reward,regret,cumulative_regret.
void write_regret_traces(std::ostream& out, const RegretResult& r);

// -------------------------------------------------------------------- sweep

struct SweepOptions {
    std::vector<Horizon> horizons;
    std::vector<int> state_sizes = {3};
    std::vector<std::string> utterance_sets = {"instructions", "descriptions", "full"};
    /// Speaker betas; +inf selects the argmax speaker.
    std::vector<double> betas = {10.0};
};

struct SweepRow {
    double beta;
    Horizon horizon;
    int state_size;
    std::string utterances;
    double mean_reward;   // horizon-weighted
    double mean_present;
    double mean_future;
    double instruction_probability;
    std::size_t states;
};

/// Speaker rewards averaged uniformly over every start state of each size.
std::vector<SweepRow> speaker_sweep(const HarnessConfig& cfg, const SweepOptions& opts);
void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows);

// --------------------------------------------------------------- calibration

struct CalibrationResult {
    std::vector<ListenerId> listeners;
    std::vector<double> betas;
    /// means[i][j]: mean future reward of listeners[j] at betas[i].
    std::vector<std::vector<double>> means;
    /// Per listener, the first beta with the highest mean.
    std::vector<double> best_beta;
};

CalibrationResult calibrate_beta(const std::vector<DatasetRecord>& records, const std::vector<double>& grid,
                                 const HarnessConfig& cfg,
                                 const std::vector<ListenerId>& listeners = {ListenerId::KnownH, ListenerId::LatentH});
void write_calibration(std::ostream& out, const CalibrationResult& r);

// ----------------------------------------------------------------- posterior

/// Literal belief (descriptions only), latent-horizon feature and horizon
/// marginals, per-action expected rewards and policy in s, and the modal
/// action.
nlohmann::ordered_json posterior_report(const Utterance& u, const State& s, const HarnessConfig& cfg);

}  // namespace pragbandit
