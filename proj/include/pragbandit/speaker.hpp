#pragma once

// Reward-maximizing speaker. Utterance utility mixes the literal listener's
// reward in the current state with its expected reward over future states,
// weighted by the speaker's horizon.

#include "pragbandit/domain.hpp"
#include "pragbandit/literal_listener.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pragbandit {

/// Number of i.i.d. states the listener acts in, or unbounded.
class Horizon {
public:
    static Horizon finite(int h);
    static Horizon infinite() { return Horizon(0); }
    /// Accepts positive integers and "inf".
    static Horizon parse(std::string_view text);

    bool is_infinite() const { return h_ == 0; }
    int value() const;
    /// Weight on present utility: 1/H, or 0 when unbounded.
    double present_weight() const { return is_infinite() ? 0.0 : 1.0 / h_; }
    std::string to_string() const;

    friend bool operator==(const Horizon&, const Horizon&) = default;

private:
    explicit Horizon(int h) : h_(h) {}
    int h_;
};

struct SpeakerParams {
    /// Softmax inverse temperature. 0 gives a uniform speaker and +inf an
    /// argmax speaker (ties split evenly).
    double beta_s1 = 10.0;
    Horizon horizon = Horizon::finite(1);
    UtteranceSet utterances = UtteranceSet::full39();
    int state_size = 3;
    /// P(s) over enumerate_states(state_size); empty means uniform.
    std::vector<double> state_weights;
    ListenerParams listener;

    void validate() const;
};

/// Sum over a in s of pi_L0(a | u, s) R(a, w).
double present_utility(const Utterance& u, const State& s, const RewardWeights& w,
                       const ListenerParams& params);

/// Present utility averaged over all states of the given size (uniform P(s)).
double future_utility(const Utterance& u, const RewardWeights& w, const ListenerParams& params,
                      int state_size = 3);

/// (1/H) present + (1 - 1/H) future.
double combined_utility(double present, double future, Horizon h);
double combined_utility(const Utterance& u, const State& s, const RewardWeights& w, Horizon h,
                        const ListenerParams& params, int state_size = 3);

/// rho(u, s) = sum_a pi_L0(a | u, s) phi(a); present utility is w . rho.
Vector6 policy_feature_expectation(const Utterance& u, const State& s, const ListenerParams& params);

/// psi(u) = sum_s P(s) rho(u, s); future utility is w . psi. Empty weights
/// mean uniform P(s).
Vector6 future_feature_expectation(const Utterance& u, const ListenerParams& params, int state_size,
                                   const std::vector<double>& state_weights = {});

class UtteranceDistribution {
public:
    UtteranceDistribution(UtteranceSet utterances, std::vector<double> probs);

    const UtteranceSet& utterances() const { return utterances_; }
    const std::vector<double>& probs() const { return probs_; }
    /// Zero for utterances outside the set.
    double prob(const Utterance& u) const;
    const Utterance& modal() const;

private:
    UtteranceSet utterances_;
    std::vector<double> probs_;
};

/// Speaker with the future-feature table (psi) precomputed for its utterance
/// set and state size. Immutable after construction.
class SpeakerModel {
public:
    explicit SpeakerModel(SpeakerParams params);

    const SpeakerParams& params() const { return params_; }
    const UtteranceSet& utterances() const { return params_.utterances; }
    /// Column i is psi of utterance i.
    const Eigen::Matrix<double, kNumFeatures, Eigen::Dynamic>& future_features() const { return psi_; }

    /// Column i holds the utility coefficients c with U(u_i, w) = w . c.
    Eigen::Matrix<double, kNumFeatures, Eigen::Dynamic> utility_coefficients(const State& s,
                                                                             Horizon h) const;
    Eigen::Matrix<double, kNumFeatures, Eigen::Dynamic> present_features(const State& s) const;

    std::vector<double> utilities(const State& s, const RewardWeights& w, Horizon h) const;
    double future_utility(std::size_t utterance_index, const RewardWeights& w) const;

    UtteranceDistribution distribution(const State& s, const RewardWeights& w) const;
    UtteranceDistribution distribution(const State& s, const RewardWeights& w, Horizon h) const;

private:
    SpeakerParams params_;
    Eigen::Matrix<double, kNumFeatures, Eigen::Dynamic> psi_;
};

UtteranceDistribution utterance_distribution(const State& s, const RewardWeights& w,
                                             const SpeakerParams& params);

Utterance sample_utterance(const UtteranceDistribution& dist, std::mt19937_64& rng);
Utterance sample_utterance(const UtteranceDistribution& dist, std::uint64_t seed);

}  // namespace pragbandit
