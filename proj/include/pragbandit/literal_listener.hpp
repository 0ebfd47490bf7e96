#pragma once

// Literal (L0) interpretation: instructions are followed when possible,
// descriptions condition a belief over reward hypotheses, and actions are
// chosen by a softmax over belief-expected rewards.

#include "pragbandit/domain.hpp"

#include <Eigen/Core>

#include <vector>

namespace pragbandit {

/// Probability distribution over the 15,625 reward hypotheses, indexed by
/// RewardWeights::index().
class Belief {
public:
    static Belief uniform();
    static Belief delta(const RewardWeights& w);
    /// Normalizes non-negative weights; throws EmptyPosterior if all zero.
    static Belief from_weights(Eigen::VectorXd weights);
    /// Normalizes log-weights with log-sum-exp.
    static Belief from_log_weights(const Eigen::VectorXd& log_weights);

    double prob(int hypothesis) const { return p_[hypothesis]; }
    double prob(const RewardWeights& w) const { return p_[w.index()]; }
    const Eigen::VectorXd& probs() const { return p_; }

    /// E[w] under the belief. Expected rewards are linear in w, so this
    /// summarizes everything a belief-driven policy needs.
    Vector6 feature_means() const;
    double expected_reward(const Action& a) const;

private:
    explicit Belief(Eigen::VectorXd p) : p_(std::move(p)) {}
    Eigen::VectorXd p_;
};

class Policy {
public:
    Policy(State state, std::vector<double> probs);

    const State& state() const { return state_; }
    /// Probabilities aligned with state().actions().
    const std::vector<double>& probs() const { return probs_; }
    /// Zero for actions outside the state.
    double prob(const Action& a) const;
    /// Ties go to the canonically first action.
    Action modal_action() const;
    double expected_reward(const RewardWeights& w) const;

private:
    State state_;
    std::vector<double> probs_;
};

struct ListenerParams {
    double beta_l0 = 3.0;

    void validate() const;
};

Policy instruction_policy(const Utterance& u, const State& s);

/// Exact-equality conditioning on w[feature] == value.
Belief description_update(const Utterance& u, const Belief& prior);

/// pi(a) proportional to exp(beta * E_b[R(a, w)]) over a in s.
Policy belief_policy(const Belief& b, const State& s, const ListenerParams& params);

/// Same policy, from precomputed expected feature weights.
Policy mean_policy(const Vector6& feature_means, const State& s, const ListenerParams& params);

/// Feature means of the uniform prior conditioned on a description: value at
/// the described feature and 0 elsewhere.
Vector6 description_feature_means(const Utterance& u);

Policy literal_policy(const Utterance& u, const State& s, const ListenerParams& params);

}  // namespace pragbandit
