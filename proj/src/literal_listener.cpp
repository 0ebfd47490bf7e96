#include "pragbandit/literal_listener.hpp"

#include "pragbandit/error.hpp"
#include "pragbandit/numeric.hpp"

#include <cmath>

namespace pragbandit {

Belief Belief::uniform() {
    return Belief(Eigen::VectorXd::Constant(kNumHypotheses, 1.0 / kNumHypotheses));
}

Belief Belief::delta(const RewardWeights& w) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(kNumHypotheses);
    p[w.index()] = 1.0;
    return Belief(std::move(p));
}

Belief Belief::from_weights(Eigen::VectorXd weights) {
    if (weights.size() != kNumHypotheses) throw InvalidArgument("belief must cover all hypotheses");
    if ((weights.array() < 0.0).any() || !weights.allFinite())
        throw InvalidArgument("belief weights must be finite and non-negative");
    const double total = weights.sum();
    if (!(total > 0.0)) throw EmptyPosterior("no hypothesis has positive probability");
    weights /= total;
    return Belief(std::move(weights));
}

Belief Belief::from_log_weights(const Eigen::VectorXd& log_weights) {
    if (log_weights.size() != kNumHypotheses) throw InvalidArgument("belief must cover all hypotheses");
    const double lse = log_sum_exp({log_weights.data(), static_cast<std::size_t>(log_weights.size())});
    if (!std::isfinite(lse)) throw EmptyPosterior("no hypothesis has positive probability");
    return Belief((log_weights.array() - lse).exp().matrix());
}

Vector6 Belief::feature_means() const { return hypothesis_matrix().transpose() * p_; }

double Belief::expected_reward(const Action& a) const { return feature_means().dot(a.features()); }

// ------------------------------------------------------------------ Policy

Policy::Policy(State state, std::vector<double> probs) : state_(std::move(state)), probs_(std::move(probs)) {
    if (probs_.size() != state_.size()) throw InvalidArgument("policy size does not match state");
}

double Policy::prob(const Action& a) const {
    const auto pos = state_.position(a);
    return pos ? probs_[*pos] : 0.0;
}

Action Policy::modal_action() const { return state_.actions()[argmax_tied(probs_)]; }

double Policy::expected_reward(const RewardWeights& w) const {
    double r = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) r += probs_[i] * reward(state_.actions()[i], w);
    return r;
}

void ListenerParams::validate() const {
    if (!(beta_l0 > 0.0) || !std::isfinite(beta_l0))
        throw InvalidArgument("beta_L0 must be positive and finite");
}

// --------------------------------------------------------------- semantics

Policy instruction_policy(const Utterance& u, const State& s) {
    const Action target = u.instruction().action;
    std::vector<double> p(s.size(), 1.0 / static_cast<double>(s.size()));
    if (const auto pos = s.position(target)) {
        std::fill(p.begin(), p.end(), 0.0);
        p[*pos] = 1.0;
    }
    return Policy(s, std::move(p));
}

Belief description_update(const Utterance& u, const Belief& prior) {
    const Description& d = u.description();
    const auto& H = hypothesis_matrix();
    Eigen::VectorXd w = prior.probs();
    const int f = index(d.feature);
    for (int h = 0; h < kNumHypotheses; ++h)
        if (H(h, f) != d.value) w[h] = 0.0;
    try {
        return Belief::from_weights(std::move(w));
    } catch (const EmptyPosterior&) {
        throw EmptyPosterior("prior excludes every hypothesis consistent with '" + u.to_string() + "'");
    }
}

Policy mean_policy(const Vector6& feature_means, const State& s, const ListenerParams& params) {
    params.validate();
    std::vector<double> expected;
    expected.reserve(s.size());
    for (const auto& a : s.actions()) expected.push_back(feature_means.dot(a.features()));
    return Policy(s, softmax(expected, params.beta_l0));
}

Policy belief_policy(const Belief& b, const State& s, const ListenerParams& params) {
    return mean_policy(b.feature_means(), s, params);
}

Vector6 description_feature_means(const Utterance& u) {
    const Description& d = u.description();
    Vector6 m = Vector6::Zero();
    m[index(d.feature)] = d.value;
    return m;
}

Policy literal_policy(const Utterance& u, const State& s, const ListenerParams& params) {
    if (u.is_instruction()) return instruction_policy(u, s);
    return mean_policy(description_feature_means(u), s, params);
}

}  // namespace pragbandit
