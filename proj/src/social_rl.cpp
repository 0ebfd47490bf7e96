#include "pragbandit/social_rl.hpp"

#include "pragbandit/error.hpp"
#include "pragbandit/rng.hpp"

#include <cmath>
#include <iostream>
#include <numeric>

namespace pragbandit {

GaussianBelief GaussianBelief::isotropic(double variance) {
    if (!(variance > 0.0)) throw InvalidArgument("prior variance must be positive");
    return {Vector6::Zero(), variance * Matrix6::Identity()};
}

void GaussianBelief::validate() const {
    if (!mean.allFinite() || !covariance.allFinite())
        throw NumericalDegeneracy("Gaussian belief has non-finite entries");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw NumericalDegeneracy("covariance is not symmetric");
    Eigen::LLT<Matrix6> llt(covariance);
    if (llt.info() != Eigen::Success) throw NumericalDegeneracy("covariance is not positive-definite");
}

GaussianBelief bayes_update(const GaussianBelief& b, const Action& a, double observed_reward,
                            double noise_variance) {
    b.validate();
    if (!(noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
    // Rank-one form of (S^-1 + phi phi'/s2)^-1.
    const Vector6 phi = a.features();
    const Vector6 s_phi = b.covariance * phi;
    const double denom = noise_variance + phi.dot(s_phi);
    GaussianBelief out;
    out.mean = b.mean + s_phi * ((observed_reward - phi.dot(b.mean)) / denom);
    out.covariance = b.covariance - (s_phi * s_phi.transpose()) / denom;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    out.validate();
    return out;
}

std::optional<RewardWeights> discretize(const Vector6& continuous) {
    std::array<int, kNumFeatures> w{};
    for (int f = 0; f < kNumFeatures; ++f) {
        const double r = std::round(continuous[f]);  // half away from zero
        if (!(r >= kMinWeight && r <= kMaxWeight)) return std::nullopt;
        w[f] = static_cast<int>(r);
    }
    return RewardWeights(w);
}

GaussianSampler::GaussianSampler(const GaussianBelief& b) : mean_(b.mean) {
    b.validate();
    factor_ = Eigen::LLT<Matrix6>(b.covariance).matrixL();
}

Vector6 GaussianSampler::operator()(std::mt19937_64& rng) const {
    std::normal_distribution<double> z;
    Vector6 x;
    for (int f = 0; f < kNumFeatures; ++f) x[f] = z(rng);
    return mean_ + factor_ * x;
}

RewardWeights thompson_draw(const GaussianSampler& sampler, std::mt19937_64& rng, int max_attempts) {
    for (int i = 0; i < max_attempts; ++i)
        if (auto w = discretize(sampler(rng))) return *w;
    throw RejectionExhausted("no in-range weight vector after " + std::to_string(max_attempts) +
                             " draws");
}

RewardWeights thompson_draw(const GaussianBelief& b, std::mt19937_64& rng, int max_attempts) {
    return thompson_draw(GaussianSampler(b), rng, max_attempts);
}

void EpisodeConfig::validate() const {
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (state_size < 1 || state_size > kNumActions) throw InvalidArgument("state size must be in [1, 9]");
    if (min_importance_samples < 1) throw InvalidArgument("min_importance_samples must be >= 1");
    if (!(epsilon_soft > 0.0 && epsilon_soft < 1.0)) throw InvalidArgument("epsilon_soft must be in (0, 1)");
    if (!(prior_variance > 0.0)) throw InvalidArgument("prior variance must be positive");
    if (!(noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
    if (max_rejection_attempts < 1) throw InvalidArgument("max_rejection_attempts must be >= 1");
}

RewardWeights importance_draw(const GaussianSampler& sampler, const SocialPrior& social,
                              const EpisodeConfig& cfg, std::mt19937_64& rng) {
    if (!social.belief) throw InvalidArgument("importance sampling needs a social belief");
    std::vector<RewardWeights> draws;
    std::vector<double> weights;
    draws.reserve(cfg.min_importance_samples);
    weights.reserve(cfg.min_importance_samples);
    double total = 0.0;
    for (int i = 0; i < cfg.min_importance_samples; ++i) {
        draws.push_back(thompson_draw(sampler, rng, cfg.max_rejection_attempts));
        weights.push_back(social.belief->prob(draws.back()));
        total += weights.back();
    }
    if (!(total > 0.0)) {
        std::clog << "warning: every importance weight is zero; using an unweighted draw\n";
        std::fill(weights.begin(), weights.end(), 1.0);
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return draws[pick(rng)];
}

RewardWeights importance_draw(const GaussianBelief& b, const SocialPrior& social,
                              const EpisodeConfig& cfg, std::mt19937_64& rng) {
    return importance_draw(GaussianSampler(b), social, cfg, rng);
}

Belief soft_condition(const Utterance& u, const Belief& prior, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must be in (0, 1)");
    const Description& d = u.description();
    const auto& H = hypothesis_matrix();
    const int f = index(d.feature);
    Eigen::VectorXd w = prior.probs();
    for (int h = 0; h < kNumHypotheses; ++h)
        if (H(h, f) != d.value) w[h] *= epsilon;
    return Belief::from_weights(std::move(w));
}

Belief soft_condition(const Utterance& u, double epsilon) {
    return soft_condition(u, Belief::uniform(), epsilon);
}

// ---------------------------------------------------------------- episodes

double RegretTrace::cumulative_regret() const {
    double total = 0.0;
    for (const auto& s : steps) total += s.regret;
    return total;
}

std::vector<double> RegretTrace::cumulative_curve() const {
    std::vector<double> c;
    c.reserve(steps.size());
    double total = 0.0;
    for (const auto& s : steps) c.push_back(total += s.regret);
    return c;
}

namespace {

// Canonical order breaks ties: the state keeps actions sorted by id.
Action greedy_action(const State& s, const Vector6& weights) {
    const auto& acts = s.actions();
    std::size_t best = 0;
    double best_value = weights.dot(acts[0].features());
    for (std::size_t i = 1; i < acts.size(); ++i) {
        const double v = weights.dot(acts[i].features());
        if (v > best_value) best = i, best_value = v;
    }
    return acts[best];
}

}  // namespace

RegretTrace run_episode(const Learner& learner, const RewardWeights& true_w, const EpisodeConfig& cfg,
                        std::uint64_t seed) {
    cfg.validate();
    if ((learner.mode == Learner::Mode::Social || learner.mode == Learner::Mode::SocialGreedy) &&
        !learner.social.belief)
        throw InvalidArgument("social learner needs a social belief");
    if (learner.mode == Learner::Mode::InstructionOverride && !learner.instruction)
        throw InvalidArgument("instruction-following learner needs an instruction");

    const auto states = enumerate_states(cfg.state_size);
    std::mt19937_64 state_rng(child_seed(seed, {0}));
    std::mt19937_64 rng(child_seed(seed, {1}));
    std::uniform_int_distribution<std::size_t> pick_state(0, states.size() - 1);
    std::normal_distribution<double> noise(0.0, std::sqrt(cfg.noise_variance));

    const Vector6 social_means =
        learner.social.belief ? learner.social.belief->feature_means() : Vector6::Zero();

    GaussianBelief belief = GaussianBelief::isotropic(cfg.prior_variance);
    RegretTrace trace;
    trace.steps.reserve(cfg.steps);
    for (int t = 0; t < cfg.steps; ++t) {
        const State& s = states[pick_state(state_rng)];

        std::optional<Action> chosen;
        switch (learner.mode) {
            case Learner::Mode::InstructionOverride:
                if (s.contains(*learner.instruction)) chosen = *learner.instruction;
                break;
            case Learner::Mode::SocialGreedy:
                chosen = greedy_action(s, social_means);
                break;
            default:
                break;
        }
        if (!chosen) {
            const GaussianSampler sampler(belief);
            const RewardWeights w = learner.mode == Learner::Mode::Social
                                        ? importance_draw(sampler, learner.social, cfg, rng)
                                        : thompson_draw(sampler, rng, cfg.max_rejection_attempts);
            chosen = greedy_action(s, w.as_vector());
        }

        const int expected = reward(*chosen, true_w);
        const double observed = expected + noise(rng);
        belief = bayes_update(belief, *chosen, observed, cfg.noise_variance);
        const int best = max_reward(s, true_w);
        trace.steps.push_back({s, *chosen, observed, expected, best, static_cast<double>(best - expected)});
    }
    return trace;
}

RegretSummary regret_summary(std::span<const RegretTrace> traces) {
    if (traces.empty()) throw InvalidArgument("regret summary needs at least one trace");
    const std::size_t steps = traces.front().steps.size();
    RegretSummary out;
    out.trials = traces.size();
    out.mean_regret.assign(steps, 0.0);
    out.mean_cumulative_regret.assign(steps, 0.0);
    std::vector<double> totals;
    totals.reserve(traces.size());
    for (const auto& tr : traces) {
        if (tr.steps.size() != steps) throw InvalidArgument("traces differ in length");
        double c = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
            out.mean_regret[t] += tr.steps[t].regret;
            out.mean_cumulative_regret[t] += (c += tr.steps[t].regret);
        }
        totals.push_back(c);
    }
    const double n = static_cast<double>(traces.size());
    for (std::size_t t = 0; t < steps; ++t) {
        out.mean_regret[t] /= n;
        out.mean_cumulative_regret[t] /= n;
    }
    out.mean_total = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
    if (traces.size() > 1) {
        double ss = 0.0;
        for (double x : totals) ss += (x - out.mean_total) * (x - out.mean_total);
        out.sd_total = std::sqrt(ss / (n - 1.0));
    }
    return out;
}

}  // namespace pragbandit
