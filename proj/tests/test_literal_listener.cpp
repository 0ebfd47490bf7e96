#include <doctest.h>

#include "pragbandit/error.hpp"
#include "pragbandit/literal_listener.hpp"

#include <cmath>
#include <random>

using namespace pragbandit;

namespace {

Action act(const char* name) { return *Action::parse(name); }
const ListenerParams kParams{};

// Brute-force E_b[R(a, w)] by summing over every hypothesis.
double brute_expected_reward(const Belief& b, const Action& a) {
    double e = 0.0;
    for (int h = 0; h < kNumHypotheses; ++h) e += b.prob(h) * reward(a, RewardWeights::from_index(h));
    return e;
}

void check_normalized(const Policy& p) {
    double total = 0.0;
    for (double x : p.probs()) {
        CHECK(x >= 0.0);
        total += x;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
}

}  // namespace

TEST_CASE("instruction policy follows the instruction when available") {
    const auto u = Utterance::take(act("spotted red"));
    const State with = State::parse("spotted red/solid blue/striped green");
    const Policy p = instruction_policy(u, with);
    CHECK(p.prob(act("spotted red")) == 1.0);
    CHECK(p.prob(act("solid blue")) == 0.0);
    CHECK(p.prob(act("spotted green")) == 0.0);  // not in the state

    const State without = State::parse("solid red/solid blue/striped green");
    const Policy q = instruction_policy(u, without);
    for (double x : q.probs()) CHECK(x == doctest::Approx(1.0 / 3.0));
    check_normalized(q);

    const State single({act("spotted red")});
    CHECK(instruction_policy(u, single).probs() == std::vector<double>{1.0});
    CHECK_THROWS_AS(instruction_policy(Utterance::parse("DESC blue -2"), with), InvalidArgument);
}

TEST_CASE("description conditions on exact equality") {
    const Belief b = description_update(Utterance::parse("DESC blue -2"), Belief::uniform());
    int support = 0;
    for (int h = 0; h < kNumHypotheses; ++h) {
        const double p = b.prob(h);
        if (p > 0) {
            ++support;
            CHECK(RewardWeights::from_index(h)[Feature::Blue] == -2);
            CHECK(p == doctest::Approx(1.0 / 3125.0));
        }
    }
    CHECK(support == 3125);
    CHECK(std::abs(b.probs().sum() - 1.0) < 1e-9);

    const auto green2 = Utterance::parse("DESC green +2");
    const Belief once = description_update(green2, Belief::uniform());
    const Belief twice = description_update(green2, once);
    CHECK((once.probs() - twice.probs()).cwiseAbs().maxCoeff() < 1e-15);

    // Marginal of the conditioned feature is exactly one.
    double mass = 0.0;
    for (int h = 0; h < kNumHypotheses; ++h)
        if (RewardWeights::from_index(h)[Feature::Green] == 2) mass += once.prob(h);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(description_update(Utterance::parse("DESC green +1"), once), EmptyPosterior);
    CHECK_THROWS_AS(description_update(Utterance::parse("TAKE solid red"), once), InvalidArgument);
}

TEST_CASE("belief policy") {
    const State s = State::parse("spotted green/solid red/striped blue");
    const Policy uni = belief_policy(Belief::uniform(), s, kParams);
    for (double x : uni.probs()) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const Policy delta = belief_policy(Belief::delta(canonical_weights()), s, kParams);
    const double z = std::exp(9.0) + 1.0 + std::exp(-9.0);
    CHECK(delta.prob(act("spotted green")) == doctest::Approx(std::exp(9.0) / z).epsilon(1e-12));
    CHECK(delta.prob(act("solid red")) == doctest::Approx(1.0 / z).epsilon(1e-12));
    CHECK(delta.prob(act("striped blue")) == doctest::Approx(std::exp(-9.0) / z).epsilon(1e-9));
    CHECK(delta.prob(act("spotted green")) == doctest::Approx(0.99988).epsilon(1e-5));
    CHECK(delta.modal_action() == act("spotted green"));
    check_normalized(delta);

    const Policy flat = belief_policy(Belief::delta(canonical_weights()), s, ListenerParams{1e-12});
    for (double x : flat.probs()) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    CHECK_THROWS_AS(belief_policy(Belief::uniform(), s, ListenerParams{0.0}), InvalidArgument);
    CHECK_THROWS_AS(belief_policy(Belief::uniform(), s, ListenerParams{-1.0}), InvalidArgument);
}

TEST_CASE("belief policy is invariant to a constant shift in expected rewards") {
    const State s = State::parse("spotted green/solid red/striped blue/solid blue");
    Vector6 m;
    m << 0.3, -1.2, 0.7, 1.1, 0.0, -0.4;
    // Adding c to every color weight adds c to every action's expected reward.
    Vector6 shifted = m;
    shifted.head<3>().array() += 5.0;
    const auto a = mean_policy(m, s, kParams).probs();
    const auto b = mean_policy(shifted, s, kParams).probs();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("ties in the policy argmax go to the canonically first action") {
    const State s = State::parse("solid blue/solid red");
    const Policy p = belief_policy(Belief::uniform(), s, kParams);
    CHECK(p.modal_action() == act("solid red"));
}

TEST_CASE("closed-form description expectations match brute force") {
    for (const auto set = UtteranceSet::descriptions30(); const auto& u : set.utterances()) {
        const Belief b = description_update(u, Belief::uniform());
        const Vector6 closed = description_feature_means(u);
        CHECK((closed - b.feature_means()).cwiseAbs().maxCoeff() < 1e-9);
        for (const auto& a : Action::all())
            CHECK(std::abs(closed.dot(a.features()) - brute_expected_reward(b, a)) < 1e-9);
    }
}

TEST_CASE("literal policy dispatch") {
    const State s = State::parse("spotted green/solid red/striped blue");
    CHECK(literal_policy(Utterance::take(act("striped blue")), s, kParams).prob(act("striped blue")) == 1.0);

    const auto blue = Utterance::parse("DESC blue -2");
    const Policy viaBelief = belief_policy(description_update(blue, Belief::uniform()), s, kParams);
    const Policy direct = literal_policy(blue, s, kParams);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(direct.probs()[i] == doctest::Approx(viaBelief.probs()[i]).epsilon(1e-12));

    // Red = 0 leaves every brute-force expected reward at zero.
    const auto red0 = Utterance::parse("DESC red 0");
    const Belief b = description_update(red0, Belief::uniform());
    for (const auto& st : enumerate_states(3)) {
        for (const auto& a : st.actions()) CHECK(std::abs(brute_expected_reward(b, a)) < 1e-12);
        for (const Policy p = literal_policy(red0, st, kParams); double x : p.probs()) CHECK(x == doctest::Approx(1.0 / 3.0));
    }
}

TEST_CASE("random beliefs yield normalized policies") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto states = enumerate_states(4);
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd w(kNumHypotheses);
        for (int h = 0; h < kNumHypotheses; ++h) w[h] = std::pow(U(rng), 8.0);
        const Belief b = Belief::from_weights(w);
        CHECK(std::abs(b.probs().sum() - 1.0) < 1e-9);
        check_normalized(belief_policy(b, states[rep * 11], kParams));
    }
    CHECK_THROWS_AS(Belief::from_weights(Eigen::VectorXd::Zero(kNumHypotheses)), EmptyPosterior);
}
