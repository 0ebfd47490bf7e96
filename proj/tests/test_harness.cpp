#include <doctest.h>

#include "pragbandit/error.hpp"
#include "pragbandit/harness/config.hpp"
#include "pragbandit/harness/dataset.hpp"
#include "pragbandit/harness/experiments.hpp"
#include "pragbandit/harness/parallel.hpp"
#include "pragbandit/harness/repl.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

using namespace pragbandit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const char* kHeader = "participant_id,trial,horizon,action1,action2,action3,utterance\n";

std::vector<DatasetRecord> parse(const std::string& body, LoadOptions opts = {}) {
    std::istringstream in(body);
    return read_dataset(in, "mem.csv", opts);
}

template <class E>
std::string error_of(const std::string& body) {
    try {
        parse(body);
    } catch (const E& e) {
        return e.what();
    }
    return "";
}

HarnessConfig single_thread() {
    HarnessConfig cfg;
    cfg.threads = 1;
    return cfg;
}

DatasetRecord record(int h, const char* state, const char* utterance) {
    return {"t", 0, h, State::parse(state), Utterance::parse(utterance), 1.0};
}

}  // namespace

TEST_CASE("config files") {
    std::istringstream in("# comment\nbeta_s1 = 4\nhorizon_prior = 1:0.25, 4:0.75\ntrue_w=0,2,-2,0,1,-1\n\nseed=9\n");
    const auto cfg = read_config(in, "cfg");
    CHECK(cfg.beta_s1 == 4.0);
    CHECK(cfg.seed == 9);
    CHECK(cfg.horizon_prior.support.size() == 2);
    CHECK(cfg.horizon_prior.probs[1] == 0.75);

    std::istringstream bad("beta_s1 = 3\nbogus = 1\n");
    try {
        read_config(bad, "cfg");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("cfg:2:") == 0);
    }
    std::istringstream neg("beta_l0 = -1\n");
    CHECK_THROWS_AS(read_config(neg, "cfg"), InvalidArgument);
    CHECK(parse_horizon_prior("1,2,4").probs[0] == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS(parse_horizon_prior("1:0.5,4"));
    CHECK_THROWS(parse_horizon_prior("1:0.5,4:0.2"));
}

TEST_CASE("dataset loading") {
    const auto rows = parse(std::string(kHeader) +
                            "p01,3,2,spotted green,solid red,striped blue,DESC blue -2\n"
                            "p01,4,1,spotted red,solid blue,striped blue,TAKE spotted red\n"
                            "p02,1,4,solid green,spotted red,\"striped blue\",DESC spotted +1\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].participant_id == "p01");
    CHECK(rows[0].trial == 3);
    CHECK(rows[0].horizon == 2);
    CHECK(rows[0].state == State::parse("spotted green/solid red/striped blue"));
    CHECK(rows[0].utterance == Utterance::parse("DESC blue -2"));
    CHECK(rows[1].utterance.is_instruction());
    CHECK(rows[2].participant_id == "p02");

    CHECK(error_of<ValidationError>(std::string(kHeader) + "p,1,2,solid red,solid red,striped blue,DESC blue -2\n")
              .find("mem.csv:2:") == 0);
    CHECK(error_of<ValidationError>(std::string(kHeader) + "p,1,3,solid red,solid blue,striped blue,DESC blue -2\n")
              .find("mem.csv:2:") == 0);
    CHECK(parse(std::string(kHeader) + "p,1,3,solid red,solid blue,striped blue,DESC blue -2\n", {true}).size() == 1);
    CHECK(error_of<ParseError>(std::string(kHeader) + "\np,1,2,solid red,solid purple,striped blue,DESC blue -2\n")
              .find("mem.csv:3:") == 0);
    CHECK(error_of<ParseError>(std::string(kHeader) + "p,1,2,solid red,solid blue,striped blue,SAY hi\n").find(
              "mem.csv:2:") == 0);
    CHECK(error_of<ParseError>(std::string(kHeader) + "p,1,2,solid red\n").find("mem.csv:2:") == 0);
    CHECK(error_of<ParseError>("participant_id,trial,action1\n").find("mem.csv:1:") == 0);
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(load_dataset("/nonexistent/data.csv"), InvalidArgument);
}

TEST_CASE("attention checks are dropped and order is preserved") {
    std::string body = "utterance,horizon,trial,participant_id,action3,action2,action1,attention_check\n";
    for (int i = 0; i < 10; ++i)
        body += "TAKE solid red,1," + std::to_string(i) + ",p,solid red,solid blue,striped blue," +
                (i % 3 == 0 ? "true" : "0") + "\n";
    const auto rows = parse(body);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].trial < rows[i].trial);
    for (const auto& r : rows) CHECK(r.trial % 3 != 0);
}

TEST_CASE("dataset round trip") {
    auto cfg = single_thread();
    const auto records = simulate_dataset(cfg, {{1}, 2});
    std::ostringstream out;
    write_dataset(out, records);
    const auto back = parse(out.str());
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].state == records[i].state);
        CHECK(back[i].utterance == records[i].utterance);
        CHECK(back[i].weight == records[i].weight);
    }
}

TEST_CASE("simulated datasets") {
    const auto cfg = single_thread();
    const auto expect = simulate_dataset(cfg);
    CHECK(expect.size() == 3 * 84 * 25);
    std::map<std::pair<int, int>, double> mass;
    for (const auto& r : expect) mass[{r.horizon, r.trial}] += r.weight;
    CHECK(mass.size() == 3 * 84);
    for (const auto& [k, m] : mass) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));

    // Distribution-weighted literal future reward grows with the horizon.
    const ListenerBank bank(cfg);
    std::map<int, double> fr;
    for (const auto& r : expect) fr[r.horizon] += r.weight * bank.literal_future_reward(r.utterance) / 84.0;
    CHECK(fr[1] < fr[2]);
    CHECK(fr[2] < fr[4]);

    // Sampled utterances match the expectation within 3 sigma.
    HarnessConfig one = cfg;
    const auto sampled = simulate_dataset(one, {{2}, 10000});
    const State s = sampled.front().state;
    double mean = 0.0, sq = 0.0;
    int n = 0;
    for (const auto& r : sampled) {
        if (!(r.state == s)) continue;
        const double x = bank.literal_future_reward(r.utterance);
        mean += x;
        sq += x * x;
        ++n;
    }
    REQUIRE(n == 10000);
    mean /= n;
    const double sd = std::sqrt(sq / n - mean * mean);
    double exact = 0.0;
    for (const auto& r : expect)
        if (r.horizon == 2 && r.state == s) exact += r.weight * bank.literal_future_reward(r.utterance);
    CHECK(std::abs(mean - exact) < 3 * sd / std::sqrt(n));

    CHECK_THROWS_AS(simulate_dataset(cfg, {{}, 0}), InvalidArgument);
}

TEST_CASE("argmax speaker picks utterances that select the best action") {
    auto cfg = single_thread();
    cfg.beta_s1 = kInf;
    const ListenerParams lp = cfg.listener();
    for (const auto& r : simulate_dataset(cfg, {{1}, 0})) {
        const Action chosen = literal_policy(r.utterance, r.state, lp).modal_action();
        CHECK(reward(chosen, cfg.true_weights) == max_reward(r.state, cfg.true_weights));
    }
}

TEST_CASE("listener bank") {
    const auto cfg = single_thread();
    const ListenerBank bank(cfg);
    CHECK(bank.literal_future_reward(Utterance::parse("TAKE spotted green")) == doctest::Approx(0.75));
    CHECK(std::abs(bank.belief_future_reward(Belief::uniform())) < 1e-12);
    const State s = State::parse("spotted red/solid blue/striped blue");
    const auto u = Utterance::parse("DESC blue -2");
    CHECK(bank.future_reward(ListenerId::Literal, u, s, 1) ==
          doctest::Approx(bank.belief_future_reward(description_update(u, Belief::uniform()))).epsilon(1e-12));
    CHECK(bank.learner(ListenerId::Literal, Utterance::parse("TAKE spotted red"), s, 1).mode ==
          Learner::Mode::InstructionOverride);
    CHECK(bank.learner(ListenerId::Literal, u, s, 1).mode == Learner::Mode::Social);
    CHECK(bank.learner(ListenerId::Individual, u, s, 1).mode == Learner::Mode::Individual);
    CHECK(parse_listener("Latent_H") == ListenerId::LatentH);
    CHECK_THROWS_AS(parse_listener("oracle"), ParseError);
}

TEST_CASE("evaluation") {
    const auto cfg = single_thread();
    const std::vector<DatasetRecord> records = {
        record(1, "spotted red/solid blue/striped blue", "TAKE spotted red"),
        record(4, "spotted red/solid blue/striped blue", "DESC spotted +1"),
        record(2, "spotted green/solid red/striped blue", "DESC green +2"),
    };
    const auto result = eval_listeners(records, cfg);
    CHECK(result.rows.size() == records.size() * 5);
    for (const auto& row : result.rows) {
        CHECK(std::isfinite(row.future_reward));
        if (row.listener == ListenerId::Literal) CHECK(row.pragmatic_gain == 0.0);
    }
    const auto lit = result.find(ListenerId::Literal);
    REQUIRE(lit);
    CHECK(lit->n == 3);
    CHECK(result.find(ListenerId::Literal, 1, UtteranceKind::Instruction)->n == 1);
    CHECK_FALSE(result.find(ListenerId::Literal, 1, UtteranceKind::Description));

    // Mean and SD agree with a direct computation.
    std::vector<double> xs;
    for (const auto& row : result.rows)
        if (row.listener == ListenerId::KnownH) xs.push_back(row.future_reward);
    const double m = (xs[0] + xs[1] + xs[2]) / 3;
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    CHECK(result.find(ListenerId::KnownH)->mean_future_reward == doctest::Approx(m).epsilon(1e-12));
    CHECK(result.find(ListenerId::KnownH)->sd_future_reward == doctest::Approx(std::sqrt(ss / 2)).epsilon(1e-12));

    CHECK_THROWS_AS(eval_listeners(records, cfg, {}), InvalidArgument);

    std::ostringstream rows, summary;
    write_eval_rows(rows, records, result);
    write_eval_summary(summary, result);
    CHECK(rows.str().rfind("record,participant_id,trial,horizon,state,utterance,weight,listener,", 0) == 0);
    CHECK(summary.str().find("known_h,all,all,") != std::string::npos);
}

TEST_CASE("a point-mass horizon prior reproduces the known-horizon listener") {
    for (int h : {1, 4}) {
        auto cfg = single_thread();
        cfg.horizon_prior = HorizonPrior::delta(Horizon::finite(h));
        std::vector<DatasetRecord> records;
        for (const char* u : {"TAKE spotted red", "DESC spotted +1", "DESC blue -2"})
            records.push_back(record(h, "spotted red/solid blue/striped blue", u));
        const auto r = eval_listeners(records, cfg, {ListenerId::KnownH, ListenerId::LatentH});
        for (std::size_t i = 0; i < records.size(); ++i)
            CHECK(r.rows[2 * i].future_reward == doctest::Approx(r.rows[2 * i + 1].future_reward).epsilon(1e-12));
    }
}

TEST_CASE("pragmatic interpretation of simulated instructions beats literal") {
    const auto cfg = single_thread();
    std::vector<DatasetRecord> instructions;
    for (auto& r : simulate_dataset(cfg, {{1}, 0}))
        if (r.utterance.is_instruction()) instructions.push_back(std::move(r));
    const auto result = eval_listeners(instructions, cfg, {ListenerId::Literal, ListenerId::LatentH});
    CHECK(result.find(ListenerId::LatentH)->mean_future_reward >
          result.find(ListenerId::Literal)->mean_future_reward);
    CHECK(result.find(ListenerId::LatentH)->mean_gain > 0.0);
}

TEST_CASE("regret suite") {
    auto cfg = single_thread();
    cfg.seed = 5;
    cfg.episode.trials = 3;
    const std::vector<DatasetRecord> records = {
        record(1, "spotted red/solid blue/striped blue", "TAKE spotted red"),
        record(4, "spotted red/solid blue/striped blue", "DESC green +2"),
    };
    RegretOptions opts;
    opts.keep_traces = true;
    const auto a = regret_suite(records, cfg, opts);
    CHECK(a.episodes.size() == records.size() * 6 * 3);
    CHECK(a.traces.size() == a.episodes.size());
    CHECK(a.of(ListenerId::Individual).episodes == 6);
    CHECK(a.of(ListenerId::LatentH).mean_regret.size() == 25);

    // Seeds depend only on (seed, record, trial): listeners share state sequences.
    for (std::size_t e = 0; e + 3 < 18; ++e)
        if (a.episodes[e].record == a.episodes[e + 3].record)
            for (std::size_t k = 0; k < 25; ++k) CHECK(a.traces[e].steps[k].state == a.traces[e + 3].steps[k].state);

    const auto b = regret_suite(records, cfg, opts);
    for (std::size_t e = 0; e < a.episodes.size(); ++e)
        CHECK(a.episodes[e].cumulative_regret == b.episodes[e].cumulative_regret);

    std::ostringstream traces;
    write_regret_traces(traces, a);
    CHECK(traces.str().rfind("record,listener,trial,step,state,action,reward,regret,cumulative_regret\n", 0) == 0);

    opts.listeners = {ListenerId::Individual};
    CHECK(regret_suite(records, cfg, opts).episodes.size() == records.size() * 3);
    opts.listeners = {};
    CHECK_THROWS_AS(regret_suite(records, cfg, opts), InvalidArgument);
}

TEST_CASE("speaker sweep") {
    const auto cfg = single_thread();
    SweepOptions opts;
    opts.horizons = {Horizon::finite(1), Horizon::finite(10)};
    opts.state_sizes = {3, 9};
    opts.betas = {10.0, kInf};
    const auto rows = speaker_sweep(cfg, opts);
    CHECK(rows.size() == 2 * 2 * 3 * 2);
    auto find = [&](double beta, int h, int size, const std::string& set) {
        for (const auto& r : rows)
            if (r.beta == beta && r.horizon == Horizon::finite(h) && r.state_size == size && r.utterances == set)
                return r;
        FAIL("missing sweep row");
        return rows.front();
    };
    CHECK(find(kInf, 1, 3, "instructions").mean_reward == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(find(10.0, 10, 3, "descriptions").mean_future > find(10.0, 10, 3, "instructions").mean_future);
    CHECK(find(10.0, 1, 9, "full").instruction_probability >= find(10.0, 1, 3, "full").instruction_probability);
    CHECK(find(10.0, 1, 3, "instructions").instruction_probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(find(10.0, 1, 3, "descriptions").instruction_probability == 0.0);
    const auto r = find(10.0, 10, 3, "full");
    CHECK(r.mean_reward == doctest::Approx(0.1 * r.mean_present + 0.9 * r.mean_future).epsilon(1e-12));

    opts.betas = {};
    CHECK_THROWS_AS(speaker_sweep(cfg, opts), InvalidArgument);
}

TEST_CASE("beta calibration") {
    const auto cfg = single_thread();
    const std::vector<DatasetRecord> records = {
        record(1, "spotted red/solid blue/striped blue", "TAKE spotted red"),
        record(2, "spotted green/solid red/striped blue", "DESC green +2"),
    };
    const auto one = calibrate_beta(records, {3.0}, cfg);
    CHECK(one.means.size() == 1);
    CHECK(one.best_beta == std::vector<double>{3.0, 3.0});

    // A flat speaker tells the listener nothing: uniform-belief baseline.
    const auto flat = calibrate_beta(records, {0.0, 3.0}, cfg);
    const double baseline = ListenerBank(cfg).belief_future_reward(Belief::uniform());
    CHECK(flat.means[0][0] == doctest::Approx(baseline).epsilon(1e-12));
    CHECK(flat.means[0][1] == doctest::Approx(baseline).epsilon(1e-12));
    CHECK(flat.means[1][0] > flat.means[0][0]);

    std::ostringstream out;
    write_calibration(out, flat);
    CHECK(out.str().rfind("beta,known_h,latent_h\n0,", 0) == 0);
    CHECK_THROWS_AS(calibrate_beta(records, {}, cfg), InvalidArgument);
}

TEST_CASE("posterior reports") {
    const auto cfg = single_thread();
    const State s = State::parse("spotted red/solid blue/striped blue");
    const auto take = posterior_report(Utterance::parse("TAKE spotted red"), s, cfg);
    const auto& hm = take["pragmatic_latent_h"]["horizon_marginal"];
    std::string best;
    double best_p = -1;
    for (const auto& e : hm)
        if (e["posterior"].get<double>() > best_p) best_p = e["posterior"].get<double>(), best = e["horizon"];
    CHECK(best == "1");
    CHECK(take["pragmatic_latent_h"]["modal_action"] == "spotted red");
    CHECK(take["literal"]["feature_marginals"].is_null());

    const auto desc = posterior_report(Utterance::parse("DESC spotted +1"), s, cfg);
    CHECK(desc["pragmatic_latent_h"]["feature_marginals"]["spotted"]["2"].get<double>() > 0.0);
    CHECK(desc["literal"]["feature_marginals"]["spotted"]["1"].get<double>() == doctest::Approx(1.0));

    auto flat = cfg;
    flat.beta_s1 = 0.0;
    const auto uni = posterior_report(Utterance::parse("DESC spotted +1"), s, flat);
    for (const auto& [feature, row] : uni["pragmatic_latent_h"]["feature_marginals"].items())
        for (int v = -2; v <= 2; ++v) CHECK(row[std::to_string(v)].get<double>() == doctest::Approx(0.2));

    CHECK_THROWS_AS(posterior_report(Utterance::parse("DESC red 0"), s, cfg), UnknownUtterance);
}

TEST_CASE("interactive session") {
    auto cfg = single_thread();
    std::istringstream in("TAKE spotted green\nhelp\nnonsense words\nDESC blue -2\nstate solid red/solid blue\n"
                          "DESC red 0\nquit\n");
    std::ostringstream out;
    ReplOptions opts;
    opts.horizon = 2;
    opts.prompt = false;
    CHECK(run_repl(cfg, in, out, opts) == 0);
    const std::string log = out.str();
    CHECK(log.find("utterance: TAKE spotted green") != std::string::npos);
    CHECK(log.find("could not parse 'nonsense words'") != std::string::npos);
    CHECK(log.find("utterance: DESC blue -2") != std::string::npos);
    CHECK(log.find("state: solid blue/solid red") == std::string::npos);
    CHECK(log.find("state: solid red/solid blue") != std::string::npos);
    CHECK(log.find("not in the speaker's utterance set") != std::string::npos);
    CHECK(log.find("rounds: 3") != std::string::npos);

    std::istringstream eof("");
    std::ostringstream out2;
    CHECK(run_repl(cfg, eof, out2, opts) == 0);
}

TEST_CASE("parallel_for") {
    for (int threads : {1, 3}) {
        std::vector<int> out(100, 0);
        parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
        CHECK_THROWS_AS(parallel_for(10, threads,
                                     [](std::size_t i) {
                                         if (i == 7) throw InvalidArgument("boom");
                                     }),
                        InvalidArgument);
    }
}

TEST_CASE("outputs do not depend on the thread count") {
    auto one = single_thread();
    auto many = one;
    many.threads = 3;
    std::vector<DatasetRecord> records;
    for (auto& r : simulate_dataset(one, {{1, 4}, 1})) records.push_back(std::move(r));
    records.erase(records.begin() + 12, records.end());
    auto text = [&](const HarnessConfig& c) {
        std::ostringstream o;
        write_eval_rows(o, records, eval_listeners(records, c));
        RegretOptions opts;
        opts.listeners = {ListenerId::Individual, ListenerId::Literal, ListenerId::LatentH};
        HarnessConfig small = c;
        small.episode.trials = 2;
        write_regret_episodes(o, records, regret_suite(records, small, opts));
        return o.str();
    };
    CHECK(text(one) == text(many));
}
