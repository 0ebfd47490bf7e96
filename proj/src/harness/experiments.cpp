#include "pragbandit/harness/experiments.hpp"

#include "pragbandit/error.hpp"
#include "pragbandit/harness/parallel.hpp"
#include "pragbandit/rng.hpp"
#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace pragbandit {

namespace {

constexpr std::pair<ListenerId, std::string_view> kListenerNames[] = {
    {ListenerId::Individual, "individual"}, {ListenerId::Literal, "literal"}, {ListenerId::KnownH, "known_h"},
    {ListenerId::H1, "h1"},                 {ListenerId::H4, "h4"},           {ListenerId::LatentH, "latent_h"},
};

/// Mean and unbiased (reliability-weighted) standard deviation.
struct WeightedStats {
    double sw = 0.0, sw2 = 0.0, swx = 0.0, swxx = 0.0;
    std::size_t n = 0;

    void add(double x, double w) {
        sw += w;
        sw2 += w * w;
        swx += w * x;
        swxx += w * x * x;
        ++n;
    }
    double mean() const { return sw > 0.0 ? swx / sw : 0.0; }
    double sd() const {
        const double denom = sw - sw2 / sw;
        if (!(sw > 0.0) || !(denom > 1e-300)) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, (swxx - 2 * m * swx + m * m * sw) / denom));
    }
};

}  // namespace

std::string_view listener_name(ListenerId id) {
    for (const auto& [k, name] : kListenerNames)
        if (k == id) return name;
    return "?";
}

ListenerId parse_listener(std::string_view name) {
    const std::string t = text::lower(text::trim(name));
    for (const auto& [k, n] : kListenerNames)
        if (n == t) return k;
    throw ParseError("unknown listener '" + std::string(name) +
                     "' (expected individual, literal, known_h, h1, h4 or latent_h)");
}

bool is_pragmatic(ListenerId id) {
    return id == ListenerId::KnownH || id == ListenerId::H1 || id == ListenerId::H4 || id == ListenerId::LatentH;
}

std::vector<ListenerId> evaluation_listeners() {
    return {ListenerId::Literal, ListenerId::KnownH, ListenerId::H1, ListenerId::H4, ListenerId::LatentH};
}

std::vector<ListenerId> regret_listeners() {
    auto out = evaluation_listeners();
    out.insert(out.begin(), ListenerId::Individual);
    return out;
}

std::string_view kind_name(UtteranceKind k) {
    switch (k) {
        case UtteranceKind::Instruction: return "instruction";
        case UtteranceKind::Description: return "description";
        default: return "all";
    }
}

// --------------------------------------------------------------- ListenerBank

ListenerBank::ListenerBank(const HarnessConfig& cfg) : ListenerBank(cfg, cfg.beta_s1) {}

ListenerBank::ListenerBank(const HarnessConfig& cfg, double beta_s1)
    : cfg_(cfg), states_(enumerate_states(cfg.state_size)) {
    cfg_.beta_s1 = beta_s1;
    cfg_.validate();
    l1_ = std::make_shared<const PragmaticListener>(cfg_.speaker());
}

Belief ListenerBank::belief(ListenerId id, const Utterance& u, const State& s, int record_horizon) const {
    switch (id) {
        case ListenerId::Individual: return Belief::uniform();
        case ListenerId::Literal:
            return u.is_description() ? description_update(u, Belief::uniform()) : Belief::uniform();
        case ListenerId::KnownH: return l1_->fixed(u, s, Horizon::finite(record_horizon));
        case ListenerId::H1: return l1_->fixed(u, s, Horizon::finite(1));
        case ListenerId::H4: return l1_->fixed(u, s, Horizon::finite(4));
        case ListenerId::LatentH: return l1_->latent(u, s, cfg_.horizon_prior).reward_marginal();
    }
    throw InvalidArgument("unknown listener");
}

double ListenerBank::belief_future_reward(const Belief& b) const {
    const Vector6 m = b.feature_means();
    const ListenerParams lp = cfg_.listener();
    double total = 0.0;
    for (const auto& s : states_) total += mean_policy(m, s, lp).expected_reward(cfg_.true_weights);
    return total / static_cast<double>(states_.size());
}

double ListenerBank::literal_future_reward(const Utterance& u) const {
    return cfg_.true_weights.as_vector().dot(future_feature_expectation(u, cfg_.listener(), cfg_.state_size));
}

double ListenerBank::future_reward(ListenerId id, const Utterance& u, const State& s, int record_horizon) const {
    if (id == ListenerId::Literal) return literal_future_reward(u);
    return belief_future_reward(belief(id, u, s, record_horizon));
}

Learner ListenerBank::learner(ListenerId id, const Utterance& u, const State& s, int record_horizon) const {
    switch (id) {
        case ListenerId::Individual: return Learner::individual();
        case ListenerId::Literal:
            if (u.is_instruction()) return Learner::instructed(u.instruction().action);
            return Learner::with_social(
                SocialPrior::from(SocialPrior::Source::Literal, soft_condition(u, cfg_.episode.epsilon_soft)));
        case ListenerId::LatentH:
            return Learner::with_social(
                SocialPrior::from(SocialPrior::Source::PragmaticLatent, belief(id, u, s, record_horizon)));
        default:
            return Learner::with_social(
                SocialPrior::from(SocialPrior::Source::PragmaticFixed, belief(id, u, s, record_horizon)));
    }
}

// ----------------------------------------------------------------- evaluation

std::optional<EvalSummaryRow> EvalResult::find(ListenerId id, int horizon, UtteranceKind kind) const {
    for (const auto& r : summary)
        if (r.listener == id && r.horizon == horizon && r.kind == kind) return r;
    return std::nullopt;
}

EvalResult eval_listeners(const std::vector<DatasetRecord>& records, const HarnessConfig& cfg,
                          const std::vector<ListenerId>& listeners) {
    return eval_listeners(records, ListenerBank(cfg), listeners);
}

EvalResult eval_listeners(const std::vector<DatasetRecord>& records, const ListenerBank& bank,
                          const std::vector<ListenerId>& listeners) {
    if (listeners.empty()) throw InvalidArgument("listener set is empty");

    // Identical interpretations (same utterance, state and effective horizon)
    // are computed once.
    using Key = std::tuple<int, int, int, std::uint16_t>;  // kind, horizon, utterance, state
    auto key_of = [](ListenerId id, const DatasetRecord& r) -> Key {
        switch (id) {
            case ListenerId::Literal: return {0, 0, r.utterance.id(), 0};
            case ListenerId::Individual: return {1, 0, 0, 0};
            case ListenerId::LatentH: return {2, 0, r.utterance.id(), r.state.mask()};
            case ListenerId::KnownH: return {3, r.horizon, r.utterance.id(), r.state.mask()};
            case ListenerId::H1: return {3, 1, r.utterance.id(), r.state.mask()};
            case ListenerId::H4: return {3, 4, r.utterance.id(), r.state.mask()};
        }
        return {};
    };
    std::map<Key, std::size_t> slot;
    std::vector<std::pair<ListenerId, std::size_t>> tasks;  // listener, example record
    std::vector<ListenerId> all = listeners;
    if (std::find(all.begin(), all.end(), ListenerId::Literal) == all.end()) all.push_back(ListenerId::Literal);
    for (std::size_t i = 0; i < records.size(); ++i)
        for (ListenerId id : all)
            if (slot.emplace(key_of(id, records[i]), tasks.size()).second) tasks.emplace_back(id, i);

    std::vector<double> value(tasks.size());
    parallel_for(tasks.size(), bank.config().thread_count(), [&](std::size_t t) {
        const auto& r = records[tasks[t].second];
        value[t] = bank.future_reward(tasks[t].first, r.utterance, r.state, r.horizon);
    });

    EvalResult out;
    out.rows.reserve(records.size() * listeners.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const double literal = value[slot.at(key_of(ListenerId::Literal, records[i]))];
        for (ListenerId id : listeners) {
            const double v = value[slot.at(key_of(id, records[i]))];
            if (!std::isfinite(v)) throw NumericalDegeneracy("non-finite future reward");
            out.rows.push_back({i, id, v, v - literal});
        }
    }

    std::set<int> horizons = {0};
    for (const auto& r : records) horizons.insert(r.horizon);
    for (ListenerId id : listeners) {
        for (int h : horizons) {
            for (UtteranceKind kind : {UtteranceKind::All, UtteranceKind::Instruction, UtteranceKind::Description}) {
                WeightedStats fr, gain;
                for (const auto& row : out.rows) {
                    if (row.listener != id) continue;
                    const auto& r = records[row.record];
                    if (h != 0 && r.horizon != h) continue;
                    if (kind == UtteranceKind::Instruction && !r.utterance.is_instruction()) continue;
                    if (kind == UtteranceKind::Description && !r.utterance.is_description()) continue;
                    fr.add(row.future_reward, r.weight);
                    gain.add(row.pragmatic_gain, r.weight);
                }
                if (fr.n == 0) continue;
                out.summary.push_back({id, h, kind, fr.mean(), fr.sd(), gain.mean(), gain.sd(), fr.n, fr.sw});
            }
        }
    }
    return out;
}

void write_eval_rows(std::ostream& out, const std::vector<DatasetRecord>& records, const EvalResult& r) {
    out << "record,participant_id,trial,horizon,state,utterance,weight,listener,future_reward,pragmatic_gain\n";
    for (const auto& row : r.rows) {
        const auto& rec = records[row.record];
        out << row.record << ',' << text::csv_field(rec.participant_id) << ',' << rec.trial << ',' << rec.horizon
            << ',' << rec.state.to_string() << ',' << rec.utterance.to_string() << ',' << text::fmt(rec.weight) << ','
            << listener_name(row.listener) << ',' << text::fmt(row.future_reward) << ','
            << text::fmt(row.pragmatic_gain) << '\n';
    }
}

void write_eval_summary(std::ostream& out, const EvalResult& r) {
    out << "listener,horizon,utterance_type,mean_future_reward,sd_future_reward,mean_gain,sd_gain,n,total_weight\n";
    for (const auto& s : r.summary)
        out << listener_name(s.listener) << ',' << (s.horizon == 0 ? std::string("all") : std::to_string(s.horizon))
            << ',' << kind_name(s.kind) << ',' << text::fmt(s.mean_future_reward) << ','
            << text::fmt(s.sd_future_reward) << ',' << text::fmt(s.mean_gain) << ',' << text::fmt(s.sd_gain) << ','
            << s.n << ',' << text::fmt(s.total_weight) << '\n';
}

// --------------------------------------------------------------------- regret

const ListenerRegret& RegretResult::of(ListenerId id) const {
    for (const auto& l : listeners)
        if (l.listener == id) return l;
    throw InvalidArgument("no regret results for listener '" + std::string(listener_name(id)) + "'");
}

RegretResult regret_suite(const std::vector<DatasetRecord>& records, const HarnessConfig& cfg,
                          const RegretOptions& opts) {
    if (opts.listeners.empty()) throw InvalidArgument("listener set is empty");
    if (records.empty()) throw InvalidArgument("regret suite needs at least one record");
    EpisodeConfig ep = cfg.episode;
    ep.state_size = cfg.state_size;
    ep.validate();
    const bool needs_l1 = std::any_of(opts.listeners.begin(), opts.listeners.end(), is_pragmatic);
    HarnessConfig bank_cfg = cfg;
    if (!needs_l1 && std::isinf(bank_cfg.beta_s1)) bank_cfg.beta_s1 = 0.0;
    const ListenerBank bank(bank_cfg);

    const std::size_t nl = opts.listeners.size();
    const std::size_t trials = static_cast<std::size_t>(ep.trials);
    std::vector<RegretTrace> traces(records.size() * nl * trials);
    parallel_for(records.size() * nl, cfg.thread_count(), [&](std::size_t job) {
        const std::size_t i = job / nl;
        const auto& r = records[i];
        const Learner learner = bank.learner(opts.listeners[job % nl], r.utterance, r.state, r.horizon);
        for (std::size_t t = 0; t < trials; ++t)
            traces[job * trials + t] = run_episode(learner, cfg.true_weights, ep, child_seed(cfg.seed, {i, t}));
    });

    RegretResult out;
    out.episodes.reserve(traces.size());
    for (std::size_t job = 0; job < records.size() * nl; ++job)
        for (std::size_t t = 0; t < trials; ++t)
            out.episodes.push_back({job / nl, opts.listeners[job % nl], static_cast<int>(t),
                                    traces[job * trials + t].cumulative_regret()});

    const std::size_t steps = static_cast<std::size_t>(ep.steps);
    for (std::size_t l = 0; l < nl; ++l) {
        ListenerRegret agg{opts.listeners[l], std::vector<double>(steps, 0.0), std::vector<double>(steps, 0.0), 0, 0, 0};
        WeightedStats total;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double w = records[i].weight / static_cast<double>(trials);
            for (std::size_t t = 0; t < trials; ++t) {
                const auto& tr = traces[(i * nl + l) * trials + t];
                double c = 0.0;
                for (std::size_t k = 0; k < steps; ++k) {
                    agg.mean_regret[k] += w * tr.steps[k].regret;
                    agg.mean_cumulative_regret[k] += w * (c += tr.steps[k].regret);
                }
                total.add(c, w);
            }
        }
        for (std::size_t k = 0; k < steps; ++k) {
            agg.mean_regret[k] /= total.sw;
            agg.mean_cumulative_regret[k] /= total.sw;
        }
        agg.mean_total = total.mean();
        agg.sd_total = total.sd();
        agg.episodes = total.n;
        out.listeners.push_back(std::move(agg));
    }
    if (opts.keep_traces) out.traces = std::move(traces);  // same order as `episodes`
    return out;
}

void write_regret_episodes(std::ostream& out, const std::vector<DatasetRecord>& records, const RegretResult& r) {
    out << "record,participant_id,horizon,utterance,listener,trial,cumulative_regret\n";
    for (const auto& e : r.episodes) {
        const auto& rec = records[e.record];
        out << e.record << ',' << text::csv_field(rec.participant_id) << ',' << rec.horizon << ','
            << rec.utterance.to_string() << ',' << listener_name(e.listener) << ',' << e.trial << ','
            << text::fmt(e.cumulative_regret) << '\n';
    }
}

void write_regret_curves(std::ostream& out, const RegretResult& r) {
    out << "listener,step,mean_regret,mean_cumulative_regret\n";
    for (const auto& l : r.listeners)
        for (std::size_t k = 0; k < l.mean_regret.size(); ++k)
            out << listener_name(l.listener) << ',' << k + 1 << ',' << text::fmt(l.mean_regret[k]) << ','
                << text::fmt(l.mean_cumulative_regret[k]) << '\n';
}

void write_regret_summary(std::ostream& out, const RegretResult& r) {
    out << "listener,mean_cumulative_regret,sd,episodes\n";
    for (const auto& l : r.listeners)
        out << listener_name(l.listener) << ',' << text::fmt(l.mean_total) << ',' << text::fmt(l.sd_total) << ','
            << l.episodes << '\n';
}

void write_regret_traces(std::ostream& out, const RegretResult& r) {
    if (r.traces.size() != r.episodes.size()) throw InvalidArgument("regret result holds no traces");
    out << "record,listener,trial,step,state,action,reward,regret,cumulative_regret\n";
    for (std::size_t e = 0; e < r.episodes.size(); ++e) {
        const auto& ep = r.episodes[e];
        double c = 0.0;
        const auto& steps = r.traces[e].steps;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            c += steps[k].regret;
            out << ep.record << ',' << listener_name(ep.listener) << ',' << ep.trial << ',' << k + 1 << ','
                << steps[k].state.to_string() << ',' << steps[k].action.name() << ','
                << text::fmt(steps[k].observed_reward) << ',' << text::fmt(steps[k].regret) << ',' << text::fmt(c)
                << '\n';
        }
    }
}

// ---------------------------------------------------------------------- sweep

std::vector<SweepRow> speaker_sweep(const HarnessConfig& cfg, const SweepOptions& opts) {
    if (opts.horizons.empty() || opts.state_sizes.empty() || opts.utterance_sets.empty() || opts.betas.empty())
        throw InvalidArgument("sweep grid has an empty axis");
    const Vector6 w = cfg.true_weights.as_vector();

    struct Cell {
        double beta;
        int size;
        std::string set;
    };
    std::vector<Cell> cells;
    for (double beta : opts.betas)
        for (int size : opts.state_sizes)
            for (const auto& set : opts.utterance_sets) cells.push_back({beta, size, set});

    std::vector<std::vector<SweepRow>> per_cell(cells.size());
    parallel_for(cells.size(), cfg.thread_count(), [&](std::size_t c) {
        HarnessConfig local = cfg;
        local.state_size = cells[c].size;
        local.utterances = cells[c].set;
        const SpeakerModel model(local.speaker(cells[c].beta));
        const auto states = enumerate_states(cells[c].size);
        const Eigen::RowVectorXd future = w.transpose() * model.future_features();
        for (const Horizon h : opts.horizons) {
            SweepRow row{cells[c].beta, h, cells[c].size, cells[c].set, 0, 0, 0, 0, states.size()};
            for (const auto& s : states) {
                const Eigen::RowVectorXd present = w.transpose() * model.present_features(s);
                const auto d = model.distribution(s, cfg.true_weights, h);
                for (std::size_t i = 0; i < d.probs().size(); ++i) {
                    const double p = d.probs()[i];
                    const auto j = static_cast<Eigen::Index>(i);
                    row.mean_present += p * present[j];
                    row.mean_future += p * future[j];
                    row.mean_reward += p * combined_utility(present[j], future[j], h);
                    if (model.utterances()[i].is_instruction()) row.instruction_probability += p;
                }
            }
            const double n = static_cast<double>(states.size());
            row.mean_present /= n;
            row.mean_future /= n;
            row.mean_reward /= n;
            row.instruction_probability /= n;
            per_cell[c].push_back(row);
        }
    });
    std::vector<SweepRow> out;
    for (auto& rows : per_cell) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "speaker,beta,horizon,state_size,utterances,mean_reward,mean_present_reward,mean_future_reward,"
           "instruction_probability,states\n";
    for (const auto& r : rows)
        out << (std::isinf(r.beta) ? "argmax" : "softmax") << ',' << text::fmt(r.beta) << ','
            << r.horizon.to_string() << ',' << r.state_size << ',' << r.utterances << ',' << text::fmt(r.mean_reward)
            << ',' << text::fmt(r.mean_present) << ',' << text::fmt(r.mean_future) << ','
            << text::fmt(r.instruction_probability) << ',' << r.states << '\n';
}

// ---------------------------------------------------------------- calibration

CalibrationResult calibrate_beta(const std::vector<DatasetRecord>& records, const std::vector<double>& grid,
                                 const HarnessConfig& cfg, const std::vector<ListenerId>& listeners) {
    if (grid.empty()) throw InvalidArgument("beta grid is empty");
    if (listeners.empty()) throw InvalidArgument("listener set is empty");
    CalibrationResult out;
    out.listeners = listeners;
    out.betas = grid;
    for (double beta : grid) {
        const ListenerBank bank(cfg, beta);
        const auto eval = eval_listeners(records, bank, listeners);
        std::vector<double> row;
        for (ListenerId id : listeners) row.push_back(eval.find(id)->mean_future_reward);
        out.means.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < listeners.size(); ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (out.means[i][j] > out.means[best][j]) best = i;
        out.best_beta.push_back(grid[best]);
    }
    return out;
}

void write_calibration(std::ostream& out, const CalibrationResult& r) {
    out << "beta";
    for (ListenerId id : r.listeners) out << ',' << listener_name(id);
    out << '\n';
    for (std::size_t i = 0; i < r.betas.size(); ++i) {
        out << text::fmt(r.betas[i]);
        for (double m : r.means[i]) out << ',' << text::fmt(m);
        out << '\n';
    }
}

// ------------------------------------------------------------------ posterior

namespace {

nlohmann::ordered_json marginals_json(const FeatureMarginals& m) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (Feature f : kAllFeatures) {
        nlohmann::ordered_json row = nlohmann::ordered_json::object();
        for (int v = kMinWeight; v <= kMaxWeight; ++v) row[std::to_string(v)] = m.at(f, v);
        row["expected"] = m.expected_value(f);
        out[std::string(label(f))] = std::move(row);
    }
    return out;
}

nlohmann::ordered_json policy_json(const Policy& p) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < p.state().size(); ++i) out[p.state().actions()[i].name()] = p.probs()[i];
    return out;
}

}  // namespace

nlohmann::ordered_json posterior_report(const Utterance& u, const State& s, const HarnessConfig& cfg) {
    const ListenerBank bank(cfg);
    const ListenerParams lp = cfg.listener();
    const JointPosterior joint = bank.pragmatic().latent(u, s, cfg.horizon_prior);
    const Belief b = joint.reward_marginal();
    const Policy policy = pragmatic_policy(b, s, lp);

    nlohmann::ordered_json out;
    out["utterance"] = u.to_string();
    out["state"] = s.to_string();
    out["beta_s1"] = cfg.beta_s1;
    out["beta_l0"] = cfg.beta_l0;
    out["true_weights"] = cfg.true_weights.to_string();

    nlohmann::ordered_json literal;
    literal["belief_defined"] = u.is_description();
    literal["feature_marginals"] = u.is_description()
                                       ? marginals_json(feature_marginals(description_update(u, Belief::uniform())))
                                       : nlohmann::ordered_json(nullptr);
    literal["policy"] = policy_json(literal_policy(u, s, lp));
    literal["future_reward"] = bank.literal_future_reward(u);
    out["literal"] = std::move(literal);

    nlohmann::ordered_json prag;
    nlohmann::ordered_json hm = nlohmann::ordered_json::array();
    const auto horizon_probs = joint.horizon_marginal();
    for (std::size_t j = 0; j < horizon_probs.size(); ++j)
        hm.push_back({{"horizon", joint.horizons()[j].to_string()},
                      {"prior", cfg.horizon_prior.probs[j]},
                      {"posterior", horizon_probs[j]}});
    prag["horizon_marginal"] = std::move(hm);
    prag["feature_marginals"] = marginals_json(feature_marginals(b));
    nlohmann::ordered_json er = nlohmann::ordered_json::object();
    for (const auto& a : s.actions()) er[a.name()] = b.expected_reward(a);
    prag["expected_rewards"] = std::move(er);
    prag["policy"] = policy_json(policy);
    prag["modal_action"] = policy.modal_action().name();
    prag["future_reward"] = bank.belief_future_reward(b);
    out["pragmatic_latent_h"] = std::move(prag);
    return out;
}

}  // namespace pragbandit
