#include "pragbandit/harness/repl.hpp"

#include "pragbandit/error.hpp"
#include "pragbandit/harness/experiments.hpp"
#include "pragbandit/rng.hpp"
#include "text.hpp"

#include <iomanip>
#include <random>

namespace pragbandit {

namespace {

constexpr const char* kUsage =
    "enter an utterance: 'TAKE <texture> <color>' (e.g. TAKE spotted green) or "
    "'DESC <feature> <value>' (e.g. DESC blue -2); 'state a/b/c' picks the next state; 'quit' exits";

void print_policy(std::ostream& out, const Policy& p) {
    for (std::size_t i = 0; i < p.state().size(); ++i)
        out << "    " << std::left << std::setw(16) << p.state().actions()[i].name() << std::fixed
            << std::setprecision(3) << p.probs()[i] << '\n';
}

}  // namespace

int run_repl(const HarnessConfig& cfg, std::istream& in, std::ostream& out, const ReplOptions& opts) {
    const ListenerBank bank(cfg);
    const ListenerParams lp = cfg.listener();
    const auto states = enumerate_states(cfg.state_size);
    std::mt19937_64 rng(child_seed(cfg.seed, {7}));
    std::uniform_int_distribution<std::size_t> pick_state(0, states.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_horizon(0, std::size(kExperimentHorizons) - 1);

    std::optional<State> next_state = opts.state;
    int rounds = 0;
    double literal_total = 0.0, pragmatic_total = 0.0;
    const auto flags = out.flags();

    while (true) {
        const State s = next_state ? *next_state : states[pick_state(rng)];
        const int h = opts.horizon ? *opts.horizon : kExperimentHorizons[pick_horizon(rng)];
        if (!opts.state) next_state.reset();
        out << "\nstate: " << s.to_string() << "    horizon: " << h << '\n';

        std::string line;
        while (true) {
            if (opts.prompt) out << "> " << std::flush;
            if (!std::getline(in, line)) line = "quit";
            const std::string cmd = text::lower(text::trim(line));
            if (cmd.empty()) continue;
            if (cmd == "quit" || cmd == "exit") {
                out.flags(flags);
                out << "\nrounds: " << rounds << "    literal future reward total: " << text::fmt(literal_total)
                    << "    pragmatic future reward total: " << text::fmt(pragmatic_total) << '\n';
                return 0;
            }
            if (cmd == "help") {
                out << kUsage << '\n';
                continue;
            }
            if (cmd.rfind("state ", 0) == 0) {
                try {
                    next_state = State::parse(text::trim(line).substr(6));
                    out << "next state: " << next_state->to_string() << '\n';
                } catch (const Error& e) {
                    out << "error: " << e.what() << '\n';
                }
                continue;
            }
            try {
                const Utterance u = Utterance::parse(line);
                out.flags(flags);
                out << "utterance: " << u.to_string() << '\n';
                out << "  literal listener policy:\n";
                print_policy(out, literal_policy(u, s, lp));
                const double lit = bank.literal_future_reward(u);
                out << "  literal future reward: " << text::fmt(lit) << '\n';

                double prag = lit;
                try {
                    const auto joint = bank.pragmatic().latent(u, s, cfg.horizon_prior);
                    const Belief b = joint.reward_marginal();
                    const Policy p = pragmatic_policy(b, s, lp);
                    out << "  pragmatic listener (latent horizon):\n    horizon posterior:";
                    const auto hm = joint.horizon_marginal();
                    for (std::size_t j = 0; j < hm.size(); ++j)
                        out << ' ' << joint.horizons()[j].to_string() << '=' << text::fmt(std::round(hm[j] * 1000) / 1000);
                    out << "\n    feature means:";
                    const Vector6 m = b.feature_means();
                    for (Feature f : kAllFeatures)
                        out << ' ' << label(f) << '=' << text::fmt(std::round(m[index(f)] * 100) / 100);
                    out << "\n  pragmatic policy:\n";
                    print_policy(out, p);
                    out.flags(flags);
                    out << "  chosen action: " << p.modal_action().name() << " (reward "
                        << reward(p.modal_action(), cfg.true_weights) << ")\n";
                    prag = bank.belief_future_reward(b);
                    out << "  pragmatic future reward: " << text::fmt(prag) << '\n';
                } catch (const UnknownUtterance& e) {
                    out << "  pragmatic listener: " << e.what() << '\n';
                }
                ++rounds;
                literal_total += lit;
                pragmatic_total += prag;
                break;
            } catch (const ParseError&) {
                out << "could not parse '" << text::trim(line) << "'\n" << kUsage << '\n';
            }
        }
    }
}

}  // namespace pragbandit
