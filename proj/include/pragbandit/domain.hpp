#pragma once

// Bandit world: six binary features, nine actions (one color x one texture),
// integer reward weights, states (action subsets) and utterances.

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pragbandit {

inline constexpr int kNumFeatures = 6;
inline constexpr int kNumColors = 3;
inline constexpr int kNumTextures = 3;
inline constexpr int kNumActions = kNumColors * kNumTextures;
inline constexpr int kMinWeight = -2;
inline constexpr int kMaxWeight = 2;
inline constexpr int kNumWeightValues = kMaxWeight - kMinWeight + 1;
inline constexpr int kNumHypotheses = 15625;  // 5^6

using Vector6 = Eigen::Matrix<double, kNumFeatures, 1>;
using Matrix6 = Eigen::Matrix<double, kNumFeatures, kNumFeatures>;

// Canonical feature indices; serialized weight vectors use this order.
enum class Feature : int { Red = 0, Green = 1, Blue = 2, Solid = 3, Spotted = 4, Striped = 5 };

enum class FeatureGroup { Color, Texture };

inline constexpr std::array<Feature, kNumFeatures> kAllFeatures = {
    Feature::Red, Feature::Green, Feature::Blue, Feature::Solid, Feature::Spotted, Feature::Striped};

constexpr int index(Feature f) { return static_cast<int>(f); }
FeatureGroup group(Feature f);
std::string_view label(Feature f);
Feature feature_from_index(int i);
std::optional<Feature> parse_feature(std::string_view text);

/// A mushroom: exactly one color feature and one texture feature.
class Action {
public:
    /// color_index in [0,3) over (red, green, blue); texture_index in [0,3)
    /// over (solid, spotted, striped).
    Action(int color_index, int texture_index);
    Action(Feature color, Feature texture);

    static Action from_id(int id);
    static const std::array<Action, kNumActions>& all();

    int id() const { return color_ * kNumTextures + texture_; }
    Feature color() const { return static_cast<Feature>(color_); }
    Feature texture() const { return static_cast<Feature>(kNumColors + texture_); }
    std::array<int, kNumFeatures> feature_vector() const;
    Vector6 features() const;

    /// "spotted green"
    std::string name() const;
    static std::optional<Action> parse(std::string_view text);

    friend bool operator==(const Action&, const Action&) = default;
    friend auto operator<=>(const Action& a, const Action& b) { return a.id() <=> b.id(); }

private:
    int color_;
    int texture_;
};

class RewardWeights {
public:
    RewardWeights() = default;  // all zero
    explicit RewardWeights(const std::array<int, kNumFeatures>& w);

    /// Position in the lexicographic enumeration of all 5^6 vectors.
    static RewardWeights from_index(int hypothesis_index);
    int index() const;

    int operator[](int feature) const { return w_[feature]; }
    int operator[](Feature f) const { return w_[pragbandit::index(f)]; }
    const std::array<int, kNumFeatures>& values() const { return w_; }
    Vector6 as_vector() const;

    /// "0,2,-2,0,1,-1"
    std::string to_string() const;
    static RewardWeights parse(std::string_view text);

    friend bool operator==(const RewardWeights&, const RewardWeights&) = default;

private:
    std::array<int, kNumFeatures> w_{};
};

/// green=+2, red=0, blue=-2, spotted=+1, solid=0, striped=-1.
RewardWeights canonical_weights();

int reward(const Action& a, const RewardWeights& w);

/// Lexicographic order, first element all -2.
std::vector<RewardWeights> enumerate_hypotheses();

/// Row h holds hypothesis h as doubles; shared, built once.
const Eigen::Matrix<double, Eigen::Dynamic, kNumFeatures>& hypothesis_matrix();

/// Distinct actions kept in canonical (id) order.
class State {
public:
    explicit State(std::vector<Action> actions);
    static State parse(std::string_view text);  // names separated by '/'

    const std::vector<Action>& actions() const { return actions_; }
    std::size_t size() const { return actions_.size(); }
    bool contains(const Action& a) const;
    std::optional<std::size_t> position(const Action& a) const;
    /// Bit i set iff action id i is present.
    std::uint16_t mask() const { return mask_; }

    std::string to_string() const;

    friend bool operator==(const State& a, const State& b) { return a.mask_ == b.mask_; }

private:
    std::vector<Action> actions_;
    std::uint16_t mask_ = 0;
};

/// All C(9, size) states, lexicographic over sorted action ids.
std::vector<State> enumerate_states(int size);

int max_reward(const State& s, const RewardWeights& w);

struct Instruction {
    Action action;
    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Description {
    Feature feature;
    int value;
    friend bool operator==(const Description&, const Description&) = default;
};

class Utterance {
public:
    Utterance(Instruction i) : v_(i) {}  // NOLINT(google-explicit-constructor)
    Utterance(Description d);            // NOLINT(google-explicit-constructor)

    static Utterance take(const Action& a) { return Instruction{a}; }
    static Utterance describe(Feature f, int value) { return Description{f, value}; }

    bool is_instruction() const { return std::holds_alternative<Instruction>(v_); }
    bool is_description() const { return std::holds_alternative<Description>(v_); }
    const Instruction& instruction() const;
    const Description& description() const;

    /// Dense id over all 39 utterances: instructions 0..8, then descriptions
    /// feature-major with value ascending.
    int id() const;

    /// "TAKE spotted green" / "DESC spotted +1"
    std::string to_string() const;
    static Utterance parse(std::string_view text);

    friend bool operator==(const Utterance&, const Utterance&) = default;

private:
    std::variant<Instruction, Description> v_;
};

inline constexpr int kNumUtteranceIds = kNumActions + kNumFeatures * kNumWeightValues;

class UtteranceSet {
public:
    UtteranceSet(std::string name, std::vector<Utterance> utterances);

    const std::string& name() const { return name_; }
    const std::vector<Utterance>& utterances() const { return utterances_; }
    std::size_t size() const { return utterances_.size(); }
    const Utterance& operator[](std::size_t i) const { return utterances_[i]; }
    std::optional<std::size_t> index_of(const Utterance& u) const;

    static UtteranceSet instructions9();
    static UtteranceSet descriptions30();
    static UtteranceSet descriptions16();
    static UtteranceSet experiment25();
    static UtteranceSet full39();
    /// instructions | descriptions | descriptions16 | experiment | full
    static UtteranceSet preset(std::string_view name);

private:
    std::string name_;
    std::vector<Utterance> utterances_;
    std::array<int, kNumUtteranceIds> slot_{};
};

}  // namespace pragbandit
