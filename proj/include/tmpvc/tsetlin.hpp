#pragma once

// Multi-class Tsetlin Machine.
//
// Every clause is a team of two-action Tsetlin Automata, one per literal. The
// literal layout interleaves each input bit with its negation: literal 2k is
// x_k and literal 2k+1 is NOT x_k. Automaton states live in [1, 2N]; a literal
// is Included iff its state exceeds N.
//
// Training uses the usual two feedback types. Type I (on positive clauses of
// the target class and negative clauses of a sampled rival class) makes a
// matching clause memorize more of the input and an unmatched clause forget.
// Type II (the opposite pairing) pushes a matching clause to include a literal
// that is currently 0, so it stops matching.
//
// Random draws in fit_example happen in a fixed order on the caller's engine:
//   1. the rival class, uniform over the q-1 other classes;
//   2. for each clause of the target bank, in index order, one
//      generate_canonical<double, 53> draw compared against the selection
//      probability, followed by one raw 64-bit draw (the clause seed) when the
//      clause was selected for Type I;
//   3. the same for each clause of the rival bank.
// A Type I update then runs on its own std::mt19937_64 seeded with the clause
// seed, so the result does not depend on how many threads apply the updates.
//
// Automaton states are stored bit-sliced: for each literal form and each block
// of 64 inputs there are 8 words, one per bit of the (offset) state counter.
// A Type I update visits the blocks in input order, plain literals before
// negated ones. Lanes that cannot move (at the floor for a decrement, at the
// ceiling for an increment) draw nothing. The remaining lanes of a block each
// compare a uniform 32-bit number against their threshold, one bit at a time
// from the most significant end: every round takes one engine output whose
// bit j belongs to lane j, and a lane is decided at the first bit where it
// differs from the threshold (below means the event happens). Rounds stop
// once every lane is decided. When the clause output is 1 the increment and
// decrement lanes of a block share these rounds.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tmpvc/input_vector.hpp"

namespace tmpvc::tm {

enum class Polarity : std::uint8_t { kPositive, kNegative };
enum class Mode : std::uint8_t { kTrain, kInfer };
enum class LiteralForm : std::uint8_t { kPlain, kNegated };

inline constexpr int kMaxStatesPerAction = 128;
inline constexpr int kDefaultStatesPerAction = 128;

struct IncludedLiteral {
  std::size_t literal;
  std::size_t pixel;
  LiteralForm form;

  bool operator==(const IncludedLiteral&) const = default;
};

/// Probability thresholds for a Type I update, in units of 2^-32.
struct TypeIThresholds {
  std::uint64_t increment;
  std::uint64_t decrement;

  static TypeIThresholds from_specificity(double specificity, bool boost_true_positive);
};

class ClauseTeam {
 public:
  ClauseTeam(std::size_t input_width, int states_per_action, Polarity polarity);

  std::size_t input_width() const noexcept { return input_width_; }
  std::size_t literal_count() const noexcept { return 2 * input_width_; }
  int states_per_action() const noexcept { return states_per_action_; }
  Polarity polarity() const noexcept { return polarity_; }

  /// Automaton state of a literal, in [1, 2N].
  int state(std::size_t literal) const;
  void set_state(std::size_t literal, int state);

  bool included(std::size_t literal) const noexcept {
    const std::size_t k = literal >> 1;
    return (include_[(literal & 1) * words_ + (k >> 6)] >> (k & 63)) & 1U;
  }
  std::size_t included_count() const noexcept { return included_count_; }

  /// One byte per literal holding state - 1, in literal order.
  std::vector<std::uint8_t> raw_states() const;
  void assign_raw_states(std::span<const std::uint8_t> raw);

  /// Conjunction of the Included literals. An empty clause is 1 while training
  /// and 0 at inference.
  bool output(const InputVector& input, Mode mode) const;

  /// Type I step with a known clause output (evaluated in training mode).
  void apply_type_i(const InputVector& input, bool clause_output, const TypeIThresholds& p,
                    std::mt19937_64& rng);
  /// Type II step with a known clause output; no-op when the output is 0.
  void apply_type_ii(const InputVector& input, bool clause_output);

  bool operator==(const ClauseTeam& other) const {
    return input_width_ == other.input_width_ && states_per_action_ == other.states_per_action_ &&
           polarity_ == other.polarity_ && counters_ == other.counters_;
  }

 private:
  static constexpr int kPlanes = 8;
  static constexpr int kTopPlane = kPlanes - 1;

  // Counters hold state - 1 + (128 - N), so the top bit is the Include
  // action. Each (form, 64-input block) owns kPlanes consecutive words.
  std::uint64_t* block(std::size_t form, std::size_t w) noexcept {
    return counters_.data() + (form * words_ + w) * kPlanes;
  }
  const std::uint64_t* block(std::size_t form, std::size_t w) const noexcept {
    return counters_.data() + (form * words_ + w) * kPlanes;
  }
  unsigned counter(std::size_t form, std::size_t k) const noexcept;
  void add(std::size_t form, std::size_t w, std::uint64_t lanes) noexcept;
  void subtract(std::size_t form, std::size_t w, std::uint64_t lanes) noexcept;
  void store(std::size_t form, std::size_t k, unsigned counter) noexcept;
  void check_width(const InputVector& input) const;
  void recount();

  std::size_t input_width_;
  int states_per_action_;
  Polarity polarity_;
  std::size_t words_;
  std::uint64_t last_word_mask_;
  unsigned floor_;    // counter value of state 1
  unsigned ceiling_;  // counter value of state 2N
  std::vector<std::uint64_t> counters_;
  std::vector<std::uint64_t> include_;  // copy of the top planes, plain then negated
  std::size_t included_count_ = 0;
};

/// n clauses voting for one class; the first n/2 are positive, the rest negative.
class ClassBank {
 public:
  ClassBank(std::size_t clause_count, std::size_t input_width, int states_per_action);

  std::size_t size() const noexcept { return clauses_.size(); }
  std::size_t input_width() const noexcept { return clauses_.front().input_width(); }

  ClauseTeam& clause(std::size_t j) { return clauses_.at(j); }
  const ClauseTeam& clause(std::size_t j) const { return clauses_.at(j); }
  std::span<ClauseTeam> clauses() noexcept { return clauses_; }
  std::span<const ClauseTeam> clauses() const noexcept { return clauses_; }

  bool operator==(const ClassBank&) const = default;

 private:
  std::vector<ClauseTeam> clauses_;
};

struct Hyperparameters {
  int classes = 3;
  int clauses_per_class = 5000;
  int margin = 5000;              // T
  double specificity = 1.5;       // s
  int states_per_action = kDefaultStatesPerAction;  // N
  std::size_t input_width = 32000;                  // o

  /// Throws ConfigError on the first violated constraint.
  void validate() const;

  bool operator==(const Hyperparameters&) const = default;
};

class MultiClassModel {
 public:
  explicit MultiClassModel(const Hyperparameters& params);

  const Hyperparameters& params() const noexcept { return params_; }
  int class_count() const noexcept { return params_.classes; }
  std::size_t input_width() const noexcept { return params_.input_width; }

  ClassBank& bank(int c) { return banks_.at(static_cast<std::size_t>(c)); }
  const ClassBank& bank(int c) const { return banks_.at(static_cast<std::size_t>(c)); }

  bool operator==(const MultiClassModel&) const = default;

 private:
  Hyperparameters params_;
  std::vector<ClassBank> banks_;
};

struct FitOptions {
  bool boost_true_positive = false;
};

struct EpochResult {
  double accuracy = 0.0;  // training accuracy of the model after the epoch
};

bool clause_output(const ClauseTeam& clause, const InputVector& input, Mode mode);

/// Positive votes minus negative votes; in [-n/2, n/2].
int class_sum(const ClassBank& bank, const InputVector& input, Mode mode);

/// Unit step: 1 iff vote_sum >= 0.
constexpr int predict_binary(int vote_sum) noexcept { return vote_sum >= 0 ? 1 : 0; }

constexpr int clamp_sum(int vote_sum, int margin) noexcept {
  return vote_sum > margin ? margin : (vote_sum < -margin ? -margin : vote_sum);
}

/// Class sums in inference mode, one per class.
std::vector<int> class_sums(const MultiClassModel& model, const InputVector& input);

/// Argmax of the inference-mode class sums; ties go to the lowest index.
int predict_multiclass(const MultiClassModel& model, const InputVector& input);

/// Type I feedback with the clause output evaluated here. specificity must be
/// >= 1; s == 1 makes every decrement certain.
void type_i_feedback(ClauseTeam& clause, const InputVector& input, double specificity,
                     std::mt19937_64& rng, bool boost_true_positive = false);

void type_ii_feedback(ClauseTeam& clause, const InputVector& input);

void fit_example(MultiClassModel& model, const InputVector& input, int true_class,
                 std::mt19937_64& rng, const FitOptions& options = {});

EpochResult fit_epoch(MultiClassModel& model, std::span<const InputVector> inputs,
                      std::span<const int> labels, std::mt19937_64& rng, bool shuffle,
                      const FitOptions& options = {});

double accuracy(const MultiClassModel& model, std::span<const InputVector> inputs,
                std::span<const int> labels);

std::vector<IncludedLiteral> included_literals(const ClauseTeam& clause);

}  // namespace tmpvc::tm
