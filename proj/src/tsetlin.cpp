#include "tmpvc/tsetlin.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "tmpvc/errors.hpp"

namespace tmpvc::tm {

namespace {

constexpr std::uint64_t kOne32 = std::uint64_t{1} << 32;

std::uint64_t probability_threshold(double p) {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return kOne32;
  return static_cast<std::uint64_t>(std::llround(p * static_cast<double>(kOne32)));
}

// Mask of the lanes whose uniform 32-bit draw is below their threshold: lanes
// in `a` use threshold ta and lanes in `b` use tb (in units of 2^-32, 2^32 is
// certain). Draw bits are compared from the most significant end, one engine
// output per bit position, and only while some lane is undecided.
std::uint64_t bernoulli_lanes(std::mt19937_64& rng, std::uint64_t a, std::uint64_t ta, std::uint64_t b,
                              std::uint64_t tb) {
  std::uint64_t result = 0;
  if (ta >= kOne32) {
    result |= a;
    a = 0;
  } else if (ta == 0) {
    a = 0;
  }
  if (tb >= kOne32) {
    result |= b;
    b = 0;
  } else if (tb == 0) {
    b = 0;
  }
  for (int i = 31; i >= 0 && (a | b) != 0; --i) {
    const std::uint64_t r = rng();
    const bool abit = (ta >> i) & 1U;
    const bool bbit = (tb >> i) & 1U;
    result |= ((abit ? a : 0) | (bbit ? b : 0)) & ~r;
    a &= abit ? r : ~r;
    b &= bbit ? r : ~r;
  }
  return result;
}

}  // namespace

TypeIThresholds TypeIThresholds::from_specificity(double specificity, bool boost_true_positive) {
  if (!(specificity >= 1.0)) throw ConfigError("specificity must be >= 1, got " + std::to_string(specificity));
  return {boost_true_positive ? kOne32 : probability_threshold((specificity - 1.0) / specificity),
          probability_threshold(1.0 / specificity)};
}

// ---------------------------------------------------------------------------
// ClauseTeam

ClauseTeam::ClauseTeam(std::size_t input_width, int states_per_action, Polarity polarity)
    : input_width_(input_width),
      states_per_action_(states_per_action),
      polarity_(polarity),
      words_((input_width + 63) / 64),
      last_word_mask_(input_width % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (input_width % 64)) - 1),
      floor_(static_cast<unsigned>(kMaxStatesPerAction - states_per_action)),
      ceiling_(static_cast<unsigned>(kMaxStatesPerAction + states_per_action - 1)) {
  if (input_width == 0) throw ConfigError("clause input width must be positive");
  if (states_per_action < 1 || states_per_action > kMaxStatesPerAction) {
    throw ConfigError("states per action must lie in [1, " + std::to_string(kMaxStatesPerAction) + "]");
  }
  // Every automaton starts at state N, the last Exclude state: counter 127.
  counters_.assign(2 * words_ * kPlanes, 0);
  include_.assign(2 * words_, 0);
  for (std::size_t f = 0; f < 2; ++f) {
    for (std::size_t w = 0; w < words_; ++w) {
      const std::uint64_t valid = w + 1 == words_ ? last_word_mask_ : ~std::uint64_t{0};
      std::fill(block(f, w), block(f, w) + kTopPlane, valid);
    }
  }
}

unsigned ClauseTeam::counter(std::size_t form, std::size_t k) const noexcept {
  const std::uint64_t* c = block(form, k >> 6);
  unsigned value = 0;
  for (int b = 0; b < kPlanes; ++b) value |= static_cast<unsigned>((c[b] >> (k & 63)) & 1U) << b;
  return value;
}

void ClauseTeam::store(std::size_t form, std::size_t k, unsigned value) noexcept {
  std::uint64_t* c = block(form, k >> 6);
  const std::uint64_t bit = std::uint64_t{1} << (k & 63);
  for (int b = 0; b < kPlanes; ++b) c[b] = ((value >> b) & 1U) ? (c[b] | bit) : (c[b] & ~bit);
  include_[form * words_ + (k >> 6)] = c[kTopPlane];
}

int ClauseTeam::state(std::size_t literal) const {
  if (literal >= literal_count()) throw DimensionError("literal index out of range");
  return static_cast<int>(counter(literal & 1, literal >> 1) - floor_) + 1;
}

void ClauseTeam::set_state(std::size_t literal, int state) {
  if (literal >= literal_count()) throw DimensionError("literal index out of range");
  if (state < 1 || state > 2 * states_per_action_) throw ConfigError("automaton state out of [1, 2N]");
  store(literal & 1, literal >> 1, static_cast<unsigned>(state - 1) + floor_);
  recount();
}

std::vector<std::uint8_t> ClauseTeam::raw_states() const {
  std::vector<std::uint8_t> raw(literal_count());
  for (std::size_t l = 0; l < raw.size(); ++l) raw[l] = static_cast<std::uint8_t>(counter(l & 1, l >> 1) - floor_);
  return raw;
}

void ClauseTeam::assign_raw_states(std::span<const std::uint8_t> raw) {
  if (raw.size() != literal_count()) throw DimensionError("state array length mismatch");
  const int top = 2 * states_per_action_ - 1;
  if (std::any_of(raw.begin(), raw.end(), [top](std::uint8_t v) { return v > top; })) {
    throw FormatError("automaton state exceeds 2N");
  }
  std::fill(counters_.begin(), counters_.end(), 0);
  for (std::size_t l = 0; l < raw.size(); ++l) {
    const unsigned value = raw[l] + floor_;
    const std::size_t k = l >> 1;
    std::uint64_t* c = block(l & 1, k >> 6);
    for (int b = 0; b < kPlanes; ++b) c[b] |= static_cast<std::uint64_t>((value >> b) & 1U) << (k & 63);
  }
  for (std::size_t f = 0; f < 2; ++f) {
    for (std::size_t w = 0; w < words_; ++w) include_[f * words_ + w] = block(f, w)[kTopPlane];
  }
  recount();
}

void ClauseTeam::recount() {
  included_count_ = 0;
  for (auto word : include_) included_count_ += static_cast<std::size_t>(std::popcount(word));
}

void ClauseTeam::check_width(const InputVector& input) const {
  if (input.size() != input_width_) {
    throw DimensionError("input width " + std::to_string(input.size()) + " does not match clause width " +
                         std::to_string(input_width_));
  }
}

bool ClauseTeam::output(const InputVector& input, Mode mode) const {
  check_width(input);
  if (mode == Mode::kInfer && included_count_ == 0) return false;
  const auto x = input.words();
  const std::uint64_t* plain = include_.data();
  const std::uint64_t* negated = include_.data() + words_;
  for (std::size_t w = 0; w < words_; ++w) {
    if (((plain[w] & ~x[w]) | (negated[w] & x[w])) != 0) return false;
  }
  return true;
}

namespace {

template <int Planes>
std::uint64_t lanes_equal(const std::uint64_t* c, unsigned value) noexcept {
  std::uint64_t eq = ~std::uint64_t{0};
  for (int b = 0; b < Planes; ++b) eq &= ((value >> b) & 1U) ? c[b] : ~c[b];
  return eq;
}

}  // namespace

// Bit-sliced +1 on the given lanes; callers exclude lanes at the ceiling.
void ClauseTeam::add(std::size_t form, std::size_t w, std::uint64_t lanes) noexcept {
  std::uint64_t* c = block(form, w);
  for (int b = 0; b < kPlanes; ++b) {
    const std::uint64_t carry = c[b] & lanes;
    c[b] ^= lanes;
    lanes = carry;
  }
  std::uint64_t& inc = include_[form * words_ + w];
  included_count_ += static_cast<std::size_t>(std::popcount(c[kTopPlane] & ~inc));
  inc = c[kTopPlane];
}

// Bit-sliced -1 on the given lanes; callers exclude lanes at the floor.
void ClauseTeam::subtract(std::size_t form, std::size_t w, std::uint64_t lanes) noexcept {
  std::uint64_t* c = block(form, w);
  for (int b = 0; b < kPlanes; ++b) {
    const std::uint64_t borrow = ~c[b] & lanes;
    c[b] ^= lanes;
    lanes = borrow;
  }
  std::uint64_t& inc = include_[form * words_ + w];
  included_count_ -= static_cast<std::size_t>(std::popcount(inc & ~c[kTopPlane]));
  inc = c[kTopPlane];
}

void ClauseTeam::apply_type_i(const InputVector& input, bool clause_output, const TypeIThresholds& p,
                              std::mt19937_64& rng) {
  check_width(input);
  const auto x = input.words();
  for (std::size_t w = 0; w < words_; ++w) {
    const std::uint64_t valid = w + 1 == words_ ? last_word_mask_ : ~std::uint64_t{0};
    for (std::size_t f = 0; f < 2; ++f) {
      const std::uint64_t above_floor = valid & ~lanes_equal<kPlanes>(block(f, w), floor_);
      if (!clause_output) {
        // Forget: every literal drifts toward Exclude with probability 1/s.
        if (above_floor == 0) continue;
        const std::uint64_t down = bernoulli_lanes(rng, above_floor, p.decrement, 0, 0);
        if (down != 0) subtract(f, w, down);
        continue;
      }
      // Memorize: value-1 literals move toward Include with probability
      // (s-1)/s, value-0 literals toward Exclude with probability 1/s.
      const std::uint64_t ones = (f == 0 ? x[w] : ~x[w]) & valid;
      const std::uint64_t up_lanes = ones & ~lanes_equal<kPlanes>(block(f, w), ceiling_);
      const std::uint64_t down_lanes = ~ones & above_floor;
      if ((up_lanes | down_lanes) == 0) continue;
      const std::uint64_t hit = bernoulli_lanes(rng, up_lanes, p.increment, down_lanes, p.decrement);
      if (hit & up_lanes) add(f, w, hit & up_lanes);
      if (hit & down_lanes) subtract(f, w, hit & down_lanes);
    }
  }
}

void ClauseTeam::apply_type_ii(const InputVector& input, bool clause_output) {
  check_width(input);
  if (!clause_output) return;
  const auto x = input.words();
  for (std::size_t w = 0; w < words_; ++w) {
    const std::uint64_t valid = w + 1 == words_ ? last_word_mask_ : ~std::uint64_t{0};
    for (std::size_t f = 0; f < 2; ++f) {
      // Excluded literals that are 0 under this input take one step toward Include.
      const std::uint64_t zeros = (f == 0 ? ~x[w] : x[w]) & valid;
      const std::uint64_t lanes = zeros & ~include_[f * words_ + w];
      if (lanes != 0) add(f, w, lanes);
    }
  }
}

// ---------------------------------------------------------------------------
// ClassBank / model

ClassBank::ClassBank(std::size_t clause_count, std::size_t input_width, int states_per_action) {
  if (clause_count == 0 || clause_count % 2 != 0) throw ConfigError("clause count must be even and positive");
  clauses_.reserve(clause_count);
  for (std::size_t j = 0; j < clause_count; ++j) {
    clauses_.emplace_back(input_width, states_per_action,
                          j < clause_count / 2 ? Polarity::kPositive : Polarity::kNegative);
  }
}

void Hyperparameters::validate() const {
  if (classes < 2) throw ConfigError("need at least 2 classes");
  if (clauses_per_class < 2 || clauses_per_class % 2 != 0) {
    throw ConfigError("clauses per class must be even and >= 2, got " + std::to_string(clauses_per_class));
  }
  if (margin <= 0) throw ConfigError("margin T must be positive, got " + std::to_string(margin));
  if (!(specificity > 1.0) || !std::isfinite(specificity)) {
    throw ConfigError("specificity s must be > 1, got " + std::to_string(specificity));
  }
  if (states_per_action < 1 || states_per_action > kMaxStatesPerAction) {
    throw ConfigError("states per action must lie in [1, 128], got " + std::to_string(states_per_action));
  }
  if (input_width == 0) throw ConfigError("input width must be positive");
}

MultiClassModel::MultiClassModel(const Hyperparameters& params) : params_(params) {
  params_.validate();
  banks_.reserve(static_cast<std::size_t>(params_.classes));
  for (int c = 0; c < params_.classes; ++c) {
    banks_.emplace_back(static_cast<std::size_t>(params_.clauses_per_class), params_.input_width,
                        params_.states_per_action);
  }
}

// ---------------------------------------------------------------------------
// Inference

bool clause_output(const ClauseTeam& clause, const InputVector& input, Mode mode) {
  return clause.output(input, mode);
}

int class_sum(const ClassBank& bank, const InputVector& input, Mode mode) {
  int sum = 0;
  for (const auto& clause : bank.clauses()) {
    if (clause.output(input, mode)) sum += clause.polarity() == Polarity::kPositive ? 1 : -1;
  }
  return sum;
}

std::vector<int> class_sums(const MultiClassModel& model, const InputVector& input) {
  if (input.size() != model.input_width()) throw DimensionError("input width does not match model");
  std::vector<int> sums(static_cast<std::size_t>(model.class_count()));
  for (int c = 0; c < model.class_count(); ++c) sums[static_cast<std::size_t>(c)] = class_sum(model.bank(c), input, Mode::kInfer);
  return sums;
}

int predict_multiclass(const MultiClassModel& model, const InputVector& input) {
  const auto sums = class_sums(model, input);
  return static_cast<int>(std::max_element(sums.begin(), sums.end()) - sums.begin());
}

// ---------------------------------------------------------------------------
// Training

void type_i_feedback(ClauseTeam& clause, const InputVector& input, double specificity, std::mt19937_64& rng,
                     bool boost_true_positive) {
  const auto p = TypeIThresholds::from_specificity(specificity, boost_true_positive);
  clause.apply_type_i(input, clause.output(input, Mode::kTrain), p, rng);
}

void type_ii_feedback(ClauseTeam& clause, const InputVector& input) {
  clause.apply_type_ii(input, clause.output(input, Mode::kTrain));
}

namespace {

struct FeedbackJob {
  ClauseTeam* clause;
  bool output;
  bool type_i;
  std::uint64_t seed;
};

void select_feedback(ClassBank& bank, const InputVector& input, double probability, Polarity type_i_polarity,
                     std::mt19937_64& rng, std::vector<FeedbackJob>& jobs) {
  for (auto& clause : bank.clauses()) {
    const bool output = clause.output(input, Mode::kTrain);
    if (std::generate_canonical<double, 53>(rng) < probability) {
      const bool type_i = clause.polarity() == type_i_polarity;
      // Type II on a non-matching clause is a no-op.
      if (!type_i && !output) continue;
      jobs.push_back({&clause, output, type_i, type_i ? rng() : 0});
    }
  }
}

}  // namespace

void fit_example(MultiClassModel& model, const InputVector& input, int true_class, std::mt19937_64& rng,
                 const FitOptions& options) {
  const int q = model.class_count();
  if (true_class < 0 || true_class >= q) {
    throw ConfigError("class index " + std::to_string(true_class) + " out of range [0, " + std::to_string(q) + ")");
  }
  if (input.size() != model.input_width()) throw DimensionError("input width does not match model");

  const auto& params = model.params();
  const int margin = params.margin;

  std::uniform_int_distribution<int> pick_rival(0, q - 2);
  int rival = pick_rival(rng);
  if (rival >= true_class) ++rival;

  ClassBank& target_bank = model.bank(true_class);
  ClassBank& rival_bank = model.bank(rival);

  // Both vote sums are taken before any automaton moves.
  const int v_target = clamp_sum(class_sum(target_bank, input, Mode::kTrain), margin);
  const int v_rival = clamp_sum(class_sum(rival_bank, input, Mode::kTrain), margin);
  const double p_target = static_cast<double>(margin - v_target) / (2.0 * margin);
  const double p_rival = static_cast<double>(margin + v_rival) / (2.0 * margin);

  std::vector<FeedbackJob> jobs;
  jobs.reserve(target_bank.size() + rival_bank.size());
  select_feedback(target_bank, input, p_target, Polarity::kPositive, rng, jobs);
  select_feedback(rival_bank, input, p_rival, Polarity::kNegative, rng, jobs);

  const auto thresholds = TypeIThresholds::from_specificity(params.specificity, options.boost_true_positive);
  const auto n_jobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 4) if (n_jobs > 8)
  for (std::ptrdiff_t i = 0; i < n_jobs; ++i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    if (job.type_i) {
      std::mt19937_64 clause_rng(job.seed);
      job.clause->apply_type_i(input, job.output, thresholds, clause_rng);
    } else {
      job.clause->apply_type_ii(input, job.output);
    }
  }
}

double accuracy(const MultiClassModel& model, std::span<const InputVector> inputs, std::span<const int> labels) {
  if (inputs.size() != labels.size()) throw DimensionError("inputs and labels differ in length");
  if (inputs.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (predict_multiclass(model, inputs[i]) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(inputs.size());
}

EpochResult fit_epoch(MultiClassModel& model, std::span<const InputVector> inputs, std::span<const int> labels,
                      std::mt19937_64& rng, bool shuffle, const FitOptions& options) {
  if (inputs.empty()) throw ConfigError("cannot train on an empty dataset");
  if (inputs.size() != labels.size()) throw DimensionError("inputs and labels differ in length");
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) std::shuffle(order.begin(), order.end(), rng);
  for (auto i : order) fit_example(model, inputs[i], labels[i], rng, options);
  return {accuracy(model, inputs, labels)};
}

std::vector<IncludedLiteral> included_literals(const ClauseTeam& clause) {
  std::vector<IncludedLiteral> out;
  out.reserve(clause.included_count());
  for (std::size_t l = 0; l < clause.literal_count(); ++l) {
    if (clause.included(l)) out.push_back({l, l >> 1, (l & 1) ? LiteralForm::kNegated : LiteralForm::kPlain});
  }
  return out;
}

}  // namespace tmpvc::tm
