#pragma once

// Scalar Tsetlin Machine written straight from the feedback rules, one int per
// automaton. It consumes random numbers in the documented order so traces can
// be compared state by state with the packed implementation.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace reference {

struct Clause {
  std::vector<int> state;  // literal order: 2k = x_k, 2k+1 = not x_k
  bool positive = true;
};

struct Model {
  int q = 2;
  int n = 2;
  int o = 2;
  int N = 128;
  int T = 10;
  double s = 3.9;
  bool boost = false;
  std::vector<std::vector<Clause>> banks;

  Model(int q_, int n_, int o_, int N_, int T_, double s_) : q(q_), n(n_), o(o_), N(N_), T(T_), s(s_) {
    banks.assign(static_cast<std::size_t>(q), {});
    for (auto& bank : banks) {
      for (int j = 0; j < n; ++j) bank.push_back({std::vector<int>(static_cast<std::size_t>(2 * o), N), j < n / 2});
    }
  }
};

inline bool literal_value(const std::vector<bool>& x, int l) { return (l % 2 == 0) ? x[l / 2] : !x[l / 2]; }

inline bool output(const Clause& c, const std::vector<bool>& x, int N, bool train) {
  bool any = false;
  for (int l = 0; l < static_cast<int>(c.state.size()); ++l) {
    if (c.state[l] > N) {
      any = true;
      if (!literal_value(x, l)) return false;
    }
  }
  return any || train;
}

inline int class_sum(const std::vector<Clause>& bank, const std::vector<bool>& x, int N, bool train) {
  int v = 0;
  for (const auto& c : bank) {
    if (output(c, x, N, train)) v += c.positive ? 1 : -1;
  }
  return v;
}

inline int predict(const Model& m, const std::vector<bool>& x) {
  int best = 0;
  int best_sum = class_sum(m.banks[0], x, m.N, false);
  for (int c = 1; c < m.q; ++c) {
    const int v = class_sum(m.banks[static_cast<std::size_t>(c)], x, m.N, false);
    if (v > best_sum) {
      best = c;
      best_sum = v;
    }
  }
  return best;
}

inline std::uint64_t threshold(double p) {
  const std::uint64_t one = std::uint64_t{1} << 32;
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return one;
  return static_cast<std::uint64_t>(std::llround(p * static_cast<double>(one)));
}

// Lane-by-lane Bernoulli trials for one block: lanes[j] >= 0 names the literal
// in bit j and thr[j] its threshold. Returns which lanes fired.
inline std::vector<bool> block_trials(std::mt19937_64& rng, const std::vector<std::uint64_t>& thr,
                                      const std::vector<bool>& open) {
  const std::uint64_t one = std::uint64_t{1} << 32;
  std::vector<bool> fired(64, false);
  std::vector<bool> undecided(64, false);
  for (int j = 0; j < 64; ++j) {
    if (!open[j]) continue;
    if (thr[j] >= one) {
      fired[j] = true;
    } else if (thr[j] > 0) {
      undecided[j] = true;
    }
  }
  for (int bit = 31; bit >= 0; --bit) {
    bool any = false;
    for (int j = 0; j < 64; ++j) any = any || undecided[j];
    if (!any) break;
    const std::uint64_t r = rng();
    for (int j = 0; j < 64; ++j) {
      if (!undecided[j]) continue;
      const bool rb = (r >> j) & 1U;
      const bool tb = (thr[j] >> bit) & 1U;
      if (rb != tb) {
        undecided[j] = false;
        fired[j] = tb && !rb;
      }
    }
  }
  return fired;
}

inline void type_i(Clause& c, const std::vector<bool>& x, int N, double s, bool boost, std::mt19937_64& rng) {
  const bool out = output(c, x, N, true);
  const std::uint64_t p_inc = boost ? (std::uint64_t{1} << 32) : threshold((s - 1.0) / s);
  const std::uint64_t p_dec = threshold(1.0 / s);
  const int o = static_cast<int>(x.size());
  for (int w = 0; w * 64 < o; ++w) {
    for (int form = 0; form < 2; ++form) {
      std::vector<std::uint64_t> thr(64, 0);
      std::vector<bool> open(64, false);
      std::vector<bool> up(64, false);
      for (int j = 0; j < 64 && w * 64 + j < o; ++j) {
        const int l = 2 * (w * 64 + j) + form;
        const int st = c.state[static_cast<std::size_t>(l)];
        if (out && literal_value(x, l)) {
          if (st < 2 * N) {
            open[j] = true;
            up[j] = true;
            thr[j] = p_inc;
          }
        } else if (st > 1) {
          open[j] = true;
          thr[j] = p_dec;
        }
      }
      const auto fired = block_trials(rng, thr, open);
      for (int j = 0; j < 64; ++j) {
        if (!fired[j]) continue;
        const auto l = static_cast<std::size_t>(2 * (w * 64 + j) + form);
        c.state[l] += up[j] ? 1 : -1;
      }
    }
  }
}

inline void type_ii(Clause& c, const std::vector<bool>& x, int N) {
  if (!output(c, x, N, true)) return;
  for (int l = 0; l < static_cast<int>(c.state.size()); ++l) {
    if (!literal_value(x, l) && c.state[l] <= N) ++c.state[l];
  }
}

inline void fit_example(Model& m, const std::vector<bool>& x, int y, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, m.q - 2);
  int rival = pick(rng);
  if (rival >= y) ++rival;
  auto& target = m.banks[static_cast<std::size_t>(y)];
  auto& other = m.banks[static_cast<std::size_t>(rival)];
  const auto clamp = [&](int v) { return std::max(-m.T, std::min(m.T, v)); };
  const int vt = clamp(class_sum(target, x, m.N, true));
  const int vf = clamp(class_sum(other, x, m.N, true));
  const double pt = static_cast<double>(m.T - vt) / (2.0 * m.T);
  const double pf = static_cast<double>(m.T + vf) / (2.0 * m.T);

  struct Job {
    Clause* clause;
    bool type_i;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto& c : target) {
    if (std::generate_canonical<double, 53>(rng) < pt) jobs.push_back({&c, c.positive, c.positive ? rng() : 0});
  }
  for (auto& c : other) {
    if (std::generate_canonical<double, 53>(rng) < pf) jobs.push_back({&c, !c.positive, !c.positive ? rng() : 0});
  }
  // Clause outputs are fixed before any update.
  std::vector<bool> outputs;
  for (auto& j : jobs) outputs.push_back(output(*j.clause, x, m.N, true));
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (jobs[i].type_i) {
      std::mt19937_64 clause_rng(jobs[i].seed);
      type_i(*jobs[i].clause, x, m.N, m.s, m.boost, clause_rng);
    } else if (outputs[i]) {
      type_ii(*jobs[i].clause, x, m.N);
    }
  }
}

}  // namespace reference
