#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "tmpvc/errors.hpp"
#include "tmpvc/interpretability.hpp"

using namespace tmpvc;
using namespace tmpvc::interp;

namespace {

constexpr int kN = 128;
constexpr int kRows = seg::kAmplitudeRows;
constexpr int kCols = seg::kBeatLength;

void include_pixel(tm::ClauseTeam& clause, int row, int col, bool negated) {
  const auto k = static_cast<std::size_t>(row * kCols + col);
  clause.set_state(2 * k + (negated ? 1 : 0), kN + 1);
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "tmpvc_interp_test";
  std::filesystem::create_directories(dir);
  return dir;
}

// Naive window count, for checking the grid code.
int window_active(const CountGrid& g, int r, int c) {
  int m = 0;
  for (int dr = 0; dr < 3; ++dr) {
    for (int dc = 0; dc < 3; ++dc) m += g(r + dr, c + dc) > 0 ? 1 : 0;
  }
  return m;
}

}  // namespace

TEST(Roles, EmptyClauseIsAllStar) {
  tm::ClauseTeam clause(seg::kBeatBits, kN, tm::Polarity::kPositive);
  const auto roles = clause_roles(clause);
  EXPECT_EQ(roles.rows(), 100);
  EXPECT_EQ(roles.cols(), 320);
  EXPECT_EQ(roles.count(Role::kStar), seg::kBeatBits);
}

TEST(Roles, SingleNegatedPixel) {
  tm::ClauseTeam clause(seg::kBeatBits, kN, tm::Polarity::kPositive);
  include_pixel(clause, 0, 0, true);
  const auto roles = clause_roles(clause);
  EXPECT_EQ(roles(0, 0), Role::kZero);
  EXPECT_EQ(roles.count(Role::kStar), seg::kBeatBits - 1);
}

TEST(Roles, PlainAndConflict) {
  tm::ClauseTeam clause(seg::kBeatBits, kN, tm::Polarity::kPositive);
  include_pixel(clause, 3, 17, false);
  include_pixel(clause, 99, 319, false);
  include_pixel(clause, 99, 319, true);
  const auto roles = clause_roles(clause);
  EXPECT_EQ(roles(3, 17), Role::kOne);
  EXPECT_EQ(roles(99, 319), Role::kConflict);
  EXPECT_TRUE(roles.has_conflict());
}

TEST(Roles, AgreeWithIncludedLiterals) {
  std::mt19937_64 rng(4);
  tm::ClauseTeam clause(seg::kBeatBits, kN, tm::Polarity::kNegative);
  for (int i = 0; i < 300; ++i) {
    include_pixel(clause, static_cast<int>(rng() % kRows), static_cast<int>(rng() % kCols), rng() & 1U);
  }
  const auto roles = clause_roles(clause);
  const auto lits = tm::included_literals(clause);
  std::size_t marked = 0;
  for (const auto& lit : lits) {
    const Role r = roles(static_cast<int>(lit.pixel / kCols), static_cast<int>(lit.pixel % kCols));
    const Role want = lit.form == tm::LiteralForm::kPlain ? Role::kOne : Role::kZero;
    EXPECT_TRUE(r == want || r == Role::kConflict);
  }
  // Every non-star cell comes from one or two included literals.
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      const auto k = static_cast<std::size_t>(r * kCols + c);
      const Role role = roles(r, c);
      EXPECT_EQ(role == Role::kOne || role == Role::kConflict, clause.included(2 * k));
      EXPECT_EQ(role == Role::kZero || role == Role::kConflict, clause.included(2 * k + 1));
      marked += role == Role::kConflict ? 2 : (role == Role::kStar ? 0 : 1);
    }
  }
  EXPECT_EQ(marked, lits.size());
}

TEST(Roles, WidthMismatch) {
  tm::ClauseTeam clause(100, kN, tm::Polarity::kPositive);
  EXPECT_THROW(clause_roles(clause), DimensionError);
  EXPECT_NO_THROW(clause_roles(clause, 10, 10));
}

TEST(Aggregate, UntrainedIsZero) {
  tm::ClassBank bank(4, seg::kBeatBits, kN);
  const auto map = aggregate(bank, tm::Polarity::kNegative);
  EXPECT_EQ(map.clauses, 2);
  EXPECT_EQ(map.zero_counts.sum(), 0);
  EXPECT_EQ(map.one_counts.sum(), 0);
  EXPECT_EQ(map.zero_counts.rows(), 100);
  EXPECT_EQ(map.zero_counts.cols(), 320);
}

TEST(Aggregate, CountsPerPolarity) {
  tm::ClassBank bank(4, seg::kBeatBits, kN);
  include_pixel(bank.clause(0), 10, 20, true);
  include_pixel(bank.clause(1), 10, 20, true);
  include_pixel(bank.clause(1), 11, 20, false);
  include_pixel(bank.clause(2), 10, 20, true);  // negative clause
  const auto pos = aggregate(bank, tm::Polarity::kPositive);
  EXPECT_EQ(pos.zero_counts(10, 20), 2);
  EXPECT_EQ(pos.one_counts(11, 20), 1);
  EXPECT_EQ(pos.zero_counts.sum(), 2);
  const auto neg = aggregate(bank, tm::Polarity::kNegative);
  EXPECT_EQ(neg.zero_counts(10, 20), 1);
  EXPECT_EQ(neg.zero_counts.sum(), 1);
}

TEST(Aggregate, MatchesDoubleLoopAndIgnoresOrder) {
  std::mt19937_64 rng(6);
  const int rows = 6;
  const int cols = 7;
  tm::ClassBank bank(10, rows * cols, 4);
  tm::ClassBank reversed(10, rows * cols, 4);
  for (std::size_t j = 0; j < 10; ++j) {
    for (std::size_t l = 0; l < static_cast<std::size_t>(2 * rows * cols); ++l) {
      if (rng() % 5 == 0 && (l % 2 == 1 || rng() % 3 == 0)) {
        bank.clause(j).set_state(l, 5 + static_cast<int>(rng() % 4));
      }
    }
  }
  // Same clauses in reverse order within each polarity half.
  for (std::size_t j = 0; j < 5; ++j) {
    reversed.clause(j).assign_raw_states(bank.clause(4 - j).raw_states());
    reversed.clause(5 + j).assign_raw_states(bank.clause(9 - j).raw_states());
  }
  for (auto pol : {tm::Polarity::kPositive, tm::Polarity::kNegative}) {
    CountGrid zero = CountGrid::Zero(rows, cols);
    CountGrid one = CountGrid::Zero(rows, cols);
    int skipped = 0;
    for (const auto& clause : bank.clauses()) {
      if (clause.polarity() != pol) continue;
      const auto roles = clause_roles(clause, rows, cols);
      if (roles.has_conflict()) {
        ++skipped;
        continue;
      }
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          zero(r, c) += roles(r, c) == Role::kZero;
          one(r, c) += roles(r, c) == Role::kOne;
        }
      }
    }
    const auto map = aggregate(bank, pol, rows, cols);
    EXPECT_TRUE((map.zero_counts == zero).all());
    EXPECT_TRUE((map.one_counts == one).all());
    EXPECT_EQ(map.skipped_conflicts, skipped);
    EXPECT_LE(map.zero_counts.maxCoeff(), map.clauses);
    const auto rev = aggregate(reversed, pol, rows, cols);
    EXPECT_TRUE((rev.zero_counts == map.zero_counts).all());
    EXPECT_TRUE((rev.one_counts == map.one_counts).all());
  }
}

TEST(Aggregate, SkipsConflictingClauses) {
  tm::ClassBank bank(2, seg::kBeatBits, kN);
  include_pixel(bank.clause(0), 5, 5, true);
  include_pixel(bank.clause(0), 5, 5, false);
  const auto map = aggregate(bank, tm::Polarity::kPositive);
  EXPECT_EQ(map.skipped_conflicts, 1);
  EXPECT_EQ(map.zero_counts.sum(), 0);
}

TEST(Lld, Values) {
  EXPECT_EQ(lld_value(9), 0.0);
  EXPECT_NEAR(lld_value(1), -9.542425094393248, 1e-12);
  EXPECT_EQ(lld_value(0), -30.0);
  EXPECT_EQ(lld_value(0, -45.5), -45.5);
  for (int m = 1; m < 9; ++m) {
    EXPECT_LT(lld_value(m), lld_value(m + 1));
    EXPECT_LT(lld_value(m), 0.0);
  }
}

TEST(Lld, HeatmapWindows) {
  CountGrid g = CountGrid::Zero(100, 320);
  g.block(0, 0, 3, 3).setConstant(4);  // m = 9 at (0, 0)
  g(50, 50) = 2;                        // m = 1 for the 9 windows covering it
  const auto h = lld_heatmap(g);
  ASSERT_EQ(h.rows(), 98);
  ASSERT_EQ(h.cols(), 318);
  EXPECT_EQ(h(0, 0), 0.0);
  EXPECT_NEAR(h(48, 48), 10.0 * std::log10(1.0 / 9.0), 1e-12);
  EXPECT_NEAR(h(50, 50), 10.0 * std::log10(1.0 / 9.0), 1e-12);
  EXPECT_EQ(h(60, 60), -30.0);
  EXPECT_EQ(lld_heatmap(g, -12.0)(60, 60), -12.0);
}

TEST(Lld, MatchesNaiveWindowCount) {
  std::mt19937_64 rng(12);
  CountGrid g(20, 25);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 25; ++c) g(r, c) = rng() % 3 == 0 ? static_cast<int>(rng() % 5) : 0;
  }
  const auto h = lld_heatmap(g);
  for (int r = 0; r < 18; ++r) {
    for (int c = 0; c < 23; ++c) {
      const int m = window_active(g, r, c);
      const double want = m > 0 ? 10.0 * std::log10(m / 9.0) : -30.0;
      EXPECT_NEAR(h(r, c), want, 1e-12);
      EXPECT_LE(h(r, c), 0.0);
    }
  }
}

TEST(Lld, ClauseDensityNumerator) {
  CountGrid g = CountGrid::Zero(3, 3);
  g.setConstant(4);
  const auto h = lld_heatmap(g, 4, LldNumerator::kClauseDensity);
  EXPECT_NEAR(h(0, 0), 0.0, 1e-12);
  g(1, 1) = 0;
  EXPECT_NEAR(lld_heatmap(g, 4, LldNumerator::kClauseDensity)(0, 0), 10.0 * std::log10(32.0 / 36.0), 1e-12);
  EXPECT_THROW(lld_heatmap(CountGrid::Zero(2, 5)), DimensionError);
}

TEST(MeanWaveform, Basics) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<seg::BeatWindow> beats(7);
  for (auto& b : beats) {
    b.samples.resize(320);
    for (int i = 0; i < 320; ++i) b.samples[i] = g(rng);
  }
  const auto one = mean_waveform(std::span(beats.data(), 1));
  EXPECT_EQ(one, beats[0].samples);

  std::vector<seg::BeatWindow> pair{beats[0], {-beats[0].samples, 0}};
  EXPECT_NEAR(mean_waveform(pair).cwiseAbs().maxCoeff(), 0.0, 1e-15);

  const auto mean = mean_waveform(beats);
  for (int c = 0; c < 320; ++c) {
    double s = 0.0;
    for (const auto& b : beats) s += b.samples[c];
    EXPECT_NEAR(mean[c], s / 7.0, 1e-12);
  }
  EXPECT_THROW(mean_waveform(std::span<const seg::BeatWindow>{}), std::invalid_argument);
}

TEST(Export, RoleMapDimensionsAndValues) {
  const auto path = temp_dir() / "roles.pgm";
  CountGrid g = CountGrid::Zero(100, 320);
  export_role_map(g, std::nullopt, path);
  auto img = read_netpbm(path);
  EXPECT_EQ(img.magic, "P2");
  EXPECT_EQ(img.width, 320);
  EXPECT_EQ(img.height, 100);
  EXPECT_EQ(img.maxval, 1);
  for (int v : img.values) EXPECT_EQ(v, 1);

  g(7, 9) = 3;
  g(0, 1) = 1;
  export_role_map(g, std::nullopt, path);
  img = read_netpbm(path);
  EXPECT_EQ(img.maxval, 4);
  EXPECT_EQ(img.values[7 * 320 + 9], 1);
  EXPECT_EQ(img.values[1], 3);
  EXPECT_EQ(img.values[2], 4);
}

TEST(Export, ConstantOverlayIsOneLine) {
  const auto path = temp_dir() / "overlay.pgm";
  CountGrid g = CountGrid::Zero(100, 320);
  Overlay ov{Eigen::VectorXd::Constant(320, 0.5), {0.0, 1.0}};
  export_role_map(g, ov, path);
  const auto img = read_netpbm(path);
  for (int r = 0; r < 100; ++r) {
    for (int c = 0; c < 320; ++c) EXPECT_EQ(img.values[static_cast<std::size_t>(r * 320 + c)], r == 50 ? 0 : 1);
  }
  Overlay bad{Eigen::VectorXd::Zero(10), {0.0, 1.0}};
  EXPECT_THROW(export_role_map(g, bad, path), DimensionError);
}

TEST(Export, HeatmapRoundTrip) {
  const auto path = temp_dir() / "heat.ppm";
  CountGrid g = CountGrid::Zero(100, 320);
  g.block(0, 0, 3, 3).setConstant(1);
  g(50, 100) = 1;
  const auto h = lld_heatmap(g);
  export_heatmap(h, std::nullopt, path);
  const auto img = read_netpbm(path);
  EXPECT_EQ(img.magic, "P3");
  EXPECT_EQ(img.width, 318);
  EXPECT_EQ(img.height, 98);
  EXPECT_EQ(img.maxval, 255);
  for (int r = 0; r < 98; ++r) {
    for (int c = 0; c < 318; ++c) {
      const auto i = static_cast<std::size_t>(3 * (r * 318 + c));
      // Red channel is the ramp index: round(255 * (v + 30) / 30).
      const double recovered = img.values[i] / 255.0 * 30.0 - 30.0;
      EXPECT_NEAR(recovered, h(r, c), 30.0 / 255.0 / 2.0 + 1e-9);
      const auto rgb = heat_color(img.values[i]);
      EXPECT_EQ(img.values[i + 1], rgb[1]);
      EXPECT_EQ(img.values[i + 2], rgb[2]);
    }
  }
}

TEST(Export, HeatmapOverlayAndErrors) {
  const auto path = temp_dir() / "heat_overlay.ppm";
  const Eigen::ArrayXXd h = Eigen::ArrayXXd::Constant(98, 318, -30.0);
  Overlay ov{Eigen::VectorXd::Constant(320, 0.5), {0.0, 1.0}};
  export_heatmap(h, ov, path);
  const auto img = read_netpbm(path);
  for (int c = 0; c < 318; ++c) {
    const auto i = static_cast<std::size_t>(3 * (49 * 318 + c));
    EXPECT_EQ(img.values[i] + img.values[i + 1] + img.values[i + 2], 0);
  }
  EXPECT_THROW(export_heatmap(h, std::nullopt, "/nonexistent_dir/x.ppm"), IoError);
  EXPECT_THROW(export_role_map(CountGrid::Zero(3, 3), std::nullopt, "/nonexistent_dir/x.pgm"), IoError);
}

TEST(Export, HeatColorRamp) {
  EXPECT_EQ(heat_color(0), (std::array<std::uint8_t, 3>{0, 0, 255}));
  EXPECT_EQ(heat_color(255), (std::array<std::uint8_t, 3>{255, 0, 0}));
  EXPECT_EQ(heat_color(128), (std::array<std::uint8_t, 3>{128, 254, 127}));
  EXPECT_EQ(heat_color(-5), heat_color(0));
  EXPECT_EQ(heat_color(300), heat_color(255));
}

TEST(Report, ListsPolaritiesAndTopPixels) {
  tm::ClassBank bank(4, seg::kBeatBits, kN);
  include_pixel(bank.clause(0), 10, 20, true);
  include_pixel(bank.clause(1), 10, 20, true);
  include_pixel(bank.clause(1), 2, 3, false);
  const auto text = class_report(bank, "PVC_R");
  EXPECT_NE(text.find("class PVC_R"), std::string::npos);
  EXPECT_NE(text.find("positive polarity\n  clauses: 2\n  mean included literals: 1.500"), std::string::npos);
  EXPECT_NE(text.find("negative polarity\n  clauses: 2\n  mean included literals: 0.000"), std::string::npos);
  EXPECT_NE(text.find("    10 20 2 0\n    2 3 0 1\n"), std::string::npos);
}
