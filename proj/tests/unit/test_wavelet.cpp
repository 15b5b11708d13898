#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tmpvc/wavelet.hpp"

using namespace tmpvc;
using namespace tmpvc::wavelet;

namespace {

Eigen::VectorXd ramp_signal(int n, double (*f)(int)) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = f(i);
  return x;
}

double small_signal(int i) { return std::sin(0.1 * i) + 0.3 * std::cos(0.37 * i); }
double long_signal(int i) { return std::sin(0.05 * i) + 0.2 * std::sin(1.3 * i) + 0.001 * i; }

Eigen::VectorXd random_signal(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

// Reference coefficients from an independent bior2.6 implementation with
// half-sample symmetric extension, two levels over 40 samples.
TEST(Wavelet, MatchesReferenceCoefficients) {
  const auto x = ramp_signal(40, small_signal);
  const auto dec = dwt_decompose(x, 2);
  const std::vector<double> a2 = {
      0.8695342272636206, 0.6449504118163913, 0.8435751391248608, 0.828453020566795,   0.7069946792534866,
      0.8049573260363213, 0.7432546005164649, 1.0994060506352288, 2.3153224051970165,  2.6316247570223767,
      1.4372930749295865, 0.3486541994100637, 0.35219452102090015, 0.24421462098634847, -1.4137229752208134,
      -0.8875339989322811, 0.06750716245249083, -1.6931595759483278, -0.45138499186147285};
  const std::vector<double> d2 = {
      -0.07820616279014123, -0.004996377117556489, 0.022241262095274605, -0.05659319783886477,
      0.11005777392682334,  -0.01231885412022099,  0.06553337602451406,  0.003221244976893023,
      -0.09588164899851315, -0.053782487813297974, 0.05595088192685488,  0.04151159511733092,
      -0.05994840726395641, -0.07113219432117228,  0.3013708556011809,   -0.16314420135600496,
      -0.04410902749775231, 0.10907654526445021,   -0.07199522352387558};
  const std::vector<double> d1 = {
      -0.0026772947370406475, -0.011302930358601304, 0.028118674026567078,  -0.013736730886013501,
      -0.007427306548584811,  0.002262633021692606,  0.009950726054524156,  0.011334327319797527,
      0.0054522762540344105,  -0.004802889238625874, -0.014190570733073837, -0.017858348326227458,
      -0.01387779197866934,   -0.004253548433473808, 0.006122128017181677,  0.01202267783855801,
      0.010613059388715554,   0.0029226347579014017, -0.006704894166391626, -0.012896317218299612,
      -0.012072894109165837,  -0.004335824802341473, 0.06563193052526581,   0.0010547683607355363,
      -0.008904960874828498,  -0.013451482937743453};
  ASSERT_EQ(dec.approx.size(), 19);
  ASSERT_EQ(dec.detail(2).size(), 19);
  ASSERT_EQ(dec.detail(1).size(), 26);
  for (int i = 0; i < 19; ++i) EXPECT_NEAR(dec.approx[i], a2[i], 1e-12) << i;
  for (int i = 0; i < 19; ++i) EXPECT_NEAR(dec.detail(2)[i], d2[i], 1e-12) << i;
  for (int i = 0; i < 26; ++i) EXPECT_NEAR(dec.detail(1)[i], d1[i], 1e-12) << i;
}

TEST(Wavelet, NineLevelLengths) {
  const auto dec = dwt_decompose(ramp_signal(600, long_signal), 9);
  EXPECT_EQ(dec.approx.size(), 14);
  const std::vector<Eigen::Index> details = {306, 159, 86, 49, 31, 22, 17, 15, 14};
  for (int k = 1; k <= 9; ++k) EXPECT_EQ(dec.detail(k).size(), details[static_cast<std::size_t>(k - 1)]);
}

TEST(Wavelet, DenoiseMatchesReference) {
  const auto y = denoise(ramp_signal(600, long_signal));
  ASSERT_EQ(y.size(), 600);
  EXPECT_NEAR(y[0], -0.0867378482599302, 1e-12);
  EXPECT_NEAR(y[123], -0.20426318228956797, 1e-12);
  EXPECT_NEAR(y[599], -0.5897107230614154, 1e-12);
  EXPECT_NEAR(y.sum(), 64.97271064215036, 1e-9);
}

TEST(Wavelet, PerfectReconstructionProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int levels = 1 + static_cast<int>(rng() % 9);
    const Eigen::Index n = (Eigen::Index{1} << levels) + static_cast<Eigen::Index>(rng() % 700);
    const auto x = random_signal(n, rng());
    const auto back = idwt_reconstruct(dwt_decompose(x, levels));
    ASSERT_EQ(back.size(), n);
    EXPECT_LT(relative_error(back, x), 1e-10) << "n=" << n << " levels=" << levels;
  }
}

TEST(Wavelet, ReconstructsInFloat) {
  Eigen::VectorXf x = random_signal(1000, 3).cast<float>();
  const auto back = idwt_reconstruct(dwt_decompose(x, 9));
  EXPECT_LT((back - x).norm() / x.norm(), 1e-5F);
}

TEST(Wavelet, ZeroedBandsAreZeroAndOthersUntouched) {
  const auto x = random_signal(2048, 11);
  const auto dec = dwt_decompose(x, 9);
  const auto z = zero_bands(dec, default_denoise_bands());
  EXPECT_TRUE(z.approx.isZero(0));
  EXPECT_TRUE(z.detail(1).isZero(0));
  EXPECT_TRUE(z.detail(2).isZero(0));
  for (int k = 3; k <= 9; ++k) EXPECT_EQ(z.detail(k), dec.detail(k));
}

TEST(Wavelet, DenoiseIsLinear) {
  const auto a = random_signal(3000, 1);
  const auto b = random_signal(3000, 2);
  const Eigen::VectorXd lhs = denoise(Eigen::VectorXd(2.0 * a - 0.5 * b));
  const Eigen::VectorXd rhs = 2.0 * denoise(a) - 0.5 * denoise(b);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Wavelet, DenoiseRemovesConstantOffset) {
  // A constant lives entirely in the deepest approximation.
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(4096, 1.7);
  EXPECT_LT(denoise(c).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Wavelet, DenoiseSuppressesVerySlowDrift) {
  // A drift period far longer than a beat window is removed almost entirely.
  const int n = 360 * 60;
  Eigen::VectorXd drift(n);
  for (int i = 0; i < n; ++i) drift[i] = 0.5 * std::sin(2.0 * M_PI * 0.05 * i / 360.0);
  const auto out = denoise(drift);
  const int lo = n / 10;
  const int hi = n - n / 10;
  EXPECT_LT(out.segment(lo, hi - lo).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Wavelet, ShortSignalRejected) {
  EXPECT_THROW(dwt_decompose(Eigen::VectorXd::Zero(511), 9), std::invalid_argument);
  EXPECT_THROW(denoise(Eigen::VectorXd::Zero(100)), std::invalid_argument);
  EXPECT_NO_THROW(dwt_decompose(Eigen::VectorXd::Zero(512), 9));
}

TEST(Wavelet, NonFiniteRejected) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1024);
  x[10] = std::nan("");
  EXPECT_THROW(dwt_decompose(x, 9), std::invalid_argument);
  x[10] = INFINITY;
  EXPECT_THROW(dwt_decompose(x, 9), std::invalid_argument);
}

TEST(Wavelet, UnknownBandRejected) {
  const auto dec = dwt_decompose(random_signal(1024, 5), 9);
  EXPECT_THROW(zero_bands(dec, {Band::parse("d10")}), std::invalid_argument);
  EXPECT_THROW(zero_bands(dec, {Band::parse("a3")}), std::invalid_argument);
  EXPECT_THROW(Band::parse("x1"), std::invalid_argument);
  EXPECT_THROW(Band::parse("d"), std::invalid_argument);
  EXPECT_THROW(Band::parse("d2x"), std::invalid_argument);
  EXPECT_EQ(Band::parse("a9").name(), "a9");
}

TEST(Wavelet, TamperedCoefficientsRejected) {
  auto dec = dwt_decompose(random_signal(1024, 5), 9);
  dec.detail(4).conservativeResize(dec.detail(4).size() + 1);
  EXPECT_THROW(idwt_reconstruct(dec), DimensionError);
}

TEST(Wavelet, ConstantSignalOneLevel) {
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(100, 2.5);
  const auto dec = dwt_decompose(c, 1);
  EXPECT_LT(dec.detail(1).cwiseAbs().maxCoeff(), 1e-10);
  // Lowpass taps sum to sqrt(2).
  EXPECT_LT((dec.approx.array() - 2.5 * std::sqrt(2.0)).abs().maxCoeff(), 1e-10);
}

TEST(Wavelet, DecomposeIsLinear) {
  const auto f = random_signal(1500, 21);
  const auto g = random_signal(1500, 22);
  const auto df = dwt_decompose(f, 9);
  const auto dg = dwt_decompose(g, 9);
  const auto dfg = dwt_decompose(Eigen::VectorXd(3.0 * f - 1.25 * g), 9);
  EXPECT_LT((dfg.approx - (3.0 * df.approx - 1.25 * dg.approx)).cwiseAbs().maxCoeff(), 1e-9);
  for (int k = 1; k <= 9; ++k) {
    EXPECT_LT((dfg.detail(k) - (3.0 * df.detail(k) - 1.25 * dg.detail(k))).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Wavelet, EmptyBandSetIsIdentity) {
  const auto dec = dwt_decompose(random_signal(1024, 4), 9);
  const auto same = zero_bands(dec, {});
  EXPECT_EQ(same.approx, dec.approx);
  for (int k = 1; k <= 9; ++k) EXPECT_EQ(same.detail(k), dec.detail(k));
}

TEST(Wavelet, ZeroingOneBandLeavesOthersBitIdentical) {
  const auto dec = dwt_decompose(random_signal(1024, 4), 9);
  const auto z = zero_bands(dec, {Band::parse("d1")});
  EXPECT_TRUE(z.detail(1).isZero(0));
  EXPECT_EQ(z.approx, dec.approx);
  for (int k = 2; k <= 9; ++k) EXPECT_EQ(z.detail(k), dec.detail(k));
}

TEST(Wavelet, DcVanishesWithoutDeepestApproximation) {
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(5000, -3.0);
  const auto out = idwt_reconstruct(zero_bands(dwt_decompose(c, 9), {Band::parse("a9")}));
  EXPECT_LT(out.segment(500, 4000).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Wavelet, ZeroDecompositionGivesZeroSignal) {
  auto dec = dwt_decompose(random_signal(700, 8), 9);
  dec.approx.setZero();
  for (auto& d : dec.details) d.setZero();
  EXPECT_TRUE(idwt_reconstruct(dec).isZero(0));
}

TEST(Wavelet, ImpulseRoundTrip) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2000);
  x[777] = 4.0;
  const auto back = idwt_reconstruct(dwt_decompose(x, 9));
  Eigen::Index where = 0;
  back.cwiseAbs().maxCoeff(&where);
  EXPECT_EQ(where, 777);
  EXPECT_LT((back - x).norm() / x.norm(), 1e-8);
}

TEST(Wavelet, DenoiseLowersWhiteNoiseVariance) {
  const auto x = random_signal(8192, 99);
  const auto y = denoise(x);
  ASSERT_EQ(y.size(), x.size());
  const auto var = [](const Eigen::VectorXd& v) { return (v.array() - v.mean()).square().mean(); };
  EXPECT_LT(var(y), var(x));
}

TEST(Wavelet, DenoiseKeepsLength) {
  for (Eigen::Index n : {512, 513, 1000, 3333}) EXPECT_EQ(denoise(random_signal(n, 1)).size(), n);
}
