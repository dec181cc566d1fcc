#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "emhd/smoothing.hpp"
#include "random_fields.hpp"

using namespace emhd;

TEST(Smoothing, WavepacketIsLocalizedInFrequencyAndSpace) {
  const Grid3 g(64, 0.9);
  for (int k = 2; k <= 3; ++k) {
    const double w = packet_min_width(k);
    const SpectralVectorField b = wavepacket_data(g, k, 0.0, w);
    EXPECT_NEAR(l2_norm(b), 1.0, 1e-12);
    const PacketStats st = packet_stats(b, k, 0.0, w);
    EXPECT_GT(st.shell_fraction, 0.99);
    EXPECT_GT(st.slab_fraction, 0.95);
    EXPECT_LT(st.divergence, 1e-12);
  }
}

TEST(Smoothing, WavepacketRequiresRoomBelowNyquist) {
  const Grid3 g(32, 0.9);
  EXPECT_THROW(wavepacket_data(g, 4, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(wavepacket_data(g, 2, 0.0, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(wavepacket_data(g, 2, 0.0, 1.0));
}

TEST(Smoothing, WavepacketIsSeeded) {
  const Grid3 g(32, 0.9);
  EXPECT_EQ(l2_norm(wavepacket_data(g, 2, 0.0, 4.0, 7) - wavepacket_data(g, 2, 0.0, 4.0, 7)), 0.0);
  EXPECT_GT(l2_norm(wavepacket_data(g, 2, 0.0, 4.0, 7) - wavepacket_data(g, 2, 0.0, 4.0, 8)), 1e-3);
}

TEST(Smoothing, GroupSpeedScalesWithFrequency) {
  const Grid3 g(16, 1.0);
  SpectralVectorField B = fixtures::uniform_e3(g);
  EXPECT_NEAR(packet_group_speed(B, 3), 16.0, 1e-12);
  EXPECT_NEAR(packet_group_speed(2.0 * B, 2), 16.0, 1e-12);
}

TEST(Smoothing, ExactRunIsDeterministicAndGrowsLikeTheSquareRootOfTime) {
  const Grid3 g(32, 0.9);
  const SpectralVectorField e3 = fixtures::uniform_e3(g);
  SmoothingOptions opt;
  opt.frames = 33;
  const SmoothingReport a = measure_smoothing(e3, "e3", {2, 3}, 0.08, opt);
  const SmoothingReport b = measure_smoothing(e3, "e3", {2, 3}, 0.08, opt);
  EXPECT_EQ(a.method, "exact");
  EXPECT_EQ(smoothing_csv(a), smoothing_csv(b));
  const SmoothingReport half = measure_smoothing(e3, "e3", {2, 3}, 0.04, opt);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_NEAR(a.rows[i].linf_ratio, 1.0, 1e-10);
    EXPECT_GE(a.rows[i].le_ratio, half.rows[i].le_ratio);
    EXPECT_LE(a.rows[i].le_ratio, (std::sqrt(2.0) + 0.1) * half.rows[i].le_ratio);
  }
}

TEST(Smoothing, LinearizedRunMatchesTheExactPropagator) {
  const Grid3 g(32, 0.9);
  const SpectralVectorField e3 = fixtures::uniform_e3(g);
  SmoothingOptions exact, lin;
  exact.method = SmoothingMethod::Exact;
  lin.method = SmoothingMethod::Linearized;
  const SmoothingReport a = measure_smoothing(e3, "e3", {2}, 0.05, exact);
  const SmoothingReport b = measure_smoothing(e3, "e3", {2}, 0.05, lin);
  EXPECT_EQ(b.method, "linearized");
  ASSERT_EQ(a.rows.size(), 1u);
  EXPECT_NEAR(b.rows[0].le_ratio, a.rows[0].le_ratio, 1e-2 * a.rows[0].le_ratio);
  EXPECT_NEAR(b.rows[0].linf_ratio, 1.0, 1e-6);
}

TEST(Smoothing, ExactMethodRejectsNonUniformBackgrounds) {
  const Grid3 g(16, 0.9);
  SpectralVectorField B = fixtures::random_solenoidal(g, 2, 0.1, 3);
  add_constant(B, {0, 0, 1});
  SmoothingOptions opt;
  opt.method = SmoothingMethod::Exact;
  EXPECT_THROW(measure_smoothing(B, "bump", {2}, 0.1, opt), std::invalid_argument);
}

TEST(Smoothing, ReportsCarryEveryRowAndTheAdvisoryFlag) {
  const Grid3 g(32, 0.9);
  SmoothingOptions opt;
  opt.frames = 9;
  opt.certified = false;
  const SmoothingReport r = measure_smoothing(fixtures::uniform_e3(g), "e3", {2, 3}, 0.1, opt);
  const std::string csv = smoothing_csv(r);
  EXPECT_EQ(csv.rfind("k,frequency,le_ratio,linf_ratio,T,frames,shell_fraction,slab_fraction,blown_up\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const auto j = nlohmann::json::parse(smoothing_json(r));
  EXPECT_TRUE(j["advisory"].get<bool>());
  EXPECT_EQ(j["rows"].size(), 2u);
}
