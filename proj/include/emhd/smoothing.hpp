#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emhd/grid.hpp"

namespace emhd {

/// Real divergence-free packet at frequency 2^k e3, Gaussian in x^3 about center with
/// standard deviation width / 4 for |b|, times a mild transverse modulation with seeded phases.
/// Normalized to unit L^2 norm.
SpectralVectorField wavepacket_data(const Grid3& g, int k, double center, double width, std::uint64_t seed = 1);

struct PacketStats {
  double shell_fraction = 0.0;  // L^2 mass fraction in shells k-1, k, k+1
  double slab_fraction = 0.0;   // L^2 mass fraction with |x^3 - center| < width / 2
  double divergence = 0.0;
};
PacketStats packet_stats(const SpectralVectorField& b, int k, double center, double width);

/// smallest packet width meeting the shell criterion at frequency 2^k
double packet_min_width(int k);

/// nominal group speed 2 max|B| 2^k of a packet at frequency 2^k
double packet_group_speed(const SpectralVectorField& background, int k);

enum class SmoothingMethod { Auto, Exact, Linearized };

struct SmoothingOptions {
  SmoothingMethod method = SmoothingMethod::Auto;  // Auto uses the exact propagator for e3
  double center = 0.0;
  double width = 0.0;          // 0 selects packet_min_width of the smallest k
  double box_fraction = 0.25;  // packets travel at most this fraction of the box
  int frames = 65;             // exact propagator samples per run
  std::uint64_t seed = 1;
  bool certified = true;       // false marks the report advisory
};

struct SmoothingRow {
  int k = 0;
  double frequency = 0.0;
  double le_ratio = 0.0;    // ||<D>^{1/2} b||_LE / ||b0||
  double linf_ratio = 0.0;  // ||b||_{L^inf L^2} / ||b0||
  double T = 0.0;
  int frames = 0;
  double shell_fraction = 0.0;
  double slab_fraction = 0.0;
  bool blown_up = false;
};

struct SmoothingReport {
  std::string background_id;
  Grid3 grid;
  std::string method;
  double T = 0.0;
  double width = 0.0;
  std::vector<SmoothingRow> rows;
  double le_slope = 0.0;    // least-squares slope of log2(le_ratio) against k
  double linf_slope = 0.0;
  double coefficient_size = 0.0;  // max |grad Bbar|_F
  double growth_constant = 0.0;   // log(max linf_ratio) / (T coefficient_size)
  bool blown_up = false;
  bool advisory = false;
};

/// Evolves wavepacket_data for each k under the linearized flow around the background up to
/// min(T, box_fraction L / group speed) and records the local energy and energy ratios.
SmoothingReport measure_smoothing(const SpectralVectorField& background, const std::string& background_id,
                                  const std::vector<int>& ks, double T, const SmoothingOptions& opt = {});

std::string smoothing_csv(const SmoothingReport& r);
std::string smoothing_json(const SmoothingReport& r);

}  // namespace emhd
