#include "emhd/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "emhd/dyadic.hpp"
#include "emhd/parallel.hpp"
#include "emhd/psdo.hpp"
#include "emhd/solver.hpp"

namespace emhd {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_e3(const SpectralVectorField& B) {
  const Vec3 m = mean(B);
  SpectralVectorField f = B;
  add_constant(f, {-m[0], -m[1], -m[2]});
  const double tol = 1e-12;
  return max_abs(f) < tol && std::abs(m[0]) < tol && std::abs(m[1]) < tol && std::abs(m[2] - 1.0) < tol;
}

double max_gradient_frobenius(const SpectralVectorField& B) {
  const Grid3& g = B.grid;
  std::vector<double> acc(g.size(), 0.0);
  for (int b = 0; b < 3; ++b) {
    SpectralScalarField comp(g, B.real);
    comp.v = B.c[b];
    const RealVectorField d = fft_inverse(gradient(comp));
    for (int a = 0; a < 3; ++a)
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d.c[a][i] * d.c[a][i];
  }
  double m = 0.0;
  for (double x : acc) m = std::max(m, x);
  return std::sqrt(m);
}

double max_field_magnitude(const SpectralVectorField& B) {
  const RealVectorField f = fft_inverse(B);
  double m = 0.0;
  for (std::size_t i = 0; i < f.c[0].size(); ++i)
    m = std::max(m, f.c[0][i] * f.c[0][i] + f.c[1][i] * f.c[1][i] + f.c[2][i] * f.c[2][i]);
  return std::sqrt(m);
}

std::vector<double> half_derivative_planes(const SpectralVectorField& b) {
  return plane_mass(japanese_d_pow(b, 0.5));
}

}  // namespace

double packet_min_width(int k) { return 16.0 / std::ldexp(1.0, k); }

SpectralVectorField wavepacket_data(const Grid3& g, int k, double center, double width, std::uint64_t seed) {
  if (std::ldexp(1.0, k + 1) >= g.kmax()) throw std::invalid_argument("wavepacket frequency too close to the grid cutoff");
  if (!(width > 0.0)) throw std::invalid_argument("wavepacket width must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double theta = phase(rng), p1 = phase(rng), p2 = phase(rng), p3 = phase(rng);
  const double sigma = width / 4.0;
  const double freq = std::ldexp(1.0, k);
  const double lam = g.lambda;
  const RealVectorField f = sample(g, [&](const Vec3& x) -> Vec3 {
    const double z = x[2] - center;
    const double env = std::exp(-z * z / (2.0 * sigma * sigma)) * std::cos(freq * x[2] + p3);
    const double tr = 1.0 + 0.5 * std::cos(x[0] / lam + p1) * std::cos(x[1] / lam + p2);
    return {std::cos(theta) * env * tr, std::sin(theta) * env * tr, 0.0};
  });
  SpectralVectorField b = leray_project(fft_forward(f));
  b *= 1.0 / l2_norm(b);
  return b;
}

PacketStats packet_stats(const SpectralVectorField& b, int k, double center, double width) {
  PacketStats st;
  const double total = l2_norm(b);
  const double shell = l2_norm(lp_range(std::max(0, k - 1), k + 2, b));
  st.shell_fraction = shell * shell / (total * total);
  const std::vector<double> m = plane_mass(b);
  double in = 0.0, all = 0.0;
  for (int l = 0; l < b.grid.n; ++l) {
    all += m[l];
    if (std::abs(b.grid.coord(l) - center) < 0.5 * width) in += m[l];
  }
  st.slab_fraction = in / all;
  st.divergence = max_abs_divergence(b);
  return st;
}

double packet_group_speed(const SpectralVectorField& background, int k) {
  return 2.0 * max_field_magnitude(background) * std::ldexp(1.0, k);
}

SmoothingReport measure_smoothing(const SpectralVectorField& background, const std::string& background_id,
                                  const std::vector<int>& ks, double T, const SmoothingOptions& opt) {
  if (ks.empty()) throw std::invalid_argument("smoothing needs at least one k");
  if (!(T > 0.0)) throw std::invalid_argument("smoothing time must be positive");
  const Grid3& g = background.grid;
  const bool e3 = is_e3(background);
  SmoothingMethod method = opt.method;
  if (method == SmoothingMethod::Auto) method = e3 ? SmoothingMethod::Exact : SmoothingMethod::Linearized;
  if (method == SmoothingMethod::Exact && !e3) throw std::invalid_argument("exact propagator needs the e3 background");

  SmoothingReport r;
  r.background_id = background_id;
  r.grid = g;
  r.method = method == SmoothingMethod::Exact ? "exact" : "linearized";
  r.T = T;
  const int kmin = *std::min_element(ks.begin(), ks.end());
  r.width = opt.width > 0.0 ? opt.width : packet_min_width(kmin);
  r.coefficient_size = e3 ? 0.0 : max_gradient_frobenius(background);
  r.advisory = !opt.certified;
  r.rows.resize(ks.size());

  parallel_for(ks.size(), [&](std::size_t idx) {
    const int k = ks[idx];
    SmoothingRow& row = r.rows[idx];
    row.k = k;
    row.frequency = std::ldexp(1.0, k);
    const SpectralVectorField b0 = wavepacket_data(g, k, opt.center, r.width, opt.seed);
    const PacketStats st = packet_stats(b0, k, opt.center, r.width);
    row.shell_fraction = st.shell_fraction;
    row.slab_fraction = st.slab_fraction;
    const double speed = packet_group_speed(background, k);
    const double cap = speed > 0.0 ? opt.box_fraction * g.box_length() / speed : T;
    row.T = std::min(T, cap);
    const double norm0 = l2_norm(b0);

    PlaneSeries half{g, 1.0, {}}, plain{g, 1.0, {}};
    if (method == SmoothingMethod::Exact) {
      const int frames = std::max(2, opt.frames);
      half.dt = plain.dt = row.T / (frames - 1);
      for (int i = 0; i < frames; ++i) {
        const SpectralVectorField b = propagate_constant(b0, i * half.dt);
        half.mass.push_back(half_derivative_planes(b));
        plain.mass.push_back(plane_mass(b));
      }
      row.frames = frames;
    } else {
      SolverState s = make_state(SolverMode::Linearized, b0, background);
      s.history_limit = 0;
      const double dt_cfl = 0.5 * cfl_bound(s);
      const int steps = std::max(1, int(std::ceil(row.T / dt_cfl)));
      half.dt = plain.dt = row.T / steps;
      half.mass.push_back(half_derivative_planes(s.u));
      plain.mass.push_back(plane_mass(s.u));
      for (int i = 0; i < steps && !s.blown_up; ++i) {
        step(s, half.dt);
        half.mass.push_back(half_derivative_planes(s.u));
        plain.mass.push_back(plane_mass(s.u));
      }
      row.blown_up = s.blown_up;
      row.frames = int(half.mass.size());
    }
    row.le_ratio = le_norm(half) / norm0;
    row.linf_ratio = linf_l2(plain) / norm0;
  });

  std::vector<double> kx, le, li;
  double max_linf = 0.0;
  for (const auto& row : r.rows) {
    r.blown_up = r.blown_up || row.blown_up;
    kx.push_back(row.k);
    le.push_back(std::log2(row.le_ratio));
    li.push_back(std::log2(row.linf_ratio));
    max_linf = std::max(max_linf, row.linf_ratio);
  }
  if (kx.size() >= 2) {
    r.le_slope = fit_slope(kx, le);
    r.linf_slope = fit_slope(kx, li);
  }
  r.growth_constant = r.coefficient_size > 0.0 ? std::max(0.0, std::log(max_linf)) / (T * r.coefficient_size) : 0.0;
  return r;
}

std::string smoothing_csv(const SmoothingReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "k,frequency,le_ratio,linf_ratio,T,frames,shell_fraction,slab_fraction,blown_up\n";
  for (const auto& row : r.rows)
    os << row.k << ',' << row.frequency << ',' << row.le_ratio << ',' << row.linf_ratio << ',' << row.T << ','
       << row.frames << ',' << row.shell_fraction << ',' << row.slab_fraction << ',' << (row.blown_up ? 1 : 0) << '\n';
  return os.str();
}

std::string smoothing_json(const SmoothingReport& r) {
  nlohmann::ordered_json j;
  j["background"] = r.background_id;
  j["n"] = r.grid.n;
  j["lambda"] = r.grid.lambda;
  j["method"] = r.method;
  j["T"] = r.T;
  j["width"] = r.width;
  j["le_slope"] = r.le_slope;
  j["linf_slope"] = r.linf_slope;
  j["coefficient_size"] = r.coefficient_size;
  j["growth_constant"] = r.growth_constant;
  j["blown_up"] = r.blown_up;
  j["advisory"] = r.advisory;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    o["k"] = row.k;
    o["frequency"] = row.frequency;
    o["le_ratio"] = row.le_ratio;
    o["linf_ratio"] = row.linf_ratio;
    o["T"] = row.T;
    o["frames"] = row.frames;
    o["shell_fraction"] = row.shell_fraction;
    o["slab_fraction"] = row.slab_fraction;
    o["blown_up"] = row.blown_up;
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j.dump(2);
}

}  // namespace emhd
