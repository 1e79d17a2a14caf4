#include <fmt/format.h>
#include <functional>
#include <map>
#include <random>

#include "qpml/cli.hpp"

namespace qpml::cli {

namespace {

// Two-layer stack of the convergence experiments: k = 8 over 16, oblique
// incidence in the x-z plane, probes a quarter period above and below.
JobConfig two_layer(double amplitude, int n) {
  JobConfig j;
  StackConfig& c = j.stack;
  c.k = {8.0, 16.0};
  c.phi_inc = 5.0 * pi / 6.0;
  c.theta_inc = 0.0;
  c.interfaces = {amplitude == 0.0 ? Surface::flat(0.0) : Surface::sincos(amplitude, 0.0)};
  c.N = n * n;
  c.M_w = c.M = 25 * 25;
  c.P = 1740;
  c.K = 3;
  c.corr_order = 7;
  j.converge.probes = {Vec3(-0.25, -0.25, 0.25), Vec3(-0.25, -0.25, -0.25)};
  j.field = {0.0, 0.0, 0.0, 80, 80};
  return j;
}

// Stacked sincos interfaces one period apart, g_i = h·sin·cos − i.
std::vector<Surface> ladder(int count, double amplitude) {
  std::vector<Surface> s;
  for (int i = 0; i < count; ++i)
    s.push_back(amplitude == 0.0 ? Surface::flat(-i) : Surface::sincos(amplitude, -i));
  return s;
}

std::vector<double> alternating(int layers, double a, double b) {
  std::vector<double> k;
  for (int j = 0; j < layers; ++j) k.push_back(j % 2 == 0 ? a : b);
  return k;
}

JobConfig fig4_flat() {
  JobConfig j = two_layer(0.0, 40);
  j.converge.variable = "N";
  j.converge.values = {16 * 16, 24 * 24, 32 * 32, 40 * 40};
  return j;
}

JobConfig fig4_corrugated() {
  JobConfig j = two_layer(0.2, 60);
  j.converge.variable = "N";
  j.converge.values = {20 * 20, 30 * 30, 40 * 40, 60 * 60};
  return j;
}

JobConfig fig5_roughness() {
  JobConfig j = two_layer(0.5, 40);
  j.stack.corr_order = 5;
  j.kind = JobKind::converge;
  j.converge.variable = "N";
  j.converge.values = {16 * 16, 24 * 24, 32 * 32, 40 * 40};
  return j;
}

JobConfig table1_scaling() {
  JobConfig j;
  StackConfig& c = j.stack;
  c.interfaces = ladder(1, 0.2);
  c.k = alternating(2, 10.0, 20.0);
  c.phi_inc = 5.0 * pi / 6.0;
  c.theta_inc = pi / 4.0;
  c.N = 60 * 60;
  c.P = 2380;
  c.M_w = c.M = 20 * 20;
  c.K = 10;
  c.corr_order = 7;
  return j;
}

JobConfig fig7_spectra() {
  JobConfig j;
  j.kind = JobKind::spectra;
  StackConfig& c = j.stack;
  c.interfaces = ladder(10, 0.0);
  c.k = alternating(11, 2.0 * pi, 4.0 * pi);
  c.phi_inc = 5.0 * pi / 6.0;
  c.theta_inc = 0.0;
  c.N = 40 * 40;
  c.P = 1740;
  c.M_w = c.M = 25 * 25;
  c.K = 3;
  j.spectra.phi_min = 0.5 * pi;
  j.spectra.phi_max = 1.5 * pi;
  j.spectra.count = 50;
  return j;
}

// The many-layer field run at desk scale: 11 layers with wavenumbers drawn
// uniformly from [8, 20] by a fixed generator, coarse discretization.
JobConfig fig6_manylayer_scaled() {
  JobConfig j;
  j.kind = JobKind::field;
  StackConfig& c = j.stack;
  c.interfaces = ladder(10, 0.2);
  std::mt19937 gen(101);
  for (int l = 0; l < 11; ++l) c.k.push_back(8.0 + 12.0 * (gen() / 4294967296.0));
  c.phi_inc = 5.0 * pi / 6.0;
  c.theta_inc = pi / 4.0;
  c.N = 24 * 24;
  c.P = 600;
  c.M_w = c.M = 12 * 12;
  c.K = 5;
  j.field = {0.0, 0.0, 0.0, 48, 480};
  return j;
}

const std::map<std::string, std::function<JobConfig()>>& registry() {
  static const std::map<std::string, std::function<JobConfig()>> r = {
      {"defaults", fig4_flat},
      {"fig4-flat", fig4_flat},
      {"fig4-corrugated", fig4_corrugated},
      {"fig5-roughness", fig5_roughness},
      {"table1-scaling", table1_scaling},
      {"fig7-spectra", fig7_spectra},
      {"fig6-manylayer-scaled", fig6_manylayer_scaled},
  };
  return r;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, make] : registry()) names.push_back(name);
  return names;
}

nlohmann::json preset(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end())
    throw ConfigError(fmt::format("unknown preset '{}'; available: {}", name, fmt::join(preset_names(), ", ")));
  JobConfig j = it->second();
  j.preset = name;
  return to_json(j);
}

}  // namespace qpml::cli
