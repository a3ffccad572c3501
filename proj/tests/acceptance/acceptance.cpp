// Acceptance driver: runs the fracell command configurations behind each
// numbered criterion and prints one PASS/FAIL line per criterion.
//
//   fracell_acceptance            all criteria
//   fracell_acceptance 3 8        selected criteria only

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fracell/cli.hpp"

using namespace fracell;

namespace {

struct Run {
  Command command;
  std::string config;
  // Assertion names must contain one of these (empty keeps all).
  std::vector<std::string> keep = {};
  // Assertion names containing one of these are dropped.
  std::vector<std::string> drop = {};
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Run> runs;
};

bool matches(const std::string& name, const std::vector<std::string>& words) {
  for (const auto& w : words)
    if (name.find(w) != std::string::npos) return true;
  return false;
}

std::vector<Criterion> criteria() {
  const std::string s3 = "s = 0.25, 0.5, 0.75\n";
  return {
      {1,
       "semigroup route equals spectral route",
       {{Command::Solve, "operation = apply\nnodes = 128\n" + s3, {"semigroup vs spectral"}},
        {Command::Solve, "operation = apply\nnodes = 128\ncoefficient = sine\namplitude = 0.5\n" + s3,
         {"semigroup vs spectral"}}}},
      {2,
       "bilinear form equals the energy pairing",
       {{Command::Converge, "study = bilinear\nnodes = 128\nlevels = 2\n" + s3}}},
      {3,
       "extension Dirichlet-to-Neumann map and energy",
       {{Command::Converge, "study = extension\nnodes = 128\nlayers = 64\nlevels = 3\n" + s3}}},
      {4,
       "Bessel series against the discrete extension",
       {{Command::Extension, "rhs = eigen1\nnodes = 128\nlayers = 64\n" + s3, {"Bessel", "K_{1/2}"}}}},
      {5,
       "half-line closed forms",
       {{Command::Halfline, "halfline_rhs = one\ns = 0.25\n", {}, {"reflection"}},
        {Command::Halfline, "halfline_rhs = indicator\ns = 0.5, 0.75\n", {}, {"reflection"}}}},
      {6,
       "kernel singularities and Green function symmetry",
       {{Command::Kernel, "kernel = ks\nnodes = 257\n" + s3},
        {Command::Kernel,
         "kernel = ks\ndim = 2\nnodes = 49\nmargin = 0.25\nmin_dist_h = 3\nmax_dist = 0.25\n" + s3},
        {Command::Kernel,
         "kernel = gs\ndim = 2\nnodes = 49\nmargin = 0.3\nmin_dist_h = 1\nmax_dist = 0.0834\ns = 0.25, 0.5\n"},
        {Command::Kernel, "kernel = gs\nnodes = 257\nmargin = 0.4\nmin_dist_h = 1\nmax_dist = 0.1\ns = 0.5\n"}}},
      {7,
       "Neumann structure",
       {{Command::Solve, "bc = neumann\nnodes = 128\n" + s3, {"e^(-tL)1", "B_s", "rejects"}},
        {Command::Kernel, "kernel = poisson\nbc = neumann\nnodes = 128\ny = 0.1\n" + s3}}},
      {8,
       "regularity exponents",
       {{Command::Probe, "probe = gate\nnodes = 1025\ns = 0.25, 0.4\n"},
        {Command::Probe, "probe = interior\nrhs = cusp\nnodes = 2049\nalpha = 0.2\ns = 0.25\n"},
        {Command::Probe, "probe = interior\nrhs = cusp\nnodes = 2049\nalpha = 0.3\ns = 0.3\n"},
        {Command::Probe, "probe = interior\nrhs = spike\nmode = linear\nnodes = 2049\np = 3\ns = 0.75\n"},
        {Command::Probe, "probe = boundary\nrhs = one\nnodes = 2049\ns = 0.25, 0.75\n"},
        {Command::Probe, "probe = layer\nrhs = one\nnodes = 2049\ns = 0.25\n"}}},
      {9,
       "Caccioppoli, trace and Harnack stability",
       {{Command::Probe, "probe = caccioppoli\nnodes = 65\nlayers = 32\nlevels = 3\nsamples = 10\nradius = 0.3\n" + s3},
        {Command::Probe, "probe = trace\nnodes = 65\nlayers = 32\nlevels = 3\nsamples = 10\nradius = 0.3\n" + s3},
        {Command::Probe, "probe = harnack\nnodes = 129\nlevels = 3\nradius = 0.2\n" + s3}}},
      {10,
       "scaling law and reflection parity",
       {{Command::Solve, "nodes = 128\n" + s3, {"scaling"}},
        {Command::Solve, "dim = 2\nnodes = 17\nnodes_y = 13\ncoefficient = diagonal\na22 = 2\n" + s3, {"scaling"}},
        {Command::Solve, "bc = neumann\nnodes = 64\nextent = 2\n" + s3, {"scaling"}},
        {Command::Halfline, "halfline_rhs = one\ns = 0.25\n", {"reflection"}}}},
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const Criterion& c : criteria()) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Assertion> checks;
    std::string error;
    try {
      for (const Run& r : c.runs) {
        const RunReport rep = run_command(RunConfig::parse(r.command, r.config), false);
        for (const Assertion& a : rep.assertions)
          if ((r.keep.empty() || matches(a.name, r.keep)) && !matches(a.name, r.drop)) checks.push_back(a);
      }
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int passed = 0;
    for (const Assertion& a : checks) passed += a.pass;
    const bool ok = error.empty() && !checks.empty() && passed == static_cast<int>(checks.size());
    failed += !ok;
    std::cout << fmt::format("criterion {:>2} {}: {} ({}/{} checks, {:.1f} s)\n", c.id, ok ? "PASS" : "FAIL", c.title,
                             passed, checks.size(), secs);
    if (!error.empty()) std::cout << "    error: " << error << "\n";
    for (const Assertion& a : checks)
      if (!a.pass) std::cout << fmt::format("    failed: {} = {}\n", a.name, a.describe());
    std::cout.flush();
  }
  return failed == 0 ? 0 : 1;
}
