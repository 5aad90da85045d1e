// Noise-only acquisition trials: prints the distribution of the peak metric
// that the detection threshold has to clear.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "relaylab/receiver/acquisition.hpp"
#include "relaylab/signal/random.hpp"

using namespace relaylab;

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the acquisition threshold on noise-only windows"};
  int windows = 100;
  std::uint64_t seed = 20240611;
  double rate = kDefaultSampleRate;
  app.add_option("--windows", windows, "Noise windows (each searched for all 32 PRNs)");
  app.add_option("--seed", seed, "Root seed");
  app.add_option("--rate", rate, "Sample rate, Hz");
  CLI11_PARSE(app, argc, argv);

  receiver::ReceiverConfig cfg;
  cfg.acquisition_threshold = 0.0;
  receiver::Acquirer acq(cfg, rate);
  std::vector<double> metrics;
  std::vector<signal::Sample> window(acq.window_samples());
  for (int w = 0; w < windows; ++w) {
    signal::Rng rng(signal::derive_seed(seed, "calibrate/noise", static_cast<std::uint64_t>(w)));
    for (auto& s : window) s = rng.complex_gaussian(1.0);
    acq.load(window, 0.0);
    for (int prn = 1; prn <= 32; ++prn) metrics.push_back(acq.search(prn).peak_metric);
  }
  std::sort(metrics.begin(), metrics.end());
  auto quantile = [&](double q) {
    const auto i = static_cast<std::size_t>(std::ceil(q * static_cast<double>(metrics.size()))) - 1;
    return metrics[std::min(i, metrics.size() - 1)];
  };
  std::cout << fmt::format("trials {}\n", metrics.size());
  std::cout << fmt::format("median {:.3f}\n", quantile(0.5));
  std::cout << fmt::format("p99    {:.3f}\n", quantile(0.99));
  std::cout << fmt::format("p99.9  {:.3f}\n", quantile(0.999));
  std::cout << fmt::format("max    {:.3f}\n", metrics.back());
  return 0;
}
