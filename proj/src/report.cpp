#include "adr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adr {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

TerminationCause cause_from_string(const std::string& s) {
  if (s == "none") return TerminationCause::None;
  if (s == "dv_exceeded") return TerminationCause::DvExceeded;
  if (s == "dt_exceeded") return TerminationCause::DtExceeded;
  if (s == "invalid_revisit") return TerminationCause::InvalidRevisit;
  throw std::runtime_error("unknown terminal cause '" + s + "'");
}

}  // namespace

void write_metrics_csv(const std::string& path, std::span<const EpisodeMetrics> episodes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics file '" + path + "'");
  out << kMetricsHeader << '\n';
  for (const auto& m : episodes) {
    out << m.episode << ',' << format_double(m.total_reward) << ',' << m.steps << ','
        << format_double(m.epsilon) << ',' << format_double(m.mean_loss) << ','
        << to_string(m.cause) << '\n';
  }
  out.flush();
  if (!out.good()) throw std::runtime_error("write failure on '" + path + "'");
}

std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw std::runtime_error("'" + path + "' is not a metrics file");
  }
  std::vector<EpisodeMetrics> episodes;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    EpisodeMetrics m;
    std::getline(row, field, ',');
    m.episode = std::stoi(field);
    std::getline(row, field, ',');
    m.total_reward = std::stod(field);
    std::getline(row, field, ',');
    m.steps = std::stoi(field);
    std::getline(row, field, ',');
    m.epsilon = std::stod(field);
    std::getline(row, field, ',');
    m.mean_loss = std::stod(field);
    std::getline(row, field, ',');
    m.cause = cause_from_string(field);
    episodes.push_back(m);
  }
  return episodes;
}

std::vector<double> moving_average(std::span<const double> values, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(values.size());
  double running = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    running += values[i];
    if (i >= static_cast<std::size_t>(window)) {
      running -= values[i - static_cast<std::size_t>(window)];
      out[i] = running / window;
    } else {
      out[i] = running / static_cast<double>(i + 1);
    }
  }
  return out;
}

void write_aggregate_csv(const std::string& path,
                         const std::vector<std::vector<EpisodeMetrics>>& per_seed,
                         int window) {
  if (per_seed.empty()) throw std::invalid_argument("aggregate: no seed reports");
  const std::size_t episodes = per_seed.front().size();
  for (const auto& seed_metrics : per_seed) {
    if (seed_metrics.size() != episodes) {
      throw std::invalid_argument("aggregate: seed reports differ in episode count");
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write aggregate file '" + path + "'");
  out << "window_start,window_end,mean_reward,std_reward\n";

  char buf[96];
  for (std::size_t start = 0; start < episodes; start += static_cast<std::size_t>(window)) {
    const std::size_t end = std::min(episodes, start + static_cast<std::size_t>(window));
    // Per-seed mean reward inside the window, then stats across seeds.
    std::vector<double> seed_means;
    seed_means.reserve(per_seed.size());
    for (const auto& seed_metrics : per_seed) {
      double sum = 0.0;
      for (std::size_t i = start; i < end; ++i) sum += seed_metrics[i].total_reward;
      seed_means.push_back(sum / static_cast<double>(end - start));
    }
    double mean = 0.0;
    for (const double v : seed_means) mean += v;
    mean /= static_cast<double>(seed_means.size());
    double var = 0.0;
    for (const double v : seed_means) var += (v - mean) * (v - mean);
    const double stdev =
        seed_means.size() > 1 ? std::sqrt(var / static_cast<double>(seed_means.size() - 1))
                              : 0.0;
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.10g,%.10g\n", start, end - 1, mean, stdev);
    out << buf;
  }
  out.flush();
  if (!out.good()) throw std::runtime_error("write failure on '" + path + "'");
}

void write_learning_curve_svg(const std::string& path, std::span<const double> rewards,
                              int window) {
  const std::vector<double> smooth = moving_average(rewards, window);

  constexpr double width = 720.0, height = 440.0;
  constexpr double ml = 60.0, mr = 20.0, mt = 20.0, mb = 50.0;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;

  double lo = 0.0, hi = 1.0;
  if (!smooth.empty()) {
    lo = *std::min_element(smooth.begin(), smooth.end());
    hi = *std::max_element(smooth.begin(), smooth.end());
    if (hi - lo < 1e-12) hi = lo + 1.0;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write SVG '" + path + "'");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "viewBox=\"0 0 %g %g\">\n",
                width, height, width, height);
  out << buf;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml,
                mt, ml, mt + plot_h);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml,
                mt + plot_h, ml + plot_w, mt + plot_h);
  out << buf;

  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"13\" text-anchor=\"middle\">episode"
                "</text>\n",
                ml + plot_w / 2, height - 12.0);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%g\" font-size=\"13\" text-anchor=\"middle\" "
                "transform=\"rotate(-90 16 %g)\">reward (%d-episode mean)</text>\n",
                mt + plot_h / 2, mt + plot_h / 2, window);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\">%.6g</text>\n",
                6.0, mt + 10.0, hi);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\">%.6g</text>\n",
                6.0, mt + plot_h, lo);
  out << buf;

  if (!smooth.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    const double denom = smooth.size() > 1 ? static_cast<double>(smooth.size() - 1) : 1.0;
    for (std::size_t i = 0; i < smooth.size(); ++i) {
      const double x = ml + plot_w * (static_cast<double>(i) / denom);
      const double y = mt + plot_h * (1.0 - (smooth[i] - lo) / (hi - lo));
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i == 0 ? "" : " ", x, y);
      out << buf;
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  out.flush();
  if (!out.good()) throw std::runtime_error("write failure on '" + path + "'");
}

}  // namespace adr
