#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "lsamarl/experiment/experiment.hpp"

namespace lsamarl::experiment {

namespace fs = std::filesystem;

namespace {

double parse_double(std::string_view field) {
  double x = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc{} || end != field.data() + field.size()) throw std::runtime_error("bad number '" + std::string(field) + "'");
  return x;
}

// Normalised reward column of a metrics file, one entry per epoch 1..n.
std::vector<double> read_reward_curve(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing " + path.filename().string());
  std::string line;
  if (!std::getline(in, line) || line != train::MetricsCsv::kHeader)
    throw std::runtime_error(path.filename().string() + " has an unexpected header");
  std::vector<double> curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      fields.push_back(rest.substr(0, pos));
    fields.push_back(rest);
    if (fields.size() != 7) throw std::runtime_error("row with " + std::to_string(fields.size()) + " fields");
    if (parse_double(fields[0]) != static_cast<double>(curve.size() + 1)) throw std::runtime_error("epochs out of order");
    const double r = parse_double(fields[1]);
    if (!(r >= 0.0 && r <= 1.0)) throw std::runtime_error("reward outside [0, 1]");
    curve.push_back(r);
  }
  if (curve.empty()) throw std::runtime_error(path.filename().string() + " has no rows");
  return curve;
}

std::vector<fs::path> expand(const fs::path& dir, std::vector<std::string>& warnings) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    warnings.push_back(dir.string() + ": not a directory, skipped");
    return {};
  }
  if (fs::exists(dir / "config.json")) return {dir};
  std::vector<fs::path> runs;
  for (const auto& entry : fs::recursive_directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().filename() == "config.json") runs.push_back(entry.path().parent_path());
  if (runs.empty()) warnings.push_back(dir.string() + ": no run directories found, skipped");
  std::sort(runs.begin(), runs.end());
  return runs;
}

// Mean and population std, shifted by the first entry so identical inputs
// give that value back and an exact zero spread.
std::pair<double, double> spread(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size()), ref = xs.front();
  double shift = 0.0, var = 0.0;
  for (double x : xs) shift += x - ref;
  shift /= n;
  for (double x : xs) var += (x - ref - shift) * (x - ref - shift);
  return {ref + shift, std::sqrt(var / n)};
}

}  // namespace

std::vector<double> moving_average(const std::vector<double>& xs, int window) {
  if (window < 1) throw std::invalid_argument("moving average window must be positive");
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= static_cast<std::size_t>(window)) sum -= xs[i - window];
    out[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, window));
  }
  return out;
}

ReportResult collect_report(const std::vector<fs::path>& dirs) {
  ReportResult result;
  std::set<fs::path> seen;
  std::map<std::string, std::vector<std::vector<double>>> curves;
  for (const auto& d : dirs) {
    for (const auto& run : expand(d, result.warnings)) {
      std::error_code ec;
      const auto key = fs::weakly_canonical(run, ec);
      if (!seen.insert(ec ? run : key).second) continue;
      try {
        const auto rc = read_run_config(run / "config.json");
        auto curve = read_reward_curve(run / "metrics.csv");
        curves[rc.spec.id()].push_back(std::move(curve));
      } catch (const std::exception& e) {
        result.warnings.push_back(run.string() + ": " + e.what() + ", skipped");
      }
    }
  }
  for (auto& [id, runs] : curves) {
    CurveSummary c;
    c.spec_id = id;
    c.seeds = runs.size();
    std::size_t epochs = runs.front().size();
    for (const auto& r : runs) epochs = std::min(epochs, r.size());
    for (const auto& r : runs)
      if (r.size() != epochs) {
        result.warnings.push_back(id + ": runs differ in length, truncated to " + std::to_string(epochs) + " epochs");
        break;
      }
    std::vector<double> finals;
    for (auto& r : runs) {
      r.resize(epochs);
      finals.push_back(final_window_mean(r));
    }
    for (std::size_t e = 0; e < epochs; ++e) {
      std::vector<double> column;
      for (const auto& r : runs) column.push_back(r[e]);
      const auto [mean, sd] = spread(column);
      c.mean.push_back(mean);
      c.std.push_back(sd);
    }
    std::tie(c.final_mean, c.final_std) = spread(finals);
    result.curves.push_back(std::move(c));
  }
  return result;
}

void write_curve_csv(std::ostream& out, const ReportResult& report, const ReportOptions& opts) {
  out << kCurveHeader << (opts.moving_average ? ",moving_average" : "") << '\n';
  const auto old_precision = out.precision(10);
  for (const auto& c : report.curves) {
    const auto smooth = opts.moving_average ? moving_average(c.mean, opts.window) : std::vector<double>{};
    for (std::size_t e = 0; e < c.mean.size(); ++e) {
      out << e + 1 << ',' << c.spec_id << ',' << c.mean[e] << ',' << c.std[e];
      if (opts.moving_average) out << ',' << smooth[e];
      out << '\n';
    }
  }
  out.precision(old_precision);
}

void write_summary_table(std::ostream& out, const ReportResult& report) {
  std::size_t width = 7;
  for (const auto& c : report.curves) width = std::max(width, c.spec_id.size());
  std::ostringstream s;
  s << std::left << std::setw(static_cast<int>(width)) << "spec_id" << std::right << std::setw(7) << "seeds"
    << std::setw(8) << "epochs" << std::setw(13) << "final_mean" << std::setw(12) << "final_std" << '\n';
  s << std::fixed << std::setprecision(4);
  for (const auto& c : report.curves)
    s << std::left << std::setw(static_cast<int>(width)) << c.spec_id << std::right << std::setw(7) << c.seeds
      << std::setw(8) << c.mean.size() << std::setw(13) << c.final_mean << std::setw(12) << c.final_std << '\n';
  out << s.str();
}

}  // namespace lsamarl::experiment
