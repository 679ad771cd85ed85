// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#include "drmdp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "drmdp/errors.hpp"
#include "drmdp/json_io.hpp"
#include "drmdp/model.hpp"

namespace drmdp {

namespace {

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

/// 64-bit FNV-1a over a byte string; used only to key the ground-truth cache.
std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string ground_truth_key(const MdpModel& model,
                             const UncertaintySetSpec& spec,
                             double precision) {
  json j{{"model", to_json(model)},
         {"divergence", to_string(spec.divergence)},
         {"radius", spec.radius},
         {"precision", precision}};
  if (spec.divergence == Divergence::Fk) j["k"] = spec.k;
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

ExperimentRecord make_failed(long long n, std::uint64_t seed, Method method,
                             const std::string& message, double ms) {
  ExperimentRecord rec;
  rec.n = n;
  rec.seed = seed;
  rec.algorithm = method;
  rec.gain = std::numeric_limits<double>::quiet_NaN();
  rec.abs_error = std::numeric_limits<double>::quiet_NaN();
  rec.wall_time_ms = ms;
  rec.failed = true;
  rec.error = message;
  return rec;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

// ----- config assembly shared by the JSON and TOML loaders -----------------

ExperimentConfig config_from_json_object(const json& j) {
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "family") {
      c.family = value.get<std::string>();
    } else if (key == "p") {
      c.hard.p = value.get<double>();
    } else if (key == "states") {
      c.random.n_states = value.get<int>();
    } else if (key == "actions") {
      c.random.n_actions = value.get<int>();
    } else if (key == "instance_seed") {
      c.random.seed.seed = value.get<std::uint64_t>();
    } else if (key == "sigma_max") {
      c.random.sigma_max = value.get<double>();
    } else if (key == "divergence") {
      c.spec.divergence = divergence_from_string(value.get<std::string>());
    } else if (key == "delta") {
      c.spec.radius = value.get<double>();
    } else if (key == "k") {
      c.spec.k = value.get<double>();
    } else if (key == "algorithm") {
      c.algorithm = algorithm_choice_from_string(value.get<std::string>());
    } else if (key == "n_grid") {
      c.n_grid = value.get<std::vector<long long>>();
    } else if (key == "seeds_per_n" || key == "seeds") {
      c.seeds_per_n = value.get<int>();
    } else if (key == "base_seed") {
      c.base_seed = value.get<std::uint64_t>();
    } else if (key == "ground_truth_precision") {
      c.ground_truth_precision = value.get<double>();
    } else if (key == "solver_tol") {
      c.solver_tol = value.get<double>();
    } else if (key == "anchor_state") {
      c.anchor_state = value.get<int>();
    } else if (key == "out_dir") {
      c.out_dir = value.get<std::string>();
    } else if (key == "plot") {
      c.plot = value.get<bool>();
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  c.validate();
  return c;
}

// ----- SVG plot -------------------------------------------------------------

struct PlotSeries {
  Method method;
  std::string color;
  std::vector<std::pair<double, double>> points;  // (log10 n, log10 err)
  const RegressionFit* fit = nullptr;
};

std::string render_svg(const std::vector<PlotSeries>& series) {
  // Data ranges.
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (x_lo > x_hi) {  // no points at all
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = -1.0;
    y_hi = 0.0;
  }
  x_lo = std::floor(x_lo);
  x_hi = std::ceil(x_hi);
  y_lo = std::floor(y_lo - 0.05);
  y_hi = std::ceil(y_hi + 0.05);
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;

  const double width = 720, height = 540;
  const double ml = 70, mr = 20, mt = 20, mb = 55;
  const auto px = [&](double x) {
    return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr);
  };
  const auto py = [&](double y) {
    return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Grid and tick labels at integer decades.
  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double x = x_lo; x <= x_hi + 1e-9; x += 1.0) {
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << py(y_lo) << "\" x2=\""
        << px(x) << "\" y2=\"" << py(y_hi) << "\"/>\n";
  }
  for (double y = y_lo; y <= y_hi + 1e-9; y += 1.0) {
    svg << "<line x1=\"" << px(x_lo) << "\" y1=\"" << py(y) << "\" x2=\""
        << px(x_hi) << "\" y2=\"" << py(y) << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (double x = x_lo; x <= x_hi + 1e-9; x += 1.0) {
    svg << "<text x=\"" << px(x) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\">1e" << format_double("%.0f", x)
        << "</text>\n";
  }
  for (double y = y_lo; y <= y_hi + 1e-9; y += 1.0) {
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\">1e" << format_double("%.0f", y)
        << "</text>\n";
  }
  svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">samples per (s, a)</text>\n";
  svg << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">sup-norm error</text>\n";
  svg << "</g>\n";

  // Axes frame.
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\""
      << width - ml - mr << "\" height=\"" << height - mt - mb
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  double legend_y = mt + 20;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
          << "\" r=\"4\" fill=\"" << s.color << "\" fill-opacity=\"0.75\"/>\n";
    }
    if (s.fit != nullptr) {
      const double yl = s.fit->intercept + s.fit->slope * x_lo;
      const double yr = s.fit->intercept + s.fit->slope * x_hi;
      svg << "<line x1=\"" << px(x_lo) << "\" y1=\"" << py(yl) << "\" x2=\""
          << px(x_hi) << "\" y2=\"" << py(yr) << "\" stroke=\"" << s.color
          << "\" stroke-width=\"2\"/>\n";
      svg << "<text font-family=\"sans-serif\" font-size=\"13\" x=\""
          << ml + 12 << "\" y=\"" << legend_y << "\" fill=\"" << s.color
          << "\">" << to_string(s.method)
          << ": slope = " << format_double("%.3f", s.fit->slope)
          << "</text>\n";
      legend_y += 18;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string to_string(AlgorithmChoice a) {
  switch (a) {
    case AlgorithmChoice::Reduction:
      return "Reduction";
    case AlgorithmChoice::Anchored:
      return "Anchored";
    case AlgorithmChoice::Both:
      return "Both";
  }
  throw std::logic_error("unknown algorithm choice");
}

AlgorithmChoice algorithm_choice_from_string(const std::string& s) {
  if (s == "Reduction" || s == "reduction") return AlgorithmChoice::Reduction;
  if (s == "Anchored" || s == "anchored") return AlgorithmChoice::Anchored;
  if (s == "Both" || s == "both") return AlgorithmChoice::Both;
  throw std::invalid_argument("unknown algorithm choice: " + s);
}

std::vector<long long> ExperimentConfig::effective_n_grid() const {
  if (!n_grid.empty()) return n_grid;
  std::vector<long long> grid;
  for (int half = 4; half <= 10; ++half) {  // 10^2 .. 10^5 in half decades
    grid.push_back(std::llround(std::pow(10.0, half / 2.0)));
  }
  return grid;
}

MdpModel ExperimentConfig::build_model() const {
  if (family == "hard") return hard_mdp(hard);
  if (family == "random") return random_mdp(random);
  throw std::invalid_argument("unknown instance family: " + family);
}

void ExperimentConfig::validate() const {
  if (family != "hard" && family != "random") {
    throw std::invalid_argument("unknown instance family: " + family);
  }
  spec.validate();
  const std::vector<long long> grid = effective_n_grid();
  if (grid.empty()) throw std::invalid_argument("empty sample-size grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2) {
      throw std::invalid_argument("sample sizes must be >= 2");
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("sample sizes must be strictly increasing");
    }
  }
  if (seeds_per_n < 1) throw std::invalid_argument("seeds_per_n must be >= 1");
  if (!(ground_truth_precision > 0.0 && ground_truth_precision < 1.0)) {
    throw std::invalid_argument("ground_truth_precision must lie in (0, 1)");
  }
  if (!(solver_tol > 0.0)) throw std::invalid_argument("solver_tol must be > 0");
  if (anchor_state < 0) throw std::invalid_argument("anchor_state must be >= 0");
  if (family == "hard") {
    if (!(hard.p > 0.0 && hard.p <= 0.5)) {
      throw std::invalid_argument("hard-instance p must lie in (0, 0.5]");
    }
  }
}

std::uint64_t record_seed(std::uint64_t base_seed, long long n,
                          int replicate) {
  std::uint64_t h = rng::mix64(base_seed);
  h = rng::mix64(h ^ rng::mix64(static_cast<std::uint64_t>(n)));
  h = rng::mix64(h ^ rng::mix64(static_cast<std::uint64_t>(replicate)));
  return h;
}

double cached_ground_truth_gain(const MdpModel& model,
                                const UncertaintySetSpec& spec,
                                double precision,
                                const std::string& cache_path) {
  if (cache_path.empty()) return ground_truth_gain(model, spec, precision);
  const std::string key = ground_truth_key(model, spec, precision);
  json cache = json::object();
  if (std::filesystem::exists(cache_path)) {
    try {
      cache = json::parse(read_file(cache_path));
    } catch (const std::exception&) {
      cache = json::object();  // corrupt cache: recompute
    }
  }
  if (cache.contains(key)) return cache[key].get<double>();
  const double gain = ground_truth_gain(model, spec, precision);
  cache[key] = gain;
  std::filesystem::path dir =
      std::filesystem::path(cache_path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  write_file(cache_path, cache.dump(2) + "\n");
  return gain;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const MdpModel model = config.build_model();
  if (config.anchor_state >= model.n_states) {
    throw std::invalid_argument("anchor_state out of range for the instance");
  }
  const std::string cache_path =
      (std::filesystem::path(config.out_dir) / "ground_truth_cache.json")
          .string();
  std::filesystem::create_directories(config.out_dir);
  const double g_star = cached_ground_truth_gain(
      model, config.spec, config.ground_truth_precision, cache_path);

  std::vector<Method> methods;
  if (config.algorithm != AlgorithmChoice::Anchored) {
    methods.push_back(Method::Reduction);
  }
  if (config.algorithm != AlgorithmChoice::Reduction) {
    methods.push_back(Method::Anchored);
  }

  std::vector<ExperimentRecord> records;
  for (long long n : config.effective_n_grid()) {
    for (int rep = 0; rep < config.seeds_per_n; ++rep) {
      const std::uint64_t seed = record_seed(config.base_seed, n, rep);
      const EmpiricalKernel emp = sample_transitions(model, n, {seed});
      for (Method method : methods) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
          ExperimentRecord rec;
          rec.n = n;
          rec.seed = seed;
          rec.algorithm = method;
          if (method == Method::Reduction) {
            const AvgRewardSolution sol = reduce_to_dmdp(
                emp, model.reward, config.spec, n, config.solver_tol);
            rec.gain = sol.gain;
            // l_inf error of the per-state gain vector.
            double err = 0.0;
            for (double b : sol.bias) err = std::max(err, std::abs(b - g_star));
            rec.abs_error = err;
          } else {
            const AvgRewardSolution sol =
                anchored_amdp(emp, model.reward, config.spec, n,
                              config.anchor_state, config.solver_tol);
            rec.gain = sol.gain;
            rec.abs_error = std::abs(sol.gain - g_star);
          }
          rec.wall_time_ms = elapsed_ms(t0);
          records.push_back(std::move(rec));
        } catch (const std::exception& e) {
          records.push_back(
              make_failed(n, seed, method, e.what(), elapsed_ms(t0)));
        }
      }
    }
  }
  return records;
}

RegressionFit fit_loglog(const std::vector<ExperimentRecord>& records) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& rec : records) {
    if (rec.failed || !(rec.abs_error > 0.0) ||
        !std::isfinite(rec.abs_error)) {
      continue;
    }
    pts.emplace_back(std::log10(static_cast<double>(rec.n)),
                     std::log10(rec.abs_error));
  }
  if (pts.size() < 2) {
    throw InsufficientData(
        "log-log regression needs at least two records with positive error, "
        "got " +
        std::to_string(pts.size()));
  }
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double n = static_cast<double>(pts.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) {
    throw InsufficientData("all regression points share one sample size");
  }
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.point_count = static_cast<int>(pts.size());
  double ss_res = 0.0;
  for (const auto& [x, y] : pts) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = "n,seed,algorithm,gain,abs_error,wall_time_ms\n";
  for (const auto& rec : records) {
    out += std::to_string(rec.n);
    out += ',';
    out += std::to_string(rec.seed);
    out += ',';
    out += to_string(rec.algorithm);
    out += ',';
    out += format_double("%.17g", rec.gain);
    out += ',';
    out += format_double("%.17g", rec.abs_error);
    out += ',';
    out += format_double("%.3f", rec.wall_time_ms);
    out += '\n';
  }
  return out;
}

std::vector<ExperimentRecord> records_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("empty CSV");
  }
  if (line == "n,seed,algorithm,gain,abs_error,wall_time_ms\r") {
    line.pop_back();  // tolerate CRLF input from external tools
  }
  if (line != "n,seed,algorithm,gain,abs_error,wall_time_ms") {
    throw std::invalid_argument("unexpected CSV header: " + line);
  }
  std::vector<ExperimentRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 6) {
      throw std::invalid_argument("malformed CSV row: " + line);
    }
    ExperimentRecord rec;
    rec.n = std::stoll(f[0]);
    rec.seed = std::stoull(f[1]);
    rec.algorithm = method_from_string(f[2]);
    rec.gain = std::stod(f[3]);
    rec.abs_error = std::stod(f[4]);
    rec.wall_time_ms = std::stod(f[5]);
    rec.failed = std::isnan(rec.gain);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<std::string> emit_outputs(
    const std::vector<ExperimentRecord>& records,
    const std::map<Method, RegressionFit>& fits,
    const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  std::vector<std::string> written;

  const std::filesystem::path dir(config.out_dir);
  const std::string csv_path = (dir / "records.csv").string();
  write_file(csv_path, records_to_csv(records));
  written.push_back(csv_path);

  json fits_json = json::object();
  for (const auto& [method, fit] : fits) {
    fits_json[to_string(method)] = to_json(fit);
  }
  long long failed = 0;
  for (const auto& rec : records) failed += rec.failed ? 1 : 0;
  json summary{{"config", to_json(config)},
               {"fits", std::move(fits_json)},
               {"records", static_cast<long long>(records.size())},
               {"failed_records", failed}};
  const std::string json_path = (dir / "regression.json").string();
  write_file(json_path, summary.dump(2) + "\n");
  written.push_back(json_path);

  if (config.plot) {
    std::vector<PlotSeries> series;
    const std::map<Method, std::string> colors{
        {Method::Reduction, "#1f77b4"}, {Method::Anchored, "#d62728"}};
    for (const auto& [method, color] : colors) {
      PlotSeries s;
      s.method = method;
      s.color = color;
      for (const auto& rec : records) {
        if (rec.algorithm == method && !rec.failed && rec.abs_error > 0.0) {
          s.points.emplace_back(std::log10(static_cast<double>(rec.n)),
                                std::log10(rec.abs_error));
        }
      }
      const auto it = fits.find(method);
      if (it != fits.end()) s.fit = &it->second;
      if (!s.points.empty()) series.push_back(std::move(s));
    }
    const std::string svg_path = (dir / "convergence.svg").string();
    write_file(svg_path, render_svg(series));
    written.push_back(svg_path);
  }
  return written;
}

ExperimentConfig config_from_file(const std::string& path) {
  const std::string text = read_file(path);
  // JSON if it syntactically is; otherwise the flat-TOML subset.
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return config_from_json_object(json::parse(text));
  }
  json j = json::object();
  for (const auto& [key, value] : parse_flat_toml(text)) {
    try {
      j[key] = json::parse(value);
    } catch (const json::parse_error&) {
      throw std::invalid_argument("config key '" + key +
                                  "' has unsupported TOML value: " + value);
    }
  }
  return config_from_json_object(j);
}

std::map<std::string, std::string> parse_flat_toml(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments outside quotes.
    bool in_str = false;
    std::string clean;
    for (char c : line) {
      if (c == '"') in_str = !in_str;
      if (c == '#' && !in_str) break;
      clean.push_back(c);
    }
    const auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const size_t e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string t = trim(clean);
    if (t.empty()) continue;
    if (t.front() == '[') {
      throw std::invalid_argument(
          "TOML tables are not supported by the flat config parser (line " +
          std::to_string(line_no) + "); use top-level keys");
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("malformed TOML line " +
                                  std::to_string(line_no) + ": " + t);
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("malformed TOML line " +
                                  std::to_string(line_no) + ": " + t);
    }
    if (out.count(key)) {
      throw std::invalid_argument("duplicate TOML key: " + key);
    }
    out[key] = value;
  }
  return out;
}

}  // namespace drmdp
