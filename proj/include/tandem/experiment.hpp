#pragma once

// Batch experiment driver behind the CLI: parses the structured config,
// runs design / baseline / oracle / montecarlo jobs over an N grid, and
// writes one CSV per series plus a run manifest. Re-running with the same
// config and seed reproduces the data columns byte for byte; the wall_ms
// column is measured and therefore excluded from that guarantee.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tandem/baselines.hpp"
#include "tandem/core.hpp"
#include "tandem/designer.hpp"
#include "tandem/gaussian.hpp"
#include "tandem/markov.hpp"
#include "tandem/oracle.hpp"

namespace tandem::cli {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  // experiment
  std::string kind;  // design | baseline | oracle | montecarlo
  std::optional<std::vector<std::string>> series;
  std::uint64_t trials = 1'000'000;
  // model
  int hypotheses = 2;
  double snr_db = -10.0;
  int bins = 128;
  double interval_pad = 4.0;
  // network
  std::vector<int> n_list;
  std::vector<int> rates = {1};
  int iterations = 3;
  double eta = 1e-6;
  std::uint64_t seed = 1;
  // output
  std::string dir = ".";
  std::string prefix = "run";
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cur = trim(cur);
  if (!cur.empty()) out.push_back(cur);
  return out;
}

[[noreturn]] inline void fail(const std::string& file, int line, const std::string& msg) {
  throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
}

inline long long parse_int(const std::string& v, const std::string& file, int line) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) fail(file, line, "trailing characters in integer '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(file, line, "expected an integer, got '" + v + "'");
  }
}

inline double parse_double(const std::string& v, const std::string& file, int line) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) fail(file, line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    fail(file, line, "expected a number, got '" + v + "'");
  }
}

// Integer lists accept single values, comma lists and a..b ranges: "1..4,6".
inline std::vector<int> parse_int_list(const std::string& v, const std::string& file, int line) {
  std::vector<int> out;
  for (const auto& item : split_list(v)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<int>(parse_int(item, file, line)));
    } else {
      const int lo = static_cast<int>(parse_int(trim(item.substr(0, dots)), file, line));
      const int hi = static_cast<int>(parse_int(trim(item.substr(dots + 2)), file, line));
      if (hi < lo) fail(file, line, "empty range '" + item + "'");
      for (int x = lo; x <= hi; ++x) out.push_back(x);
    }
  }
  return out;
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

/// Parses the sectioned key-value config format. Unknown sections or keys
/// and malformed values are reported with the offending line number.
inline Config parse_config(const std::string& text, const std::string& filename) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool saw_kind = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string s = detail::trim(raw);
    if (s.empty()) continue;
    // sections may open inline ("model { M: 2") and close at a line's end
    const auto brace = s.find('{');
    if (brace != std::string::npos) {
      if (!section.empty()) detail::fail(filename, line, "nested sections are not supported");
      section = detail::trim(s.substr(0, brace));
      if (section != "experiment" && section != "model" && section != "network" &&
          section != "output")
        detail::fail(filename, line, "unknown section '" + section + "'");
      s = detail::trim(s.substr(brace + 1));
      if (s.empty()) continue;
    }
    bool close_after = false;
    if (!s.empty() && s.back() == '}') {
      if (section.empty()) detail::fail(filename, line, "'}' outside any section");
      close_after = true;
      s = detail::trim(s.substr(0, s.size() - 1));
    }
    if (s.empty()) {
      if (close_after) section.clear();
      continue;
    }
    const auto colon = s.find(':');
    if (colon == std::string::npos) detail::fail(filename, line, "expected 'key: value'");
    if (section.empty()) detail::fail(filename, line, "key outside any section");
    const std::string key = detail::trim(s.substr(0, colon));
    const std::string val = detail::trim(s.substr(colon + 1));

    if (section == "experiment") {
      if (key == "kind") {
        if (val != "design" && val != "baseline" && val != "oracle" && val != "montecarlo")
          detail::fail(filename, line, "unknown experiment kind '" + val + "'");
        cfg.kind = val;
        saw_kind = true;
      } else if (key == "series") {
        cfg.series = detail::split_list(val);
      } else if (key == "trials") {
        const long long t = detail::parse_int(val, filename, line);
        if (t < 10'000) detail::fail(filename, line, "trials must be >= 10000");
        cfg.trials = static_cast<std::uint64_t>(t);
      } else {
        detail::fail(filename, line, "unknown key '" + key + "' in section 'experiment'");
      }
    } else if (section == "model") {
      if (key == "M") {
        cfg.hypotheses = static_cast<int>(detail::parse_int(val, filename, line));
        if (cfg.hypotheses < 2) detail::fail(filename, line, "M must be >= 2");
      } else if (key == "snr_db") {
        cfg.snr_db = detail::parse_double(val, filename, line);
      } else if (key == "bins") {
        cfg.bins = static_cast<int>(detail::parse_int(val, filename, line));
        if (cfg.bins < 2) detail::fail(filename, line, "bins must be >= 2");
      } else if (key == "interval_pad") {
        cfg.interval_pad = detail::parse_double(val, filename, line);
        if (!(cfg.interval_pad > 0)) detail::fail(filename, line, "interval_pad must be positive");
      } else {
        detail::fail(filename, line, "unknown key '" + key + "' in section 'model'");
      }
    } else if (section == "network") {
      if (key == "N_list") {
        cfg.n_list = detail::parse_int_list(val, filename, line);
        for (int n : cfg.n_list)
          if (n < 1) detail::fail(filename, line, "N values must be >= 1");
      } else if (key == "rates") {
        cfg.rates = detail::parse_int_list(val, filename, line);
        if (cfg.rates.empty()) detail::fail(filename, line, "rates must not be empty");
        for (int r : cfg.rates)
          if (r < 1 || r > 16) detail::fail(filename, line, "rates must be in 1..16 bits");
      } else if (key == "K") {
        cfg.iterations = static_cast<int>(detail::parse_int(val, filename, line));
        if (cfg.iterations < 1) detail::fail(filename, line, "K must be >= 1");
      } else if (key == "eta") {
        cfg.eta = detail::parse_double(val, filename, line);
        if (!(cfg.eta > 0)) detail::fail(filename, line, "eta must be positive");
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(detail::parse_int(val, filename, line));
      } else {
        detail::fail(filename, line, "unknown key '" + key + "' in section 'network'");
      }
    } else {  // output
      if (key == "dir") cfg.dir = val;
      else if (key == "prefix") cfg.prefix = val;
      else detail::fail(filename, line, "unknown key '" + key + "' in section 'output'");
    }
    if (close_after) section.clear();
  }
  if (!section.empty()) detail::fail(filename, line, "unterminated section '" + section + "'");
  if (!saw_kind) detail::fail(filename, line, "missing experiment.kind");
  return cfg;
}

namespace detail {

struct Row {
  std::string series;
  int n = 0;
  double pe = 0.0;
  int iterations_used = 0;
  long long wall_ms = 0;
};

inline std::string format_row(const Row& r) {
  char buf[160];
  const double lg = r.pe > 0.0 ? std::log10(r.pe) : -std::numeric_limits<double>::infinity();
  std::snprintf(buf, sizeof buf, "%d,%s,%.6f,%.12g,%d,%lld", r.n, r.series.c_str(), lg, r.pe,
                r.iterations_used, r.wall_ms);
  return buf;
}

/// Deterministic per-rate seed. Cells that differ only in N share the
/// first DM's random initialization, so an initialized-network series is
/// flat across chain lengths.
inline std::uint64_t cell_seed(std::uint64_t root, int rate) {
  return tandem::detail::splitmix64(root ^ (static_cast<std::uint64_t>(rate) * 0x10001ULL));
}

inline bool starts_with(const std::string& s, const std::string& p) {
  return s.rfind(p, 0) == 0;
}

// What a series name asks for.
struct SeriesSpec {
  enum Kind { kSwaszek, kCover, kLinear, kOracle, kDesignFinal, kDesignInit, kDesignIter, kMc };
  std::string name;
  Kind what = kLinear;
  int rate = 0;
  int iter = 0;
};

inline SeriesSpec parse_series(const std::string& name, const Config& cfg) {
  SeriesSpec sp;
  sp.name = name;
  auto need_rate = [&](const std::string& digits) {
    try {
      sp.rate = std::stoi(digits);
    } catch (...) {
      throw ConfigError("unknown series '" + name + "'");
    }
    if (std::find(cfg.rates.begin(), cfg.rates.end(), sp.rate) == cfg.rates.end())
      throw ConfigError("series '" + name + "' refers to rate " + std::to_string(sp.rate) +
                        " which is not in network.rates");
  };
  if (name == "swaszek" || name == "cover") {
    if (cfg.hypotheses != 2)
      throw ConfigError("series '" + name + "' requires a binary model (M = 2)");
    sp.what = name == "swaszek" ? SeriesSpec::kSwaszek : SeriesSpec::kCover;
    return sp;
  }
  if (name == "linear") {
    sp.what = SeriesSpec::kLinear;
    return sp;
  }
  if (name == "oracle") {
    sp.what = SeriesSpec::kOracle;
    return sp;
  }
  if (starts_with(name, "mc-rate-")) {
    sp.what = SeriesSpec::kMc;
    need_rate(name.substr(8));
    return sp;
  }
  if (starts_with(name, "rate-")) {
    const std::string rest = name.substr(5);
    const auto dash = rest.find('-');
    if (dash == std::string::npos) {
      sp.what = SeriesSpec::kDesignFinal;
      need_rate(rest);
      return sp;
    }
    need_rate(rest.substr(0, dash));
    const std::string tail = rest.substr(dash + 1);
    if (tail == "init") {
      sp.what = SeriesSpec::kDesignInit;
      return sp;
    }
    if (starts_with(tail, "iter-")) {
      sp.what = SeriesSpec::kDesignIter;
      try {
        sp.iter = std::stoi(tail.substr(5));
      } catch (...) {
        throw ConfigError("unknown series '" + name + "'");
      }
      if (sp.iter < 1 || sp.iter > cfg.iterations)
        throw ConfigError("series '" + name + "' asks for iteration " + std::to_string(sp.iter) +
                          " outside 1..K");
      return sp;
    }
  }
  throw ConfigError("unknown series '" + name + "'");
}

}  // namespace detail

struct RunResult {
  std::vector<std::string> csv_files;
  std::string manifest_file;
};

/// Executes one parsed config. Throws ConfigError for semantic config
/// problems, InfeasibleError for over-budget oracle requests, and
/// std::logic_error when a computed value violates a library invariant.
inline RunResult run_experiment(const Config& cfg, const std::string& config_path,
                                const std::string& config_text) {
  const int m = cfg.hypotheses;
  // Default series per kind.
  std::vector<std::string> series_names;
  if (cfg.series.has_value()) {
    series_names = *cfg.series;
  } else if (cfg.kind == "design") {
    for (int r : cfg.rates) series_names.push_back("rate-" + std::to_string(r));
  } else if (cfg.kind == "baseline") {
    if (m == 2) series_names = {"swaszek", "cover", "linear"};
    else series_names = {"linear"};
  } else if (cfg.kind == "oracle") {
    series_names.push_back("oracle");
    for (int r : cfg.rates) series_names.push_back("rate-" + std::to_string(r));
  } else {
    for (int r : cfg.rates) series_names.push_back("mc-rate-" + std::to_string(r));
  }

  std::vector<detail::SeriesSpec> series;
  for (const auto& name : series_names) {
    if (std::any_of(series.begin(), series.end(),
                    [&](const detail::SeriesSpec& s) { return s.name == name; }))
      throw ConfigError("series '" + name + "' listed twice");
    series.push_back(detail::parse_series(name, cfg));
  }
  if (!series.empty() && cfg.n_list.empty())
    throw ConfigError("network.N_list is required when any series is requested");

  std::vector<int> design_rates;
  bool want_oracle = false;
  bool want_mc = false;
  for (const auto& s : series) {
    using K = detail::SeriesSpec;
    if (s.what == K::kOracle) want_oracle = true;
    if (s.what == K::kMc) want_mc = true;
    if (s.what == K::kMc || s.what == K::kDesignFinal || s.what == K::kDesignInit ||
        s.what == K::kDesignIter) {
      if (std::find(design_rates.begin(), design_rates.end(), s.rate) == design_rates.end())
        design_rates.push_back(s.rate);
    }
  }

  const double amplitude = snr_to_amplitude(cfg.snr_db);
  const Priors priors = uniform_priors(m);
  const DiscreteObservationModel obs =
      discretize(make_gaussian_spec(m, amplitude, cfg.bins, cfg.interval_pad));

  struct DesignCell {
    int rate = 0, n = 0;
    std::uint64_t seed = 0;
    NetworkDesignResult result;
    MonteCarloResult mc;
    bool has_mc = false;
    long long wall_ms = 0;
  };
  struct OracleCell {
    int n = 0;
    BruteForceResult result;
    long long wall_ms = 0;
  };

  // Independent grid cells run concurrently; everything downstream is
  // sorted, so the output does not depend on completion order.
  std::vector<DesignCell> design_cells;
  for (int r : design_rates)
    for (int n : cfg.n_list) {
      DesignCell c;
      c.rate = r;
      c.n = n;
      c.seed = detail::cell_seed(cfg.seed, r);
      design_cells.push_back(c);
    }
  auto run_design_cell = [&](DesignCell& c) {
    const auto t0 = std::chrono::steady_clock::now();
    DesignConfig dc;
    dc.dm_count = c.n;
    dc.hypothesis_count = m;
    dc.rates = {c.rate};
    dc.iterations = cfg.iterations;
    dc.eta = cfg.eta;
    dc.seed = c.seed;
    c.result = design_network(dc, std::vector<DiscreteObservationModel>(c.n, obs), priors);
    if (want_mc) {
      c.mc = monte_carlo_error(c.result.network, cfg.trials, tandem::detail::splitmix64(c.seed));
      c.has_mc = true;
    }
    c.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  };
  {
    std::vector<std::future<void>> jobs;
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next.fetch_add(1); i < design_cells.size(); i = next.fetch_add(1))
        run_design_cell(design_cells[i]);
    };
    for (unsigned w = 0; w + 1 < workers && w + 1 < design_cells.size(); ++w)
      jobs.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& j : jobs) j.get();
  }

  std::vector<OracleCell> oracle_cells;
  if (want_oracle) {
    if (cfg.rates.size() != 1)
      throw ConfigError("oracle experiments need exactly one rate in network.rates");
    for (int n : cfg.n_list) {
      OracleCell c;
      c.n = n;
      const auto t0 = std::chrono::steady_clock::now();
      c.result = brute_force_design(std::vector<DiscreteObservationModel>(n, obs), priors,
                                    std::vector<int>(n >= 2 ? n - 1 : 0, cfg.rates[0]));
      c.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
      oracle_cells.push_back(std::move(c));
    }
  }

  // Baseline curves over the largest requested N.
  const int n_max =
      cfg.n_list.empty() ? 0 : *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  std::vector<double> swz, cov;
  for (const auto& s : series) {
    if (s.what == detail::SeriesSpec::kSwaszek) swz = swaszek_curve(n_max, amplitude);
    if (s.what == detail::SeriesSpec::kCover) cov = cover_curve(n_max, amplitude);
  }

  auto find_cell = [&](int rate, int n) -> const DesignCell* {
    for (const auto& c : design_cells)
      if (c.rate == rate && c.n == n) return &c;
    return nullptr;
  };

  const double pe_cap = 1.0 - *std::max_element(priors.weights.begin(), priors.weights.end());
  auto checked_pe = [&](double pe, const std::string& where) {
    if (!(pe >= 0.0) || pe > pe_cap + 1e-12)
      throw std::logic_error("computed error probability out of range in " + where);
    return pe;
  };

  // Every emitted value passes the range and monotone-trace gates first.
  for (const auto& c : design_cells) {
    double prev = c.result.initial_error;
    for (double e : c.result.outer_errors) {
      if (e > prev + 1e-12)
        throw std::logic_error("design error trace increased for rate-" + std::to_string(c.rate) +
                               " at N=" + std::to_string(c.n));
      prev = e;
    }
  }

  std::map<std::string, std::vector<detail::Row>> rows;
  for (const auto& s : series) {
    for (int n : cfg.n_list) {
      detail::Row row;
      row.series = s.name;
      row.n = n;
      using K = detail::SeriesSpec;
      switch (s.what) {
        case K::kSwaszek: row.pe = checked_pe(swz[static_cast<std::size_t>(n - 1)], s.name); break;
        case K::kCover: row.pe = checked_pe(cov[static_cast<std::size_t>(n - 1)], s.name); break;
        case K::kLinear:
          row.pe = checked_pe(linear_detector_error(n, m, amplitude), s.name);
          break;
        case K::kOracle: {
          const OracleCell* oc = nullptr;
          for (const auto& c : oracle_cells)
            if (c.n == n) oc = &c;
          row.pe = checked_pe(oc->result.error, s.name);
          row.wall_ms = oc->wall_ms;
          break;
        }
        case K::kMc: {
          const DesignCell* c = find_cell(s.rate, n);
          row.pe = checked_pe(c->mc.empirical, s.name);
          row.iterations_used = c->result.iterations_run;
          row.wall_ms = c->wall_ms;
          break;
        }
        case K::kDesignFinal: {
          const DesignCell* c = find_cell(s.rate, n);
          row.pe = checked_pe(c->result.final_error(), s.name);
          row.iterations_used = c->result.iterations_run;
          row.wall_ms = c->wall_ms;
          break;
        }
        case K::kDesignInit: {
          row.pe = checked_pe(find_cell(s.rate, n)->result.initial_error, s.name);
          break;
        }
        case K::kDesignIter: {
          const auto& trace = find_cell(s.rate, n)->result.outer_errors;
          // with early stop the trace can be shorter; the value is frozen
          const int idx = std::min<int>(s.iter, static_cast<int>(trace.size()));
          row.pe = checked_pe(trace[static_cast<std::size_t>(idx - 1)], s.name);
          row.iterations_used = s.iter;
          break;
        }
      }
      rows[s.name].push_back(row);
    }
  }

  // Write artifacts.
  const std::filesystem::path out_dir(cfg.dir);
  std::filesystem::create_directories(out_dir);
  RunResult result;
  for (const auto& s : series) {
    auto& rs = rows[s.name];
    std::sort(rs.begin(), rs.end(),
              [](const detail::Row& a, const detail::Row& b) { return a.n < b.n; });
    const auto path = out_dir / (cfg.prefix + "_" + s.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "N,series,log10_pe,pe,iterations_used,wall_ms\n";
    for (const auto& r : rs) f << detail::format_row(r) << "\n";
    result.csv_files.push_back(path.string());
  }

  // Manifest: config echo, per-cell seeds, traces, sweep counts and
  // multiplication-count estimates.
  const auto mpath = out_dir / (cfg.prefix + "_manifest.txt");
  std::ofstream mf(mpath, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write " + mpath.string());
  char num[96];
  std::snprintf(num, sizeof num, "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(config_text)));
  mf << "tandem manifest v1\n";
  mf << "library_version: " << kLibraryVersion << "\n";
  mf << "config_file: " << config_path << "\n";
  mf << "config_fnv1a64: " << num << "\n";
  mf << "kind: " << cfg.kind << "\n";
  mf << "root_seed: " << cfg.seed << "\n";
  mf << "series:";
  for (const auto& s : series) mf << " " << s.name;
  mf << "\nconfig_echo {\n";
  {
    std::istringstream echo(config_text);
    std::string line;
    while (std::getline(echo, line)) mf << "  " << line << "\n";
  }
  mf << "}\n";
  for (const auto& c : design_cells) {
    mf << "cell rate-" << c.rate << " N=" << c.n << " {\n";
    mf << "  seed: " << c.seed << "\n";
    mf << "  log10_trace:";
    auto put = [&](double pe) {
      std::snprintf(num, sizeof num, " %.6f", pe > 0 ? std::log10(pe) : -999.0);
      mf << num;
    };
    put(c.result.initial_error);
    for (double e : c.result.outer_errors) put(e);
    mf << "\n  sweeps:";
    for (const auto& iter : c.result.sweep_counts) {
      mf << " [";
      for (std::size_t i = 0; i < iter.size(); ++i) mf << (i ? " " : "") << iter[i];
      mf << "]";
    }
    mf << "\n  max_q_deviation: " << c.result.max_q_deviation << "\n";
    int t_max = 1;
    for (const auto& iter : c.result.sweep_counts)
      for (int t : iter) t_max = std::max(t_max, t);
    if (c.n >= 2) {
      DesignConfig dc;
      dc.dm_count = c.n;
      dc.hypothesis_count = m;
      dc.rates = {c.rate};
      const auto mults = multiplication_count(dc, cfg.bins, 1 << c.rate, t_max);
      mf << "  mults_exact: " << mults.exact << "\n";
      mf << "  mults_dominant: " << mults.dominant << "\n";
    }
    const double lin = linear_detector_error(c.n, m, amplitude);
    std::snprintf(num, sizeof num, "%.6f", std::log10(c.result.final_error()) - std::log10(lin));
    mf << "  gap_log10_vs_linear: " << num << "\n";
    if (c.has_mc) {
      std::snprintf(num, sizeof num, "%.8f [%.8f, %.8f]", c.mc.empirical, c.mc.ci_low,
                    c.mc.ci_high);
      mf << "  montecarlo: " << num << " trials=" << c.mc.trials << "\n";
      const double analytic = c.result.final_error();
      mf << "  analytic_inside_ci: "
         << ((analytic >= c.mc.ci_low && analytic <= c.mc.ci_high) ? "yes" : "no") << "\n";
    }
    mf << "  wall_ms: " << c.wall_ms << "\n";
    mf << "}\n";
  }
  for (const auto& c : oracle_cells) {
    mf << "cell oracle N=" << c.n << " {\n";
    std::snprintf(num, sizeof num, "%.3Le", c.result.cardinality);
    mf << "  cardinality: " << num << "\n";
    std::snprintf(num, sizeof num, "%.10g", c.result.error);
    mf << "  optimum_pe: " << num << "\n";
    mf << "  wall_ms: " << c.wall_ms << "\n";
    mf << "}\n";
  }
  result.manifest_file = mpath.string();
  return result;
}

/// Shared by the CLI binary and the tests; returns the process exit code.
/// Exit codes: 0 success, 2 config error, 3 infeasible oracle request,
/// 4 internal invariant violation, 1 anything else.
inline int run_command(const std::string& kind, const std::string& config_path,
                       const std::optional<std::string>& out_dir,
                       const std::optional<std::uint64_t>& seed, std::ostream& out,
                       std::ostream& err) {
  std::ifstream f(config_path, std::ios::binary);
  if (!f) {
    err << "config error: cannot read config file '" << config_path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  try {
    Config cfg = parse_config(text, config_path);
    if (!cfg.kind.empty() && cfg.kind != kind)
      throw ConfigError(config_path + ": experiment.kind '" + cfg.kind +
                        "' does not match subcommand '" + kind + "'");
    cfg.kind = kind;
    if (out_dir) cfg.dir = *out_dir;
    if (seed) cfg.seed = *seed;
    const RunResult res = run_experiment(cfg, config_path, text);
    for (const auto& p : res.csv_files) out << "wrote " << p << "\n";
    out << "wrote " << res.manifest_file << "\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    err << "infeasible request: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    err << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tandem::cli
