#include "rimsa/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rimsa {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const char* b = s.data();
  auto res = std::from_chars(b, b + s.size(), v);
  if (res.ec != std::errc() || res.ptr != b + s.size())
    throw std::runtime_error(std::string("failed to parse number for ") + what + ": '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

MisoConfig finalize_miso(MisoConfig cfg) {
  if (cfg.noise_vars.size() == 0) cfg.noise_vars = VecD::Ones(cfg.n_users);
  if (cfg.noise_vars.size() == 1 && cfg.n_users > 1)
    cfg.noise_vars = VecD::Constant(cfg.n_users, cfg.noise_vars[0]);
  return cfg;
}

struct AlgoOutcome {
  double rate_bits = 0.0;
  int outer_iterations = 0;
  bool converged = false;
};

AlgoOutcome run_miso_algorithm(const std::string& name, const ChannelRealization& opt_ch,
                               const ChannelRealization& true_ch, const MisoConfig& cfg,
                               const RcgParams& rcg, int outer_iters, std::uint64_t seed) {
  Rng rng(seed);
  FpPmoOptions opt;
  opt.outer_iters = outer_iters;
  opt.rcg = rcg;
  if (name == "fp_pmo") {
    FpPmoResult r = fp_pmo(opt_ch, cfg, opt, rng);
    return {sum_rate(r.state, true_ch, cfg), r.outer_iterations, r.converged};
  }
  if (name == "fd_opt") {
    MisoConfig fd = cfg;
    fd.n_rf = cfg.n_t();
    fd.n_per_rimsa = 1;
    MisoState st = MisoState::init(fd, rng);
    st.v = PhaseMatrix::ones(fd.v_pattern());
    opt.optimize_v = false;
    FpPmoResult r = fp_pmo(opt_ch, fd, opt, std::move(st));
    return {sum_rate(r.state, true_ch, fd), r.outer_iterations, r.converged};
  }
  if (name == "random_phase") {
    opt.optimize_v = false;
    opt.optimize_f = false;
    FpPmoResult r = fp_pmo(opt_ch, cfg, opt, rng);
    return {sum_rate(r.state, true_ch, cfg), r.outer_iterations, r.converged};
  }
  throw std::invalid_argument("unknown MISO algorithm: " + name);
}

AlgoOutcome run_mimo_algorithm(const std::string& name, const ChannelRealization& opt_ch,
                               const ChannelRealization& true_ch, const MimoConfig& cfg,
                               const RcgParams& rcg, int outer_iters, std::uint64_t seed) {
  Rng rng(seed);
  WmmsePmoOptions opt;
  opt.outer_iters = outer_iters;
  opt.rcg = rcg;
  if (name == "wmmse_pmo") {
    WmmsePmoResult r = wmmse_pmo(opt_ch, cfg, opt, rng);
    return {sum_rate(r.state, true_ch, cfg), r.outer_iterations, r.converged};
  }
  if (name == "fd_opt") {
    MimoConfig fd = cfg;
    fd.n_rf_tx = cfg.n_t();
    fd.n_per_rimsa_tx = 1;
    fd.n_rf_rx = cfg.n_r();
    fd.n_per_rimsa_rx = 1;
    MimoState st = MimoState::init(fd, rng);
    st.v = PhaseMatrix::ones(fd.v_pattern());
    for (auto& w : st.w_rf) w = PhaseMatrix::ones(fd.wrf_pattern());
    for (int i = 0; i < fd.n_users; ++i) st.u[i] = update_combiner(i, st, opt_ch, fd);
    opt.optimize_analog = false;
    WmmsePmoResult r = wmmse_pmo(opt_ch, fd, opt, std::move(st));
    return {sum_rate(r.state, true_ch, fd), r.outer_iterations, r.converged};
  }
  if (name == "random_phase") {
    opt.optimize_analog = false;
    WmmsePmoResult r = wmmse_pmo(opt_ch, cfg, opt, rng);
    return {sum_rate(r.state, true_ch, cfg), r.outer_iterations, r.converged};
  }
  throw std::invalid_argument("unknown MIMO algorithm: " + name);
}

// Sweep-point view of the experiment: concrete dimensions plus the CSI error
// applied to the channel the solver sees.
struct SweepPoint {
  MisoConfig miso;
  MimoConfig mimo;
  double sigma_e = 0.0;
  double value = 0.0;
};

SweepPoint make_sweep_point(const ExperimentConfig& cfg, std::size_t sweep_index) {
  SweepPoint pt;
  pt.miso = finalize_miso(cfg.miso);
  pt.mimo = cfg.mimo;
  if (cfg.sweep == SweepKind::none) return pt;

  const double value = cfg.sweep_values.at(sweep_index);
  pt.value = value;
  switch (cfg.sweep) {
    case SweepKind::rf_chains: {
      const int chains = static_cast<int>(value);
      if (cfg.scenario == Scenario::miso) {
        const int n_t = pt.miso.n_t();
        if (chains < 1 || n_t % chains != 0)
          throw std::invalid_argument("rf_chains sweep: N_t must be divisible by each value");
        pt.miso.n_rf = chains;
        pt.miso.n_per_rimsa = n_t / chains;
      } else {
        const int n_t = pt.mimo.n_t();
        if (chains < 1 || n_t % chains != 0)
          throw std::invalid_argument("rf_chains sweep: N_t must be divisible by each value");
        pt.mimo.n_rf_tx = chains;
        pt.mimo.n_per_rimsa_tx = n_t / chains;
      }
      break;
    }
    case SweepKind::users: {
      const int users = static_cast<int>(value);
      if (users < 1) throw std::invalid_argument("users sweep: values must be positive");
      if (cfg.scenario == Scenario::miso) {
        pt.miso.n_users = users;
        pt.miso = finalize_miso(pt.miso);
        if (pt.miso.noise_vars.size() != users)
          pt.miso.noise_vars = VecD::Constant(users, pt.miso.noise_vars[0]);
      } else {
        pt.mimo.n_users = users;
      }
      break;
    }
    case SweepKind::csi_error:
      if (value < 0.0) throw std::invalid_argument("csi_error sweep: values must be >= 0");
      pt.sigma_e = value;
      break;
    case SweepKind::none:
      break;
  }
  return pt;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  miso.n_rf = 8;
  miso.n_per_rimsa = 8;
  miso.n_users = 4;
  miso.n_rx = 4;
  miso.noise_vars = VecD::Ones(4);
  mimo.n_rf_tx = 16;
  mimo.n_per_rimsa_tx = 2;
  mimo.n_users = 4;
  mimo.n_rf_rx = 4;
  mimo.n_per_rimsa_rx = 4;
  mimo.n_streams = 4;
  mimo.noise_var = 1.0;
}

std::string to_string(Scenario s) { return s == Scenario::miso ? "miso" : "mimo"; }

std::string to_string(SweepKind s) {
  switch (s) {
    case SweepKind::none: return "none";
    case SweepKind::rf_chains: return "rf_chains";
    case SweepKind::users: return "users";
    case SweepKind::csi_error: return "csi_error";
  }
  return "none";
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
  if (snr_db.empty()) throw std::invalid_argument("ExperimentConfig: snr_db must be nonempty");
  if (sweep != SweepKind::none && sweep_values.empty())
    throw std::invalid_argument("ExperimentConfig: sweep requested without values");
  if (outer_iters < 0) throw std::invalid_argument("ExperimentConfig: outer_iters must be >= 0");
  if (n_paths_miso < 1 || n_paths_mimo < 1)
    throw std::invalid_argument("ExperimentConfig: path counts must be >= 1");
  for (const std::string& a : effective_algorithms()) {
    const bool known = a == "fd_opt" || a == "random_phase" ||
                       (scenario == Scenario::miso ? a == "fp_pmo" : a == "wmmse_pmo");
    if (!known) throw std::invalid_argument("ExperimentConfig: unknown algorithm '" + a + "'");
  }
  // Dimension checks across all sweep points, before any work starts.
  const std::size_t points = sweep == SweepKind::none ? 1 : sweep_values.size();
  for (std::size_t s = 0; s < points; ++s) {
    const SweepPoint pt = make_sweep_point(*this, s);
    if (scenario == Scenario::miso)
      finalize_miso(pt.miso).validate();
    else
      pt.mimo.validate();
  }
}

std::vector<std::string> ExperimentConfig::effective_algorithms() const {
  if (!algorithms.empty()) return algorithms;
  if (scenario == Scenario::miso) return {"fp_pmo", "fd_opt", "random_phase"};
  return {"wmmse_pmo", "fd_opt", "random_phase"};
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t sweep_index, std::uint64_t snr_index,
                         std::uint64_t trial_index) {
  std::uint64_t h = master;
  h = splitmix64(h ^ sweep_index);
  h = splitmix64(h ^ snr_index);
  h = splitmix64(h ^ trial_index);
  return h;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> algos = cfg.effective_algorithms();
  const std::size_t n_sweep = cfg.sweep == SweepKind::none ? 1 : cfg.sweep_values.size();
  const std::size_t n_snr = cfg.snr_db.size();
  const std::size_t n_tasks = n_sweep * n_snr * static_cast<std::size_t>(cfg.trials);

  std::vector<SweepPoint> points;
  for (std::size_t s = 0; s < n_sweep; ++s) points.push_back(make_sweep_point(cfg, s));

  std::vector<std::vector<ResultRecord>> results(n_tasks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> fatal{false};
  std::string fatal_message;
  std::mutex fatal_mutex;

  auto run_task = [&](std::size_t task) {
    const std::size_t sweep_i = task / (n_snr * cfg.trials);
    const std::size_t snr_i = (task / cfg.trials) % n_snr;
    const std::size_t trial = task % cfg.trials;
    const SweepPoint& pt = points[sweep_i];

    // CSI-error sweeps share the channel and solver seeds across sweep values
    // so the loss curve is paired; the perturbation scale alone varies.
    const std::uint64_t seed_sweep_i = cfg.sweep == SweepKind::csi_error ? 0 : sweep_i;
    const std::uint64_t ts = trial_seed(cfg.seed, seed_sweep_i, snr_i, trial);

    const double power = std::pow(10.0, cfg.snr_db[snr_i] / 10.0);

    ChannelRealization true_ch;
    {
      Rng channel_rng(splitmix64(ts ^ 0x11));
      if (cfg.scenario == Scenario::miso) {
        true_ch = sample_multiuser_channel(channel_rng, upa_for(pt.miso.n_t()),
                                           upa_for(pt.miso.n_rx), pt.miso.n_users,
                                           cfg.n_paths_miso);
      } else {
        true_ch = sample_multiuser_channel(channel_rng, upa_for(pt.mimo.n_t()),
                                           upa_for(pt.mimo.n_r()), pt.mimo.n_users,
                                           cfg.n_paths_mimo);
      }
    }
    ChannelRealization opt_ch = true_ch;
    if (pt.sigma_e > 0.0) {
      Rng perturb_rng(splitmix64(ts ^ 0x22));
      opt_ch = perturb_csi(true_ch, CsiErrorModel{pt.sigma_e}, perturb_rng);
    }

    for (std::size_t a = 0; a < algos.size(); ++a) {
      ResultRecord rec;
      rec.scenario = to_string(cfg.scenario);
      rec.sweep_name = to_string(cfg.sweep);
      rec.sweep_value = cfg.sweep == SweepKind::none ? 0.0 : pt.value;
      rec.snr_db = cfg.snr_db[snr_i];
      rec.trial = static_cast<int>(trial);
      rec.algorithm = algos[a];

      const std::uint64_t algo_seed = splitmix64(ts ^ (0x100 + a));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        AlgoOutcome out;
        if (cfg.scenario == Scenario::miso) {
          MisoConfig run_cfg = pt.miso;
          run_cfg.power = power;
          out = run_miso_algorithm(algos[a], opt_ch, true_ch, run_cfg, cfg.rcg, cfg.outer_iters,
                                   algo_seed);
        } else {
          MimoConfig run_cfg = pt.mimo;
          run_cfg.power = power;
          out = run_mimo_algorithm(algos[a], opt_ch, true_ch, run_cfg, cfg.rcg, cfg.outer_iters,
                                   algo_seed);
        }
        rec.sum_rate_bits = out.rate_bits;
        rec.outer_iterations = out.outer_iterations;
        rec.converged = out.converged;
      } catch (const std::exception&) {
        rec.sum_rate_bits = 0.0;
        rec.outer_iterations = 0;
        rec.converged = false;
      }
      if (cfg.record_timing) {
        const auto t1 = std::chrono::steady_clock::now();
        rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      }
      results[task].push_back(std::move(rec));
    }
  };

  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_tasks));

  auto worker = [&]() {
    while (!fatal.load()) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) break;
      try {
        run_task(task);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(fatal_mutex);
        fatal_message = e.what();
        fatal.store(true);
      }
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal.load()) throw std::runtime_error("run_experiment: " + fatal_message);

  std::vector<ResultRecord> flat;
  flat.reserve(n_tasks * algos.size());
  for (auto& task_records : results)
    for (auto& r : task_records) flat.push_back(std::move(r));
  return flat;
}

double fd_baseline(const ChannelRealization& channels, const ExperimentConfig& cfg,
                   Scenario scenario, Rng& rng) {
  const std::uint64_t seed = rng();
  if (scenario == Scenario::miso)
    return run_miso_algorithm("fd_opt", channels, channels, finalize_miso(cfg.miso), cfg.rcg,
                              cfg.outer_iters, seed)
        .rate_bits;
  return run_mimo_algorithm("fd_opt", channels, channels, cfg.mimo, cfg.rcg, cfg.outer_iters, seed)
      .rate_bits;
}

double random_phase_baseline(const ChannelRealization& channels, const ExperimentConfig& cfg,
                             Scenario scenario, Rng& rng) {
  const std::uint64_t seed = rng();
  if (scenario == Scenario::miso)
    return run_miso_algorithm("random_phase", channels, channels, finalize_miso(cfg.miso), cfg.rcg,
                              cfg.outer_iters, seed)
        .rate_bits;
  return run_mimo_algorithm("random_phase", channels, channels, cfg.mimo, cfg.rcg, cfg.outer_iters,
                            seed)
      .rate_bits;
}

namespace {

std::string summary_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".summary.json";
  return csv_path + ".summary.json";
}

}  // namespace

void emit_results(const std::vector<ResultRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_results: cannot open '" + path + "' for writing");
  out << "scenario,sweep_name,sweep_value,snr_db,trial,algorithm,sum_rate_bits,"
         "outer_iterations,wall_time_ms,converged\n";
  for (const ResultRecord& r : records) {
    out << r.scenario << ',' << r.sweep_name << ',' << fmt(r.sweep_value) << ',' << fmt(r.snr_db)
        << ',' << r.trial << ',' << r.algorithm << ',' << fmt(r.sum_rate_bits) << ','
        << r.outer_iterations << ',' << fmt(r.wall_time_ms) << ',' << (r.converged ? 1 : 0)
        << '\n';
  }
  if (!out) throw std::runtime_error("emit_results: write failed for '" + path + "'");
  out.close();

  // Aggregate means / standard errors per (algorithm, sweep point, SNR), in
  // first-appearance order so the output is deterministic.
  struct Agg {
    std::size_t order;
    int n = 0, n_converged = 0;
    double sum = 0.0, sum_sq = 0.0, iter_sum = 0.0;
  };
  std::map<std::string, Agg> groups;
  std::vector<std::string> order;
  for (const ResultRecord& r : records) {
    const std::string key =
        r.algorithm + '\0' + r.sweep_name + '\0' + fmt(r.sweep_value) + '\0' + fmt(r.snr_db);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      it->second.order = order.size();
      order.push_back(key);
    }
    Agg& a = it->second;
    a.n += 1;
    a.n_converged += r.converged ? 1 : 0;
    a.sum += r.sum_rate_bits;
    a.sum_sq += r.sum_rate_bits * r.sum_rate_bits;
    a.iter_sum += r.outer_iterations;
  }

  json summary = json::array();
  for (const std::string& key : order) {
    const Agg& a = groups.at(key);
    const auto parts = [&] {
      std::vector<std::string> p;
      std::string cur;
      for (char c : key) {
        if (c == '\0') {
          p.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      p.push_back(cur);
      return p;
    }();
    const double mean = a.sum / a.n;
    const double var = a.n > 1 ? std::max(0.0, (a.sum_sq - a.n * mean * mean) / (a.n - 1)) : 0.0;
    summary.push_back({{"algorithm", parts[0]},
                       {"sweep_name", parts[1]},
                       {"sweep_value", parse_double(parts[2], "sweep_value")},
                       {"snr_db", parse_double(parts[3], "snr_db")},
                       {"n", a.n},
                       {"n_converged", a.n_converged},
                       {"mean_sum_rate_bits", mean},
                       {"stderr_sum_rate_bits", a.n > 1 ? std::sqrt(var / a.n) : 0.0},
                       {"mean_outer_iterations", a.iter_sum / a.n}});
  }
  std::ofstream js(summary_path_for(path), std::ios::binary);
  if (!js) throw std::runtime_error("emit_results: cannot write summary JSON");
  js << summary.dump(2) << '\n';
}

std::vector<ResultRecord> parse_results(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_results: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("parse_results: empty file");
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 10) throw std::runtime_error("parse_results: malformed row: " + line);
    ResultRecord r;
    r.scenario = f[0];
    r.sweep_name = f[1];
    r.sweep_value = parse_double(f[2], "sweep_value");
    r.snr_db = parse_double(f[3], "snr_db");
    r.trial = static_cast<int>(parse_double(f[4], "trial"));
    r.algorithm = f[5];
    r.sum_rate_bits = parse_double(f[6], "sum_rate_bits");
    r.outer_iterations = static_cast<int>(parse_double(f[7], "outer_iterations"));
    r.wall_time_ms = parse_double(f[8], "wall_time_ms");
    r.converged = parse_double(f[9], "converged") != 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

void emit_convergence_trace(const std::vector<double>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_convergence_trace: cannot open '" + path + "'");
  out << "iteration,objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << fmt(trace[i]) << '\n';
  if (!out) throw std::runtime_error("emit_convergence_trace: write failed");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;

  auto parse_list = [](const std::string& v) {
    std::vector<double> out;
    for (const std::string& item : split(v, ','))
      if (!item.empty()) out.push_back(parse_double(item, "list entry"));
    return out;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (const auto hash = s.find('#'); hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw std::runtime_error("config line " + std::to_string(line_no) +
                                                    ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    try {
      if (full == "scenario") {
        if (value == "miso") cfg.scenario = Scenario::miso;
        else if (value == "mimo") cfg.scenario = Scenario::mimo;
        else throw std::runtime_error("scenario must be miso or mimo");
      } else if (full == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_double(value, "seed"));
      } else if (full == "trials") {
        cfg.trials = static_cast<int>(parse_double(value, "trials"));
      } else if (full == "snr_db") {
        cfg.snr_db = parse_list(value);
      } else if (full == "algorithms") {
        cfg.algorithms.clear();
        for (const std::string& a : split(value, ','))
          if (!a.empty()) cfg.algorithms.push_back(a);
      } else if (full == "out") {
        cfg.out_path = value;
      } else if (full == "timing") {
        cfg.record_timing = value == "on" || value == "true" || value == "1";
      } else if (full == "threads") {
        cfg.threads = static_cast<int>(parse_double(value, "threads"));
      } else if (full == "outer_iters") {
        cfg.outer_iters = static_cast<int>(parse_double(value, "outer_iters"));
      } else if (full == "sweep.name") {
        if (value == "none") cfg.sweep = SweepKind::none;
        else if (value == "rf_chains") cfg.sweep = SweepKind::rf_chains;
        else if (value == "users") cfg.sweep = SweepKind::users;
        else if (value == "csi_error") cfg.sweep = SweepKind::csi_error;
        else throw std::runtime_error("unknown sweep name '" + value + "'");
      } else if (full == "sweep.values") {
        cfg.sweep_values = parse_list(value);
      } else if (full == "miso.n_rf") {
        cfg.miso.n_rf = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "miso.n_per_rimsa") {
        cfg.miso.n_per_rimsa = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "miso.n_users") {
        cfg.miso.n_users = static_cast<int>(parse_double(value, key.c_str()));
        cfg.miso.noise_vars = VecD::Constant(cfg.miso.n_users,
                                             cfg.miso.noise_vars.size() ? cfg.miso.noise_vars[0]
                                                                        : 1.0);
      } else if (full == "miso.n_rx") {
        cfg.miso.n_rx = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "miso.noise_var") {
        cfg.miso.noise_vars = VecD::Constant(std::max(cfg.miso.n_users, 1),
                                             parse_double(value, key.c_str()));
      } else if (full == "miso.n_paths") {
        cfg.n_paths_miso = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "mimo.n_rf_tx") {
        cfg.mimo.n_rf_tx = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "mimo.n_per_rimsa_tx") {
        cfg.mimo.n_per_rimsa_tx = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "mimo.n_users") {
        cfg.mimo.n_users = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "mimo.n_rf_rx") {
        cfg.mimo.n_rf_rx = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "mimo.n_per_rimsa_rx") {
        cfg.mimo.n_per_rimsa_rx = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "mimo.n_streams") {
        cfg.mimo.n_streams = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "mimo.noise_var") {
        cfg.mimo.noise_var = parse_double(value, key.c_str());
      } else if (full == "mimo.n_paths") {
        cfg.n_paths_mimo = static_cast<int>(parse_double(value, key.c_str()));
      } else if (full == "rcg.c") {
        cfg.rcg.c = parse_double(value, key.c_str());
      } else if (full == "rcg.tau") {
        cfg.rcg.tau = parse_double(value, key.c_str());
      } else if (full == "rcg.alpha0") {
        cfg.rcg.alpha0 = parse_double(value, key.c_str());
      } else if (full == "rcg.epsilon") {
        cfg.rcg.epsilon = parse_double(value, key.c_str());
      } else if (full == "rcg.max_iter") {
        cfg.rcg.max_iter = static_cast<int>(parse_double(value, key.c_str()));
      } else {
        throw std::runtime_error("unknown key '" + full + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_config_file: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace rimsa
