#include "qfilt/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <iostream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qfilt/errors.hpp"
#include "qfilt/filter.hpp"
#include "qfilt/jordan.hpp"
#include "qfilt/qma.hpp"
#include "qfilt/rng.hpp"
#include "qfilt/verifier_io.hpp"

namespace qfilt {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

bool one_of(const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return true;
  return false;
}

void check_keys(const json& obj, const std::string& path, const std::string& context,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    if (!one_of(item.key(), allowed)) {
      const std::string where = context.empty() ? item.key() : context + "." + item.key();
      config_fail(path, "unknown field '" + where + "'");
    }
  }
}

// Typed field access on one (possibly absent) JSON object, with messages
// that name the config file and the dotted field path.
struct Section {
  const json* obj = nullptr;
  std::string path;
  std::string name;

  std::string where(const char* key) const {
    return name.empty() ? std::string(key) : name + "." + key;
  }
  const json* entry(const char* key) const {
    if (!obj) return nullptr;
    const auto it = obj->find(key);
    return it == obj->end() ? nullptr : &*it;
  }
  bool has(const char* key) const { return entry(key) != nullptr; }

  double number(const char* key, double fallback) const {
    const json* e = entry(key);
    if (!e) return fallback;
    if (!e->is_number()) config_fail(path, where(key) + " must be a number");
    return e->get<double>();
  }
  long long integer(const char* key, long long fallback) const {
    const json* e = entry(key);
    if (!e) return fallback;
    if (!e->is_number_integer() && !e->is_number_unsigned())
      config_fail(path, where(key) + " must be an integer");
    return e->get<long long>();
  }
  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) const {
    const json* e = entry(key);
    if (!e) return fallback;
    if (e->is_number_unsigned()) return e->get<std::uint64_t>();
    if (e->is_number_integer() && e->get<long long>() >= 0)
      return static_cast<std::uint64_t>(e->get<long long>());
    config_fail(path, where(key) + " must be a non-negative integer");
  }
  bool boolean(const char* key, bool fallback) const {
    const json* e = entry(key);
    if (!e) return fallback;
    if (!e->is_boolean()) config_fail(path, where(key) + " must be true or false");
    return e->get<bool>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    const json* e = entry(key);
    if (!e) return fallback;
    if (!e->is_string()) config_fail(path, where(key) + " must be a string");
    return e->get<std::string>();
  }
};

ModelSpec parse_model(const json& m, const std::string& path) {
  if (!m.is_object()) config_fail(path, "model must be an object");
  check_keys(m, path, "model", {"kind", "qubits", "fields", "couplings", "transverse", "seed"});
  const Section s{&m, path, "model"};

  ModelSpec spec;
  spec.kind = s.text("kind", "");
  if (!one_of(spec.kind, {"classical-ising", "transverse-ising", "random-two-local"}))
    config_fail(path,
                "model.kind must be classical-ising, transverse-ising or random-two-local");
  const long long qubits = s.integer("qubits", 0);
  if (qubits < 1 || qubits > 12)
    config_fail(path, "model.qubits must lie in [1, 12] (dense diagonalization cap)");
  spec.qubits = static_cast<int>(qubits);

  if (const json* f = s.entry("fields")) {
    if (!f->is_array()) config_fail(path, "model.fields must be an array of numbers");
    for (const auto& v : *f) {
      if (!v.is_number()) config_fail(path, "model.fields entries must be numbers");
      spec.ising.fields.push_back(v.get<double>());
    }
    if (spec.ising.fields.size() != static_cast<std::size_t>(spec.qubits))
      config_fail(path, "model.fields must have one entry per qubit");
  }
  if (const json* c = s.entry("couplings")) {
    if (!c->is_array()) config_fail(path, "model.couplings must be an array of [i, j, J]");
    for (const auto& triple : *c) {
      if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number_integer() ||
          !triple[1].is_number_integer() || !triple[2].is_number())
        config_fail(path, "model.couplings entries must be [site, site, strength]");
      const int i = triple[0].get<int>();
      const int j = triple[1].get<int>();
      if (i < 0 || j < 0 || i >= spec.qubits || j >= spec.qubits || i == j)
        config_fail(path, "model.couplings sites must be distinct and in [0, qubits)");
      spec.ising.couplings.emplace_back(i, j, triple[2].get<double>());
    }
  }
  spec.transverse = s.number("transverse", 0.0);
  spec.seed = s.unsigned_integer("seed", 0);
  return spec;
}

std::vector<std::uint64_t> parse_seeds(const json& root, const std::string& path) {
  const auto seeds_it = root.find("seeds");
  const auto range_it = root.find("seed_range");
  if (seeds_it != root.end() && range_it != root.end())
    config_fail(path, "give either seeds or seed_range, not both");

  std::vector<std::uint64_t> seeds;
  if (seeds_it != root.end()) {
    if (!seeds_it->is_array() || seeds_it->empty())
      config_fail(path, "seeds must be a non-empty array of non-negative integers");
    for (const auto& s : *seeds_it) {
      if (s.is_number_unsigned()) {
        seeds.push_back(s.get<std::uint64_t>());
      } else if (s.is_number_integer() && s.get<long long>() >= 0) {
        seeds.push_back(static_cast<std::uint64_t>(s.get<long long>()));
      } else {
        config_fail(path, "seeds entries must be non-negative integers");
      }
    }
  } else if (range_it != root.end()) {
    if (!range_it->is_object()) config_fail(path, "seed_range must be an object");
    check_keys(*range_it, path, "seed_range", {"start", "count"});
    const Section sr{&*range_it, path, "seed_range"};
    const std::uint64_t start = sr.unsigned_integer("start", 1);
    const long long count = sr.integer("count", 1);
    if (count < 1 || count > 1000000)
      config_fail(path, "seed_range.count must lie in [1, 1000000]");
    for (long long i = 0; i < count; ++i) seeds.push_back(start + static_cast<std::uint64_t>(i));
  } else {
    seeds.push_back(1);
  }
  return seeds;
}

bool needs_model(const std::string& kind) {
  return one_of(kind, {"filter", "sweep", "naive", "thermal"});
}

std::optional<double> finite_or_absent(double value) {
  if (std::isfinite(value)) return value;
  return std::nullopt;
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }
std::string csv_cell(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }
std::string csv_cell(const std::optional<long>& v) { return v ? std::to_string(*v) : ""; }
std::string csv_cell(const std::optional<bool>& v) {
  return v ? (*v ? "true" : "false") : "";
}

std::string json_cell(const std::optional<double>& v) { return v ? format_number(*v) : "null"; }
std::string json_cell(const std::optional<int>& v) { return v ? std::to_string(*v) : "null"; }
std::string json_cell(const std::optional<long>& v) { return v ? std::to_string(*v) : "null"; }
std::string json_cell(const std::optional<bool>& v) {
  return v ? (*v ? "true" : "false") : "null";
}

// Shared shape of the filter / sweep / qma / thermal rows.
ResultRow amplification_row(std::string experiment, std::uint64_t seed,
                            std::optional<double> mu, std::optional<double> eps,
                            std::optional<int> k, std::optional<int> eta,
                            const AmplificationReport& report) {
  ResultRow row;
  row.experiment = std::move(experiment);
  row.seed = seed;
  row.mu = mu;
  row.eps = eps;
  row.k = k;
  row.eta = eta;
  row.q = report.q;
  row.iterations = report.iterations;
  row.retries = report.retries;
  row.aborted = report.aborted;
  row.energy_out = finite_or_absent(report.output_energy);
  row.energy_exact_nearest = finite_or_absent(report.energy_exact_nearest);
  row.success = report.succeeded;
  return row;
}

}  // namespace

const char kResultHeader[] =
    "experiment,seed,mu,eps,k,eta,q,iterations,retries,aborted,energy_out,"
    "energy_exact_nearest,wall_time_ms";

OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "jsonl") return OutputFormat::jsonl;
  throw ValidationError("unknown output format '" + name + "' (use csv or jsonl)");
}

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string format_row(const ResultRow& row, OutputFormat format) {
  if (format == OutputFormat::csv) {
    std::string line = row.experiment;
    line += ',';
    line += std::to_string(row.seed);
    line += ',';
    line += csv_cell(row.mu);
    line += ',';
    line += csv_cell(row.eps);
    line += ',';
    line += csv_cell(row.k);
    line += ',';
    line += csv_cell(row.eta);
    line += ',';
    line += csv_cell(row.q);
    line += ',';
    line += csv_cell(row.iterations);
    line += ',';
    line += csv_cell(row.retries);
    line += ',';
    line += csv_cell(row.aborted);
    line += ',';
    line += csv_cell(row.energy_out);
    line += ',';
    line += csv_cell(row.energy_exact_nearest);
    line += ',';
    line += csv_cell(row.wall_time_ms);
    return line;
  }
  std::string line = "{\"experiment\":\"";
  line += row.experiment;
  line += "\",\"seed\":";
  line += std::to_string(row.seed);
  line += ",\"mu\":";
  line += json_cell(row.mu);
  line += ",\"eps\":";
  line += json_cell(row.eps);
  line += ",\"k\":";
  line += json_cell(row.k);
  line += ",\"eta\":";
  line += json_cell(row.eta);
  line += ",\"q\":";
  line += json_cell(row.q);
  line += ",\"iterations\":";
  line += json_cell(row.iterations);
  line += ",\"retries\":";
  line += json_cell(row.retries);
  line += ",\"aborted\":";
  line += json_cell(row.aborted);
  line += ",\"energy_out\":";
  line += json_cell(row.energy_out);
  line += ",\"energy_exact_nearest\":";
  line += json_cell(row.energy_exact_nearest);
  line += ",\"wall_time_ms\":";
  line += json_cell(row.wall_time_ms);
  line += "}";
  return line;
}

ExperimentConfig load_config(const std::string& path, const std::string& fallback_kind) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json root;
  try {
    root = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    // The parser's message carries the line and column of the failure.
    throw ValidationError(path + ": " + e.what());
  }
  if (!root.is_object()) config_fail(path, "top level must be a JSON object");
  check_keys(root, path, "",
             {"experiment", "seeds", "seed_range", "out", "format", "workers", "margin",
              "qubit_cap", "seed_offset", "model", "filter", "naive", "jordan", "qma",
              "thermal", "bounds"});

  ExperimentConfig cfg;
  const Section top{&root, path, ""};

  cfg.kind = top.text("experiment", fallback_kind);
  if (cfg.kind.empty())
    config_fail(path, "experiment kind missing: set \"experiment\" or use a subcommand");
  if (!one_of(cfg.kind, {"filter", "sweep", "naive", "jordan", "qma", "thermal", "bounds"}))
    config_fail(path, "unknown experiment kind '" + cfg.kind + "'");
  if (!fallback_kind.empty() && cfg.kind != fallback_kind)
    config_fail(path, "experiment '" + cfg.kind + "' conflicts with subcommand '" +
                          fallback_kind + "'");

  cfg.seeds = parse_seeds(root, path);
  cfg.seed_offset = top.unsigned_integer("seed_offset", 0);
  cfg.out = top.text("out", "");
  try {
    cfg.format = parse_output_format(top.text("format", "csv"));
  } catch (const ValidationError& e) {
    config_fail(path, e.what());
  }
  const long long workers = top.integer("workers", 1);
  if (workers < 1 || workers > 256) config_fail(path, "workers must lie in [1, 256]");
  cfg.workers = static_cast<int>(workers);
  cfg.margin = top.number("margin", 0.125);
  if (!(cfg.margin > 0.0 && cfg.margin < 0.5))
    config_fail(path, "margin must lie strictly between 0 and 0.5");
  const long long cap = top.integer("qubit_cap", kDefaultQubitCap);
  if (cap < 1 || cap > 30) config_fail(path, "qubit_cap must lie in [1, 30]");
  cfg.qubit_cap = static_cast<int>(cap);

  if (const auto it = root.find("model"); it != root.end()) {
    cfg.has_model = true;
    cfg.model = parse_model(*it, path);
  }
  if (needs_model(cfg.kind) && !cfg.has_model)
    config_fail(path, "experiment '" + cfg.kind + "' needs a model section");

  // Validate every present section's keys so typos fail even in sections
  // the selected experiment ignores.
  const auto check_section = [&](const char* name, std::initializer_list<const char*> keys) {
    if (const auto it = root.find(name); it != root.end()) {
      if (!it->is_object()) config_fail(path, std::string(name) + " must be an object");
      check_keys(*it, path, name, keys);
    }
  };
  check_section("filter", {"mu", "eps", "max_retries", "overlap_noise"});
  check_section("naive", {"energy_cutoff", "phase_bits"});
  check_section("jordan", {"dimension", "rank_q", "rank_r"});
  check_section("qma", {"fixture", "file", "theta", "witness_qubits", "scratch_qubits", "mu",
                        "eps", "recordings", "max_retries", "overlap_noise"});
  check_section("thermal", {"temperature", "eps", "bins", "dos_seeds", "max_resamples",
                            "positive_exponent", "sample_from_estimate", "max_retries",
                            "overlap_noise"});
  check_section("bounds", {"phase_bits_min", "phase_bits_max", "grid_points"});

  const auto section = [&](const char* name) {
    const auto it = root.find(name);
    return Section{it == root.end() ? nullptr : &*it, path, name};
  };

  if (cfg.kind == "filter" || cfg.kind == "sweep") {
    const Section f = section("filter");
    cfg.mu = f.number("mu", 0.5);
    cfg.eps = f.number("eps", 0.25);
    const long long retries = f.integer("max_retries", 8);
    if (retries < 0 || retries > 1000) config_fail(path, "filter.max_retries must lie in [0, 1000]");
    cfg.max_retries = static_cast<int>(retries);
    cfg.overlap_noise = f.number("overlap_noise", 0.0);
    if (!(cfg.overlap_noise > -1.0 && cfg.overlap_noise < 10.0))
      config_fail(path, "filter.overlap_noise must lie in (-1, 10)");
    if (!(cfg.eps > 0.0 && cfg.eps < 0.5))
      config_fail(path, "filter.eps must lie strictly between 0 and 0.5");
    if (cfg.kind == "filter" && !(cfg.mu > 0.0 && cfg.mu < 1.0))
      config_fail(path, "filter.mu must lie strictly between 0 and 1");
    // Pre-validate the qubit budget; CapacityError names it.
    select_filter_params(cfg.eps, cfg.model.qubits, cfg.kind == "filter" ? cfg.mu : 0.5,
                         cfg.qubit_cap);
  } else if (cfg.kind == "naive") {
    const Section nv = section("naive");
    cfg.energy_cutoff = nv.number("energy_cutoff", 0.5);
    if (!(cfg.energy_cutoff > 0.0 && cfg.energy_cutoff < 1.0))
      config_fail(path, "naive.energy_cutoff must lie in (0, 1) (normalized spectrum units)");
    const long long bits = nv.integer("phase_bits", 4);
    if (bits < 1 || bits > 20) config_fail(path, "naive.phase_bits must lie in [1, 20]");
    cfg.phase_bits = static_cast<int>(bits);
    if (cfg.model.qubits + cfg.phase_bits > cfg.qubit_cap)
      throw CapacityError("naive demo needs " +
                          std::to_string(cfg.model.qubits + cfg.phase_bits) +
                          " qubits; the qubit budget is " + std::to_string(cfg.qubit_cap));
  } else if (cfg.kind == "jordan") {
    const Section jd = section("jordan");
    const long long dim = jd.integer("dimension", 16);
    if (dim < 2 || dim > 256) config_fail(path, "jordan.dimension must lie in [2, 256]");
    cfg.dimension = static_cast<int>(dim);
    const long long rq = jd.integer("rank_q", 0);
    const long long rr = jd.integer("rank_r", 0);
    if (rq < 0 || rq >= dim || rr < 0 || rr >= dim)
      config_fail(path, "jordan ranks must lie in [1, dimension-1] (0 = drawn per seed)");
    cfg.rank_q = static_cast<int>(rq);
    cfg.rank_r = static_cast<int>(rr);
  } else if (cfg.kind == "qma") {
    const Section qm = section("qma");
    cfg.fixture = qm.text("fixture", "rotation");
    if (!one_of(cfg.fixture, {"identity", "rotation"}))
      config_fail(path, "qma.fixture must be identity or rotation");
    cfg.verifier_file = qm.text("file", "");
    cfg.theta = qm.number("theta", 0.24);
    const long long w = qm.integer("witness_qubits", 2);
    const long long h = qm.integer("scratch_qubits", 1);
    if (w < 1 || h < 0 || w + h > 12)
      config_fail(path, "qma fixture qubits must satisfy witness >= 1, scratch >= 0, total <= 12");
    cfg.witness_qubits = static_cast<int>(w);
    cfg.scratch_qubits = static_cast<int>(h);
    cfg.mu = qm.number("mu", 0.5);
    cfg.eps = qm.number("eps", 0.25);
    if (!(cfg.mu > 0.0 && cfg.mu < 1.0))
      config_fail(path, "qma.mu must lie strictly between 0 and 1");
    const long long rec = qm.integer("recordings", 0);
    if (rec < 0 || rec > 99) config_fail(path, "qma.recordings must lie in [0, 99]");
    if (rec > 0 && rec % 2 == 0) config_fail(path, "qma.recordings must be odd");
    cfg.recordings = static_cast<int>(rec);
    if (cfg.recordings == 0 && !(cfg.eps > 0.0 && cfg.eps < 0.5))
      config_fail(path, "qma.eps must lie strictly between 0 and 0.5");
    const long long retries = qm.integer("max_retries", 8);
    if (retries < 0 || retries > 1000) config_fail(path, "qma.max_retries must lie in [0, 1000]");
    cfg.max_retries = static_cast<int>(retries);
    cfg.overlap_noise = qm.number("overlap_noise", 0.0);
    if (!(cfg.overlap_noise > -1.0 && cfg.overlap_noise < 10.0))
      config_fail(path, "qma.overlap_noise must lie in (-1, 10)");
  } else if (cfg.kind == "thermal") {
    const Section th = section("thermal");
    cfg.temperature = th.number("temperature", 0.3);
    if (!(cfg.temperature >= kMinTemperature))
      config_fail(path, "thermal.temperature must be at least " + format_number(kMinTemperature));
    cfg.eps = th.number("eps", 0.25);
    if (!(cfg.eps > 0.0 && cfg.eps < 0.5))
      config_fail(path, "thermal.eps must lie strictly between 0 and 0.5");
    const long long bins = th.integer("bins", 17);
    if (bins < 2 || bins > 4096) config_fail(path, "thermal.bins must lie in [2, 4096]");
    cfg.bins = static_cast<int>(bins);
    const long long dos_seeds = th.integer("dos_seeds", 8);
    if (dos_seeds < 1 || dos_seeds > 4096)
      config_fail(path, "thermal.dos_seeds must lie in [1, 4096]");
    cfg.dos_seeds = static_cast<int>(dos_seeds);
    const long long resamples = th.integer("max_resamples", 32);
    if (resamples < 0 || resamples > 10000)
      config_fail(path, "thermal.max_resamples must lie in [0, 10000]");
    cfg.max_resamples = static_cast<int>(resamples);
    cfg.positive_exponent = th.boolean("positive_exponent", false);
    cfg.sample_from_estimate = th.boolean("sample_from_estimate", false);
    const long long retries = th.integer("max_retries", 8);
    if (retries < 0 || retries > 1000)
      config_fail(path, "thermal.max_retries must lie in [0, 1000]");
    cfg.max_retries = static_cast<int>(retries);
    cfg.overlap_noise = th.number("overlap_noise", 0.0);
    if (!(cfg.overlap_noise > -1.0 && cfg.overlap_noise < 10.0))
      config_fail(path, "thermal.overlap_noise must lie in (-1, 10)");
    // Budget and grid-resolution pre-checks with config-located messages.
    const FilterSpec spec =
        select_filter_params(cfg.eps, cfg.model.qubits, 0.5, cfg.qubit_cap);
    const double step = (1.0 - 2.0 * cfg.margin) / (cfg.bins - 1);
    if (step + 1e-15 < filter_resolution(spec.k, spec.eta))
      config_fail(path, "thermal.bins: grid step " + format_number(step) +
                            " is finer than the filter resolution " +
                            format_number(filter_resolution(spec.k, spec.eta)) +
                            "; use fewer bins or a wider eps");
  } else if (cfg.kind == "bounds") {
    const Section bd = section("bounds");
    const long long kmin = bd.integer("phase_bits_min", 2);
    const long long kmax = bd.integer("phase_bits_max", 8);
    if (kmin < 1 || kmax > 24 || kmin > kmax)
      config_fail(path, "bounds needs 1 <= phase_bits_min <= phase_bits_max <= 24");
    cfg.phase_bits_min = static_cast<int>(kmin);
    cfg.phase_bits_max = static_cast<int>(kmax);
    const long long points = bd.integer("grid_points", 14286);
    if (points < 4 || points > 100000000)
      config_fail(path, "bounds.grid_points must lie in [4, 1e8]");
    cfg.grid_points = static_cast<std::size_t>(points);
  }

  return cfg;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& out) {
  using Clock = std::chrono::steady_clock;

  AmplificationOptions amp;
  amp.max_retries = cfg.max_retries;
  amp.overlap_noise = cfg.overlap_noise;
  amp.margin = cfg.margin;
  amp.qubit_cap = cfg.qubit_cap;

  std::vector<std::uint64_t> seeds;
  seeds.reserve(cfg.seeds.size());
  for (std::uint64_t s : cfg.seeds) seeds.push_back(s + cfg.seed_offset);

  // Shared immutable inputs; tasks only read them, so the pool can share.
  std::optional<HermitianOperator> model;
  if (needs_model(cfg.kind)) {
    if (!cfg.has_model)
      throw ValidationError("experiment '" + cfg.kind + "' needs a model section");
    model = build_model(cfg.model);
  }

  std::vector<std::function<std::vector<ResultRow>()>> tasks;

  if (cfg.kind == "filter") {
    for (const std::uint64_t seed : seeds) {
      tasks.push_back([&cfg, &model, amp, seed] {
        const PreparationResult res =
            prepare_filtered_state(*model, cfg.mu, cfg.eps, seed, amp);
        return std::vector<ResultRow>{amplification_row("filter", seed, cfg.mu, cfg.eps,
                                                        res.spec.k, res.spec.eta, res.report)};
      });
    }
  } else if (cfg.kind == "sweep") {
    // Same grid, filter parameters and per-mu child streams as the library
    // sweep, but laid out as one task per (mu, seed) so rows stream in
    // mu-major order.
    const FilterSpec ref =
        select_filter_params(cfg.eps, cfg.model.qubits, 0.5, cfg.qubit_cap);
    const double step = filter_resolution(ref.k, ref.eta);
    std::vector<double> mus;
    for (std::size_t i = 0;; ++i) {
      const double mu = cfg.margin + static_cast<double>(i) * step;
      if (mu > 1.0 - cfg.margin + 1e-12) break;
      mus.push_back(mu);
    }
    for (std::size_t mi = 0; mi < mus.size(); ++mi) {
      for (const std::uint64_t seed : seeds) {
        const double mu = mus[mi];
        tasks.push_back([&cfg, &model, amp, ref, mu, mi, seed] {
          const FilterSpec spec{mu, cfg.eps, ref.k, ref.eta};
          const std::uint64_t child = RngStream(seed).split(mi).key();
          const PreparationResult res = prepare_filtered_state(*model, spec, child, amp);
          return std::vector<ResultRow>{
              amplification_row("sweep", seed, mu, cfg.eps, spec.k, spec.eta, res.report)};
        });
      }
    }
  } else if (cfg.kind == "naive") {
    for (const std::uint64_t seed : seeds) {
      tasks.push_back([&cfg, &model, seed] {
        const NaiveDemoResult res =
            run_naive_demo(*model, cfg.energy_cutoff, cfg.phase_bits, seed, cfg.margin);
        ResultRow row;
        row.experiment = "naive";
        row.seed = seed;
        row.mu = cfg.energy_cutoff;
        row.k = cfg.phase_bits;
        row.q = res.residual_overlap;
        row.iterations = res.iterations;
        row.aborted = false;
        row.energy_out = res.predicted;
        row.energy_exact_nearest = res.collapse_probability;
        return std::vector<ResultRow>{row};
      });
    }
  } else if (cfg.kind == "jordan") {
    for (const std::uint64_t seed : seeds) {
      tasks.push_back([&cfg, seed] {
        const RngStream root(seed);
        RngStream rank_stream = root.split(0);
        const int dim = cfg.dimension;
        const int rank_q = cfg.rank_q > 0
                               ? cfg.rank_q
                               : 1 + static_cast<int>(rank_stream.next_u64() %
                                                      static_cast<std::uint64_t>(dim - 1));
        const int rank_r = cfg.rank_r > 0
                               ? cfg.rank_r
                               : 1 + static_cast<int>(rank_stream.next_u64() %
                                                      static_cast<std::uint64_t>(dim - 1));
        RngStream q_stream = root.split(1);
        RngStream r_stream = root.split(2);
        const Projector q = random_projector(dim, rank_q, q_stream);
        const Projector r = random_projector(dim, rank_r, r_stream);
        const JordanDecomposition dec = jordan_decompose(q, r);
        double worst_relation = 0.0;
        int borderline = 0;
        for (const JordanBlock& b : dec.blocks) {
          worst_relation = std::max(worst_relation, block_relation_residual(b));
          if (b.borderline) ++borderline;
        }
        ResultRow row;
        row.experiment = "jordan";
        row.seed = seed;
        row.k = dim;
        row.eta = rank_q;
        row.q = worst_relation;
        row.iterations = static_cast<long>(dec.blocks.size());
        row.retries = borderline;
        row.aborted = false;
        row.energy_out = nonzero_spectrum_disagreement(dec);
        return std::vector<ResultRow>{row};
      });
    }
  } else if (cfg.kind == "qma") {
    // Built once; reading and validating the matrix file may throw before
    // any row is emitted.
    VerifierCircuit verifier;
    if (!cfg.verifier_file.empty()) {
      verifier = read_verifier_file(cfg.verifier_file);
    } else if (cfg.fixture == "identity") {
      verifier = identity_verifier(cfg.witness_qubits, cfg.scratch_qubits);
    } else {
      verifier = rotation_verifier(cfg.theta);
    }
    const int k = cfg.recordings > 0 ? cfg.recordings : switch_count_for(cfg.mu, cfg.eps);
    const int total = verifier.total_qubits() + k;
    if (total > cfg.qubit_cap)
      throw CapacityError("qma run needs " + std::to_string(total) +
                          " qubits (verifier " + std::to_string(verifier.total_qubits()) +
                          " + recordings " + std::to_string(k) + "); the qubit budget is " +
                          std::to_string(cfg.qubit_cap));
    const std::optional<double> eps_cell =
        cfg.recordings > 0 ? std::nullopt : std::optional<double>(cfg.eps);
    for (const std::uint64_t seed : seeds) {
      tasks.push_back([&cfg, amp, verifier, k, eps_cell, seed] {
        const WitnessResult res = prepare_witness_with_k(verifier, cfg.mu, k, seed, amp);
        return std::vector<ResultRow>{amplification_row(
            "qma", seed, cfg.mu, eps_cell, res.recordings, std::nullopt, res.report)};
      });
    }
  } else if (cfg.kind == "thermal") {
    ThermalOptions topt;
    topt.bins = cfg.bins;
    topt.averaging_seeds = cfg.dos_seeds;
    topt.max_resamples = cfg.max_resamples;
    topt.positive_exponent = cfg.positive_exponent;
    topt.sample_from_estimate = cfg.sample_from_estimate;
    topt.prep = amp;
    for (const std::uint64_t seed : seeds) {
      tasks.push_back([&cfg, &model, topt, seed] {
        const ThermalResult res =
            prepare_thermal_state(*model, cfg.temperature, cfg.eps, seed, topt);
        ResultRow row = amplification_row("thermal", seed,
                                          finite_or_absent(res.chosen_energy_normalized),
                                          cfg.eps, res.dos.spec.k, res.dos.spec.eta,
                                          res.report);
        return std::vector<ResultRow>{row};
      });
    }
  } else if (cfg.kind == "bounds") {
    for (const std::uint64_t seed : seeds) {
      tasks.push_back([&cfg, seed] {
        const std::vector<BoundCheckRow> checks = check_momentum_bounds(
            cfg.phase_bits_min, cfg.phase_bits_max, cfg.grid_points, seed);
        std::vector<ResultRow> rows;
        rows.reserve(checks.size());
        for (const BoundCheckRow& c : checks) {
          ResultRow row;
          row.experiment = "bounds";
          row.seed = seed;
          row.k = c.k;
          row.q = c.max_upper_violation;
          row.iterations = static_cast<long>(c.points);
          row.aborted = false;
          row.energy_out = c.min_lower_margin;
          rows.push_back(row);
        }
        return rows;
      });
    }
  } else {
    throw ValidationError("unknown experiment kind '" + cfg.kind + "'");
  }

  if (cfg.format == OutputFormat::csv) {
    out << kResultHeader << '\n';
    out.flush();
  }

  // Ordered streaming: workers claim task indices from a counter, but each
  // result waits for its slot, so the output order never depends on
  // scheduling.  On the first error remaining tasks are skipped and the
  // already-written prefix stays parseable.
  std::atomic<std::size_t> next_task{0};
  std::mutex mtx;
  std::condition_variable slot_cv;
  std::size_t emit_index = 0;
  std::size_t successes = 0;
  std::exception_ptr failure;
  std::atomic<bool> stop{false};

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next_task.fetch_add(1);
      if (i >= tasks.size()) return;
      std::vector<std::string> lines;
      std::size_t ok = 0;
      std::exception_ptr err;
      if (!stop.load()) {
        try {
          const auto t0 = Clock::now();
          std::vector<ResultRow> rows = tasks[i]();
          const double ms =
              std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
          for (ResultRow& row : rows) {
            row.wall_time_ms = ms;
            if (row.success) ++ok;
            lines.push_back(format_row(row, cfg.format));
          }
        } catch (...) {
          err = std::current_exception();
        }
      }
      std::unique_lock<std::mutex> lock(mtx);
      slot_cv.wait(lock, [&] { return emit_index == i; });
      if (!stop.load()) {
        if (err) {
          failure = err;
          stop.store(true);
        } else {
          for (const std::string& line : lines) out << line << '\n';
          out.flush();
          successes += ok;
        }
      }
      ++emit_index;
      slot_cv.notify_all();
    }
  };

  const std::size_t want = std::min<std::size_t>(
      static_cast<std::size_t>(cfg.workers), std::max<std::size_t>(tasks.size(), 1));
  std::vector<std::thread> pool;
  pool.reserve(want);
  for (std::size_t i = 0; i < want; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  if (failure) std::rethrow_exception(failure);
  return successes > 0 ? 0 : 2;
}

int run_experiment(const ExperimentConfig& cfg) {
  if (cfg.out.empty() || cfg.out == "-") return run_experiment(cfg, std::cout);
  std::ofstream file(cfg.out);
  if (!file) throw ValidationError("cannot open output file '" + cfg.out + "'");
  return run_experiment(cfg, file);
}

}  // namespace qfilt
