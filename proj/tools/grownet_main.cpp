#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grownet/affit.hpp"
#include "grownet/corpus.hpp"
#include "grownet/csv.hpp"
#include "grownet/distfit.hpp"
#include "grownet/errors.hpp"
#include "grownet/growth.hpp"
#include "grownet/io_util.hpp"
#include "grownet/netsim.hpp"
#include "grownet/rate.hpp"
#include "grownet/timeline.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace grownet;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
  uint64_t seed = 0;
  bool seed_given = false;
  bool seed_entropy = false;
  int threads = 1;
  std::string output_dir = ".";
  std::string manifest_path;
};

class Manifest {
 public:
  Manifest(const std::string& command, int argc, char** argv) {
    root_["version"] = kVersion;
    root_["command"] = command;
    ordered_json args = ordered_json::array();
    for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
    root_["argv"] = args;
    root_["seed"] = nullptr;
    root_["seed_source"] = nullptr;
  }

  void set_config(ordered_json cfg) { root_["config"] = std::move(cfg); }
  void set_seed(uint64_t seed, bool entropy) {
    root_["seed"] = seed;
    root_["seed_source"] = entropy ? "entropy" : "flag";
  }
  void add_input(const std::string& path) { inputs_[path] = fnv1a64_hex_of_file(path); }
  void note_output(const std::string& path) { outputs_.push_back(path); }

  void write(const std::string& path) {
    root_["inputs"] = inputs_;
    root_["outputs"] = outputs_;
    write_file(path, root_.dump(2) + "\n");
  }

 private:
  ordered_json root_;
  ordered_json inputs_ = ordered_json::object();
  ordered_json outputs_ = ordered_json::array();
};

struct Out {
  const Globals& g;
  Manifest& m;

  std::string path(const std::string& name) const {
    return (fs::path(g.output_dir) / name).string();
  }
  void write(const std::string& name, std::string_view content) const {
    std::string p = path(name);
    write_file(p, content);
    m.note_output(p);
  }
};

void ensure_seed(Globals& g, Manifest& m) {
  if (!g.seed_given) {
    std::random_device rd;
    g.seed = (static_cast<uint64_t>(rd()) << 32) ^ static_cast<uint64_t>(rd());
    g.seed_given = true;
    g.seed_entropy = true;
    std::cerr << "note: --seed not given; using entropy seed " << g.seed << "\n";
  }
  m.set_seed(g.seed, g.seed_entropy);
}

std::optional<DateInterval> window_of(const std::string& from, const std::string& to) {
  if (from.empty() != to.empty())
    throw ConfigError("--from and --to must be given together");
  if (from.empty()) return std::nullopt;
  auto a = Date::parse(from);
  auto b = Date::parse(to);
  if (!a || !b) throw ConfigError("invalid --from/--to date (expect YYYY-MM-DD)");
  DateInterval w{*a, *b};
  if (!w.valid()) throw ConfigError("--from must not be after --to");
  return w;
}

GrowthSequence load_sequence(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open sequence file: " + path);
  return GrowthSequence::load_jsonl(in, path);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      if (start < s.size()) out.push_back(s.substr(start));
      break;
    }
    if (comma > start) out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

int64_t csv_int(CsvReader& r, std::string_view s) {
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    r.fail("bad integer '" + std::string(s) + "'");
  return v;
}

double csv_real(CsvReader& r, std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    r.fail("bad number '" + std::string(s) + "'");
  return v;
}

std::string rate_csv(const AttachmentRateEstimate& est) {
  std::string s = "k,a_hat,support\n";
  for (const RatePoint& p : est.points) {
    s += std::to_string(p.k);
    s += ',';
    s += format_double(p.a_hat);
    s += ',';
    s += std::to_string(p.support);
    s += '\n';
  }
  return s;
}

std::string binned_csv(const BinnedRate& rate) {
  std::string s = "k,a_hat_binned,support\n";
  for (const RatePoint& p : rate.bins) {
    s += std::to_string(p.k);
    s += ',';
    s += format_double(p.a_hat);
    s += ',';
    s += std::to_string(p.support);
    s += '\n';
  }
  return s;
}

BinnedRate read_binned(const std::string& path, double half_width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open binned rate file: " + path);
  CsvReader reader(in, path);
  reader.expect_header("k,a_hat_binned,support");
  BinnedRate out;
  out.half_width = half_width;
  std::vector<std::string_view> f;
  while (reader.next_row(f, 3)) {
    RatePoint p;
    p.k = csv_int(reader, f[0]);
    p.a_hat = csv_real(reader, f[1]);
    p.support = csv_int(reader, f[2]);
    out.bins.push_back(p);
  }
  return out;
}

Resolution parse_resolution(const std::string& name, const std::string& t1,
                            const std::string& t2) {
  if (name == "biepochal") {
    if (t1.empty() || t2.empty())
      throw ConfigError("--resolution biepochal requires --t1 and --t2");
    auto i1 = parse_interval(t1);
    auto i2 = parse_interval(t2);
    if (!i1 || !i2)
      throw ConfigError("invalid epoch interval (expect YYYY:YYYY or YYYY-MM-DD:YYYY-MM-DD)");
    return Resolution::bi_epochal(*i1, *i2);
  }
  if (!t1.empty() || !t2.empty())
    throw ConfigError("--t1/--t2 apply only to --resolution biepochal");
  if (name == "maximal") return Resolution::maximal();
  if (name == "daily") return Resolution::daily();
  if (name == "monthly") return Resolution::monthly();
  if (name == "yearly") return Resolution::yearly();
  throw ConfigError("unknown resolution: " + name);
}

Family parse_dist_family(const std::string& s) {
  if (s == "lognormal") return Family::log_normal;
  if (s == "power") return Family::power_law;
  if (s == "exponential") return Family::exponential;
  throw ConfigError("unknown distribution family: " + s);
}

std::string model_name(AttachmentFunction::Form form) {
  return form == AttachmentFunction::Form::log_linear ? "krapivsky" : "redner";
}

ordered_json fit_params_json(const DistributionModel& model) {
  ordered_json p;
  switch (model.family) {
    case Family::log_normal:
      p["mu"] = model.p1;
      p["sigma"] = model.p2;
      break;
    case Family::power_law:
      p["gamma"] = model.p1;
      break;
    case Family::exponential:
      p["lambda"] = model.p1;
      break;
  }
  return p;
}

ordered_json fit_json(const TailFit& fit) {
  ordered_json j;
  j["family"] = family_label(fit.model.family);
  j["parameters"] = fit_params_json(fit.model);
  j["k_min"] = fit.k_min;
  j["ks_stat"] = fit.ks_stat;
  if (fit.p_value >= 0.0)
    j["p_value"] = fit.p_value;
  else
    j["p_value"] = nullptr;
  j["log_likelihood"] = fit.log_likelihood;
  j["n_tail"] = fit.n_tail;
  if (fit.gof_replicates > 0) {
    j["seed"] = fit.gof_seed;
    j["n_bootstrap"] = fit.gof_replicates;
  } else {
    j["seed"] = nullptr;
    j["n_bootstrap"] = nullptr;
  }
  if (!fit.note.empty()) j["note"] = fit.note;
  if (!fit.kmin_scan.empty()) {
    ordered_json scan = ordered_json::array();
    for (const auto& [k, ks] : fit.kmin_scan) scan.push_back({k, ks});
    j["kmin_scan"] = scan;
  }
  return j;
}

ordered_json af_fit_json(const AFFit& fit) {
  ordered_json j;
  j["model"] = model_name(fit.form);
  j["family"] = fit.form == AttachmentFunction::Form::log_linear ? "log_linear" : "nonlinear";
  j[fit.form == AttachmentFunction::Form::log_linear ? "alpha" : "beta"] = fit.param;
  j["c"] = fit.c;
  j["rss"] = fit.rss;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  j["n_points"] = fit.n_points;
  return j;
}

std::vector<int64_t> log_grid(int64_t lo, int64_t hi, int points) {
  std::vector<int64_t> out;
  if (hi < lo) return out;
  double ratio = static_cast<double>(hi) / static_cast<double>(lo);
  for (int i = 0; i < points; ++i) {
    double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    auto v = static_cast<int64_t>(std::llround(lo * std::pow(ratio, t)));
    v = std::clamp(v, lo, hi);
    if (out.empty() || v != out.back()) out.push_back(v);
  }
  return out;
}

// ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string nodes, edges, from, to, emit_dir;
};

int cmd_ingest(const IngestArgs& a, Globals& g, Manifest& m) {
  Out out{g, m};
  auto window = window_of(a.from, a.to);
  CitationCorpus corpus = parse_corpus_files(a.nodes, a.edges, window);
  m.add_input(a.nodes);
  m.add_input(a.edges);

  std::string stats = stats_to_json(corpus.stats);
  out.write("corpus_stats.json", stats);
  std::cout << stats;

  if (!a.emit_dir.empty()) {
    fs::create_directories(a.emit_dir);
    std::string nodes_path = (fs::path(a.emit_dir) / "nodes.csv").string();
    std::string edges_path = (fs::path(a.emit_dir) / "edges.csv").string();
    {
      std::ofstream nodes_out(nodes_path, std::ios::binary);
      std::ofstream edges_out(edges_path, std::ios::binary);
      if (!nodes_out || !edges_out)
        throw ConfigError("cannot write canonical corpus under " + a.emit_dir);
      emit_canonical(corpus, nodes_out, edges_out);
      if (!nodes_out || !edges_out)
        throw ConfigError("write failed under " + a.emit_dir);
    }
    m.note_output(nodes_path);
    m.note_output(edges_path);
    std::string stats_path = (fs::path(a.emit_dir) / "corpus_stats.json").string();
    write_file(stats_path, stats);
    m.note_output(stats_path);
  }

  ordered_json cfg;
  cfg["nodes"] = a.nodes;
  cfg["edges"] = a.edges;
  cfg["from"] = a.from;
  cfg["to"] = a.to;
  cfg["emit_canonical"] = a.emit_dir;
  m.set_config(std::move(cfg));
  m.write(g.manifest_path);
  return 0;
}

// simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string model;
  int64_t steps = 0;
  int64_t m = 1;
  bool m_bounded = false;
  double alpha = 0.0;
  bool alpha_given = false;
  double beta = 0.0;
  bool beta_given = false;
  int64_t n1 = 1;
  int64_t m1 = 0;
  int64_t nodes_per_step = 1;
};

int cmd_simulate(const SimulateArgs& a, Globals& g, Manifest& m) {
  Out out{g, m};
  ensure_seed(g, m);

  AttachmentFunction af;
  if (a.model == "price") {
    af = AttachmentFunction::linear();
  } else if (a.model == "callaway") {
    af = AttachmentFunction::uniform();
  } else if (a.model == "krapivsky") {
    if (!a.alpha_given) throw ConfigError("--model krapivsky requires --alpha");
    af = AttachmentFunction::log_linear(a.alpha);
  } else if (a.model == "redner") {
    if (!a.beta_given) throw ConfigError("--model redner requires --beta");
    af = AttachmentFunction::nonlinear(a.beta);
  } else {
    throw ConfigError("unknown model: " + a.model);
  }

  ModelConfig cfg;
  cfg.attachment = af;
  cfg.steps = a.steps;
  cfg.n1 = a.n1;
  cfg.m1_prime = a.m1;
  cfg.nodes_per_step = a.nodes_per_step;
  cfg.edges_per_step = {a.m_bounded ? EdgesPerStep::Kind::bounded_uniform
                                    : EdgesPerStep::Kind::constant,
                        a.m};
  cfg.rng_seed = g.seed;

  GrowthSequence seq = simulate(cfg);
  {
    std::string p = out.path("sequence.jsonl");
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + p);
    seq.emit_jsonl(os);
    if (!os) throw ConfigError("write failed: " + p);
    m.note_output(p);
  }

  ordered_json cfg_j;
  cfg_j["model"] = a.model;
  cfg_j["attachment"] = af.label();
  cfg_j["steps"] = a.steps;
  cfg_j["m"] = a.m;
  cfg_j["m_bounded"] = a.m_bounded;
  cfg_j["n1"] = a.n1;
  cfg_j["m1"] = a.m1;
  cfg_j["nodes_per_step"] = a.nodes_per_step;
  m.set_config(std::move(cfg_j));
  m.write(g.manifest_path);

  std::cout << "simulated " << seq.num_steps() << " steps, " << seq.num_nodes()
            << " nodes, " << seq.num_cross_edges() << " cross edges, "
            << seq.num_intra_edges() << " intra edges\n";
  return 0;
}

// measure --------------------------------------------------------------

struct MeasureArgs {
  std::string input;
  std::string nodes, edges, from, to;
  std::string resolution = "maximal";
  std::string t1, t2;
  std::string estimator = "newman";
  double bin_width = 0.025;
  std::string windows;
  int64_t bucket = 0;
};

int cmd_measure(const MeasureArgs& a, Globals& g, Manifest& m) {
  Out out{g, m};
  GrowthSequence seq;
  int64_t violations = -1;
  if (!a.input.empty()) {
    if (!a.nodes.empty() || !a.edges.empty())
      throw ConfigError("give either --input or --nodes/--edges, not both");
    m.add_input(a.input);
    seq = load_sequence(a.input);
  } else {
    if (a.nodes.empty() || a.edges.empty())
      throw ConfigError("measure needs --input or both --nodes and --edges");
    m.add_input(a.nodes);
    m.add_input(a.edges);
    CitationCorpus corpus = parse_corpus_files(a.nodes, a.edges, window_of(a.from, a.to));
    Resolution res = parse_resolution(a.resolution, a.t1, a.t2);
    violations = 0;
    seq = build_sequence(corpus, res, &violations);
  }
  if (a.bucket > 0) seq = coarsen(seq, a.bucket);

  AttachmentRateEstimate est;
  if (a.estimator == "jeong")
    est = jeong_rate(seq);
  else if (a.estimator == "newman")
    est = newman_rate(seq, NewmanVariant::corrected);
  else if (a.estimator == "newman-uncorrected")
    est = newman_rate(seq, NewmanVariant::uncorrected);
  else
    throw ConfigError("unknown estimator: " + a.estimator);

  BinnedRate binned = bin_rate(est, a.bin_width);
  out.write("rate.csv", rate_csv(est));
  out.write("rate_binned.csv", binned_csv(binned));

  ordered_json meta;
  meta["estimator"] = est.estimator;
  meta["z"] = est.z;
  meta["resolution"] = seq.resolution_label();
  meta["bin_half_width"] = a.bin_width;
  meta["n_points"] = est.points.size();
  meta["n_bins"] = binned.bins.size();
  meta["steps"] = seq.num_steps();
  meta["nodes"] = seq.num_nodes();
  meta["cross_edges"] = seq.num_cross_edges();
  meta["intra_edges"] = seq.num_intra_edges();
  if (violations >= 0) meta["chronology_excluded"] = violations;
  if (!est.note.empty()) meta["note"] = est.note;
  out.write("rate_meta.json", meta.dump(2) + "\n");

  if (!a.windows.empty()) {
    std::vector<DateInterval> intervals;
    for (const std::string& token : split_list(a.windows)) {
      auto iv = parse_interval(token);
      if (!iv) throw ConfigError("invalid window interval: " + token);
      intervals.push_back(*iv);
    }
    WindowedAlphaResult wr = windowed_alpha(seq, intervals);
    ordered_json wj;
    wj["windows"] = ordered_json::array();
    for (const WindowAlpha& w : wr.values) {
      ordered_json row;
      row["window"] = w.window;
      row["first_step"] = w.first_step;
      row["last_step"] = w.last_step;
      row["alpha"] = w.alpha;
      row["c"] = w.c;
      row["n_points"] = w.n_points;
      wj["windows"].push_back(row);
    }
    wj["warnings"] = wr.warnings;
    out.write("windows.json", wj.dump(2) + "\n");
  }

  ordered_json cfg;
  cfg["input"] = a.input;
  cfg["nodes"] = a.nodes;
  cfg["edges"] = a.edges;
  cfg["from"] = a.from;
  cfg["to"] = a.to;
  cfg["resolution"] = a.resolution;
  cfg["t1"] = a.t1;
  cfg["t2"] = a.t2;
  cfg["estimator"] = a.estimator;
  cfg["bin_width"] = a.bin_width;
  cfg["windows"] = a.windows;
  cfg["bucket"] = a.bucket;
  m.set_config(std::move(cfg));
  m.write(g.manifest_path);

  std::cout << "estimator " << est.estimator << ": " << est.points.size()
            << " rate points, z=" << format_double(est.z) << "\n";
  if (!est.note.empty()) std::cout << "note: " << est.note << "\n";
  return 0;
}

// fitdist ----------------------------------------------------------------

struct FitdistArgs {
  std::string input;
  std::string nodes, edges, from, to;
  std::string family = "lognormal";
  std::string kmin = "1";
  int64_t bootstrap = 1000;
  int64_t min_tail = 10;
  std::string lcurve;
};

std::string cumulative_csv(const DegreeHistogram& hist) {
  std::string s = "k,c_k\n";
  for (const auto& [k, c] : cumulative(hist)) {
    s += std::to_string(k);
    s += ',';
    s += format_double(c);
    s += '\n';
  }
  return s;
}

std::string model_overlay_csv(const TailFit& fit, const DegreeHistogram& hist) {
  double scale =
      static_cast<double>(fit.n_tail) / static_cast<double>(hist.total_nodes);
  int64_t x_max = std::max(fit.k_min, hist.max_degree() + 1);
  std::string s = "k,c_k_model\n";
  for (int64_t x : log_grid(fit.k_min, x_max, 200)) {
    s += std::to_string(x - 1);
    s += ',';
    s += format_double(scale * (1.0 - fit.model.cdf(x - 1)));
    s += '\n';
  }
  return s;
}

int cmd_fitdist(const FitdistArgs& a, Globals& g, Manifest& m) {
  Out out{g, m};
  DegreeHistogram hist;
  if (!a.input.empty()) {
    if (!a.nodes.empty() || !a.edges.empty())
      throw ConfigError("give either --input or --nodes/--edges, not both");
    m.add_input(a.input);
    GrowthSequence seq = load_sequence(a.input);
    hist = degree_histogram_at(seq, seq.num_steps());
  } else {
    if (a.nodes.empty() || a.edges.empty())
      throw ConfigError("fitdist needs --input or both --nodes and --edges");
    m.add_input(a.nodes);
    m.add_input(a.edges);
    CitationCorpus corpus = parse_corpus_files(a.nodes, a.edges, window_of(a.from, a.to));
    hist = corpus_histogram(corpus);
  }

  auto numeric_kmin = [&]() -> int64_t {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(a.kmin.data(), a.kmin.data() + a.kmin.size(), v);
    if (ec != std::errc() || p != a.kmin.data() + a.kmin.size())
      throw ConfigError("--kmin must be a positive integer, 'auto', or 'auto-p010'");
    return v;
  };

  ordered_json cfg;
  cfg["input"] = a.input;
  cfg["nodes"] = a.nodes;
  cfg["edges"] = a.edges;
  cfg["family"] = a.family;
  cfg["kmin"] = a.kmin;
  cfg["bootstrap"] = a.bootstrap;
  cfg["min_tail"] = a.min_tail;
  cfg["lcurve"] = a.lcurve;
  m.set_config(std::move(cfg));

  if (a.family == "all") {
    if (a.kmin == "auto" || a.kmin == "auto-p010")
      throw ConfigError("--family all requires a numeric --kmin");
    int64_t k = numeric_kmin();
    std::vector<TailFit> fits;
    for (Family fam : {Family::log_normal, Family::power_law, Family::exponential})
      fits.push_back(fit_mle(hist, fam, k, a.min_tail));
    FamilyRanking ranking = compare_families(hist, fits);

    ordered_json j;
    j["k_min"] = k;
    j["winner"] = ranking.winner;
    j["tie"] = ranking.tie;
    j["ranked"] = ordered_json::array();
    for (const TailFit& f : ranking.ranked) j["ranked"].push_back(fit_json(f));
    j["pairwise"] = ordered_json::array();
    for (const auto& p : ranking.pairwise) {
      ordered_json row;
      row["first"] = family_label(p.first);
      row["second"] = family_label(p.second);
      row["log_ratio"] = p.log_ratio;
      row["vuong_z"] = p.vuong_z;
      j["pairwise"].push_back(row);
    }
    out.write("comparison.json", j.dump(2) + "\n");
    out.write("cumulative.csv", cumulative_csv(hist));
    m.write(g.manifest_path);
    std::cout << "winner: " << ranking.winner << "\n";
    return 0;
  }

  Family fam = parse_dist_family(a.family);
  bool want_gof = a.bootstrap > 0;
  TailFit fit;
  if (a.kmin == "auto") {
    fit = select_kmin(hist, fam, KminCriterion::min_ks, 0, 1, g.threads, a.min_tail);
    if (want_gof) {
      ensure_seed(g, m);
      fit = gof_test(hist, fit, a.bootstrap, g.seed, g.threads);
    }
  } else if (a.kmin == "auto-p010") {
    if (!want_gof) throw ConfigError("--kmin auto-p010 requires --bootstrap > 0");
    ensure_seed(g, m);
    fit = select_kmin(hist, fam, KminCriterion::min_p010, g.seed, a.bootstrap, g.threads,
                      a.min_tail);
  } else {
    fit = fit_mle(hist, fam, numeric_kmin(), a.min_tail);
    if (want_gof) {
      ensure_seed(g, m);
      fit = gof_test(hist, fit, a.bootstrap, g.seed, g.threads);
    }
  }

  out.write("fit.json", fit_json(fit).dump(2) + "\n");
  out.write("cumulative.csv", cumulative_csv(hist));
  out.write("fit_overlay.csv", model_overlay_csv(fit, hist));

  if (!a.lcurve.empty()) {
    std::vector<std::string> parts = split_list(a.lcurve);
    if (parts.size() != 3) throw ConfigError("--lcurve expects b0,b1,b2");
    LogNormalFormCurve curve;
    double* slots[3] = {&curve.b0, &curve.b1, &curve.b2};
    for (int i = 0; i < 3; ++i) {
      auto [p, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(),
                                     *slots[i]);
      if (ec != std::errc() || p != parts[i].data() + parts[i].size())
        throw ConfigError("--lcurve expects three numbers");
    }
    std::string s = "k,l_k\n";
    for (int64_t k : log_grid(1, std::max<int64_t>(1, hist.max_degree()), 200)) {
      s += std::to_string(k);
      s += ',';
      s += format_double(eval_lcurve(curve, static_cast<double>(k)));
      s += '\n';
    }
    out.write("lcurve_overlay.csv", s);
  }

  m.write(g.manifest_path);
  std::cout << family_label(fit.model.family) << " fit at k_min=" << fit.k_min
            << ": ks=" << format_double(fit.ks_stat);
  if (fit.p_value >= 0.0) std::cout << ", p=" << format_double(fit.p_value);
  std::cout << "\n";
  return 0;
}

// fitattach --------------------------------------------------------------

struct FitattachArgs {
  std::string input;
  std::string family = "both";
  double bin_width = 0.025;
};

int cmd_fitattach(const FitattachArgs& a, Globals& g, Manifest& m) {
  Out out{g, m};
  m.add_input(a.input);
  BinnedRate rate = read_binned(a.input, a.bin_width);

  std::vector<AFFit> fits;
  if (a.family == "krapivsky" || a.family == "both")
    fits.push_back(fit_af(rate, AttachmentFunction::Form::log_linear));
  if (a.family == "redner" || a.family == "both")
    fits.push_back(fit_af(rate, AttachmentFunction::Form::nonlinear));
  if (fits.empty()) throw ConfigError("unknown attachment family: " + a.family);

  ordered_json j;
  j["bin_half_width"] = a.bin_width;
  j["fits"] = ordered_json::array();
  for (const AFFit& f : fits) j["fits"].push_back(af_fit_json(f));
  if (fits.size() > 1) {
    AFComparison cmp = compare_af(fits);
    j["winner"] = model_name(cmp.ranked[0].form);
  } else {
    j["winner"] = model_name(fits[0].form);
  }
  out.write("fitattach.json", j.dump(2) + "\n");

  for (const AFFit& f : fits) {
    AttachmentFunction af{f.form, f.param};
    std::string s = "k,a_fit\n";
    for (const RatePoint& b : rate.bins) {
      s += std::to_string(b.k);
      s += ',';
      s += format_double(f.c * af.eval(b.k));
      s += '\n';
    }
    std::string name = f.form == AttachmentFunction::Form::log_linear
                           ? "af_overlay_log_linear.csv"
                           : "af_overlay_nonlinear.csv";
    out.write(name, s);
  }

  ordered_json cfg;
  cfg["input"] = a.input;
  cfg["family"] = a.family;
  cfg["bin_width"] = a.bin_width;
  m.set_config(std::move(cfg));
  m.write(g.manifest_path);
  std::cout << "winner: " << j["winner"].get<std::string>() << "\n";
  return 0;
}

// score ------------------------------------------------------------------

struct ScoreArgs {
  std::string input;
  int max_segments = 5;
  double bin_width = 0.025;
};

int cmd_score(const ScoreArgs& a, Globals& g, Manifest& m) {
  Out out{g, m};
  m.add_input(a.input);
  BinnedRate rate = read_binned(a.input, a.bin_width);
  SegmentedFit fit = loglinearity_score(rate, a.max_segments);

  ordered_json j;
  j["score"] = fit.score;
  j["score_logk"] = fit.score_logk;
  j["gcv"] = fit.gcv;
  j["n_segments"] = fit.segments.size();
  j["segments"] = ordered_json::array();
  for (const auto& seg : fit.segments) {
    ordered_json row;
    row["k_lo"] = std::exp(seg.x_lo);
    row["k_hi"] = std::exp(seg.x_hi);
    row["slope"] = seg.slope;
    row["intercept"] = seg.intercept;
    j["segments"].push_back(row);
  }
  j["breakpoints"] = ordered_json::array();
  for (size_t i = 0; i + 1 < fit.segments.size(); ++i)
    j["breakpoints"].push_back(std::exp(fit.segments[i].x_hi));
  out.write("score.json", j.dump(2) + "\n");

  ordered_json cfg;
  cfg["input"] = a.input;
  cfg["max_segments"] = a.max_segments;
  m.set_config(std::move(cfg));
  m.write(g.manifest_path);
  std::cout << "log-linearity score " << format_double(fit.score) << " over "
            << fit.segments.size() << " segment(s)\n";
  return 0;
}

// report -----------------------------------------------------------------

struct ReportArgs {
  std::string nodes, edges, from, to;
  std::string resolutions = "maximal,daily,monthly,yearly";
  double bin_width = 0.025;
};

int cmd_report(const ReportArgs& a, Globals& g, Manifest& m) {
  Out out{g, m};
  m.add_input(a.nodes);
  m.add_input(a.edges);
  CitationCorpus corpus = parse_corpus_files(a.nodes, a.edges, window_of(a.from, a.to));

  ordered_json rows = ordered_json::array();
  std::string csv =
      "resolution,winner,alpha,aic_krapivsky,bic_krapivsky,beta,aic_redner,bic_redner,"
      "n_bins\n";
  for (const std::string& token : split_list(a.resolutions)) {
    Resolution res = parse_resolution(token, "", "");
    GrowthSequence seq = build_sequence(corpus, res);
    AttachmentRateEstimate est = newman_rate(seq, NewmanVariant::corrected);
    BinnedRate binned = bin_rate(est, a.bin_width);
    AFFit kr = fit_af(binned, AttachmentFunction::Form::log_linear);
    AFFit re = fit_af(binned, AttachmentFunction::Form::nonlinear);
    AFComparison cmp = compare_af({kr, re});
    std::string winner = model_name(cmp.ranked[0].form);

    ordered_json row;
    row["resolution"] = token;
    row["winner"] = winner;
    row["alpha"] = kr.param;
    row["aic_krapivsky"] = kr.aic;
    row["bic_krapivsky"] = kr.bic;
    row["beta"] = re.param;
    row["aic_redner"] = re.aic;
    row["bic_redner"] = re.bic;
    row["n_bins"] = kr.n_points;
    rows.push_back(row);

    csv += token + "," + winner + "," + format_double(kr.param) + "," +
           format_double(kr.aic) + "," + format_double(kr.bic) + "," +
           format_double(re.param) + "," + format_double(re.aic) + "," +
           format_double(re.bic) + "," + std::to_string(kr.n_points) + "\n";
    std::cout << token << ": winner=" << winner << "\n";
  }
  out.write("report.json", rows.dump(2) + "\n");
  out.write("report.csv", csv);

  ordered_json cfg;
  cfg["nodes"] = a.nodes;
  cfg["edges"] = a.edges;
  cfg["from"] = a.from;
  cfg["to"] = a.to;
  cfg["resolutions"] = a.resolutions;
  cfg["bin_width"] = a.bin_width;
  m.set_config(std::move(cfg));
  m.write(g.manifest_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and measurement toolkit for preferential attachment in growing networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed for randomized commands");
  app.add_option("--threads", g.threads, "worker threads for bootstrap replicates")
      ->check(CLI::Range(1, 256));
  app.add_option("--output-dir", g.output_dir, "directory for output artifacts");
  app.add_option("--manifest", g.manifest_path,
                 "manifest path (default: <output-dir>/manifest.json)");

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "parse and clean a citation corpus");
  ingest->fallthrough();
  ingest->add_option("--nodes", ia.nodes, "nodes CSV (id,date)")->required();
  ingest->add_option("--edges", ia.edges, "edges CSV (citing_id,cited_id)")->required();
  ingest->add_option("--from", ia.from, "window start YYYY-MM-DD");
  ingest->add_option("--to", ia.to, "window end YYYY-MM-DD");
  ingest->add_option("--emit-canonical", ia.emit_dir,
                     "also write the cleaned corpus into this directory");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "grow a synthetic network");
  sim->fallthrough();
  sim->add_option("--model", sa.model, "price|callaway|krapivsky|redner")
      ->required()
      ->check(CLI::IsMember({"price", "callaway", "krapivsky", "redner"}));
  sim->add_option("--steps", sa.steps, "growth steps T")->required()->check(CLI::PositiveNumber);
  sim->add_option("--m", sa.m, "edges per step (mean with --m-bounded)")
      ->check(CLI::PositiveNumber);
  sim->add_flag("--m-bounded", sa.m_bounded, "draw m_t uniformly on {1..2m-1}");
  auto* alpha_opt = sim->add_option("--alpha", sa.alpha, "log-linear exponent (krapivsky)");
  auto* beta_opt = sim->add_option("--beta", sa.beta, "nonlinear damping (redner)");
  sim->add_option("--n1", sa.n1, "seed graph size")->check(CLI::PositiveNumber);
  sim->add_option("--m1", sa.m1, "seed graph intra edges")->check(CLI::NonNegativeNumber);
  sim->add_option("--nodes-per-step", sa.nodes_per_step,
                  "nodes added per later step (>1 requires --steps 2)")
      ->check(CLI::PositiveNumber);

  MeasureArgs ma;
  auto* meas = app.add_subcommand("measure", "estimate the attachment rate");
  meas->fallthrough();
  meas->add_option("--input", ma.input, "growth sequence JSONL");
  meas->add_option("--nodes", ma.nodes, "nodes CSV (corpus input)");
  meas->add_option("--edges", ma.edges, "edges CSV (corpus input)");
  meas->add_option("--from", ma.from, "window start YYYY-MM-DD");
  meas->add_option("--to", ma.to, "window end YYYY-MM-DD");
  meas->add_option("--resolution", ma.resolution, "maximal|daily|monthly|yearly|biepochal")
      ->check(CLI::IsMember({"maximal", "daily", "monthly", "yearly", "biepochal"}));
  meas->add_option("--t1", ma.t1, "first epoch (biepochal), e.g. 1990:1999");
  meas->add_option("--t2", ma.t2, "second epoch (biepochal), e.g. 2000:2000");
  meas->add_option("--estimator", ma.estimator, "jeong|newman|newman-uncorrected")
      ->check(CLI::IsMember({"jeong", "newman", "newman-uncorrected"}));
  meas->add_option("--bin-width", ma.bin_width, "bin half width h")
      ->check(CLI::Range(1e-9, 0.9));
  meas->add_option("--windows", ma.windows,
                   "comma-separated date intervals for windowed exponents");
  meas->add_option("--bucket", ma.bucket, "coarsen into buckets of this many nodes")
      ->check(CLI::NonNegativeNumber);

  FitdistArgs fa;
  auto* fitd = app.add_subcommand("fitdist", "fit the in-degree distribution");
  fitd->fallthrough();
  fitd->add_option("--input", fa.input, "growth sequence JSONL");
  fitd->add_option("--nodes", fa.nodes, "nodes CSV (corpus input)");
  fitd->add_option("--edges", fa.edges, "edges CSV (corpus input)");
  fitd->add_option("--from", fa.from, "window start YYYY-MM-DD");
  fitd->add_option("--to", fa.to, "window end YYYY-MM-DD");
  fitd->add_option("--family", fa.family, "lognormal|power|exponential|all")
      ->check(CLI::IsMember({"lognormal", "power", "exponential", "all"}));
  fitd->add_option("--kmin", fa.kmin, "cutoff on the k+1 scale: N, auto, or auto-p010");
  fitd->add_option("--bootstrap", fa.bootstrap, "goodness-of-fit replicates (0 skips)")
      ->check(CLI::NonNegativeNumber);
  fitd->add_option("--min-tail", fa.min_tail, "minimum tail points")
      ->check(CLI::Range(int64_t{2}, int64_t{1000000}));
  fitd->add_option("--lcurve", fa.lcurve, "overlay curve parameters b0,b1,b2");

  FitattachArgs aa;
  auto* fita = app.add_subcommand("fitattach", "fit attachment-function families");
  fita->fallthrough();
  fita->add_option("--input", aa.input, "binned rate CSV from measure")->required();
  fita->add_option("--family", aa.family, "krapivsky|redner|both")
      ->check(CLI::IsMember({"krapivsky", "redner", "both"}));
  fita->add_option("--bin-width", aa.bin_width, "bin half width used to build the input")
      ->check(CLI::Range(1e-9, 0.9));

  ScoreArgs ca;
  auto* score = app.add_subcommand("score", "log-linearity score of a binned rate");
  score->fallthrough();
  score->add_option("--input", ca.input, "binned rate CSV from measure")->required();
  score->add_option("--max-segments", ca.max_segments, "segment budget")
      ->check(CLI::Range(1, 16));
  score->add_option("--bin-width", ca.bin_width, "bin half width used to build the input")
      ->check(CLI::Range(1e-9, 0.9));

  ReportArgs ra;
  auto* rep = app.add_subcommand("report", "per-resolution attachment-model comparison");
  rep->fallthrough();
  rep->add_option("--nodes", ra.nodes, "nodes CSV")->required();
  rep->add_option("--edges", ra.edges, "edges CSV")->required();
  rep->add_option("--from", ra.from, "window start YYYY-MM-DD");
  rep->add_option("--to", ra.to, "window end YYYY-MM-DD");
  rep->add_option("--resolutions", ra.resolutions, "comma-separated resolution list");
  rep->add_option("--bin-width", ra.bin_width, "bin half width")
      ->check(CLI::Range(1e-9, 0.9));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  g.seed_given = seed_opt->count() > 0;
  sa.alpha_given = alpha_opt->count() > 0;
  sa.beta_given = beta_opt->count() > 0;

  try {
    fs::create_directories(g.output_dir);
    if (g.manifest_path.empty())
      g.manifest_path = (fs::path(g.output_dir) / "manifest.json").string();

    if (app.got_subcommand(ingest)) {
      Manifest m("ingest", argc, argv);
      return cmd_ingest(ia, g, m);
    }
    if (app.got_subcommand(sim)) {
      Manifest m("simulate", argc, argv);
      return cmd_simulate(sa, g, m);
    }
    if (app.got_subcommand(meas)) {
      Manifest m("measure", argc, argv);
      return cmd_measure(ma, g, m);
    }
    if (app.got_subcommand(fitd)) {
      Manifest m("fitdist", argc, argv);
      return cmd_fitdist(fa, g, m);
    }
    if (app.got_subcommand(fita)) {
      Manifest m("fitattach", argc, argv);
      return cmd_fitattach(aa, g, m);
    }
    if (app.got_subcommand(score)) {
      Manifest m("score", argc, argv);
      return cmd_score(ca, g, m);
    }
    if (app.got_subcommand(rep)) {
      Manifest m("report", argc, argv);
      return cmd_report(ra, g, m);
    }
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
