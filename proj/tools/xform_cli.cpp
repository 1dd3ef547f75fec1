// Command-line front end: learn / represent / denoise / metrics.
//
// Config precedence: built-in defaults < --preset < --config file < flags.
// Config files are flat `key = value` text; keys are the long option names
// without dashes. A manifest is written beside every file-producing run.
// All randomness flows from the --seed flag through the library generator
// (std::mt19937_64 with fixed uniform and Box-Muller mappings).

#include <CLI11.hpp>
#include <xform/xform.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace xform;

std::string iso_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// Removes everything written so far unless the run commits.
class OutputTracker {
 public:
  void record(const std::string& path) { written_.push_back(path); }
  void commit() { committed_ = true; }
  ~OutputTracker() {
    if (committed_) return;
    for (const std::string& path : written_) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
  }

 private:
  std::vector<std::string> written_;
  bool committed_ = false;
};

class Manifest {
 public:
  explicit Manifest(std::string command) { set("command", std::move(command)); }
  void set(const std::string& key, std::string value) { entries_.emplace_back(key, std::move(value)); }
  void set(const std::string& key, double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    set(key, out.str());
  }
  void set(const std::string& key, Index value) { set(key, std::to_string(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
  std::string text() const {
    std::ostringstream out;
    for (const auto& [key, value] : entries_) out << key << " = " << value << '\n';
    return out.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

using ConfigSetters = std::map<std::string, std::function<void(const std::string&)>>;

void apply_config_file(const std::string& path, const ConfigSetters& setters) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("bad config line " + std::to_string(line_no) + " in " + path);
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("unknown config key '" + key + "' in " + path);
    it->second(value);
  }
}

// Pre-scan for an option value so presets/config apply before CLI11 parsing.
std::optional<std::string> scan_option(const std::vector<std::string>& args, const std::string& name) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == name && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(name + "=", 0) == 0) return args[i].substr(name.size() + 1);
  }
  return std::nullopt;
}

Matrix load_signals(const std::string& matrix_path, const std::string& image_path, Index patch,
                    Index stride, bool keep_mean, PatchSet* patches_out) {
  if (!matrix_path.empty()) return read_matrix_csv(matrix_path);
  const Matrix img = read_pgm(image_path);
  PatchSet patches = extract_patches(img, patch, stride, !keep_mean);
  Matrix y = patches.vectors;
  if (patches_out) *patches_out = std::move(patches);
  return y;
}

// ---------------------------------------------------------------------------
// learn
// ---------------------------------------------------------------------------

struct LearnOptions {
  std::string matrix_path;
  std::string image_path;
  Index patch = 8;
  Index stride = -1;  // defaults to patch (non-overlapping)
  bool keep_mean = false;
  Index s = 11;
  double eta = 0.0;
  double lambda0 = 3.1e-3;
  double xi = 1.0;
  int iters = 100;
  std::string init = "dct";
  std::string init_file;
  std::string order = "update-first";
  double stop_tol = 0.0;
  std::uint64_t seed = 0;
  std::string out_prefix;
  bool save_codes = false;
  bool penalized = false;
};

int run_learn(const LearnOptions& opt) {
  PatchSet patches;
  const Index stride = opt.stride > 0 ? opt.stride : opt.patch;
  const Matrix y =
      load_signals(opt.matrix_path, opt.image_path, opt.patch, stride, opt.keep_mean, &patches);
  const Index n = y.rows();

  LearnConfig cfg;
  cfg.lambda0 = opt.lambda0;
  cfg.xi = opt.xi;
  cfg.iterations = opt.iters;
  cfg.seed = opt.seed;
  if (opt.penalized)
    cfg.mode = uniform_eta(y.cols(), opt.eta);
  else
    cfg.mode = ConstrainedSparsity{opt.s};
  if (opt.stop_tol > 0.0) cfg.stop_tol = opt.stop_tol;
  cfg.order = opt.order == "code-first" ? StepOrder::CodeFirst : StepOrder::UpdateFirst;

  if (opt.init == "dct") cfg.init = InitKind::Dct;
  else if (opt.init == "klt") cfg.init = InitKind::Klt;
  else if (opt.init == "identity") cfg.init = InitKind::Identity;
  else if (opt.init == "random") cfg.init = InitKind::RandomGaussian;
  else if (opt.init == "given") {
    if (opt.init_file.empty()) throw std::invalid_argument("--init given requires --init-file");
    cfg.init = InitKind::Given;
    cfg.given_w = read_matrix_csv(opt.init_file);
  } else {
    throw std::invalid_argument("unknown init '" + opt.init + "'");
  }

  Manifest manifest("learn");
  manifest.set("version", kVersion);
  manifest.set("start_time", iso_utc_now());
  manifest.set("input", opt.matrix_path.empty() ? opt.image_path : opt.matrix_path);
  manifest.set("config.lambda0", cfg.lambda0);
  manifest.set("config.xi", cfg.xi);
  manifest.set("config.iterations", cfg.iterations);
  manifest.set("config.init", opt.init);
  manifest.set("config.order", opt.order);
  manifest.set("config.mode", opt.penalized ? "penalized" : "constrained");
  if (opt.penalized) manifest.set("config.eta", opt.eta);
  else manifest.set("config.s", opt.s);
  if (!opt.image_path.empty()) {
    manifest.set("config.patch", opt.patch);
    manifest.set("config.stride", stride);
    manifest.set("config.remove_mean", opt.keep_mean ? "false" : "true");
  }
  manifest.set("seed", opt.seed);

  const LearnResult result = learn(y, cfg);
  if (!result.transform.allFinite() || !result.codes.allFinite())
    throw std::runtime_error("non-finite result");

  OutputTracker outputs;
  const std::string transform_path = opt.out_prefix + "_transform.csv";
  atomic_write_file(transform_path, matrix_to_csv(result.transform));
  outputs.record(transform_path);

  const std::string trace_path = opt.out_prefix + "_trace.csv";
  atomic_write_file(trace_path, trace_to_csv(result.trace));
  outputs.record(trace_path);

  Index total_nonzeros = 0;
  for (Index i = 0; i < result.codes.cols(); ++i) total_nonzeros += count_nonzeros(result.codes.col(i));
  const TraceRecord& last = result.trace.back();
  std::ostringstream summary;
  summary << "rows,cols,mode,parameter,total_nonzeros,mean_nonzeros_per_column,"
             "sparsification_error,objective,condition_number,frobenius_norm\n";
  summary.precision(17);
  summary << result.codes.rows() << ',' << result.codes.cols() << ','
          << (opt.penalized ? "penalized" : "constrained") << ','
          << (opt.penalized ? opt.eta : static_cast<double>(opt.s)) << ',' << total_nonzeros << ','
          << static_cast<double>(total_nonzeros) / static_cast<double>(result.codes.cols()) << ','
          << last.sparsification_error << ',' << last.objective << ',' << last.condition_number
          << ',' << last.frobenius_norm << '\n';
  const std::string summary_path = opt.out_prefix + "_codes_summary.csv";
  atomic_write_file(summary_path, summary.str());
  outputs.record(summary_path);

  std::string codes_path;
  if (opt.save_codes) {
    codes_path = opt.out_prefix + "_codes.csv";
    atomic_write_file(codes_path, matrix_to_csv(result.codes));
    outputs.record(codes_path);
  }

  manifest.set("output.transform", transform_path);
  manifest.set("output.trace", trace_path);
  manifest.set("output.codes_summary", summary_path);
  if (!codes_path.empty()) manifest.set("output.codes", codes_path);
  manifest.set("result.final_objective", last.objective);
  manifest.set("result.final_condition_number", last.condition_number);
  manifest.set("result.iterations_run", static_cast<Index>(result.trace.size()));
  manifest.set("end_time", iso_utc_now());
  const std::string manifest_path = opt.out_prefix + "_manifest.txt";
  atomic_write_file(manifest_path, manifest.text());
  outputs.record(manifest_path);
  outputs.commit();

  std::cout << "learn: " << result.trace.size() << " iterations, final objective "
            << last.objective << ", kappa " << last.condition_number << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// represent
// ---------------------------------------------------------------------------

struct RepresentOptions {
  std::string image_path;
  std::string sizes = "64";
  Index s = -1;  // default: round(0.17 n)
  double lambda0 = 3.1e-3;
  double xi = 1.0;
  int iters = 100;
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_represent(const RepresentOptions& opt) {
  const Matrix img = read_pgm(opt.image_path);
  std::vector<Index> sizes;
  {
    std::istringstream in(opt.sizes);
    std::string token;
    while (std::getline(in, token, ',')) sizes.push_back(std::stoll(token));
    if (sizes.empty()) throw std::invalid_argument("no patch sizes given");
  }

  std::ostringstream csv;
  csv << "patch_size,nse_learned,nse_dct,rpsnr_learned,rpsnr_dct,kappa,seconds\n";
  csv.precision(17);
  for (Index n : sizes) {
    const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) throw std::invalid_argument("patch size must be a perfect square");
    const PatchSet patches = extract_patches(img, side, side, /*remove_mean=*/true);
    const Matrix& y = patches.vectors;
    const Index s = opt.s > 0 ? opt.s : static_cast<Index>(std::llround(0.17 * static_cast<double>(n)));
    const Index pixels = n * y.cols();

    LearnConfig cfg;
    cfg.lambda0 = opt.lambda0;
    cfg.xi = opt.xi;
    cfg.mode = ConstrainedSparsity{s};
    cfg.iterations = opt.iters;
    cfg.init = InitKind::Dct;
    cfg.seed = opt.seed;
    const auto t0 = std::chrono::steady_clock::now();
    const LearnResult result = learn(y, cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const Matrix dct = dct_matrix_2d(n);
    const Matrix x_learned = sparse_code(result.transform, y, cfg.mode);
    const Matrix x_dct = sparse_code(dct, y, cfg.mode);
    csv << n << ',' << nse(result.transform, y, s) << ',' << nse(dct, y, s) << ','
        << recovery_psnr(result.transform, y, x_learned, pixels) << ','
        << recovery_psnr(dct, y, x_dct, pixels) << ',' << condition_number(result.transform) << ','
        << seconds << '\n';
  }

  if (opt.out_path.empty()) {
    std::cout << csv.str();
    return 0;
  }
  Manifest manifest("represent");
  manifest.set("version", kVersion);
  manifest.set("start_time", iso_utc_now());
  manifest.set("input", opt.image_path);
  manifest.set("config.sizes", opt.sizes);
  manifest.set("config.s", opt.s);
  manifest.set("config.lambda0", opt.lambda0);
  manifest.set("config.xi", opt.xi);
  manifest.set("config.iterations", opt.iters);
  manifest.set("seed", opt.seed);
  OutputTracker outputs;
  atomic_write_file(opt.out_path, csv.str());
  outputs.record(opt.out_path);
  manifest.set("output.csv", opt.out_path);
  manifest.set("end_time", iso_utc_now());
  atomic_write_file(opt.out_path + ".manifest", manifest.text());
  outputs.record(opt.out_path + ".manifest");
  outputs.commit();
  return 0;
}

// ---------------------------------------------------------------------------
// denoise
// ---------------------------------------------------------------------------

struct DenoiseOptions {
  std::string in_path;
  std::string ref_path;
  std::string out_path = "denoised.pgm";
  double sigma = 0.0;
  Index n = 121;
  double lambda0 = 0.031;
  double c = 1.04;
  int outer = 11;
  Index train = 32000;
  int learn_iters = 12;
  double tau_coeff = 0.01;
  Index s_init = 12;
  double xi = 1.0;
  std::uint64_t seed = 0;
};

void apply_table1_preset(DenoiseOptions& opt) {
  opt.n = 121;
  opt.lambda0 = 0.031;
  opt.c = 1.04;
  opt.outer = 11;
  opt.train = 32000;
  opt.learn_iters = 12;
  opt.tau_coeff = 0.01;
  opt.s_init = 12;
  opt.xi = 1.0;
}

int run_denoise(const DenoiseOptions& opt) {
  const Matrix noisy = read_pgm(opt.in_path);

  DenoiseConfig cfg;
  cfg.patch_dim = opt.n;
  cfg.lambda0 = opt.lambda0;
  cfg.threshold_c = opt.c;
  cfg.outer_iterations = opt.outer;
  cfg.train_size = opt.train;
  cfg.learn_iterations = opt.learn_iters;
  cfg.tau_coeff = opt.tau_coeff;
  cfg.initial_sparsity = opt.s_init;
  cfg.sigma = opt.sigma;
  cfg.xi = opt.xi;
  cfg.seed = opt.seed;

  Manifest manifest("denoise");
  manifest.set("version", kVersion);
  manifest.set("start_time", iso_utc_now());
  manifest.set("input", opt.in_path);
  if (!opt.ref_path.empty()) manifest.set("reference", opt.ref_path);
  manifest.set("config.n", cfg.patch_dim);
  manifest.set("config.lambda0", cfg.lambda0);
  manifest.set("config.C", cfg.threshold_c);
  manifest.set("config.outer_iterations", cfg.outer_iterations);
  manifest.set("config.train_size", cfg.train_size);
  manifest.set("config.learn_iterations", cfg.learn_iterations);
  manifest.set("config.tau_coeff", cfg.tau_coeff);
  manifest.set("config.initial_sparsity", cfg.initial_sparsity);
  manifest.set("config.sigma", cfg.sigma);
  manifest.set("config.xi", cfg.xi);
  manifest.set("seed", opt.seed);

  const DenoiseResult result = denoise_image(noisy, cfg);
  if (!result.image.allFinite()) throw std::runtime_error("non-finite result");

  OutputTracker outputs;
  atomic_write_file(opt.out_path, pgm_binary(result.image));
  outputs.record(opt.out_path);

  std::ostringstream report;
  report.precision(17);
  report << "metric,value\n";
  report << "psnr_denoised_vs_noisy_db," << psnr(noisy, result.image) << '\n';
  if (!opt.ref_path.empty()) {
    const Matrix ref = read_pgm(opt.ref_path);
    report << "psnr_noisy_vs_reference_db," << psnr(ref, noisy) << '\n';
    report << "psnr_denoised_vs_reference_db," << psnr(ref, result.image) << '\n';
  }
  report << "final_transform_condition_number," << condition_number(result.state.transform) << '\n';
  const std::string report_path = opt.out_path + ".report.csv";
  atomic_write_file(report_path, report.str());
  outputs.record(report_path);

  manifest.set("output.image", opt.out_path);
  manifest.set("output.report", report_path);
  manifest.set("end_time", iso_utc_now());
  atomic_write_file(opt.out_path + ".manifest", manifest.text());
  outputs.record(opt.out_path + ".manifest");
  outputs.commit();

  std::cout << "denoise: wrote " << opt.out_path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsOptions {
  std::string w_path, y_path, x_path;
  std::string image_a, image_b;
  Index pixels = -1;
};

int run_metrics(const MetricsOptions& opt) {
  std::cout.precision(17);
  if (!opt.image_a.empty() || !opt.image_b.empty()) {
    if (opt.image_a.empty() || opt.image_b.empty())
      throw std::invalid_argument("--image-a and --image-b are both required");
    const Matrix a = read_pgm(opt.image_a);
    const Matrix b = read_pgm(opt.image_b);
    std::cout << "psnr_db\n" << psnr(a, b) << '\n';
    return 0;
  }
  if (opt.w_path.empty() || opt.y_path.empty() || opt.x_path.empty())
    throw std::invalid_argument("metrics needs --w, --y and --x (or an image pair)");
  const Matrix w = read_matrix_csv(opt.w_path);
  const Matrix y = read_matrix_csv(opt.y_path);
  const Matrix x = read_matrix_csv(opt.x_path);
  const Index pixels = opt.pixels > 0 ? opt.pixels : y.size();
  const MetricsReport report = make_report(w, y, x, pixels);
  std::cout << "sparsification_error,nse,recovery_psnr_db,condition_number,frobenius_norm\n"
            << report.sparsification_error << ',' << report.nse << ',' << report.recovery_psnr_db
            << ',' << report.condition_number << ',' << report.frobenius_norm << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("XFORM_THREADS")) {
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));
  } else {
    Eigen::setNbThreads(1);
  }

  CLI::App app{"sparsifying transform learning, representation and denoising"};
  app.require_subcommand(1);

  std::vector<std::string> args(argv + 1, argv + argc);

  LearnOptions learn_opt;
  RepresentOptions rep_opt;
  DenoiseOptions den_opt;
  MetricsOptions met_opt;
  std::string config_path, preset;

  // Subcommand: learn
  auto* learn_cmd = app.add_subcommand("learn", "learn a sparsifying transform");
  learn_cmd->add_option("--matrix", learn_opt.matrix_path, "training matrix CSV");
  learn_cmd->add_option("--image", learn_opt.image_path, "training image (PGM)");
  learn_cmd->add_option("--patch", learn_opt.patch, "patch side for image input");
  learn_cmd->add_option("--stride", learn_opt.stride, "patch stride (default: patch side)");
  learn_cmd->add_flag("--keep-mean", learn_opt.keep_mean, "skip per-patch mean removal");
  auto* s_opt = learn_cmd->add_option("--s", learn_opt.s, "per-column sparsity budget");
  auto* eta_opt = learn_cmd->add_option("--eta", learn_opt.eta, "penalized-mode threshold");
  learn_cmd->add_option("--lambda0", learn_opt.lambda0, "regularizer weight scale");
  learn_cmd->add_option("--xi", learn_opt.xi, "Frobenius weight in v(W)");
  learn_cmd->add_option("--iters", learn_opt.iters, "iteration count");
  learn_cmd->add_option("--init", learn_opt.init, "dct|klt|identity|random|given");
  learn_cmd->add_option("--init-file", learn_opt.init_file, "transform CSV for --init given");
  learn_cmd->add_option("--order", learn_opt.order, "update-first|code-first");
  learn_cmd->add_option("--stop-tol", learn_opt.stop_tol, "early-stop relative tolerance");
  learn_cmd->add_option("--seed", learn_opt.seed, "random seed");
  learn_cmd->add_option("--out", learn_opt.out_prefix, "output prefix")->required();
  learn_cmd->add_flag("--save-codes", learn_opt.save_codes, "also write the full code matrix");
  learn_cmd->add_option("--config", config_path, "flat key = value config file");

  // Subcommand: represent
  auto* rep_cmd = app.add_subcommand("represent", "learned-vs-DCT representation study");
  rep_cmd->add_option("--image", rep_opt.image_path, "input image (PGM)")->required();
  rep_cmd->add_option("--sizes", rep_opt.sizes, "comma-separated patch sizes (pixels per patch)");
  rep_cmd->add_option("--s", rep_opt.s, "sparsity (default round(0.17 n))");
  rep_cmd->add_option("--lambda0", rep_opt.lambda0, "regularizer weight scale");
  rep_cmd->add_option("--xi", rep_opt.xi, "Frobenius weight in v(W)");
  rep_cmd->add_option("--iters", rep_opt.iters, "iteration count");
  rep_cmd->add_option("--seed", rep_opt.seed, "random seed");
  rep_cmd->add_option("--out", rep_opt.out_path, "output CSV (default: stdout)");
  rep_cmd->add_option("--config", config_path, "flat key = value config file");

  // Subcommand: denoise
  auto* den_cmd = app.add_subcommand("denoise", "two-step patch-based denoising");
  den_cmd->add_option("--in", den_opt.in_path, "noisy image (PGM)")->required();
  auto* sigma_opt = den_cmd->add_option("--sigma", den_opt.sigma, "noise standard deviation");
  den_cmd->add_option("--out", den_opt.out_path, "denoised image path");
  den_cmd->add_option("--ref", den_opt.ref_path, "clean reference image for PSNR report");
  den_cmd->add_option("--n", den_opt.n, "patch dimension (pixels per patch)");
  den_cmd->add_option("--lambda0", den_opt.lambda0, "regularizer weight scale");
  den_cmd->add_option("--c", den_opt.c, "sparsity-threshold constant C");
  den_cmd->add_option("--outer", den_opt.outer, "outer iterations");
  den_cmd->add_option("--train", den_opt.train, "training patches per iteration");
  den_cmd->add_option("--learn-iters", den_opt.learn_iters, "learning iterations per outer step");
  den_cmd->add_option("--tau-coeff", den_opt.tau_coeff, "tau = tau-coeff / sigma");
  den_cmd->add_option("--s-init", den_opt.s_init, "initial per-patch sparsity");
  den_cmd->add_option("--xi", den_opt.xi, "Frobenius weight in v(W)");
  den_cmd->add_option("--seed", den_opt.seed, "random seed");
  den_cmd->add_option("--preset", preset, "parameter preset (table1)");
  den_cmd->add_option("--config", config_path, "flat key = value config file");

  // Subcommand: metrics
  auto* met_cmd = app.add_subcommand("metrics", "print quality metrics as CSV");
  met_cmd->add_option("--w", met_opt.w_path, "transform CSV");
  met_cmd->add_option("--y", met_opt.y_path, "signal matrix CSV");
  met_cmd->add_option("--x", met_opt.x_path, "code matrix CSV");
  met_cmd->add_option("--pixels", met_opt.pixels, "pixel count for recovery PSNR");
  met_cmd->add_option("--image-a", met_opt.image_a, "first image (PGM)");
  met_cmd->add_option("--image-b", met_opt.image_b, "second image (PGM)");

  // Apply preset and config file before parsing so flags win.
  try {
    if (const auto p = scan_option(args, "--preset")) {
      if (*p != "table1") throw std::invalid_argument("unknown preset '" + *p + "'");
      apply_table1_preset(den_opt);
    }
    if (const auto c = scan_option(args, "--config")) {
      ConfigSetters setters;
      if (!args.empty() && args[0] == "learn") {
        setters["patch"] = [&](const std::string& v) { learn_opt.patch = std::stoll(v); };
        setters["stride"] = [&](const std::string& v) { learn_opt.stride = std::stoll(v); };
        setters["s"] = [&](const std::string& v) { learn_opt.s = std::stoll(v); learn_opt.penalized = false; };
        setters["eta"] = [&](const std::string& v) { learn_opt.eta = std::stod(v); learn_opt.penalized = true; };
        setters["lambda0"] = [&](const std::string& v) { learn_opt.lambda0 = std::stod(v); };
        setters["xi"] = [&](const std::string& v) { learn_opt.xi = std::stod(v); };
        setters["iters"] = [&](const std::string& v) { learn_opt.iters = std::stoi(v); };
        setters["init"] = [&](const std::string& v) { learn_opt.init = v; };
        setters["order"] = [&](const std::string& v) { learn_opt.order = v; };
        setters["stop-tol"] = [&](const std::string& v) { learn_opt.stop_tol = std::stod(v); };
        setters["seed"] = [&](const std::string& v) { learn_opt.seed = std::stoull(v); };
      } else if (!args.empty() && args[0] == "represent") {
        setters["sizes"] = [&](const std::string& v) { rep_opt.sizes = v; };
        setters["s"] = [&](const std::string& v) { rep_opt.s = std::stoll(v); };
        setters["lambda0"] = [&](const std::string& v) { rep_opt.lambda0 = std::stod(v); };
        setters["xi"] = [&](const std::string& v) { rep_opt.xi = std::stod(v); };
        setters["iters"] = [&](const std::string& v) { rep_opt.iters = std::stoi(v); };
        setters["seed"] = [&](const std::string& v) { rep_opt.seed = std::stoull(v); };
      } else if (!args.empty() && args[0] == "denoise") {
        setters["sigma"] = [&](const std::string& v) { den_opt.sigma = std::stod(v); };
        setters["n"] = [&](const std::string& v) { den_opt.n = std::stoll(v); };
        setters["lambda0"] = [&](const std::string& v) { den_opt.lambda0 = std::stod(v); };
        setters["c"] = [&](const std::string& v) { den_opt.c = std::stod(v); };
        setters["outer"] = [&](const std::string& v) { den_opt.outer = std::stoi(v); };
        setters["train"] = [&](const std::string& v) { den_opt.train = std::stoll(v); };
        setters["learn-iters"] = [&](const std::string& v) { den_opt.learn_iters = std::stoi(v); };
        setters["tau-coeff"] = [&](const std::string& v) { den_opt.tau_coeff = std::stod(v); };
        setters["s-init"] = [&](const std::string& v) { den_opt.s_init = std::stoll(v); };
        setters["xi"] = [&](const std::string& v) { den_opt.xi = std::stod(v); };
        setters["seed"] = [&](const std::string& v) { den_opt.seed = std::stoull(v); };
      }
      apply_config_file(*c, setters);
    }

    app.parse(argc, argv);

    if (learn_cmd->parsed()) {
      if (learn_opt.matrix_path.empty() == learn_opt.image_path.empty())
        throw std::invalid_argument("learn needs exactly one of --matrix or --image");
      if (eta_opt->count() > 0) learn_opt.penalized = true;
      else if (s_opt->count() > 0) learn_opt.penalized = false;
      if (learn_opt.penalized && !(learn_opt.eta > 0.0))
        throw std::invalid_argument("invalid threshold");
      return run_learn(learn_opt);
    }
    if (rep_cmd->parsed()) return run_represent(rep_opt);
    if (den_cmd->parsed()) {
      if (sigma_opt->count() == 0 && !(den_opt.sigma > 0.0))
        throw std::invalid_argument("denoise requires --sigma");
      return run_denoise(den_opt);
    }
    if (met_cmd->parsed()) return run_metrics(met_opt);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
