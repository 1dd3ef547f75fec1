// Integration tests that drive the installed binary. The CLI path arrives as
// the first plain argv entry (wired in CMakeLists via $<TARGET_FILE:...>).

#include <gtest/gtest.h>

#include <xform/csv.hpp>
#include <xform/pgm.hpp>
#include <xform/random.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_cli_path;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string command = g_cli_path + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  RunResult result;
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "xform_cli_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Strips the last CSV field (elapsed_ms) from every row.
std::string drop_last_field(const std::string& csv) {
  std::ostringstream out;
  for (const std::string& line : lines_of(csv)) {
    const auto pos = line.rfind(',');
    out << line.substr(0, pos) << '\n';
  }
  return out.str();
}

// Drops timestamp and path lines from a manifest, keeping config and results.
std::string manifest_payload(const std::string& manifest) {
  std::ostringstream out;
  for (const std::string& line : lines_of(manifest)) {
    if (line.rfind("start_time", 0) == 0 || line.rfind("end_time", 0) == 0 ||
        line.rfind("output.", 0) == 0 || line.rfind("input", 0) == 0)
      continue;
    out << line << '\n';
  }
  return out.str();
}

xform::Matrix test_image(xform::Index size) {
  xform::Matrix img(size, size);
  for (xform::Index r = 0; r < size; ++r)
    for (xform::Index c = 0; c < size; ++c) {
      const double rr = static_cast<double>(r), cc = static_cast<double>(c);
      double v = 120.0 + 50.0 * std::sin(rr * 0.19) * std::cos(cc * 0.23) + 0.3 * rr;
      if (r > size / 2 && c > size / 3) v += 35.0;
      img(r, c) = std::min(255.0, std::max(0.0, v));
    }
  return img;
}

}  // namespace

TEST(Cli, LearnWritesAllOutputsWithStableTraceSchema) {
  const auto dir = fresh_dir("learn_basic");
  const auto img = dir / "img.pgm";
  xform::atomic_write_file(img.string(), xform::pgm_binary(test_image(32)));
  const std::string prefix = (dir / "run").string();
  const RunResult run = run_cli("learn --image " + img.string() +
                                " --patch 8 --stride 8 --s 3 --iters 12 --init dct --out " + prefix);
  ASSERT_EQ(run.exit_code, 0) << run.output;
  for (const char* suffix : {"_transform.csv", "_trace.csv", "_codes_summary.csv", "_manifest.txt"})
    EXPECT_TRUE(std::filesystem::exists(prefix + suffix)) << suffix;
  const auto trace = lines_of(xform::read_file(prefix + "_trace.csv"));
  ASSERT_EQ(trace.size(), 13u);  // header + 12 iterations
  EXPECT_EQ(trace[0],
            "iter,objective,sparsification_error,condition_number,frobenius_norm,elapsed_ms");
  const xform::Matrix w = xform::read_matrix_csv(prefix + "_transform.csv");
  EXPECT_EQ(w.rows(), 64);
  EXPECT_EQ(w.cols(), 64);
}

TEST(Cli, LearnDeterministicUnderSeed) {
  const auto dir = fresh_dir("learn_seed");
  const auto img = dir / "img.pgm";
  xform::atomic_write_file(img.string(), xform::pgm_binary(test_image(32)));
  std::filesystem::create_directories(dir / "a");
  std::filesystem::create_directories(dir / "b");
  const std::string base = "learn --image " + img.string() +
                           " --patch 4 --stride 4 --s 3 --iters 15 --init random --seed 7 --out ";
  const std::string p1 = (dir / "a" / "run").string(), p2 = (dir / "b" / "run").string();
  ASSERT_EQ(run_cli(base + p1).exit_code, 0);
  ASSERT_EQ(run_cli(base + p2).exit_code, 0);
  EXPECT_EQ(xform::read_file(p1 + "_transform.csv"), xform::read_file(p2 + "_transform.csv"));
  EXPECT_EQ(xform::read_file(p1 + "_codes_summary.csv"),
            xform::read_file(p2 + "_codes_summary.csv"));
  EXPECT_EQ(drop_last_field(xform::read_file(p1 + "_trace.csv")),
            drop_last_field(xform::read_file(p2 + "_trace.csv")));
  EXPECT_EQ(manifest_payload(xform::read_file(p1 + "_manifest.txt")),
            manifest_payload(xform::read_file(p2 + "_manifest.txt")));
}

TEST(Cli, LearnZeroSparsityIsValid) {
  const auto dir = fresh_dir("learn_s0");
  xform::Rng rng(33);
  const auto y_path = dir / "y.csv";
  xform::atomic_write_file(y_path.string(), xform::matrix_to_csv(rng.gaussian_matrix(4, 12, 1.0)));
  const std::string prefix = (dir / "run").string();
  const RunResult run = run_cli("learn --matrix " + y_path.string() + " --s 0 --iters 5 --init identity --out " + prefix);
  ASSERT_EQ(run.exit_code, 0) << run.output;
  const std::string summary = xform::read_file(prefix + "_codes_summary.csv");
  EXPECT_NE(summary.find("constrained,0,0,0"), std::string::npos) << summary;
}

TEST(Cli, LearnRejectsBadInputs) {
  EXPECT_NE(run_cli("learn --matrix /nonexistent.csv --out /tmp/x").exit_code, 0);
  EXPECT_NE(run_cli("learn --out /tmp/x").exit_code, 0);  // no input at all
}

TEST(Cli, ConfigFilePrecedence) {
  const auto dir = fresh_dir("config");
  xform::Rng rng(35);
  const auto y_path = dir / "y.csv";
  xform::atomic_write_file(y_path.string(), xform::matrix_to_csv(rng.gaussian_matrix(4, 20, 1.0)));
  const auto cfg_path = dir / "preset.cfg";
  xform::atomic_write_file(cfg_path.string(), "s = 2\nlambda0 = 0.5\niters = 6\n");

  // Config file applies over defaults.
  const std::string p1 = (dir / "fromcfg").string();
  ASSERT_EQ(run_cli("learn --matrix " + y_path.string() + " --init identity --config " +
                    cfg_path.string() + " --out " + p1)
                .exit_code,
            0);
  const std::string m1 = xform::read_file(p1 + "_manifest.txt");
  EXPECT_NE(m1.find("config.lambda0 = 0.5"), std::string::npos);
  EXPECT_NE(m1.find("config.s = 2"), std::string::npos);
  EXPECT_NE(m1.find("config.iterations = 6"), std::string::npos);

  // Explicit flags win over the config file.
  const std::string p2 = (dir / "flagwins").string();
  ASSERT_EQ(run_cli("learn --matrix " + y_path.string() + " --init identity --config " +
                    cfg_path.string() + " --lambda0 0.25 --out " + p2)
                .exit_code,
            0);
  const std::string m2 = xform::read_file(p2 + "_manifest.txt");
  EXPECT_NE(m2.find("config.lambda0 = 0.25"), std::string::npos);
  EXPECT_NE(m2.find("config.s = 2"), std::string::npos);
}

TEST(Cli, DenoiseRequiresSigma) {
  const auto dir = fresh_dir("denoise_nosigma");
  const auto img = dir / "img.pgm";
  xform::atomic_write_file(img.string(), xform::pgm_binary(test_image(24)));
  const RunResult run = run_cli("denoise --in " + img.string());
  EXPECT_NE(run.exit_code, 0);
  EXPECT_NE(run.output.find("sigma"), std::string::npos);
}

TEST(Cli, DenoiseDeterministicUnderSeed) {
  const auto dir = fresh_dir("denoise_seed");
  const auto img = dir / "img.pgm";
  xform::atomic_write_file(img.string(), xform::pgm_binary(test_image(24)));
  const std::string base = "denoise --in " + img.string() +
                           " --sigma 8 --n 9 --outer 2 --train 150 --learn-iters 4 --s-init 2 "
                           "--seed 11 --out ";
  const std::string o1 = (dir / "a.pgm").string(), o2 = (dir / "b.pgm").string();
  const RunResult r1 = run_cli(base + o1);
  ASSERT_EQ(r1.exit_code, 0) << r1.output;
  ASSERT_EQ(run_cli(base + o2).exit_code, 0);
  EXPECT_EQ(xform::read_file(o1), xform::read_file(o2));
  EXPECT_TRUE(std::filesystem::exists(o1 + ".report.csv"));
  EXPECT_TRUE(std::filesystem::exists(o1 + ".manifest"));
}

TEST(Cli, DenoisePresetTable1InManifest) {
  const auto dir = fresh_dir("denoise_preset");
  const auto img = dir / "img.pgm";
  xform::atomic_write_file(img.string(), xform::pgm_binary(test_image(16)));
  // Preset values land in the manifest; flags still override (outer=1 here to
  // keep the run tiny, patch dim lowered likewise).
  const std::string out = (dir / "d.pgm").string();
  const RunResult run = run_cli("denoise --in " + img.string() +
                                " --sigma 5 --preset table1 --n 9 --outer 1 --train 50 "
                                "--learn-iters 2 --s-init 2 --out " + out);
  ASSERT_EQ(run.exit_code, 0) << run.output;
  const std::string manifest = xform::read_file(out + ".manifest");
  EXPECT_NE(manifest.find("config.lambda0 = 0.031"), std::string::npos);
  EXPECT_NE(manifest.find("config.C = 1.04"), std::string::npos);
  EXPECT_NE(manifest.find("config.n = 9"), std::string::npos);  // flag overrode preset
}

TEST(Cli, MetricsIdentityInputsGiveZeroNse) {
  const auto dir = fresh_dir("metrics_identity");
  xform::Rng rng(37);
  const xform::Matrix y = rng.gaussian_matrix(4, 10, 1.0);
  const auto w_path = dir / "w.csv";
  const auto y_path = dir / "y.csv";
  const auto x_path = dir / "x.csv";
  xform::atomic_write_file(w_path.string(), xform::matrix_to_csv(xform::Matrix::Identity(4, 4)));
  xform::atomic_write_file(y_path.string(), xform::matrix_to_csv(y));
  xform::atomic_write_file(x_path.string(), xform::matrix_to_csv(y));  // X = W Y exactly
  const RunResult run = run_cli("metrics --w " + w_path.string() + " --y " + y_path.string() +
                                " --x " + x_path.string());
  ASSERT_EQ(run.exit_code, 0) << run.output;
  const auto rows = lines_of(run.output);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0], "sparsification_error,nse,recovery_psnr_db,condition_number,frobenius_norm");
  EXPECT_EQ(rows[1].substr(0, 4), "0,0,");
}

TEST(Cli, MetricsMismatchedDimsFail) {
  const auto dir = fresh_dir("metrics_mismatch");
  xform::Rng rng(39);
  const auto w_path = dir / "w.csv";
  const auto y_path = dir / "y.csv";
  const auto x_path = dir / "x.csv";
  xform::atomic_write_file(w_path.string(), xform::matrix_to_csv(xform::Matrix::Identity(4, 4)));
  xform::atomic_write_file(y_path.string(), xform::matrix_to_csv(rng.gaussian_matrix(4, 10, 1.0)));
  xform::atomic_write_file(x_path.string(), xform::matrix_to_csv(rng.gaussian_matrix(3, 10, 1.0)));
  EXPECT_NE(run_cli("metrics --w " + w_path.string() + " --y " + y_path.string() + " --x " +
                    x_path.string())
                .exit_code,
            0);
}

TEST(Cli, MetricsMatchesLibraryValues) {
  const auto dir = fresh_dir("metrics_library");
  xform::Rng rng(41);
  const xform::Matrix w = rng.gaussian_matrix(4, 4, 1.0) + 2.0 * xform::Matrix::Identity(4, 4);
  const xform::Matrix y = rng.gaussian_matrix(4, 8, 1.0);
  const xform::Matrix x = rng.gaussian_matrix(4, 8, 1.0);
  const auto w_path = dir / "w.csv";
  const auto y_path = dir / "y.csv";
  const auto x_path = dir / "x.csv";
  xform::atomic_write_file(w_path.string(), xform::matrix_to_csv(w));
  xform::atomic_write_file(y_path.string(), xform::matrix_to_csv(y));
  xform::atomic_write_file(x_path.string(), xform::matrix_to_csv(x));
  const RunResult run = run_cli("metrics --w " + w_path.string() + " --y " + y_path.string() +
                                " --x " + x_path.string());
  ASSERT_EQ(run.exit_code, 0);
  const auto rows = lines_of(run.output);
  ASSERT_GE(rows.size(), 2u);
  std::istringstream row(rows[1]);
  std::string cell;
  std::getline(row, cell, ',');
  EXPECT_NEAR(std::stod(cell), (w * y - x).squaredNorm(), 1e-9 * (w * y - x).squaredNorm());
}

TEST(Cli, RepresentEmitsOneRowPerSize) {
  const auto dir = fresh_dir("represent");
  const auto img = dir / "img.pgm";
  xform::atomic_write_file(img.string(), xform::pgm_binary(test_image(32)));
  const RunResult run = run_cli("represent --image " + img.string() + " --sizes 16,64 --iters 10");
  ASSERT_EQ(run.exit_code, 0) << run.output;
  const auto rows = lines_of(run.output);
  ASSERT_EQ(rows.size(), 3u);  // header + one row per patch size
  EXPECT_EQ(rows[0], "patch_size,nse_learned,nse_dct,rpsnr_learned,rpsnr_dct,kappa,seconds");
  EXPECT_EQ(rows[1].substr(0, 3), "16,");
  EXPECT_EQ(rows[2].substr(0, 3), "64,");
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  if (argc > 1) g_cli_path = argv[1];
  if (g_cli_path.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-xform-binary>\n");
    return 2;
  }
  return RUN_ALL_TESTS();
}
