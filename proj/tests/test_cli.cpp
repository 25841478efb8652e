#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nkg/cli.hpp"
#include "nkg/hmrf.hpp"
#include "nkg/image_io.hpp"
#include "nkg/random.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "nkg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = nkg::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "nkg_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

double field(const std::string& line, const std::string& key) {
  const auto pos = line.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(line.substr(pos + key.size() + 1));
}

fs::path write_block(const std::string& name, double m, std::size_t n, std::uint64_t seed) {
  const auto path = scratch(name);
  const auto r = invoke({"sample", "--m", std::to_string(m), "--n", std::to_string(n), "--seed", std::to_string(seed),
                         "--out", path.string()});
  REQUIRE(r.code == 0);
  return path;
}

}  // namespace

TEST_CASE("cli sample") {
  const auto a = invoke({"sample", "--m", "2", "--omega", "1", "--n", "5", "--seed", "7"});
  CHECK(a.code == 0);
  CHECK(lines(a.out).size() == 5);
  CHECK(a.out == invoke({"sample", "--m", "2", "--omega", "1", "--n", "5", "--seed", "7"}).out);
  CHECK(a.out != invoke({"sample", "--m", "2", "--omega", "1", "--n", "5", "--seed", "8"}).out);

  const auto bad = invoke({"sample", "--m", "-1", "--n", "5"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("--m") != std::string::npos);
  CHECK(invoke({"sample", "--n", "5"}).code == 2);
  CHECK(invoke({"sample", "--m", "1", "--n", "5", "--bogus"}).code == 2);

  const auto big = invoke({"sample", "--m", "1.5", "--omega", "1", "--n", "100000", "--seed", "3"});
  double sum = 0;
  for (const auto& l : lines(big.out)) sum += std::stod(l) * std::stod(l);
  CHECK(std::abs(sum / 1e5 - 1.0) < 0.02);
}

TEST_CASE("cli estimate") {
  const auto one = write_block("est_one.txt", 1.0, 150, 11);
  const auto r = invoke({"estimate", "--in", one.string()});
  REQUIRE(r.code == 0);
  const auto last = lines(r.out).back();
  CHECK(std::abs(field(last, "m_hat") - 1.0) < 0.3);
  CHECK(field(last, "blocks") == 1);

  std::vector<std::string> args{"estimate", "--method", "greenwood_durand"};
  for (int b = 0; b < 5; ++b) {
    args.push_back("--in");
    args.push_back(write_block("est_" + std::to_string(b) + ".txt", 2.0, 30, 100 + b).string());
  }
  const auto five = invoke(args);
  REQUIRE(five.code == 0);
  CHECK(field(lines(five.out).back(), "blocks") == 5);
  CHECK(field(lines(five.out).back(), "skipped") == 0);

  // Two samples twelve decades apart: Delta > 17, outside the rational fit.
  const auto wide = scratch("est_wide.txt");
  std::ofstream(wide) << "1e-12\n1\n";
  const auto gd = invoke({"estimate", "--method", "greenwood_durand", "--in", wide.string()});
  CHECK(gd.code == 1);
  CHECK(gd.err.find("OutOfRange") != std::string::npos);

  const auto flat = scratch("est_flat.txt");
  std::ofstream(flat) << "2\n2\n2\n";
  CHECK(invoke({"estimate", "--in", flat.string()}).code == 1);
  CHECK(invoke({"estimate", "--in", scratch("missing.txt").string()}).code == 1);
  CHECK(invoke({"estimate", "--in", one.string(), "--method", "nope"}).code == 2);
}

TEST_CASE("cli bench") {
  const std::vector<std::string> args{"bench", "--m-grid", "1,2", "--block-size", "20", "--num-blocks", "7",
                                      "--trials", "40", "--seed", "5"};
  const auto a = invoke(args);
  REQUIRE(a.code == 0);
  const auto rows = lines(a.out);
  REQUIRE(rows.size() == 1 + 2 * 5);
  CHECK(rows[0].rfind("m_true,estimator,", 0) == 0);
  CHECK(a.out == invoke(args).out);

  const auto cfg = scratch("bench.conf");
  std::ofstream(cfg) << "# small run\nm_grid = 4\ntrials = 10\nestimators = exact_ml, moment_based\n";
  const auto c = invoke({"bench", "--config", cfg.string(), "--trials", "12"});
  REQUIRE(c.code == 0);
  CHECK(lines(c.out).size() == 3);
  CHECK(lines(c.out)[1].rfind("4.000000000000e+00,exact_ml,", 0) == 0);

  std::ofstream(cfg) << "m_grid = 1\nnot_a_key = 3\n";
  const auto bad = invoke({"bench", "--config", cfg.string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("not_a_key") != std::string::npos);
}

TEST_CASE("cli bounds") {
  const auto r = invoke({"bounds", "--m-grid", "1", "--n", "150"});
  REQUIRE(r.code == 0);
  const auto row = lines(r.out).at(1);
  std::vector<double> v;
  std::istringstream in(row);
  for (std::string cell; std::getline(in, cell, ',');) v.push_back(std::stod(cell));
  REQUIRE(v.size() == 5);
  CHECK(v[1] == doctest::Approx(0.0103369740).epsilon(1e-8));
  CHECK(v[2] == doctest::Approx(0.0293154620).epsilon(1e-8));

  const auto doubled = lines(invoke({"bounds", "--m-grid", "1", "--n", "300"}).out).at(1);
  CHECK(std::stod(doubled.substr(doubled.find(',') + 1)) == doctest::Approx(v[1] / 2).epsilon(1e-12));
  CHECK(invoke({"bounds"}).code == 2);
  CHECK(invoke({"bounds", "--m-grid", "0"}).code == 2);
}

TEST_CASE("cli segment") {
  const std::size_t w = 48, h = 40;
  const auto left = nkg::sample(nkg::NakagamiParams::from_omega(1.0, 1.0), w * h, nkg::derive_seed(9, 1));
  const auto right = nkg::sample(nkg::NakagamiParams::from_omega(8.0, 1.0), w * h, nkg::derive_seed(9, 2));
  // Scale into 8 bits; quantisation is coarse but keeps both regions distinct.
  std::vector<double> px(w * h);
  std::vector<int> truth(w * h);
  for (std::size_t i = 0; i < w * h; ++i) {
    truth[i] = i % w >= w / 2;
    px[i] = std::min(255.0, std::round(80.0 * (truth[i] ? right[i] : left[i])));
  }
  const auto in = scratch("seg_in.pgm");
  nkg::io::write_pgm(in, nkg::hmrf::ImageGrid(w, h, px));
  const auto before = slurp(in);

  const auto labels = scratch("seg_labels.pgm");
  const auto trace = scratch("seg_trace.csv");
  const std::vector<std::string> args{"segment", "--in", in.string(), "--k", "2", "--seed", "1",
                                      "--out-labels", labels.string(), "--out-trace", trace.string()};
  const auto r = invoke(args);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("energy=") != std::string::npos);
  CHECK(slurp(in) == before);

  const auto got = nkg::io::read_pgm(labels);
  std::vector<int> pred(got.size());
  for (std::size_t i = 0; i < got.size(); ++i) pred[i] = got.pixels[i] > 0;
  CHECK(nkg::hmrf::pixel_accuracy({w, h, pred}, {w, h, truth}, 2) >= 0.90);

  auto label_txt = labels;
  label_txt.replace_extension(".txt");
  CHECK(fs::exists(label_txt));

  const auto rows = lines(slurp(trace));
  CHECK(rows.at(0) == "iteration,phase,energy");
  double prev = 0;
  std::string prev_phase;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto p1 = rows[i].find(','), p2 = rows[i].rfind(',');
    const std::string phase = rows[i].substr(p1 + 1, p2 - p1 - 1);
    const double e = std::stod(rows[i].substr(p2 + 1));
    if (phase == "icm" && i > 1) CHECK(e <= prev + 1e-6 * std::abs(prev));
    prev = e;
    prev_phase = phase;
  }

  const auto labels_txt_a = slurp(label_txt);
  REQUIRE(invoke(args).code == 0);
  CHECK(slurp(label_txt) == labels_txt_a);

  CHECK(invoke({"segment", "--in", in.string(), "--k", "1", "--out-labels", labels.string()}).code == 2);
  CHECK(invoke({"segment", "--in", scratch("nothing.pgm").string(), "--out-labels", labels.string()}).code == 1);
}
