// End-to-end tests of the fscomplex binary: subcommand contracts, exit
// codes, and frozen golden outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stderr_text;
};

// Runs the CLI with the scratch directory as cwd so relative paths (and
// therefore config hashes) are stable.
RunResult run_cli(const fs::path& cwd, const std::string& args) {
  const fs::path err = cwd / "stderr.log";
  const std::string cmd = "cd '" + cwd.string() + "' && '" + FSCOMPLEX_PATH + "' " +
                          args + " 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  result.stderr_text = ss.str();
  return result;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& content) {
  std::vector<std::string> lines;
  std::stringstream ss(content);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, delim)) out.push_back(field);
  return out;
}

class Scratch {
 public:
  Scratch() {
    dir_ = fs::temp_directory_path() /
           ("fs_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

}  // namespace

TEST_CASE("summary: seven synthetic channels make a seven-row table") {
  Scratch scratch;
  std::string channels;
  for (int k = 1; k <= 7; ++k) {
    const std::string name = "an" + std::to_string(k);
    REQUIRE(run_cli(scratch.dir(), "synthetic --dist gaussian --n 2000 --seed " +
                                       std::to_string(100 + k) + " -o " + name + ".csv")
                .exit_code == 0);
    channels += " --channel " + name + "=" + name + ".csv";
  }
  const auto run = run_cli(scratch.dir(), "summary" + channels + " -o summary.csv");
  CHECK(run.exit_code == 0);
  const auto lines = data_lines(read_file(scratch.dir() / "summary.csv"));
  REQUIRE(lines.size() == 8);  // header + 7 channels
  CHECK(lines[0] == "channel,min,q1,median,mean,q3,max,count");
  CHECK(lines[1].substr(0, 4) == "an1,");
  CHECK(lines[7].substr(0, 4) == "an7,");
}

TEST_CASE("summary: an unreadable channel fails the run and is named") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --n 1000 --seed 1 -o ok.csv")
              .exit_code == 0);
  const auto run = run_cli(
      scratch.dir(), "summary --channel good=ok.csv --channel broken=missing.csv");
  CHECK(run.exit_code != 0);
  CHECK(run.stderr_text.find("broken") != std::string::npos);
}

TEST_CASE("analyze: day rows, series rows, and gap reporting") {
  Scratch scratch;
  // Two channels, three full days each, built from one six-day file split
  // by a one-day hole in the middle for the second channel.
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --days 3 --seed 7 "
                  "--start-epoch 1483228800 -o c1.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist laplace --days 3 --seed 8 "
                  "--start-epoch 1483228800 -o c2.csv")
              .exit_code == 0);
  const auto run = run_cli(scratch.dir(),
                           "analyze --channel c1=c1.csv --channel c2=c2.csv "
                           "-o metrics.csv");
  CHECK(run.exit_code == 0);
  const auto lines = data_lines(read_file(scratch.dir() / "metrics.csv"));
  REQUIRE(lines.size() == 1 + 6 + 2);  // header + 6 day rows + 2 series rows
  CHECK(lines[0] ==
        "channel,kind,window_start,window_end,sample_count,bandwidth,"
        "bandwidth_method,H,N,I,C,status");
  int day_rows = 0, series_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    day_rows += lines[i].find(",day,") != std::string::npos;
    series_rows += lines[i].find(",series,") != std::string::npos;
    CHECK(lines[i].find(",ok") != std::string::npos);
  }
  CHECK(day_rows == 6);
  CHECK(series_rows == 2);

  // The Gaussian channel's whole-series complexity sits near 1.
  for (const auto& line : lines) {
    if (line.rfind("c1,series,", 0) != 0) continue;
    const auto fields = split(line, ',');
    REQUIRE(fields.size() == 12);
    const double c = std::strtod(fields[10].c_str(), nullptr);
    CHECK(c >= 0.95);
    CHECK(c <= 1.10);
  }
}

TEST_CASE("analyze rejects duplicate channel ids and paths") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --n 2000 --seed 1 -o a.csv")
              .exit_code == 0);
  const auto dup_id =
      run_cli(scratch.dir(), "summary --channel x=a.csv --channel x=a.csv");
  CHECK(dup_id.exit_code != 0);
  CHECK(dup_id.stderr_text.find("duplicate") != std::string::npos);
}

TEST_CASE("analyze: a one-day gap produces no row and a log note") {
  Scratch scratch;
  // Build a channel with days 1 and 3 present, day 2 missing.
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --days 1 --seed 3 "
                  "--start-epoch 0 -o day1.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --days 1 --seed 4 "
                  "--start-epoch 172800 -o day3.csv")
              .exit_code == 0);
  std::ofstream merged(scratch.dir() / "gappy.csv");
  merged << "t,v\n";
  for (const char* part : {"day1.csv", "day3.csv"}) {
    const auto content = read_file(scratch.dir() / part);
    for (const auto& line : data_lines(content)) {
      if (line == "t,v") continue;
      merged << line << "\n";
    }
  }
  merged.close();
  const auto run =
      run_cli(scratch.dir(), "analyze --channel g=gappy.csv -o metrics.csv");
  CHECK(run.exit_code == 0);
  const auto lines = data_lines(read_file(scratch.dir() / "metrics.csv"));
  CHECK(lines.size() == 1 + 2 + 1);  // two day rows + series row
  CHECK(run.stderr_text.find("gap") != std::string::npos);
}

TEST_CASE("analyze: short windows are flagged insufficient, run continues") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --n 86460 --seed 5 "
                  "--start-epoch -60 -o c.csv")
              .exit_code == 0);
  const auto run = run_cli(scratch.dir(), "analyze --channel c=c.csv -o m.csv");
  CHECK(run.exit_code == 0);
  const auto lines = data_lines(read_file(scratch.dir() / "m.csv"));
  REQUIRE(lines.size() == 1 + 2 + 1);
  CHECK(lines[1].find(",insufficient") != std::string::npos);
  CHECK(lines[2].find(",ok") != std::string::npos);
}

TEST_CASE("correlate: too few pairs yields a status row, not a crash") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --days 2 --seed 6 "
                  "--start-epoch 0 -o short.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(), "analyze --channel s=short.csv -o metrics.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --days 2 --seed 16 "
                  "--start-epoch 0 -o cov.csv")
              .exit_code == 0);
  const auto run = run_cli(scratch.dir(),
                           "correlate --metrics metrics.csv --covariate p=cov.csv "
                           "-o corr.csv");
  CHECK(run.exit_code == 0);
  const auto lines = data_lines(read_file(scratch.dir() / "corr.csv"));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "channel,r,p_value,R,seed,n_pairs,status");
  CHECK(lines[1].find("error:") != std::string::npos);
}

TEST_CASE("correlate: both daily moments produce report rows") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --days 4 --seed 21 "
                  "--start-epoch 0 -o ch.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(), "analyze --channel s=ch.csv -o metrics.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist laplace --days 4 --seed 22 "
                  "--start-epoch 0 -o cov.csv")
              .exit_code == 0);
  for (const char* moment : {"variance", "mean"}) {
    const auto run = run_cli(scratch.dir(),
                             std::string("correlate --metrics metrics.csv "
                                         "--covariate p=cov.csv --permutations 99 "
                                         "--seed 5 --moment ") +
                                 moment + " -o corr.csv");
    CHECK(run.exit_code == 0);
    const auto lines = data_lines(read_file(scratch.dir() / "corr.csv"));
    REQUIRE(lines.size() == 2);
    const auto fields = split(lines[1], ',');
    REQUIRE(fields.size() == 7);
    CHECK(fields[0] == "s");
    CHECK(fields[6] == "ok");
    CHECK(fields[5] == "4");  // n_pairs
    const double p = std::strtod(fields[2].c_str(), nullptr);
    CHECK(p >= 1.0 / 100.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("config file supplies defaults, flags override") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --n 3000 --seed 31 -o c.csv")
              .exit_code == 0);
  std::ofstream cfg(scratch.dir() / "study.ini");
  cfg << "[density]\nbins=10\n";
  cfg.close();
  REQUIRE(run_cli(scratch.dir(),
                  "--config study.ini density --channel c=c.csv -o d.csv")
              .exit_code == 0);
  CHECK(data_lines(read_file(scratch.dir() / "d.csv")).size() == 11);
  REQUIRE(run_cli(scratch.dir(),
                  "--config study.ini density --channel c=c.csv --bins 12 -o d.csv")
              .exit_code == 0);
  CHECK(data_lines(read_file(scratch.dir() / "d.csv")).size() == 13);
}

TEST_CASE("density: bin count and normalization") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --n 20000 --seed 9 -o c.csv")
              .exit_code == 0);
  const auto run =
      run_cli(scratch.dir(), "density --channel c=c.csv --bins 50 -o density.csv");
  CHECK(run.exit_code == 0);
  const auto lines = data_lines(read_file(scratch.dir() / "density.csv"));
  REQUIRE(lines.size() == 51);
  CHECK(lines[0] == "bin_center,hist_density,kde_density");

  double area = 0.0, prev_center = 0.0, width = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string c, h, k;
    std::getline(ss, c, ',');
    std::getline(ss, h, ',');
    std::getline(ss, k, ',');
    const double center = std::strtod(c.c_str(), nullptr);
    if (i >= 2) width = center - prev_center;
    prev_center = center;
    area += std::strtod(h.c_str(), nullptr);
  }
  area *= width;
  // The exact-double area is 1 +/- 1e-9 (checked at the API layer); the
  // file carries 6 significant digits, which limits this recomputation.
  CHECK(area == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("outputs embed provenance") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --n 2000 --seed 2 -o c.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(),
                  "summary --channel c=c.csv --bandwidth plugin --seed 99 -o s.csv")
              .exit_code == 0);
  const auto content = read_file(scratch.dir() / "s.csv");
  CHECK(content.find("# tool=fscomplex version=") == 0);
  CHECK(content.find("config_hash=") != std::string::npos);
  CHECK(content.find("bandwidth=plugin") != std::string::npos);
  CHECK(content.find("seed=99") != std::string::npos);
}

TEST_CASE("golden file: summary output is byte-stable") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist gaussian --n 20000 --seed 101 "
                  "--start-epoch 1482883200 -o an1.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist mixture --mean1 3 --n 20000 --seed 102 "
                  "--start-epoch 1482883200 -o an2.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(),
                  "summary --channel an1=an1.csv --channel an2=an2.csv -o summary.csv")
              .exit_code == 0);
  const std::string golden = read_file(fs::path(FS_TEST_DATA_DIR) / "summary.golden.csv");
  REQUIRE_FALSE(golden.empty());
  CHECK(read_file(scratch.dir() / "summary.csv") == golden);
}

TEST_CASE("golden file: density output is byte-stable") {
  Scratch scratch;
  REQUIRE(run_cli(scratch.dir(),
                  "synthetic --dist laplace --n 20000 --seed 103 "
                  "--start-epoch 1482883200 -o an1.csv")
              .exit_code == 0);
  REQUIRE(run_cli(scratch.dir(),
                  "density --channel an1=an1.csv --bins 64 -o density.csv")
              .exit_code == 0);
  const std::string golden = read_file(fs::path(FS_TEST_DATA_DIR) / "density.golden.csv");
  REQUIRE_FALSE(golden.empty());
  CHECK(read_file(scratch.dir() / "density.csv") == golden);
}
