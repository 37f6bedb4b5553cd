// End-to-end checks of the command-line tool. ctest passes the binary path
// as argv[1]; every invocation goes through std::system.

#undef NDEBUG
#include <cassert>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_bin;
fs::path g_dir;

int run(const std::string& args) {
  const std::string cmd = g_bin + " " + args + " 2>" +
                          (g_dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  assert(argc >= 2);
  g_bin = argv[1];
  g_dir = fs::temp_directory_path() / "streamad_cli_test";
  fs::remove_all(g_dir);
  fs::create_directories(g_dir);
  const auto p = [&](const char* name) { return (g_dir / name).string(); };

  // synth determinism: same seed and output name -> identical bytes
  fs::create_directories(g_dir / "run1");
  fs::create_directories(g_dir / "run2");
  assert(run("synth --generator cycle --seed 5 --records 600 --output " +
             (g_dir / "run1" / "s.csv").string() + " --labels " +
             (g_dir / "run1" / "s.json").string()) == 0);
  assert(run("synth --generator cycle --seed 5 --records 600 --output " +
             (g_dir / "run2" / "s.csv").string() + " --labels " +
             (g_dir / "run2" / "s.json").string()) == 0);
  assert(slurp(g_dir / "run1" / "s.csv") == slurp(g_dir / "run2" / "s.csv"));
  assert(slurp(g_dir / "run1" / "s.json") == slurp(g_dir / "run2" / "s.json"));
  fs::copy_file(g_dir / "run1" / "s.csv", p("a.csv"));
  assert(run("synth --generator bogus --output " + p("x.csv")) == 2);

  // detect: valid file, row count, determinism
  assert(run("detect --input " + p("a.csv") + " --output " + p("out1.csv")) ==
         0);
  assert(run("detect --input " + p("a.csv") + " --output " + p("out2.csv")) ==
         0);
  const std::string out1 = slurp(p("out1.csv"));
  assert(out1 == slurp(p("out2.csv")));
  size_t rows = 0;
  for (char c : out1) rows += c == '\n' ? 1 : 0;
  assert(rows == 601);  // header + one row per record

  // missing input -> runtime failure
  assert(run("detect --input " + p("missing.csv") + " --output " +
             p("out3.csv")) == 1);

  // bad config -> usage failure
  write(p("bad.json"), "{\"likelihood\": {\"epsilon\": 5}}");
  assert(run("detect --input " + p("a.csv") + " --output " + p("out4.csv") +
             " --config " + p("bad.json")) == 2);
  write(p("notjson.json"), "][");
  assert(run("detect --input " + p("a.csv") + " --output " + p("out5.csv") +
             " --config " + p("notjson.json")) == 2);

  // a loose epsilon flags more points on a noisy stream than the default,
  // and the chosen epsilon echoes into the summary line
  assert(run("synth --generator noisy_spikes --seed 2 --records 4000 "
             "--output " + p("noisy.csv")) == 0);
  assert(run("detect --input " + p("noisy.csv") + " --output " +
             p("strict.csv") + " --epsilon 1e-5") == 0);
  const std::string strict_err = slurp(p("stderr.txt"));
  assert(strict_err.find("epsilon=1e-05") != std::string::npos);
  assert(run("detect --input " + p("noisy.csv") + " --output " +
             p("loose.csv") + " --epsilon 0.2") == 0);
  auto count_flags = [&](const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    size_t flags = 0;
    while (std::getline(in, line)) {
      flags += line.size() > 2 && line.compare(line.size() - 2, 2, ",1") == 0;
    }
    return flags;
  };
  const size_t strict_flags = count_flags(p("strict.csv"));
  const size_t loose_flags = count_flags(p("loose.csv"));
  assert(loose_flags > strict_flags);

  // multi over two copies of a stream
  assert(run("multi --input " + p("a.csv") + " --input " + p("a.csv") +
             " --output " + p("multi.csv")) == 0);
  assert(slurp(p("multi.csv")).find("q_0,q_1,smoothed_0,smoothed_1") !=
         std::string::npos);

  // bench over a tiny corpus; missing labels is a usage error
  fs::create_directories(g_dir / "corpus");
  assert(run("synth --generator level_shift --seed 4 --records 1500 --output " +
             (g_dir / "corpus" / "level_shift.csv").string() + " --labels " +
             p("labels.json")) == 0);
  assert(run("bench --corpus " + (g_dir / "corpus").string() + " --labels " +
             p("nolabels.json")) == 2);
  assert(run("bench --corpus " + (g_dir / "corpus").string() + " --labels " +
             p("labels.json") + " --profile all --output " +
             p("report.csv")) == 0);
  const std::string report = slurp(p("report.csv"));
  assert(report.find("standard,htm,") != std::string::npos);
  assert(report.find("reward_low_fn,random,") != std::string::npos);

  std::puts("cli tests passed");
  return 0;
}
