#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#ifndef CASCADE_LAB_BIN
#error "CASCADE_LAB_BIN must name the cascade-lab executable"
#endif

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(CASCADE_LAB_BIN) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cascade_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::uint64_t, std::uint64_t> rows(const std::string& tsv) {
  std::map<std::uint64_t, std::uint64_t> out;
  std::istringstream in(tsv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::uint64_t a = 0, b = 0;
    std::istringstream(line) >> a >> b;
    out[a] = b;
  }
  return out;
}

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("nonsense").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("cli: ingest") {
  TempDir dir;
  // A retweets B, C mentions A and B, A retweets B again: edges B->A, A->C, B->C.
  write_file(dir / "events.tsv",
             "10\tA\tB\t\n"
             "20\tC\tA,B\t\n"
             "30\tA\tB\t\n"
             "40\tB\t\t\n");
  const auto r = run("ingest --events " + dir / "events.tsv" + " --graph-out " + dir / "g.cscg" + " --popularity-out " +
                     dir / "pop.tsv");
  CHECK(r.code == 0);
  CHECK(r.out.find("edges=3") != std::string::npos);
  CHECK(r.out.find("nodes=3") != std::string::npos);
  CHECK(fs::exists(dir / "g.cscg"));
  CHECK(slurp(dir / "g.cscg.ids.tsv") == "A\t0\nB\t1\nC\t2\n");
  CHECK(slurp(dir / "pop.tsv").empty());

  const auto missing = run("ingest --events " + dir / "nope.tsv" + " --graph-out " + dir / "g.cscg");
  CHECK(missing.code == 2);
  CHECK(missing.out.find("nope.tsv") != std::string::npos);

  write_file(dir / "bad.tsv", "10\tA\tB\t\nnot a number\tA\tB\t\n");
  CHECK(run("ingest --strict --events " + dir / "bad.tsv" + " --graph-out " + dir / "g2.cscg").code == 2);
  CHECK(run("ingest --events " + dir / "bad.tsv" + " --graph-out " + dir / "g2.cscg").code == 0);
}

TEST_CASE("cli: simulate") {
  TempDir dir;
  REQUIRE(run("graph --star 10 --out " + dir / "star.cscg").code == 0);
  const std::string g = " --graph " + dir / "star.cscg";

  SUBCASE("alpha 0 gives only singletons") {
    const auto r = run("simulate" + g + " --model alpha-k --alpha 0 --runs 500 --seed 1 --hist-out " + dir / "h.tsv");
    CHECK(r.code == 0);
    CHECK(slurp(dir / "h.tsv") == "# runs=500 truncated=0\n1\t500\n");
  }
  SUBCASE("invalid alpha is rejected") {
    CHECK(run("simulate" + g + " --alpha 1.5 --hist-out " + dir / "h.tsv").code == 2);
    CHECK_FALSE(fs::exists(dir / "h.tsv"));
  }
  SUBCASE("single runs are reproducible by seed") {
    for (int seed = 0; seed < 5; ++seed) {
      const auto s = " --model alpha --alpha 0.5 --start 0 --runs 1 --seed " + std::to_string(seed) + " --hist-out ";
      REQUIRE(run("simulate" + g + s + dir / "a.tsv").code == 0);
      REQUIRE(run("simulate" + g + s + dir / "b.tsv").code == 0);
      CHECK(slurp(dir / "a.tsv") == slurp(dir / "b.tsv"));
    }
  }
  SUBCASE("star fixture matches the binomial") {
    REQUIRE(run("simulate" + g + " --model alpha --alpha 0.3 --start 0 --runs 200000 --seed 4 --hist-out " + dir / "h.tsv")
                .code == 0);
    const auto h = rows(slurp(dir / "h.tsv"));
    double c = 1.0;
    for (unsigned k = 0; k <= 10; ++k) {
      const double pk = c * std::pow(0.3, k) * std::pow(0.7, 10 - k);
      const double got = h.count(1 + k) ? static_cast<double>(h.at(1 + k)) / 200000 : 0.0;
      CHECK(std::fabs(got - pk) < 0.005);
      c = c * (10 - k) / (k + 1);
    }
  }
  SUBCASE("output does not depend on the worker count") {
    REQUIRE(run("graph --erdos-renyi 2000 --mean-degree 2 --seed 3 --out " + dir / "er.cscg").code == 0);
    const auto base = " simulate --graph " + dir / "er.cscg" + " --model multi-exact --alpha 0.5 --lambda 0.2 --runs 20000 --seed 9";
    REQUIRE(run("--workers 1" + base + " --hist-out " + dir / "w1.tsv --table-out " + dir / "t1.tsv").code == 0);
    REQUIRE(run("--workers 4" + base + " --hist-out " + dir / "w4.tsv --table-out " + dir / "t4.tsv").code == 0);
    CHECK(slurp(dir / "w1.tsv") == slurp(dir / "w4.tsv"));
    CHECK(slurp(dir / "t1.tsv") == slurp(dir / "t4.tsv"));
  }
}

TEST_CASE("cli: table and compound") {
  TempDir dir;
  write_file(dir / "point.tsv", "3\t0\t10\n");
  auto r = run("compound --table " + dir / "point.tsv" + " --lambda 0.5 --runs 100 --hist-out " + dir / "h.tsv");
  CHECK(r.code == 0);
  CHECK(r.out.find("diverged=0") != std::string::npos);
  CHECK(slurp(dir / "h.tsv") == "# runs=100 diverged=0\n3\t100\n");

  REQUIRE(run("graph --erdos-renyi 2000 --mean-degree 2 --seed 3 --out " + dir / "er.cscg").code == 0);
  REQUIRE(run("table --graph " + dir / "er.cscg" + " --alpha 0.5 --runs 50000 --seed 1 --out " + dir / "t.tsv").code == 0);
  REQUIRE(run("compound --table " + dir / "t.tsv" + " --lambda 0 --runs 200000 --seed 2 --hist-out " + dir / "c.tsv").code == 0);
  // The table's size marginal, as a histogram.
  std::map<std::uint64_t, std::uint64_t> marginal;
  {
    std::istringstream in(slurp(dir / "t.tsv"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::uint64_t s = 0, rounds = 0, c = 0;
      std::istringstream(line) >> s >> rounds >> c;
      marginal[s] += c;
    }
  }
  std::string m;
  for (auto [s, c] : marginal) m += std::to_string(s) + '\t' + std::to_string(c) + '\n';
  write_file(dir / "m.tsv", m);
  r = run("ks --a " + dir / "c.tsv" + " --b " + dir / "m.tsv");
  CHECK(r.code == 0);
  double ks = 1;
  std::sscanf(r.out.c_str(), "ks=%lf", &ks);
  CHECK(ks < 0.01);

  write_file(dir / "empty.tsv", "");
  CHECK(run("compound --table " + dir / "empty.tsv" + " --lambda 0 --hist-out " + dir / "x.tsv").code == 1);
}

TEST_CASE("cli: ks") {
  TempDir dir;
  write_file(dir / "a.tsv", "1\t5\n3\t2\n");
  write_file(dir / "one.tsv", "1\t1\n");
  write_file(dir / "two.tsv", "2\t1\n");
  write_file(dir / "uni.tsv", "1\t1\n2\t1\n");
  write_file(dir / "empty.tsv", "# runs=0\n");
  CHECK(run("ks --a " + dir / "a.tsv" + " --b " + dir / "a.tsv").out == "ks=0.000000 at=1\n");
  CHECK(run("ks --a " + dir / "one.tsv" + " --b " + dir / "two.tsv").out == "ks=1.000000 at=1\n");
  CHECK(run("ks --a " + dir / "one.tsv" + " --b " + dir / "uni.tsv").out == "ks=0.500000 at=1\n");
  CHECK(run("ks --a " + dir / "one.tsv" + " --b " + dir / "empty.tsv").code == 1);
  CHECK(run("ks --a " + dir / "one.tsv" + " --b " + dir / "missing.tsv").code == 2);
}

TEST_CASE("cli: bucketize") {
  TempDir dir;
  write_file(dir / "h.tsv", "1\t1\n2\t1\n3\t1\n4\t1\n");
  auto r = run("bucketize --in " + dir / "h.tsv" + " --base 2 --out " + dir / "b.tsv --cdf-out " + dir / "c.tsv");
  CHECK(r.code == 0);
  CHECK(slurp(dir / "b.tsv") == "1\t2\t0.25\n2\t4\t0.5\n4\t8\t0.25\n");
  CHECK(slurp(dir / "c.tsv") == "1\t0.25\n2\t0.5\n3\t0.75\n4\t1\n");
  CHECK(run("bucketize --in " + dir / "h.tsv" + " --base 1 --out " + dir / "b2.tsv").code == 2);
  CHECK(run("bucketize --in " + dir / "h.tsv" + " --base 0.5 --out " + dir / "b2.tsv").code == 2);
  CHECK_FALSE(fs::exists(dir / "b2.tsv"));
}

TEST_CASE("cli: fit") {
  TempDir dir;
  REQUIRE(run("graph --erdos-renyi 5000 --mean-degree 2 --seed 3 --out " + dir / "er.cscg").code == 0);
  REQUIRE(run("simulate --graph " + dir / "er.cscg" + " --alpha 0.4 --runs 20000 --seed 1 --hist-out " + dir / "t.tsv").code == 0);
  const std::string base = "fit --graph " + dir / "er.cscg" + " --target " + dir / "t.tsv" + " --runs-per-point 10000 --seed 5";

  SUBCASE("single point echoes that point") {
    const auto r = run(base + " --alpha-lo 0.3 --alpha-hi 0.3 --step 0.01 --report-out " + dir / "r.tsv");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("best alpha=0.3 lambda=- ks=", 0) == 0);
    const auto report = slurp(dir / "r.tsv");
    CHECK(report.rfind("# alpha\tlambda\tks\truns\tdiverged\n0.3\t-\t", 0) == 0);
  }
  SUBCASE("lambda 0 rows equal the alpha-k rows") {
    REQUIRE(run(base + " --alpha-lo 0.3 --alpha-hi 0.5 --step 0.1 --report-out " + dir / "one.tsv").code == 0);
    REQUIRE(run(base + " --model compound --alpha-lo 0.3 --alpha-hi 0.5 --lambda-lo 0 --lambda-hi 0.1 --step 0.1"
                       " --report-out " + dir / "two.tsv").code == 0);
    std::map<std::string, std::string> one, two;
    auto collect = [](const std::string& text, std::map<std::string, std::string>& out, bool lambda_zero) {
      std::istringstream in(text);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream f(line);
        std::string a, l, ks;
        f >> a >> l >> ks;
        if (!lambda_zero || l == "0") out[a] = ks;
      }
    };
    collect(slurp(dir / "one.tsv"), one, false);
    collect(slurp(dir / "two.tsv"), two, true);
    CHECK(one.size() == 3);
    CHECK(one == two);
  }
  SUBCASE("report is independent of the worker count and validates") {
    REQUIRE(run("--workers 1 " + base + " --alpha-lo 0.3 --alpha-hi 0.5 --step 0.01 --levels 1 --report-out " + dir / "w1.tsv")
                .code == 0);
    const auto r = run("--workers 3 " + base + " --alpha-lo 0.3 --alpha-hi 0.5 --step 0.01 --levels 1 --report-out " +
                       dir / "w3.tsv --validate " + dir / "t.tsv");
    CHECK(r.code == 0);
    CHECK(slurp(dir / "w1.tsv") == slurp(dir / "w3.tsv"));
    CHECK(r.out.find("validation train_ks=") != std::string::npos);
  }
  SUBCASE("every point diverged is a domain error") {
    REQUIRE(run("simulate --graph " + dir / "er.cscg" + " --alpha 0.9 --runs 100 --hist-out " + dir / "big.tsv").code == 0);
    const auto r = run("fit --graph " + dir / "er.cscg" + " --target " + dir / "t.tsv" +
                       " --model compound --alpha-lo 0.9 --alpha-hi 0.9 --lambda-lo 5 --lambda-hi 5 --step 1"
                       " --runs-per-point 200 --round-cap 50");
    CHECK(r.code == 1);
  }
}
