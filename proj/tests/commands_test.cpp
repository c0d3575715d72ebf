#include "ksr/commands.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <sys/wait.h>

using namespace ksr;
namespace fs = std::filesystem;

namespace {

struct scratch_dir {
  fs::path path;
  scratch_dir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("ksreal-test-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~scratch_dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string &name) const { return (path / name).string(); }
};

struct run_output {
  int code = -1;
  std::string out;
};

run_output run(const std::string &args) {
  std::string cmd = std::string(KSREAL_BIN) + " " + args + " 2>&1";
  run_output r;
  FILE *p = popen(cmd.c_str(), "r");
  if (!p)
    return r;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, p))
    r.out.append(buf, got);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write(const std::string &path, const std::string &text) { std::ofstream(path) << text; }

const scratch_dir &shared() {
  static scratch_dir d;
  static bool made = [] {
    generate_options g;
    g.out_path = d / "rays.txt";
    return cmd_generate(g).status == run_status::ok;
  }();
  EXPECT_TRUE(made);
  return d;
}

} // namespace

TEST(Report, StatusAndExitCodes) {
  run_report r;
  r.command = "x";
  r.add_result("n", 3);
  EXPECT_EQ(r.exit_code(), 0);
  r.check("n", "3", "3");
  EXPECT_EQ(r.status, run_status::ok);
  r.check("n", "4", "3");
  EXPECT_EQ(r.exit_code(), 2);
  r.fail("boom");
  EXPECT_EQ(r.exit_code(), 1);
  EXPECT_EQ(r.str(), "command x\nresult n=3\ncheck n expected=3 actual=3 ok\n"
                     "check n expected=4 actual=3 MISMATCH\nmessage boom\nstatus error\n");
  r.timing.emplace_back("stage", 0.5);
  EXPECT_NE(r.str(true).find("timing stage=0.5s"), std::string::npos);
  EXPECT_EQ(r.str().find("timing"), std::string::npos);
}

TEST(Commands, GenerateReference) {
  scratch_dir d;
  generate_options g;
  g.out_path = d / "rays.txt";
  auto r = cmd_generate(g);
  EXPECT_EQ(r.status, run_status::ok) << r.str();
  EXPECT_EQ(r.result("rays"), "165");
  EXPECT_EQ(r.result("edges"), "390");
  EXPECT_EQ(r.result("contexts"), "130");
  EXPECT_EQ(r.result("coefficient_warnings"), "0");
  EXPECT_EQ(r.checks.size(), 2u);
  auto in = ingest_rays(detail::read_file(g.out_path));
  EXPECT_EQ(in.cfg, closure_generate(mub_seed()));
}

TEST(Commands, GenerateBasisOnlyHasNoChecks) {
  generate_options g;
  g.seed_choice = "basis-only";
  auto r = cmd_generate(g);
  EXPECT_EQ(r.status, run_status::ok);
  EXPECT_EQ(r.result("rays"), "3");
  EXPECT_EQ(r.result("contexts"), "1");
  EXPECT_TRUE(r.checks.empty());
  g.expect.overrides["rays"] = true;
  r = cmd_generate(g);
  EXPECT_EQ(r.status, run_status::discrepancy);
  EXPECT_EQ(r.exit_code(), 2);
}

TEST(Commands, GenerateDivergesWithoutBound) {
  generate_options g;
  g.generator_norm_bound.reset();
  g.cap = 500;
  auto r = cmd_generate(g);
  EXPECT_EQ(r.status, run_status::error);
  EXPECT_FALSE(r.message.empty());
}

TEST(Commands, UnwritablePathLeavesNoFile) {
  scratch_dir d;
  generate_options g;
  g.out_path = d / "missing-dir/rays.txt";
  auto r = cmd_generate(g);
  EXPECT_EQ(r.status, run_status::error);
  EXPECT_FALSE(fs::exists(g.out_path));
  EXPECT_FALSE(fs::exists(g.out_path + ".partial"));
}

TEST(Commands, RealifyWritesFaithfulExport) {
  const auto &d = shared();
  scratch_dir out;
  realify_options o;
  o.rays_path = d / "rays.txt";
  o.out_phases = out / "phases.txt";
  o.out_vectors = out / "vectors.txt";
  o.threads = 2;
  auto r = cmd_realify(o);
  ASSERT_EQ(r.status, run_status::ok) << r.str();
  EXPECT_EQ(r.result("pairs_checked"), "13530");
  EXPECT_EQ(r.result("spurious"), "0");
  EXPECT_EQ(r.result("missing"), "0");
  auto pa = parse_phases(detail::read_file(o.out_phases), 165);
  EXPECT_EQ(pa.k, 1009);
  auto vectors = detail::read_file(o.out_vectors);
  EXPECT_EQ(vectors.rfind("# precision=20\n", 0), 0u);
  EXPECT_EQ(std::count(vectors.begin(), vectors.end(), '\n'), 166);
}

TEST(Commands, RealifyErrors) {
  const auto &d = shared();
  realify_options o;
  o.rays_path = d / "rays.txt";
  o.k = 9;
  EXPECT_EQ(cmd_realify(o).status, run_status::error);
  o.k = 5;
  o.strategy = phase_strategy::distinct;
  EXPECT_EQ(cmd_realify(o).status, run_status::error);
  o.k = 1009;
  o.rays_path = d / "nope.txt";
  EXPECT_EQ(cmd_realify(o).status, run_status::error);
}

TEST(Commands, CertifyToyContextIsColourable) {
  scratch_dir d;
  write(d / "toy.txt", "1,0 0,0 0,0\n0,0 1,0 0,0\n0,0 0,0 1,0\n");
  certify_options o;
  o.rays_path = d / "toy.txt";
  o.out_path = d / "cert.txt";
  auto r = cmd_certify(o);
  EXPECT_EQ(r.status, run_status::ok) << r.str();
  EXPECT_EQ(r.result("colourable"), "SAT");
  EXPECT_TRUE(r.checks.empty());
  EXPECT_NE(detail::read_file(o.out_path).find("result SAT"), std::string::npos);
}

TEST(Commands, ReportOnReference) {
  const auto &d = shared();
  scratch_dir out;
  report_options o;
  o.rays_path = d / "rays.txt";
  o.out_edges = out / "edges.txt";
  o.out_contexts = out / "contexts.txt";
  o.k_max = 120;
  auto r = cmd_report(o);
  ASSERT_EQ(r.status, run_status::ok) << r.str();
  EXPECT_EQ(r.result("sq_norm_1"), "3");
  EXPECT_EQ(r.result("sq_norm_2"), "18");
  EXPECT_EQ(r.result("sq_norm_3"), "36");
  EXPECT_EQ(r.result("sq_norm_6"), "108");
  EXPECT_EQ(r.result("imaginary_pairs"), "636");
  EXPECT_EQ(r.result("smallest_k_backtracking"), "5");
  EXPECT_EQ(r.result("smallest_k_distinct"), "107");
  EXPECT_EQ(detail::read_file(o.out_edges).rfind("# edges 390\n", 0), 0u);
  EXPECT_EQ(detail::read_file(o.out_contexts).rfind("# contexts 130\n", 0), 0u);
}

// --- the installed binary ------------------------------------------------

TEST(Cli, GenerateDefault) {
  scratch_dir d;
  auto r = run("generate --out " + d / "rays.txt");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("result rays=165\n"), std::string::npos);
  EXPECT_NE(r.out.find("result contexts=130\n"), std::string::npos);
  EXPECT_NE(r.out.find("status ok\n"), std::string::npos);
}

TEST(Cli, GenerateBasisOnly) {
  auto r = run("generate --seed-choice basis-only");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("result rays=3\n"), std::string::npos);
  EXPECT_NE(r.out.find("result contexts=1\n"), std::string::npos);
}

TEST(Cli, GenerateUnwritable) {
  scratch_dir d;
  auto r = run("generate --out " + d / "no/such/dir/rays.txt");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_FALSE(fs::exists(d / "no"));
}

TEST(Cli, ExpectOverrideYieldsDiscrepancy) {
  auto r = run("--expect rays generate --seed-choice basis-only");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("MISMATCH"), std::string::npos);
  EXPECT_NE(run("--expect bogus generate").code, 0);
}

TEST(Cli, Realify) {
  const auto &d = shared();
  scratch_dir out;
  auto r = run("--threads 2 realify --rays " + d / "rays.txt" + " --K 1009 --out " +
               out / "v.txt" + " --out-phases " + out / "p.txt");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("result pairs_checked=13530\n"), std::string::npos);
  EXPECT_NE(r.out.find("result spurious=0\n"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "v.txt"));
}

TEST(Cli, RealifyBadInputs) {
  const auto &d = shared();
  EXPECT_EQ(run("realify --rays " + d / "rays.txt" + " --K 9").code, 1);
  EXPECT_EQ(run("realify --rays " + d / "missing.txt").code, 1);
  EXPECT_NE(run("realify --rays " + d / "rays.txt" + " --precision 5").code, 0);
  EXPECT_NE(run("realify").code, 0);
}

TEST(Cli, CertifyColour) {
  const auto &d = shared();
  auto r = run("certify --rays " + d / "rays.txt" + " --mode color");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("result colourable=UNSAT\n"), std::string::npos);
  EXPECT_NE(r.out.find("check uncolourable expected=UNSAT actual=UNSAT ok"), std::string::npos);
}

TEST(Cli, CertifyMaximize) {
  const auto &d = shared();
  scratch_dir out;
  auto r = run("--threads 0 certify --rays " + d / "rays.txt" + " --mode maximize --out " +
               out / "max.txt");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("result best=128\n"), std::string::npos);
  EXPECT_NE(r.out.find("result refuted=131\n"), std::string::npos);
  EXPECT_NE(r.out.find("result bounds=0..128\n"), std::string::npos);
  EXPECT_NE(detail::read_file(out / "max.txt").find("best 128\n"), std::string::npos);
}

TEST(Cli, CertifyMalformedFile) {
  scratch_dir d;
  write(d / "bad.txt", "1,0 0,0\n");
  auto r = run("certify --rays " + d / "bad.txt");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("status error"), std::string::npos);
}

TEST(Cli, RepeatRunsAreByteIdentical) {
  const auto &d = shared();
  for (const std::string &args : std::vector<std::string>{
           "generate --seed-choice mub", "--seed 7 realify --strategy greedy-random --rays " + d / "rays.txt",
        "certify --mode maximize --rays " + d / "rays.txt"}) {
    auto a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, TimingFlag) {
  auto r = run("--timing generate --seed-choice basis-only");
  EXPECT_NE(r.out.find("timing closure="), std::string::npos);
}

TEST(Cli, All) {
  scratch_dir d;
  auto r = run("--all --dir " + d / "out");
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char *name : {"rays.txt", "phases.txt", "vectors.txt", "ks-certificate.txt",
                           "max-certificate.txt"})
    EXPECT_TRUE(fs::exists(d / (std::string("out/") + name))) << name;
  EXPECT_EQ(r.out.find("status error"), std::string::npos);
}
