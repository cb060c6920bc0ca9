#include "nsi/commands.hpp"
#include "nsi/error.hpp"
#include "nsi/graph_io.hpp"
#include "nsi/manifest.hpp"

#include "cli_support.hpp"

#include <doctest.h>

#include <sstream>

TEST_CASE("cli: library commands reproduce the binary byte for byte") {
  cli::TempDir bin("nsi_cli_bin");
  REQUIRE(cli::pipeline(bin) == 0);

  cli::TempDir lib("nsi_cli_lib");
  cli::library_pipeline(lib);

  for (const auto* name : cli::kPipelineFiles) {
    CAPTURE(name);
    const auto a = cli::slurp(bin.file(name));
    CHECK(!a.empty());
    CHECK(a == cli::slurp(lib.file(name)));
  }
  const auto table = cli::slurp(bin.file("metrics.tsv"));
  CHECK(table.rfind("mode\tf1\tprecision\trecall\nnsi\t", 0) == 0);
}

TEST_CASE("cli: exit codes") {
  cli::TempDir dir("nsi_cli_exit");
  CHECK(cli::run(dir, "--help").code == 0);
  const auto version = cli::run(dir, "--version");
  CHECK(version.code == 0);
  CHECK(version.out.find(nsi::kToolVersion) != std::string::npos);
  CHECK(cli::run(dir, "").code == 3);
  CHECK(cli::run(dir, "frobnicate").code == 3);
  CHECK(cli::run(dir, "train --lambda1 abc r.tsv -o m").code == 3);

  nsi::write_text_file(dir.file("empty.tsv"), "# no edges\n");
  const auto empty = cli::run(dir, "convert empty.tsv -o g.mtx");
  CHECK(empty.code == 2);
  CHECK(empty.err.find("no interactions") != std::string::npos);
  CHECK(cli::run(dir, "convert missing.tsv -o g.mtx").code == 2);

  nsi::write_text_file(dir.file("dup.tsv"), "a\tb\tt1\nb\tc\tt1\n");
  const auto dup = cli::run(dir, "convert dup.tsv -o g.mtx");
  CHECK(dup.code == 3);
  CHECK(dup.err.find("duplicate tweet id: t1") != std::string::npos);

  nsi::write_text_file(dir.file("r.tsv"), "t1\t1\tsome text\n");
  CHECK(cli::run(dir, "train r.tsv -o m.txt --lambda2 -1").code == 3);
}

TEST_CASE("cli: Laplacian of a single link") {
  cli::TempDir dir("nsi_cli_lap");
  nsi::write_text_file(dir.file("e.tsv"), "a\tb\tt1\nb\tc\tt2\n");
  REQUIRE(cli::run(dir, "--quiet convert e.tsv -o g.mtx").code == 0);
  REQUIRE(cli::run(dir, "--quiet laplacian g.mtx -o l.mtx --damping 1").code == 0);
  const auto l = nsi::read_labeled_matrix(dir.file("l.mtx"));
  CHECK(l.nodes == std::vector<std::string>{"t1", "t2"});
  Eigen::Matrix2d expected;
  expected << 1, -1, -1, 1;
  CHECK((l.matrix - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("cli: damping 1 on a disconnected graph is rejected") {
  cli::TempDir dir("nsi_cli_disc");
  nsi::write_text_file(dir.file("e.tsv"), "a\tb\tt1\nb\tc\tt2\nd\te\tt3\ne\tf\tt4\n");
  REQUIRE(cli::run(dir, "--quiet convert e.tsv -o g.mtx").code == 0);
  const auto r = cli::run(dir, "--quiet laplacian g.mtx -o l.mtx --damping 1");
  CHECK(r.code == 3);
  CHECK(r.err.find("damping") != std::string::npos);
  CHECK(cli::run(dir, "--quiet laplacian g.mtx -o l.mtx").code == 0);
}

TEST_CASE("cli: unregularized training fits square data exactly") {
  cli::TempDir dir("nsi_cli_ls");
  nsi::write_text_file(dir.file("r.tsv"), "t1\t1\talpha\nt2\t0\tbeta\nt3\t1\tgamma\nt4\t0\tdelta\n");
  const std::string flags =
      " --lambda1 0 --lambda2 0 --lambda-s 0 --order 1 --min-count 1 --no-tags --no-morphology --no-entities"
      " --no-length";
  REQUIRE(cli::run(dir, "--quiet train r.tsv -o m.txt" + flags).code == 0);
  REQUIRE(cli::run(dir, "--quiet predict m.txt r.tsv -o p.tsv").code == 0);
  REQUIRE(cli::run(dir, "--quiet evaluate p.tsv r.tsv -o e.tsv").code == 0);
  CHECK(cli::slurp(dir.file("e.tsv")) == "mode\tf1\tprecision\trecall\nnsi\t1.000\t1.000\t1.000\n");
  std::istringstream pred(cli::slurp(dir.file("p.tsv")));
  std::string line;
  int lines = 0;
  while (std::getline(pred, line)) {
    ++lines;
    const bool positive = line.rfind("t1", 0) == 0 || line.rfind("t3", 0) == 0;
    CHECK(line.substr(3, 1) == (positive ? "1" : "0"));
  }
  CHECK(lines == 4);
}

TEST_CASE("cli: evaluate scores predictions equal to the labels as perfect") {
  cli::TempDir dir("nsi_cli_eval");
  nsi::write_text_file(dir.file("truth.tsv"), "a\t1\tx\nb\t0\ty\nc\t1\tz\nd\t?\tw\n");
  nsi::write_text_file(dir.file("pred.tsv"), "a\t1\nb\t0\nc\t1\nd\t0\n");
  REQUIRE(cli::run(dir, "--quiet evaluate pred.tsv truth.tsv -o e.tsv --json e.json").code == 0);
  CHECK(cli::slurp(dir.file("e.tsv")) == "mode\tf1\tprecision\trecall\nnsi\t1.000\t1.000\t1.000\n");
  CHECK(cli::slurp(dir.file("e.json")).find("\"evaluated\": 3") != std::string::npos);

  nsi::write_text_file(dir.file("bad.tsv"), "zz\t1\n");
  CHECK(cli::run(dir, "--quiet evaluate bad.tsv truth.tsv -o e.tsv").code == 3);
  nsi::write_text_file(dir.file("bad.tsv"), "a\t2\n");
  CHECK(cli::run(dir, "--quiet evaluate bad.tsv truth.tsv -o e.tsv").code == 2);
}

TEST_CASE("cli: manifests record inputs and outputs") {
  cli::TempDir dir("nsi_cli_manifest");
  nsi::write_text_file(dir.file("e.tsv"), "a\tb\tt1\nb\tc\tt2\n");
  REQUIRE(cli::run(dir, "--quiet --manifest-dir runs convert e.tsv -o g.mtx").code == 0);
  const auto m = cli::slurp(dir.file("runs/convert.manifest"));
  CHECK(m.rfind("nsi-manifest\t1\ncommand\tconvert\n", 0) == 0);
  CHECK(m.find("input\te.tsv\t" + nsi::file_sha256(dir.file("e.tsv"))) != std::string::npos);
  CHECK(m.find("output\tg.mtx\t" + nsi::file_sha256(dir.file("g.mtx"))) != std::string::npos);
  CHECK(m.find("output\tg.mtx.nodes\t") != std::string::npos);
}

TEST_CASE("cli: ablate and sweep tables") {
  cli::TempDir dir("nsi_cli_ablate");
  REQUIRE(cli::run(dir, "--quiet synth -o d --tweets 300 --positive-rate 0.3 --content-signal 0.5").code == 0);
  const auto a = cli::run(dir, "ablate d/records.tsv --edges d/edges.tsv -o a.tsv --order 1 --json a.json");
  REQUIRE(a.code == 0);
  CHECK(a.out == cli::slurp(dir.file("a.tsv")));
  CHECK(a.out.find("\ncombined\t") != std::string::npos);
  CHECK(a.out.find("\ncontent_only\t") != std::string::npos);
  CHECK(a.out.find("\nnetwork_only\t") != std::string::npos);
  CHECK(cli::run(dir, "--quiet ablate d/records.tsv -o a.tsv").code == 3);

  const auto s = cli::run(dir, "--quiet sweep d/records.tsv --edges d/edges.tsv -o s.tsv --order 1 --values 0,0.4");
  REQUIRE(s.code == 0);
  const auto table = cli::slurp(dir.file("s.tsv"));
  CHECK(table.rfind("lambda_s\tf1\tprecision\trecall\n0\t", 0) == 0);
  CHECK(table.find("\n0.4\t") != std::string::npos);
}
