// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command line binary.
#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Sandbox {
  fs::path dir;

  Sandbox() {
    dir = fs::temp_directory_path() /
          ("quadrec_cli_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()));
    fs::create_directories(dir);
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  static int counter() {
    static int n = 0;
    return n++;
  }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream out(dir / name);
    out << content;
  }

  CliResult run(const std::string& args) const {
    fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    std::string cmd = std::string(QUADREC_CLI_PATH) + " " + args + " > " + out.string() +
                      " 2> " + err.string();
    int rc = std::system(cmd.c_str());
    return {WEXITSTATUS(rc), slurp(out), slurp(err)};
  }
};

const std::string kDataDir = QUADREC_TEST_DATA_DIR;

std::string toy_config(const fs::path& dir) {
  std::ostringstream cfg;
  cfg << "# toy project config\n";
  cfg << "taggings=" << kDataDir << "/toy_taggings.tsv\n";
  cfg << "demographics=" << kDataDir << "/toy_demographics.tsv\n";
  cfg << "concepts_out=" << (dir / "concepts.tsv").string() << "\n";
  cfg << "concepts_in=" << (dir / "concepts.tsv").string() << "\n";
  cfg << "report_out=" << (dir / "report.txt").string() << "\n";
  cfg << "minsupp_u=2\nminsupp_t=2\nminsupp_r=2\nminsupp_p=2\n";
  return cfg.str();
}

}  // namespace

TEST_CASE("cli mine writes concepts and a summary") {
  Sandbox box;
  box.write("quadrec.conf", toy_config(box.dir));
  CliResult r = box.run("mine --config " + (box.dir / "quadrec.conf").string());
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out == "concepts=3\n");
  std::string concepts = slurp(box.dir / "concepts.tsv");
  REQUIRE(std::count(concepts.begin(), concepts.end(), '\n') == 3);
  REQUIRE(concepts.find("bernadette") != std::string::npos);

  // reruns are byte-identical
  CliResult again = box.run("mine --config " + (box.dir / "quadrec.conf").string());
  REQUIRE(again.exit_code == 0);
  REQUIRE(slurp(box.dir / "concepts.tsv") == concepts);
}

TEST_CASE("cli mine on an empty taggings file is a data error") {
  Sandbox box;
  box.write("empty.tsv", "# nothing here\n");
  std::string cfg = toy_config(box.dir);
  box.write("quadrec.conf", cfg);
  CliResult r = box.run("mine --config " + (box.dir / "quadrec.conf").string() +
                        " --taggings " + (box.dir / "empty.tsv").string());
  REQUIRE(r.exit_code == 2);
  REQUIRE(r.err.find("EmptyInput") != std::string::npos);
}

TEST_CASE("cli recommend prints ranked labels") {
  Sandbox box;
  box.write("quadrec.conf", toy_config(box.dir));
  std::string cfg_flag = " --config " + (box.dir / "quadrec.conf").string();
  REQUIRE(box.run("mine" + cfg_flag).exit_code == 0);

  CliResult tags = box.run("recommend" + cfg_flag +
                           " --user rossy --resource \"Rear Window\" --which tags -k 5");
  INFO(tags.err);
  REQUIRE(tags.exit_code == 0);
  REQUIRE(tags.out.find("classic\t1") != std::string::npos);
  REQUIRE(tags.out.find("oldmovie\t1") != std::string::npos);
  REQUIRE(tags.out.find("quotes\t1") != std::string::npos);

  CliResult friends = box.run("recommend" + cfg_flag + " --user csmdavis --which users -k 5");
  REQUIRE(friends.exit_code == 0);
  REQUIRE(friends.out == "mulder\t1\nscully\t1\n");

  // Rear Window backs two communities, so its global frequency ranks first.
  CliResult movies = box.run("recommend" + cfg_flag + " --user reyes --which resources -k 5");
  REQUIRE(movies.exit_code == 0);
  REQUIRE(movies.out == "Rear Window\t1\nM.A.S.H\t1\nStar Wars\t1\n");
}

TEST_CASE("cli recommend error paths") {
  Sandbox box;
  box.write("quadrec.conf", toy_config(box.dir));
  std::string cfg_flag = " --config " + (box.dir / "quadrec.conf").string();
  REQUIRE(box.run("mine" + cfg_flag).exit_code == 0);

  CliResult no_resource = box.run("recommend" + cfg_flag + " --user rossy --which tags");
  REQUIRE(no_resource.exit_code == 1);
  REQUIRE(no_resource.err.find("MissingResource") != std::string::npos);

  CliResult nobody = box.run("recommend" + cfg_flag + " --user nobody --which users");
  REQUIRE(nobody.exit_code == 2);
  REQUIRE(nobody.err.find("UnknownUser") != std::string::npos);

  CliResult bad_which = box.run("recommend" + cfg_flag + " --user rossy --which friends");
  REQUIRE(bad_which.exit_code == 1);
}

TEST_CASE("cli evaluate writes report files deterministically") {
  Sandbox box;
  // Planted-affinity files: three groups with their own vocabulary and pool.
  std::ostringstream tag, demo;
  demo << "# synthetic users\n";
  for (int i = 0; i < 30; ++i) {
    const int g = i % 3;
    std::string user = "user" + std::to_string(i / 10) + std::to_string(i % 10);
    const char* gender = i % 2 ? "M" : "F";
    const int age = g == 0 ? 20 : g == 1 ? 30 : 40;
    demo << user << '\t' << gender << '\t' << age << "\tjob" << g << '\n';
    for (int t = 0; t < 2; ++t)
      for (int r = 0; r < 4; ++r)
        tag << user << "\tg" << g << "tag" << t << "\tg" << g << "res" << r << '\n';
  }
  box.write("taggings.tsv", tag.str());
  box.write("demographics.tsv", demo.str());
  std::ostringstream cfg;
  cfg << "taggings=" << (box.dir / "taggings.tsv").string() << "\n";
  cfg << "demographics=" << (box.dir / "demographics.tsv").string() << "\n";
  cfg << "report_out=" << (box.dir / "report.txt").string() << "\n";
  cfg << "minsupp_u=2\nminsupp_t=2\nminsupp_r=2\nminsupp_p=2\n";
  cfg << "ks=1,3,5\nfraction=0.25\nseed=42\n";
  box.write("quadrec.conf", cfg.str());

  std::string cfg_flag = " --config " + (box.dir / "quadrec.conf").string();
  CliResult r = box.run("evaluate" + cfg_flag);
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("k=1 mean_precision=") != std::string::npos);
  REQUIRE(r.out.find("k=5 mean_precision=") != std::string::npos);

  std::string report = slurp(box.dir / "report.txt");
  REQUIRE(report.find("# quadrec evaluation report") == 0);
  REQUIRE(report.find("users_evaluated") != std::string::npos);
  // one record per requested k
  std::size_t records = 0;
  for (std::size_t at = report.find("\nk\t"); at != std::string::npos;
       at = report.find("\nk\t", at + 1))
    ++records;
  REQUIRE(records == 3);
  std::string table = slurp(box.dir / "report.txt.tsv");
  REQUIRE(table.find("# k\tmean_precision\n") == 0);

  CliResult again = box.run("evaluate" + cfg_flag);
  REQUIRE(again.exit_code == 0);
  REQUIRE(slurp(box.dir / "report.txt") == report);
  REQUIRE(again.out == r.out);
}

TEST_CASE("cli flags override config values") {
  Sandbox box;
  box.write("quadrec.conf", toy_config(box.dir));
  std::string cfg_flag = " --config " + (box.dir / "quadrec.conf").string();
  // Raising a threshold via flag wipes out every concept.
  CliResult r = box.run("mine" + cfg_flag + " --minsupp_u 4");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out == "concepts=0\n");
}

TEST_CASE("cli age bucket override changes attribute labels") {
  Sandbox box;
  box.write("quadrec.conf", toy_config(box.dir));
  std::string cfg_flag = " --config " + (box.dir / "quadrec.conf").string();
  CliResult r = box.run("mine" + cfg_flag + " --age_buckets \"0-45=young,46-130=old\"");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out == "concepts=3\n");
  std::string concepts = slurp(box.dir / "concepts.tsv");
  REQUIRE(concepts.find("age:young") != std::string::npos);
  REQUIRE(concepts.find("age:old") != std::string::npos);
  REQUIRE(concepts.find("age:36-45") == std::string::npos);
}

TEST_CASE("cli mine output does not depend on the threads flag") {
  Sandbox box;
  box.write("quadrec.conf", toy_config(box.dir));
  std::string cfg_flag = " --config " + (box.dir / "quadrec.conf").string();
  REQUIRE(box.run("mine" + cfg_flag + " --threads 1").exit_code == 0);
  std::string sequential = slurp(box.dir / "concepts.tsv");
  REQUIRE(box.run("mine" + cfg_flag + " --threads 4").exit_code == 0);
  REQUIRE(slurp(box.dir / "concepts.tsv") == sequential);
}

TEST_CASE("cli rejects unknown config keys") {
  Sandbox box;
  std::string cfg = toy_config(box.dir) + "mystery_knob=1\n";
  box.write("quadrec.conf", cfg);
  CliResult r = box.run("mine --config " + (box.dir / "quadrec.conf").string());
  REQUIRE(r.exit_code == 2);
}
