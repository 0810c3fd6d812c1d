// end-to-end checks of the command line tool; argv[1] is the binary path
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  std::cout << (ok ? "ok" : "FAIL") << " - " << what << "\n";
  if (!ok) ++failures;
}

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_checks <binary>\n";
    return 1;
  }
  const std::string bin = argv[1];
  const fs::path work = fs::temp_directory_path() / "pinlab_cli_checks";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string out = " --out " + work.string();
  const std::string quiet = " > " + (work / "stdout.txt").string() + " 2> " +
                            (work / "stderr.txt").string();

  expect(run(bin + quiet) != 0, "no subcommand is rejected");
  expect(run(bin + " scalar --eps -1" + quiet) != 0, "bad arguments exit nonzero");

  expect(run(bin + out + " cell --chi 0.25 --resolution 32" + quiet) == 0,
         "cell run succeeds");
  expect(fs::exists(work / "cell.dat"), "cell run writes the field");

  expect(run(bin + out +
             " scalar --eps 0.2 --delta 0.2 --kind trig --alpha 0.4 --resolution 40" +
             quiet) == 0,
         "scalar run succeeds");
  {
    const std::string so = slurp(work / "stdout.txt");
    expect(so.find("sup_error") != std::string::npos, "scalar run prints the CSV header");
    expect(so.find(",ok") != std::string::npos, "scalar run reports ok status");
  }
  expect(fs::exists(work / "scalar.dat"), "scalar run writes the field");

  expect(run(bin + out + " scalar --eps 0.2 --delta 0.005 --resolution 16 "
                         "--allow-underresolved --kind checkerboard" + quiet) == 0,
         "underresolved scalar run still succeeds");
  expect(slurp(work / "stdout.txt").find("underresolved") != std::string::npos,
         "underresolved rows are flagged");

  expect(run(bin + out + " tile --chi 0.25 --reps 2 --delta 0.25 --resolution 32" +
             quiet) == 0,
         "tile run succeeds");
  expect(fs::exists(work / "tile.dat"), "tile run writes the field");
  expect(run(bin + out + " tile --kind checkerboard --chi 0.25 --reps 2 --delta 0.25" +
             quiet) == 1,
         "tiling an asymmetric cell fails cleanly");
  expect(slurp(work / "stderr.txt").find("error:") != std::string::npos,
         "errors go to stderr");

  // sweep: clean config exits 0, config with failing rows exits 2
  {
    std::ofstream cfg(work / "sweep_ok.cfg");
    cfg << "experiment = cell_rates\neps = 0.2, 0.1, 0.05\ndelta_rule = eps^2\n"
        << "kind = checkerboard\nlo = 0.5\nhi = 1.5\nresolution = 24\n"
        << "out = rates.csv\n";
  }
  expect(run(bin + out + " sweep " + (work / "sweep_ok.cfg").string() + quiet) == 0,
         "clean sweep exits 0");
  const std::string csv = slurp(work / "rates.csv");
  expect(csv.find("eps,delta,chi,kind,seed,sup_error") == 0, "sweep CSV has the header");
  expect(csv.find("# failures=0") != std::string::npos, "sweep CSV tallies failures");

  {
    std::ofstream cfg(work / "sweep_bad.cfg");
    cfg << "experiment = scalar_rates\neps = 0.2\nkind = bogus\nresolution = 16\n"
        << "out = bad.csv\n";
  }
  expect(run(bin + out + " sweep " + (work / "sweep_bad.cfg").string() + quiet) == 2,
         "sweep with failed rows exits 2");
  expect(slurp(work / "bad.csv").find("failed:") != std::string::npos,
         "failed rows are recorded in the CSV");

  // fit over the CSV written above
  expect(run(bin + " fit " + (work / "rates.csv").string() + " delta sup_error" +
             quiet) == 0,
         "fit run succeeds");
  expect(slurp(work / "stdout.txt").find("slope=") != std::string::npos,
         "fit prints the slope");
  expect(run(bin + " fit " + (work / "rates.csv").string() + " delta nope" + quiet) == 1,
         "fit with a bad column exits 1");

  std::cout << (failures == 0 ? "all cli checks passed\n"
                              : std::to_string(failures) + " cli checks failed\n");
  return failures == 0 ? 0 : 1;
}
