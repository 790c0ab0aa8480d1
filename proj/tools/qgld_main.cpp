#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qgld/cli/commands.hpp"

namespace {

using namespace qgld::cli;

void add_encoding(CLI::App* cmd, EncodingFlags& enc) {
  cmd->add_option("--L", enc.L, "linearization length")->capture_default_str();
  cmd->add_option("--W", enc.W, "gradient scale (default: suggested from the inputs)");
  cmd->add_option("--m", enc.m, "deviation qubits")->capture_default_str();
  cmd->add_option("--shift", enc.shift, "unshifted | centered")->capture_default_str();
  cmd->add_flag("--prefactor-2pi", enc.prefactor_2pi, "use t = 2 pi M / (W L)");
}

const std::map<std::string, Format> kFormats{{"csv", Format::csv}, {"json", Format::json}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-determinant gradients by quantum gradient phase estimation (statevector simulation)"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "write output here instead of stdout");

  GradientConfig grad;
  auto* g = app.add_subcommand("gradient", "eigenvalue gradient of one or all eigenstates");
  g->add_option("--matrix", grad.matrix, "matrix file or preset")->required();
  g->add_option("--delta", grad.delta, "element:i,j | proj:i | all-ones | identity | outer")->capture_default_str();
  g->add_option("--phi", grad.phi, "vector for --delta outer");
  g->add_option("--p", grad.p, "eigenstate, 1-based in ascending eigenvalue order (default: all)");
  g->add_option("--readout", grad.readout, "signed | amplitude | peak")->capture_default_str();
  g->add_option("--seed", grad.seed)->capture_default_str();
  g->add_option("--shots", grad.shots, "sample the deviation register (0 = exact)")->capture_default_str();
  add_encoding(g, grad.enc);

  auto* t1 = app.add_subcommand("reproduce-table1", "Table I gradients for X = sigma-x plus the Hadamard example");

  QgldConfig qc;
  auto* q = app.add_subcommand("qgld", "inverse expectation value <phi|X^-1|phi>");
  q->add_option("--matrix", qc.matrix, "matrix file or preset")->required();
  q->add_option("--phi", qc.phi, "vector file or preset")->capture_default_str();
  q->add_option("--mode", qc.mode, "per-eigenvector | sigma | sampled")->capture_default_str();
  q->add_option("--k", qc.k, "eigenpairs used (default: N)");
  q->add_option("--eigensource", qc.eigensource, "dense | rqbl")->capture_default_str();
  q->add_option("--b", qc.b, "Lanczos block size")->capture_default_str();
  q->add_option("--steps", qc.steps, "Lanczos steps (0 = N / b)")->capture_default_str();
  q->add_option("--seed", qc.seed)->capture_default_str();
  q->add_option("--samples", qc.samples, "sampled mode sample count (0 = N)")->capture_default_str();
  q->add_flag("--pseudo-inverse", qc.pseudo_inverse, "skip near-zero eigenvalues");
  q->add_option("--sweep-L", qc.sweep_l, "comma-separated L values for an error-vs-L table")->delimiter(',');
  q->add_option("--format", qc.format, "csv | json")->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  add_encoding(q, qc.enc);

  LanczosConfig lc;
  auto* l = app.add_subcommand("lanczos", "randomized block Lanczos factorization and Ritz pairs");
  l->add_option("--matrix", lc.matrix, "matrix file or preset")->required();
  l->add_option("--b", lc.b)->capture_default_str();
  l->add_option("--k", lc.k, "block steps")->capture_default_str();
  l->add_option("--seed", lc.seed)->capture_default_str();
  l->add_option("--format", lc.format, "csv | json")->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  KernelDemoConfig kc;
  auto* k = app.add_subcommand("kernel-demo", "Gaussian kernel ridge fit of sin(x), LU against QGLD");
  k->add_option("--points", kc.points)->capture_default_str();
  k->add_option("--holdout", kc.holdout)->capture_default_str();
  k->add_option("--sigma", kc.sigma)->capture_default_str();
  k->add_option("--lambda", kc.lambda)->capture_default_str();
  k->add_option("--format", kc.format, "csv | json")->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  add_encoding(k, kc.enc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  std::ostringstream buffer;
  const int rc = run_guarded(
      [&] {
        if (*g) return cmd_gradient(grad, buffer);
        if (*t1) return cmd_reproduce_table1(buffer);
        if (*q) return cmd_qgld(qc, buffer);
        if (*l) return cmd_lanczos(lc, buffer);
        return cmd_kernel_demo(kc, buffer);
      },
      std::cerr);
  if (rc != kExitOk) return rc;

  if (out_path.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << buffer.str();
    if (!f) {
      std::cerr << "qgld: cannot write " << out_path << '\n';
      return kExitInput;
    }
  }
  return kExitOk;
}
