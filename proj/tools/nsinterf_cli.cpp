// nsinterf: simulate slice KPIs, detect shared resources, score and sweep.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 internal error.

#include "nsinterf/nsinterf.h"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <string>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct Failure {
  nsi_status status;
};

// Aborts the subcommand with the library's message.
void check(nsi_status status) {
  if (status != NSI_OK) throw Failure{status};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using SimConfig = Handle<nsi_sim_config, nsi_sim_config_free>;
using SimOutput = Handle<nsi_sim_output, nsi_sim_output_free>;
using Kpi = Handle<nsi_kpi, nsi_kpi_free>;
using Assignment = Handle<nsi_assignment, nsi_assignment_free>;
using Detector = Handle<nsi_detector, nsi_detector_free>;
using Report = Handle<nsi_report, nsi_report_free>;
using Sweep = Handle<nsi_sweep, nsi_sweep_free>;
using SweepResult = Handle<nsi_sweep_result, nsi_sweep_result_free>;
using CorrStudy = Handle<nsi_corr_study, nsi_corr_study_free>;

struct Args {
  std::string config;
  std::string out;
  std::string variant;
  std::optional<double> theta;
  std::optional<std::uint64_t> seed;
  bool intermediates = false;
  std::string input;
  std::string report;
  std::string truth;
};

nsi_variant variant_of(const std::string& name) {
  nsi_variant v = NSI_VARIANT_SRCC;
  check(nsi_parse_variant(name.c_str(), &v));
  return v;
}

void run_simulate(const Args& a) {
  SimConfig cfg;
  check(nsi_sim_config_load(a.config.c_str(), a.seed.has_value(), a.seed.value_or(0), cfg.out()));
  SimOutput sim;
  check(nsi_simulate(cfg.get(), sim.out()));
  check(nsi_sim_output_write(sim.get(), a.out.c_str(), a.intermediates));
  int n = 0, r = 0, t = 0;
  std::uint64_t seed = 0;
  check(nsi_sim_config_info(cfg.get(), &n, &r, &t, &seed));
  std::printf("simulated N=%d R=%d T=%d seed=%" PRIu64 " -> %s\n", n, r, t, seed, a.out.c_str());
}

void run_detect(const Args& a) {
  Kpi kpi;
  check(nsi_kpi_read(a.input.c_str(), kpi.out()));
  Detector det;
  check(nsi_detector_new(det.out()));
  if (!a.config.empty()) check(nsi_detector_load(det.get(), a.config.c_str()));
  if (!a.variant.empty()) check(nsi_detector_set_variant(det.get(), variant_of(a.variant)));
  if (a.theta) check(nsi_detector_set_theta(det.get(), *a.theta));
  if (a.intermediates) check(nsi_detector_set_intermediates(det.get(), 1));
  Report rep;
  check(nsi_detect(det.get(), kpi.get(), rep.out()));
  check(nsi_report_write(rep.get(), a.out.c_str()));
  for (size_t w = 0; w < nsi_report_warning_count(rep.get()); ++w) {
    std::fprintf(stderr, "warning: %s\n", nsi_report_warning(rep.get(), w));
  }
  int rows = 0, slices = 0;
  check(nsi_assignment_dims(nsi_report_estimate(rep.get()), &rows, &slices));
  std::printf("detected %d shared resources over %d slices -> %s\n", rows, slices, a.out.c_str());
}

void run_evaluate(const Args& a) {
  Report rep;
  check(nsi_report_read(a.report.c_str(), rep.out()));
  Assignment truth;
  check(nsi_assignment_read(a.truth.c_str(), truth.out()));
  nsi_scorecard card{};
  check(nsi_evaluate(truth.get(), rep.get(), &card));
  std::printf("exact_fraction %.6g\ncovered_fraction %.6g\nestimated_count %d\n", card.exact_fraction,
              card.covered_fraction, card.estimated_count);
  if (card.has_stage1) std::printf("stage1_missed %d\nstage1_false_pos %d\n", card.stage1_missed, card.stage1_false_pos);
  if (!a.out.empty()) check(nsi_scorecard_write(&card, a.out.c_str()));
}

void run_sweep(const Args& a) {
  Sweep sweep;
  check(nsi_sweep_load(a.config.c_str(), a.seed.has_value(), a.seed.value_or(0), sweep.out()));
  if (!a.variant.empty()) check(nsi_sweep_set_variant(sweep.get(), variant_of(a.variant)));
  if (a.theta) check(nsi_sweep_set_theta(sweep.get(), *a.theta));
  SweepResult result;
  check(nsi_sweep_run(sweep.get(), result.out()));
  check(nsi_sweep_result_write(result.get(), a.out.c_str()));
  const size_t partial = nsi_sweep_result_partial_cells(result.get());
  if (partial > 0) std::fprintf(stderr, "warning: %zu cells had failed replicates (status column)\n", partial);
  std::printf("swept %zu cells -> %s\n", nsi_sweep_result_cells(result.get()), a.out.c_str());
}

void run_corr_study(const Args& a) {
  SimConfig cfg;
  check(nsi_sim_config_load(a.config.c_str(), a.seed.has_value(), a.seed.value_or(0), cfg.out()));
  CorrStudy study;
  check(nsi_corr_study_run(cfg.get(), study.out()));
  check(nsi_corr_study_write(study.get(), a.out.c_str()));
  int sm = 0, sf = 0, pm = 0, pf = 0;
  double srcc = 0.0, pcc = 0.0;
  check(nsi_corr_study_errors(study.get(), &sm, &sf, &pm, &pf));
  check(nsi_corr_study_sharing_means(study.get(), &srcc, &pcc));
  std::printf("pairs %zu\nsharing mean srcc %.4f pcc %.4f\nstage1 srcc missed %d false_pos %d\n"
              "stage1 pcc missed %d false_pos %d\n",
              nsi_corr_study_pairs(study.get()), srcc, pcc, sm, sf, pm, pf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect shared-resource interference among network slices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nsi_version());
  Args a;

  auto theta_check = CLI::Validator(
      [](std::string& s) -> std::string {
        const double v = std::stod(s);
        return (v > 0.0 && v <= 1.0) ? std::string() : std::string("theta must lie in (0, 1]");
      },
      "(0,1]");
  const auto variants = CLI::IsMember({"fa", "fa-max", "pcc"});

  auto* sim = app.add_subcommand("simulate", "Simulate measurements and ground truth");
  sim->add_option("--config", a.config, "Simulation config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", a.out, "Output directory")->required();
  sim->add_option("--seed", a.seed, "Override the config seed");
  sim->add_flag("--intermediates", a.intermediates, "Also write the utilization trace");

  auto* det = app.add_subcommand("detect", "Estimate the assignment matrix from measurements");
  det->add_option("input", a.input, "Measurement CSV")->required();
  det->add_option("--out", a.out, "Report file")->required();
  det->add_option("--config", a.config, "Detector options file")->check(CLI::ExistingFile);
  det->add_option("--variant", a.variant, "Correlation variant")->check(variants);
  det->add_option("--theta", a.theta, "Loading threshold")->check(theta_check);
  det->add_flag("--intermediates", a.intermediates, "Record stage outputs in the report");

  auto* ev = app.add_subcommand("evaluate", "Score a report against ground truth");
  ev->add_option("report", a.report, "Report file")->required();
  ev->add_option("truth", a.truth, "Truth CSV")->required();
  ev->add_option("--out", a.out, "Scorecard file");

  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep");
  sw->add_option("--config", a.config, "Sweep spec file")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", a.out, "Results CSV")->required();
  sw->add_option("--seed", a.seed, "Override the spec seed");
  sw->add_option("--variant", a.variant, "Restrict the grid to one variant")->check(variants);
  sw->add_option("--theta", a.theta, "Loading threshold")->check(theta_check);

  auto* cs = app.add_subcommand("corr-study", "Pairwise PCC/SRCC table with stage-1 outcomes");
  cs->add_option("--config", a.config, "Simulation config file")->required()->check(CLI::ExistingFile);
  cs->add_option("--out", a.out, "Pairs CSV")->required();
  cs->add_option("--seed", a.seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (sim->parsed()) run_simulate(a);
    if (det->parsed()) run_detect(a);
    if (ev->parsed()) run_evaluate(a);
    if (sw->parsed()) run_sweep(a);
    if (cs->parsed()) run_corr_study(a);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", nsi_last_error());
    return f.status == NSI_ERR_INTERNAL ? kExitInternal : kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return 0;
}
