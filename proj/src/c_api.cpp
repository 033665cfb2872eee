#include "nsinterf/nsinterf.h"

#include "nsinterf/evaluation.hpp"
#include "nsinterf/io.hpp"

#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>

using namespace nsinterf;

struct nsi_sim_config {
  SimConfig config;
};
struct nsi_kpi {
  KpiMatrix m;
};
struct nsi_assignment {
  AssignmentMatrix a;
};
struct nsi_sim_output {
  nsi_kpi measurements;
  nsi_assignment truth;
  std::optional<Matrix> trace;
};
struct nsi_detector {
  DetectorOptions opts;
};
struct nsi_report {
  DetectionReport report;
  nsi_assignment estimate;
};
struct nsi_sweep {
  SweepSpec spec;
};
struct nsi_sweep_result {
  std::vector<SweepCell> cells;
};
struct nsi_corr_study {
  CorrelationStudy study;
};

namespace {

thread_local std::string last_error;

nsi_status fail(nsi_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

nsi_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return NSI_ERR_INVALID_ARGUMENT;
    case ErrorKind::out_of_range: return NSI_ERR_OUT_OF_RANGE;
    case ErrorKind::infeasible: return NSI_ERR_INFEASIBLE;
    case ErrorKind::degenerate: return NSI_ERR_DEGENERATE;
    case ErrorKind::parse: return NSI_ERR_PARSE;
    case ErrorKind::io: return NSI_ERR_IO;
    case ErrorKind::internal: return NSI_ERR_INTERNAL;
  }
  return NSI_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
nsi_status guarded(F&& body) {
  try {
    body();
    return NSI_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NSI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NSI_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NSI_ERR_INTERNAL, "unknown error");
  }
}

#define NSI_REQUIRE(ptr)                                                     \
  do {                                                                       \
    if ((ptr) == nullptr) return fail(NSI_ERR_INVALID_ARGUMENT, #ptr " is null"); \
  } while (0)

CorrelationVariant to_variant(nsi_variant v) {
  switch (v) {
    case NSI_VARIANT_SRCC: return CorrelationVariant::srcc;
    case NSI_VARIANT_MAX_PCC_SRCC: return CorrelationVariant::max_pcc_srcc;
    case NSI_VARIANT_PCC: return CorrelationVariant::pcc;
  }
  throw Error(ErrorKind::invalid_argument, "unknown variant code " + std::to_string(static_cast<int>(v)));
}

std::optional<std::uint64_t> seed_arg(int has_seed, uint64_t seed) {
  return has_seed ? std::optional<std::uint64_t>(seed) : std::nullopt;
}

}  // namespace

extern "C" {

const char* nsi_version(void) { return "0.1.0"; }

const char* nsi_last_error(void) { return last_error.c_str(); }

const char* nsi_status_name(nsi_status status) {
  switch (status) {
    case NSI_OK: return "ok";
    case NSI_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NSI_ERR_OUT_OF_RANGE: return "out of range";
    case NSI_ERR_INFEASIBLE: return "infeasible";
    case NSI_ERR_DEGENERATE: return "degenerate";
    case NSI_ERR_PARSE: return "parse error";
    case NSI_ERR_IO: return "i/o error";
    case NSI_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

nsi_status nsi_parse_variant(const char* name, nsi_variant* out) {
  NSI_REQUIRE(name);
  NSI_REQUIRE(out);
  return guarded([&] {
    switch (parse_variant(name)) {
      case CorrelationVariant::srcc: *out = NSI_VARIANT_SRCC; break;
      case CorrelationVariant::max_pcc_srcc: *out = NSI_VARIANT_MAX_PCC_SRCC; break;
      case CorrelationVariant::pcc: *out = NSI_VARIANT_PCC; break;
    }
  });
}

// ---- simulation ---------------------------------------------------------------

nsi_status nsi_sim_config_load(const char* path, int has_seed, uint64_t seed, nsi_sim_config** out) {
  NSI_REQUIRE(path);
  NSI_REQUIRE(out);
  return guarded([&] {
    io::ConfigFile cfg = io::ConfigFile::load(path);
    *out = new nsi_sim_config{io::sim_config_from(cfg, seed_arg(has_seed, seed))};
  });
}

nsi_status nsi_sim_config_scenario(int scenario, int n_periods, double weight_shared, double noise_variance,
                                   uint64_t seed, nsi_sim_config** out) {
  NSI_REQUIRE(out);
  return guarded([&] {
    SimConfig c;
    if (scenario == 1) {
      c = SimConfig::scenario1(n_periods, weight_shared, noise_variance, seed);
    } else if (scenario == 2) {
      c = SimConfig::scenario2(n_periods, weight_shared, noise_variance, seed);
    } else {
      throw Error(ErrorKind::invalid_argument, "scenario must be 1 or 2");
    }
    c.validate();
    *out = new nsi_sim_config{std::move(c)};
  });
}

nsi_status nsi_sim_config_info(const nsi_sim_config* config, int* slices, int* resources, int* periods,
                               uint64_t* seed) {
  NSI_REQUIRE(config);
  if (slices) *slices = config->config.n_slices;
  if (resources) *resources = config->config.n_resources;
  if (periods) *periods = config->config.n_periods;
  if (seed) *seed = config->config.seed;
  return NSI_OK;
}

nsi_status nsi_sim_config_set_exp_averaging(nsi_sim_config* config, double alpha) {
  NSI_REQUIRE(config);
  return guarded([&] {
    SimConfig c = config->config;
    c.exp_averaging = alpha;
    c.validate();
    config->config = std::move(c);
  });
}

void nsi_sim_config_free(nsi_sim_config* config) { delete config; }

nsi_status nsi_simulate(const nsi_sim_config* config, nsi_sim_output** out) {
  NSI_REQUIRE(config);
  NSI_REQUIRE(out);
  return guarded([&] {
    SimOutput sim = simulate(config->config);
    *out = new nsi_sim_output{nsi_kpi{std::move(sim.measurements)}, nsi_assignment{std::move(sim.truth)},
                              std::move(sim.utilization_trace)};
  });
}

void nsi_sim_output_free(nsi_sim_output* output) { delete output; }

nsi_status nsi_sim_output_dims(const nsi_sim_output* output, int* periods, int* slices, int* resources) {
  NSI_REQUIRE(output);
  if (periods) *periods = output->measurements.m.periods();
  if (slices) *slices = output->measurements.m.slices();
  if (resources) *resources = output->truth.a.resources();
  return NSI_OK;
}

const nsi_kpi* nsi_sim_output_measurements(const nsi_sim_output* output) {
  return output ? &output->measurements : nullptr;
}

const nsi_assignment* nsi_sim_output_truth(const nsi_sim_output* output) {
  return output ? &output->truth : nullptr;
}

nsi_status nsi_sim_output_write(const nsi_sim_output* output, const char* dir, int with_trace) {
  NSI_REQUIRE(output);
  NSI_REQUIRE(dir);
  return guarded([&] {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, std::string("cannot create directory '") + dir + "': " + ec.message());
    const fs::path base(dir);
    // Render everything first so a formatting failure leaves no files behind.
    const std::string measurements = io::format_measurements(output->measurements.m);
    const std::string truth = io::format_assignment(output->truth.a);
    std::string trace;
    if (with_trace) {
      if (!output->trace) throw Error(ErrorKind::invalid_argument, "simulation has no utilization trace");
      trace = io::format_trace(*output->trace);
    }
    io::write_file_atomic((base / "measurements.csv").string(), measurements);
    io::write_file_atomic((base / "truth.csv").string(), truth);
    if (with_trace) io::write_file_atomic((base / "utilization.csv").string(), trace);
  });
}

// ---- measurements and assignments -------------------------------------------

nsi_status nsi_kpi_read(const char* path, nsi_kpi** out) {
  NSI_REQUIRE(path);
  NSI_REQUIRE(out);
  return guarded([&] { *out = new nsi_kpi{io::parse_measurements(io::read_file(path), path)}; });
}

nsi_status nsi_kpi_from_array(const double* values, int periods, int slices, nsi_kpi** out) {
  NSI_REQUIRE(values);
  NSI_REQUIRE(out);
  return guarded([&] {
    if (periods < 0 || slices < 0) throw Error(ErrorKind::invalid_argument, "negative dimensions");
    Matrix m(periods, slices);
    for (int t = 0; t < periods; ++t) {
      for (int i = 0; i < slices; ++i) m(t, i) = values[static_cast<std::size_t>(t) * slices + i];
    }
    *out = new nsi_kpi{KpiMatrix(std::move(m))};
  });
}

nsi_status nsi_kpi_dims(const nsi_kpi* kpi, int* periods, int* slices) {
  NSI_REQUIRE(kpi);
  if (periods) *periods = kpi->m.periods();
  if (slices) *slices = kpi->m.slices();
  return NSI_OK;
}

nsi_status nsi_kpi_write(const nsi_kpi* kpi, const char* path) {
  NSI_REQUIRE(kpi);
  NSI_REQUIRE(path);
  return guarded([&] { io::write_file_atomic(path, io::format_measurements(kpi->m)); });
}

void nsi_kpi_free(nsi_kpi* kpi) { delete kpi; }

nsi_status nsi_assignment_read(const char* path, nsi_assignment** out) {
  NSI_REQUIRE(path);
  NSI_REQUIRE(out);
  return guarded([&] { *out = new nsi_assignment{io::parse_assignment(io::read_file(path), path)}; });
}

nsi_status nsi_assignment_from_array(const uint8_t* entries, int resources, int slices, nsi_assignment** out) {
  NSI_REQUIRE(out);
  if (resources > 0 && slices > 0) NSI_REQUIRE(entries);
  return guarded([&] {
    if (resources < 0 || slices < 0) throw Error(ErrorKind::invalid_argument, "negative dimensions");
    BinaryMatrix m(resources, slices);
    for (int j = 0; j < resources; ++j) {
      for (int i = 0; i < slices; ++i) m(j, i) = entries[static_cast<std::size_t>(j) * slices + i];
    }
    *out = new nsi_assignment{AssignmentMatrix(std::move(m))};
  });
}

nsi_status nsi_assignment_dims(const nsi_assignment* a, int* resources, int* slices) {
  NSI_REQUIRE(a);
  if (resources) *resources = a->a.resources();
  if (slices) *slices = a->a.slices();
  return NSI_OK;
}

nsi_status nsi_assignment_entries(const nsi_assignment* a, uint8_t* buffer, size_t capacity) {
  NSI_REQUIRE(a);
  const auto need = static_cast<size_t>(a->a.resources()) * static_cast<size_t>(a->a.slices());
  if (need == 0) return NSI_OK;
  NSI_REQUIRE(buffer);
  if (capacity < need) {
    return fail(NSI_ERR_OUT_OF_RANGE, "buffer holds " + std::to_string(capacity) + " bytes, need " +
                                          std::to_string(need));
  }
  const BinaryMatrix& e = a->a.entries();  // row-major
  std::copy(e.data(), e.data() + need, buffer);
  return NSI_OK;
}

void nsi_assignment_free(nsi_assignment* a) { delete a; }

// ---- detection -----------------------------------------------------------------

nsi_status nsi_detector_new(nsi_detector** out) {
  NSI_REQUIRE(out);
  return guarded([&] { *out = new nsi_detector{}; });
}

nsi_status nsi_detector_load(nsi_detector* detector, const char* path) {
  NSI_REQUIRE(detector);
  NSI_REQUIRE(path);
  return guarded([&] {
    io::ConfigFile cfg = io::ConfigFile::load(path);
    DetectorOptions opts = detector->opts;
    io::apply_detector_keys(cfg, opts);
    cfg.reject_unused();
    opts.validate();
    detector->opts = opts;
  });
}

nsi_status nsi_detector_set_variant(nsi_detector* detector, nsi_variant variant) {
  NSI_REQUIRE(detector);
  return guarded([&] { detector->opts.variant = to_variant(variant); });
}

nsi_status nsi_detector_set_theta(nsi_detector* detector, double theta) {
  NSI_REQUIRE(detector);
  return guarded([&] {
    DetectorOptions opts = detector->opts;
    opts.theta = theta;
    opts.validate();
    detector->opts = opts;
  });
}

nsi_status nsi_detector_set_intermediates(nsi_detector* detector, int enabled) {
  NSI_REQUIRE(detector);
  detector->opts.record_intermediates = enabled != 0;
  return NSI_OK;
}

void nsi_detector_free(nsi_detector* detector) { delete detector; }

nsi_status nsi_detect(const nsi_detector* detector, const nsi_kpi* kpi, nsi_report** out) {
  NSI_REQUIRE(detector);
  NSI_REQUIRE(kpi);
  NSI_REQUIRE(out);
  return guarded([&] {
    DetectionReport r = detect(kpi->m, detector->opts);
    AssignmentMatrix est = r.estimate;
    *out = new nsi_report{std::move(r), nsi_assignment{std::move(est)}};
  });
}

nsi_status nsi_report_read(const char* path, nsi_report** out) {
  NSI_REQUIRE(path);
  NSI_REQUIRE(out);
  return guarded([&] {
    DetectionReport r = io::parse_report(io::read_file(path), path);
    AssignmentMatrix est = r.estimate;
    *out = new nsi_report{std::move(r), nsi_assignment{std::move(est)}};
  });
}

nsi_status nsi_report_write(const nsi_report* report, const char* path) {
  NSI_REQUIRE(report);
  NSI_REQUIRE(path);
  return guarded([&] { io::write_file_atomic(path, io::format_report(report->report)); });
}

const nsi_assignment* nsi_report_estimate(const nsi_report* report) {
  return report ? &report->estimate : nullptr;
}

size_t nsi_report_warning_count(const nsi_report* report) { return report ? report->report.warnings.size() : 0; }

const char* nsi_report_warning(const nsi_report* report, size_t index) {
  if (!report || index >= report->report.warnings.size()) return nullptr;
  return report->report.warnings[index].c_str();
}

void nsi_report_free(nsi_report* report) { delete report; }

// ---- evaluation ------------------------------------------------------------------

nsi_status nsi_evaluate(const nsi_assignment* truth, const nsi_report* report, nsi_scorecard* out) {
  NSI_REQUIRE(truth);
  NSI_REQUIRE(report);
  NSI_REQUIRE(out);
  return guarded([&] {
    if (truth->a.slices() != report->report.estimate.slices()) {
      throw Error(ErrorKind::invalid_argument,
                  "dimension mismatch: truth has " + std::to_string(truth->a.slices()) + " slices, report has " +
                      std::to_string(report->report.estimate.slices()));
    }
    const ScoreCard card = score(truth->a, report->report);
    *out = nsi_scorecard{card.exact_fraction,
                         card.covered_fraction,
                         card.estimated_count,
                         report->report.intermediates ? 1 : 0,
                         card.stage1_missed,
                         card.stage1_false_pos};
  });
}

nsi_status nsi_scorecard_write(const nsi_scorecard* card, const char* path) {
  NSI_REQUIRE(card);
  NSI_REQUIRE(path);
  return guarded([&] {
    ScoreCard c;
    c.exact_fraction = card->exact_fraction;
    c.covered_fraction = card->covered_fraction;
    c.estimated_count = card->estimated_count;
    c.stage1_missed = card->stage1_missed;
    c.stage1_false_pos = card->stage1_false_pos;
    io::write_file_atomic(path, io::format_scorecard(c, card->has_stage1 != 0));
  });
}

nsi_status nsi_sweep_load(const char* path, int has_seed, uint64_t seed, nsi_sweep** out) {
  NSI_REQUIRE(path);
  NSI_REQUIRE(out);
  return guarded([&] {
    io::ConfigFile cfg = io::ConfigFile::load(path);
    *out = new nsi_sweep{io::sweep_spec_from(cfg, seed_arg(has_seed, seed))};
  });
}

nsi_status nsi_sweep_set_variant(nsi_sweep* sweep, nsi_variant variant) {
  NSI_REQUIRE(sweep);
  return guarded([&] { sweep->spec.variants = {to_variant(variant)}; });
}

nsi_status nsi_sweep_set_theta(nsi_sweep* sweep, double theta) {
  NSI_REQUIRE(sweep);
  return guarded([&] {
    DetectorOptions opts = sweep->spec.detector;
    opts.theta = theta;
    opts.validate();
    sweep->spec.detector = opts;
  });
}

void nsi_sweep_free(nsi_sweep* sweep) { delete sweep; }

nsi_status nsi_sweep_run(const nsi_sweep* sweep, nsi_sweep_result** out) {
  NSI_REQUIRE(sweep);
  NSI_REQUIRE(out);
  return guarded([&] { *out = new nsi_sweep_result{run_sweep(sweep->spec)}; });
}

size_t nsi_sweep_result_cells(const nsi_sweep_result* result) { return result ? result->cells.size() : 0; }

size_t nsi_sweep_result_partial_cells(const nsi_sweep_result* result) {
  if (!result) return 0;
  size_t n = 0;
  for (const auto& c : result->cells) n += c.partial() ? 1 : 0;
  return n;
}

nsi_status nsi_sweep_result_write(const nsi_sweep_result* result, const char* path) {
  NSI_REQUIRE(result);
  NSI_REQUIRE(path);
  return guarded([&] { io::write_file_atomic(path, io::format_sweep(result->cells)); });
}

void nsi_sweep_result_free(nsi_sweep_result* result) { delete result; }

nsi_status nsi_corr_study_run(const nsi_sim_config* config, nsi_corr_study** out) {
  NSI_REQUIRE(config);
  NSI_REQUIRE(out);
  return guarded([&] { *out = new nsi_corr_study{correlation_study(config->config)}; });
}

size_t nsi_corr_study_pairs(const nsi_corr_study* study) { return study ? study->study.pairs.size() : 0; }

nsi_status nsi_corr_study_errors(const nsi_corr_study* study, int* srcc_missed, int* srcc_false_pos,
                                 int* pcc_missed, int* pcc_false_pos) {
  NSI_REQUIRE(study);
  if (srcc_missed) *srcc_missed = study->study.srcc_stage1.stage1_missed;
  if (srcc_false_pos) *srcc_false_pos = study->study.srcc_stage1.stage1_false_pos;
  if (pcc_missed) *pcc_missed = study->study.pcc_stage1.stage1_missed;
  if (pcc_false_pos) *pcc_false_pos = study->study.pcc_stage1.stage1_false_pos;
  return NSI_OK;
}

nsi_status nsi_corr_study_sharing_means(const nsi_corr_study* study, double* srcc, double* pcc) {
  NSI_REQUIRE(study);
  double s = 0.0, p = 0.0;
  int n = 0;
  for (const auto& r : study->study.pairs) {
    if (!r.sharing) continue;
    s += r.srcc;
    p += r.pcc;
    ++n;
  }
  if (srcc) *srcc = n ? s / n : 0.0;
  if (pcc) *pcc = n ? p / n : 0.0;
  return NSI_OK;
}

nsi_status nsi_corr_study_write(const nsi_corr_study* study, const char* path) {
  NSI_REQUIRE(study);
  NSI_REQUIRE(path);
  return guarded([&] { io::write_file_atomic(path, io::format_corr_study(study->study)); });
}

void nsi_corr_study_free(nsi_corr_study* study) { delete study; }

}  // extern "C"
