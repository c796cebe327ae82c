// Command-line front end: load a channel description (file or builtin),
// run the requested analysis, and print a text or JSON report.

#include <algorithm>
#include <chrono>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include <ebtkit/basis_repr.hpp>
#include <ebtkit/builtins.hpp>
#include <ebtkit/ebt_analysis.hpp>
#include <ebtkit/extremality.hpp>
#include <ebtkit/io.hpp>

namespace {

using namespace ebtkit;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::parse_error:
      return 2;
    case errc::tolerance_failure:
    case errc::merge_stall:
      return 4;
    default:
      return 3;
  }
}

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

std::string verdict_name(EbtStatus s) {
  switch (s) {
    case EbtStatus::ebt:
      return "EBT";
    case EbtStatus::not_ebt:
      return "NotEBT";
    default:
      return "Undecided";
  }
}

std::string cpt_name(CptExtremality c) {
  switch (c) {
    case CptExtremality::yes:
      return "yes";
    case CptExtremality::no:
      return "no";
    default:
      return "marginal";
  }
}

std::string class_name(StructuralClass c) {
  switch (c) {
    case StructuralClass::cq:
      return "cq";
    case StructuralClass::extreme_cq:
      return "extreme-cq";
    case StructuralClass::qc:
      return "qc";
    case StructuralClass::point:
      return "point";
    case StructuralClass::block_projection:
      return "block-projection";
    default:
      return "general";
  }
}

std::string hint_name(EbtExtremeVerdict v) {
  switch (v) {
    case EbtExtremeVerdict::extreme:
      return "extreme";
    case EbtExtremeVerdict::not_extreme:
      return "not-extreme";
    default:
      return "inconclusive";
  }
}

struct LoadedChannel {
  Channel channel;
  std::string label;
};

LoadedChannel resolve_input(const std::string& builtin,
                            const std::vector<std::string>& paths) {
  if (!builtin.empty() && !paths.empty())
    fail(errc::parse_error, "give either --builtin or input files, not both");
  if (!builtin.empty()) return {builtin_channel(builtin), "builtin:" + builtin};
  if (paths.size() != 1)
    fail(errc::parse_error, "expected exactly one input file or --builtin");
  return {load_channel(paths[0]), paths[0]};
}

Json report_header(const std::string& report, const std::string& label,
                   const Channel& ch) {
  Json j;
  j["ebtkit-spec"] = kSpecVersion;
  j["report"] = report;
  j["input"] = label;
  j["dims"] = Json{{"in", dim_in(ch)}, {"out", dim_out(ch)}};
  return j;
}

//------------------------------------------------------------------------
// classify
//------------------------------------------------------------------------

struct ClassifyOutput {
  std::string text;
  Json json;
};

ClassifyOutput run_classify_one(const std::string& builtin,
                                const std::string& path, double tolerance) {
  LoadedChannel in = resolve_input(
      builtin, path.empty() ? std::vector<std::string>{}
                            : std::vector<std::string>{path});
  auto start = std::chrono::steady_clock::now();
  EbtVerdict v = classify(in.channel);
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();

  EbtStatus status = v.status;
  std::string note;
  if (status == EbtStatus::ebt && v.certificate_residual > tolerance) {
    status = EbtStatus::undecided;
    note = "certificate residual " + num(v.certificate_residual) +
           " exceeds tolerance " + num(tolerance);
  }

  std::ostringstream text;
  text << "input: " << in.label << "\n";
  text << "dims: " << dim_in(in.channel) << " -> " << dim_out(in.channel)
       << "\n";
  text << "verdict: " << verdict_name(status) << "\n";
  if (v.witness)
    text << "witness: " << v.witness->test << " test (value "
         << num(v.witness->value) << ", bound " << num(v.witness->bound)
         << ")\n";
  if (v.certificate)
    text << "certificate: measure-and-prepare form with "
         << v.certificate->pairs().size() << " pairs, choi residual "
         << num(v.certificate_residual) << "\n";
  if (!note.empty()) text << "note: " << note << "\n";
  if (v.diagnostics)
    text << "diagnostics: choi rank " << v.diagnostics->choi_rank
         << ", min PT eigenvalue " << num(v.diagnostics->min_pt_eigenvalue)
         << ", max choi eigenvalue " << num(v.diagnostics->max_eigenvalue)
         << "\n";
  text << "elapsed: " << num(ms) << " ms\n";

  Json j = report_header("classify", in.label, in.channel);
  j["verdict"] = status == EbtStatus::ebt
                     ? "ebt"
                     : (status == EbtStatus::not_ebt ? "not-ebt" : "undecided");
  if (v.diagnostics)
    j["diagnostics"] = Json{{"choi-rank", v.diagnostics->choi_rank},
                            {"min-pt-eigenvalue", v.diagnostics->min_pt_eigenvalue},
                            {"max-eigenvalue", v.diagnostics->max_eigenvalue}};
  if (v.witness)
    j["witness"] = Json{{"test", v.witness->test},
                        {"value", v.witness->value},
                        {"bound", v.witness->bound}};
  if (v.certificate) {
    j["certificate"] = channel_to_json(Channel(*v.certificate));
    j["certificate-residual"] = v.certificate_residual;
  }
  if (!note.empty()) j["note"] = note;
  j["elapsed-ms"] = ms;
  return {text.str(), std::move(j)};
}

int run_classify(const std::string& builtin,
                 const std::vector<std::string>& paths, bool as_json,
                 double tolerance, unsigned jobs) {
  if (!builtin.empty() || paths.size() <= 1) {
    ClassifyOutput out = run_classify_one(
        builtin, paths.empty() ? std::string{} : paths[0], tolerance);
    if (as_json)
      std::cout << out.json.dump(2) << "\n";
    else
      std::cout << out.text;
    return 0;
  }

  // Multiple files: analyses are independent, so batches may run concurrently.
  if (jobs < 1) jobs = 1;
  std::vector<ClassifyOutput> results(paths.size());
  std::vector<std::string> errors(paths.size());
  for (size_t base = 0; base < paths.size(); base += jobs) {
    size_t end = std::min(paths.size(), base + jobs);
    std::vector<std::future<void>> batch;
    for (size_t i = base; i < end; ++i)
      batch.push_back(std::async(std::launch::async, [&, i] {
        try {
          results[i] = run_classify_one("", paths[i], tolerance);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }));
    for (auto& f : batch) f.get();
  }

  int worst = 0;
  Json all = Json::array();
  for (size_t i = 0; i < paths.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "error: " << paths[i] << ": " << errors[i] << "\n";
      worst = std::max(worst, 3);
      continue;
    }
    if (as_json)
      all.push_back(results[i].json);
    else
      std::cout << results[i].text << "\n";
  }
  if (as_json) std::cout << all.dump(2) << "\n";
  return worst;
}

//------------------------------------------------------------------------
// convert
//------------------------------------------------------------------------

int run_convert(const std::string& builtin, const std::vector<std::string>& paths,
                const std::string& target, const std::string& output,
                double tolerance) {
  LoadedChannel in = resolve_input(builtin, paths);
  Channel out = [&]() -> Channel {
    if (target == "choi") return Channel(choi_of(in.channel));
    if (target == "kraus") return Channel(kraus_of(in.channel));
    if (std::holds_alternative<HolevoChannel>(in.channel)) return in.channel;
    EbtVerdict v = classify(in.channel);
    if (v.status != EbtStatus::ebt || !v.certificate ||
        v.certificate_residual > tolerance)
      fail(errc::not_ebt_input,
           "no measure-and-prepare form: channel is " +
               verdict_name(v.status) + " (certificate residual " +
               num(v.certificate_residual) + ")");
    return Channel(*v.certificate);
  }();
  std::string text = serialize_channel(out);
  if (output.empty())
    std::cout << text;
  else
    write_file(output, text);
  return 0;
}

//------------------------------------------------------------------------
// extremal
//------------------------------------------------------------------------

int run_extremal(const std::string& builtin,
                 const std::vector<std::string>& paths, bool as_json) {
  LoadedChannel in = resolve_input(builtin, paths);
  ExtremalityReport cpt = cpt_extremality(kraus_of(in.channel));
  std::optional<EbtExtremalityHints> hints;
  std::string hints_note;
  try {
    hints = ebt_extremality_hints(in.channel);
  } catch (const Error& e) {
    if (e.code() != errc::not_ebt_input) throw;
    hints_note =
        "extremality hints need an entanglement-breaking channel; "
        "run `classify` for details";
  }

  if (!as_json) {
    std::cout << "input: " << in.label << "\n";
    std::cout << "dims: " << dim_in(in.channel) << " -> "
              << dim_out(in.channel) << "\n";
    std::cout << "structural class: " << class_name(cpt.structural_class)
              << "\n";
    std::cout << "cpt-extreme: " << cpt_name(cpt.cpt_extreme)
              << " (gram min singular value " << num(cpt.gram_min_singular_value)
              << ")\n";
    if (hints) {
      std::cout << "ebt-extreme: " << hint_name(hints->verdict) << "\n";
      std::cout << "consistent: " << (hints->consistent ? "yes" : "no") << "\n";
      if (!hints->builtin.empty())
        std::cout << "builtin match: " << hints->builtin << "\n";
      if (!hints->reason.empty()) std::cout << "reason: " << hints->reason << "\n";
      if (hints->split)
        std::cout << "split: weight " << num(hints->split->weight)
                  << ", parts with " << hints->split->first.pairs().size()
                  << " and " << hints->split->second.pairs().size()
                  << " pairs (full matrices in --json output)\n";
    } else {
      std::cout << "ebt-extreme: not-applicable\n";
      std::cout << "note: " << hints_note << "\n";
    }
    return 0;
  }

  Json j = report_header("extremal", in.label, in.channel);
  j["structural-class"] = class_name(cpt.structural_class);
  j["cpt-extreme"] = cpt_name(cpt.cpt_extreme);
  j["gram-min-singular-value"] = cpt.gram_min_singular_value;
  if (hints) {
    j["ebt-extreme"] = hint_name(hints->verdict);
    j["consistent"] = hints->consistent;
    if (!hints->builtin.empty()) j["builtin"] = hints->builtin;
    if (!hints->reason.empty()) j["reason"] = hints->reason;
    if (hints->split)
      j["split"] = Json{
          {"weight", hints->split->weight},
          {"first", channel_to_json(Channel(hints->split->first))},
          {"second", channel_to_json(Channel(hints->split->second))}};
  } else {
    j["ebt-extreme"] = "not-applicable";
    j["note"] = hints_note;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

//------------------------------------------------------------------------
// tmatrix
//------------------------------------------------------------------------

int run_tmatrix(const std::string& builtin,
                const std::vector<std::string>& paths, bool as_json,
                double tolerance) {
  LoadedChannel in = resolve_input(builtin, paths);
  Index d = dim_in(in.channel);
  TransferMatrix t = transfer_matrix(in.channel, gell_mann_basis(d));
  Index rank = numerical_rank(t.t.cast<Complex>().eval());
  bool tp_row = std::abs(t.t(0, 0) - 1.0) <= tolerance &&
                t.t.row(0).tail(t.t.cols() - 1).norm() <= tolerance;
  std::optional<DiagNecessaryResult> diag;
  if (d == 2) diag = ebt_diag_necessary(t);

  if (!as_json) {
    std::cout << "input: " << in.label << "\n";
    std::cout << "basis: gellmann (" << t.t.rows() << " elements)\n";
    std::cout << "T =\n";
    for (Index r = 0; r < t.t.rows(); ++r) {
      for (Index c = 0; c < t.t.cols(); ++c)
        std::cout << std::setw(10) << std::fixed << std::setprecision(4)
                  << t.t(r, c);
      std::cout << "\n";
    }
    std::cout.unsetf(std::ios::fixed);
    std::cout << std::setprecision(6);
    std::cout << "rank: " << rank << "\n";
    std::cout << "trace-preserving first row: " << (tp_row ? "yes" : "no")
              << "\n";
    if (diag) {
      std::cout << "diagonal sum: " << num(diag->diagonal_sum) << "\n";
      std::cout << (diag->satisfied
                        ? "within the measure-and-prepare bound of 1\n"
                        : "exceeds 1: not a measure-and-prepare channel\n");
    }
    return 0;
  }

  Json j = report_header("tmatrix", in.label, in.channel);
  j["basis"] = "gellmann";
  Json rows = Json::array();
  for (Index r = 0; r < t.t.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < t.t.cols(); ++c) row.push_back(t.t(r, c));
    rows.push_back(std::move(row));
  }
  j["t"] = std::move(rows);
  j["rank"] = rank;
  j["tp-first-row"] = tp_row;
  if (diag) {
    j["diagonal-sum"] = diag->diagonal_sum;
    j["diagonal-sum-within-bound"] = diag->satisfied;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

//------------------------------------------------------------------------
// simulate
//------------------------------------------------------------------------

int run_simulate(const std::string& builtin,
                 const std::vector<std::string>& paths,
                 const std::string& state_path, long long samples,
                 std::uint64_t seed, bool as_json, double tolerance) {
  LoadedChannel in = resolve_input(builtin, paths);
  HolevoChannel h = [&]() {
    if (const auto* hp = std::get_if<HolevoChannel>(&in.channel)) return *hp;
    EbtVerdict v = classify(in.channel);
    if (v.status != EbtStatus::ebt || !v.certificate ||
        v.certificate_residual > tolerance)
      fail(errc::not_ebt_input,
           "simulation needs a measure-and-prepare form; channel is " +
               verdict_name(v.status));
    return *v.certificate;
  }();

  DensityMatrix rho =
      state_path.empty()
          ? DensityMatrix((ComplexMatrix::Identity(h.dim_in(), h.dim_in()) /
                           double(h.dim_in()))
                              .eval())
          : load_state(state_path);
  SimulationResult res = simulate_measure_prepare(h, rho, samples, seed);
  DensityMatrix exact = apply(in.channel, rho);
  double dist = trace_distance(res.empirical, exact);

  if (!as_json) {
    std::cout << "input: " << in.label << "\n";
    std::cout << "state: "
              << (state_path.empty() ? "maximally mixed (default)" : state_path)
              << "\n";
    std::cout << "samples: " << samples << ", seed: " << seed << "\n";
    std::cout << "outcome  count  observed  expected\n";
    for (size_t k = 0; k < res.counts.size(); ++k)
      std::cout << std::setw(7) << k << std::setw(8) << res.counts[k]
                << std::setw(10) << num(double(res.counts[k]) / double(samples))
                << std::setw(10) << num(res.probabilities[k]) << "\n";
    std::cout << "trace distance (empirical vs exact output): " << num(dist)
              << "\n";
    return 0;
  }

  Json j = report_header("simulate", in.label, in.channel);
  j["state"] = state_path.empty() ? "maximally-mixed" : state_path;
  j["samples"] = samples;
  j["seed"] = seed;
  j["counts"] = res.counts;
  j["probabilities"] = res.probabilities;
  j["empirical-state"] = detail::matrix_to_json(res.empirical.matrix());
  j["exact-state"] = detail::matrix_to_json(exact.matrix());
  j["trace-distance"] = dist;
  std::cout << j.dump(2) << "\n";
  return 0;
}

//------------------------------------------------------------------------
// builtins
//------------------------------------------------------------------------

int run_builtins(bool as_json) {
  if (!as_json) {
    for (const BuiltinInfo& b : builtin_catalog())
      std::cout << std::left << std::setw(24) << b.name << b.summary << "\n";
    return 0;
  }
  Json j = Json::array();
  for (const BuiltinInfo& b : builtin_catalog())
    j.push_back(Json{{"name", b.name}, {"summary", b.summary}});
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analysis toolkit for entanglement-breaking quantum channels"};
  app.require_subcommand(1);

  std::string builtin;
  std::vector<std::string> paths;
  std::string target;
  std::string output;
  std::string state_path;
  std::string basis = "gellmann";
  bool as_json = false;
  double tolerance = tol::kCertificate;
  long long samples = 100000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  auto add_input = [&](CLI::App* sub, bool many) {
    sub->add_option("--builtin", builtin, "builtin channel name, e.g. tetrahedron");
    sub->add_option("files", paths, many ? "channel files (JSON)" : "channel file (JSON)");
    sub->add_flag("--json", as_json, "emit a JSON report");
  };

  CLI::App* classify_cmd =
      app.add_subcommand("classify", "decide whether a channel is entanglement breaking");
  add_input(classify_cmd, true);
  classify_cmd->add_option("--tol", tolerance, "certificate residual tolerance");
  classify_cmd->add_option("--jobs", jobs, "classify files concurrently");

  CLI::App* convert_cmd =
      app.add_subcommand("convert", "convert between kraus, holevo, and choi forms");
  add_input(convert_cmd, false);
  convert_cmd->add_option("--to", target, "target form")
      ->required()
      ->check(CLI::IsMember({"kraus", "holevo", "choi"}));
  convert_cmd->add_option("-o,--output", output, "write to a file instead of stdout");
  convert_cmd->add_option("--tol", tolerance, "certificate residual tolerance");

  CLI::App* extremal_cmd =
      app.add_subcommand("extremal", "structural class and extremality analysis");
  add_input(extremal_cmd, false);

  CLI::App* tmatrix_cmd =
      app.add_subcommand("tmatrix", "transfer matrix in an orthonormal operator basis");
  add_input(tmatrix_cmd, false);
  tmatrix_cmd->add_option("--basis", basis, "operator basis")
      ->check(CLI::IsMember({"gellmann"}));
  tmatrix_cmd->add_option("--tol", tolerance, "trace-preservation check tolerance");

  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "sample the measure-and-prepare process and compare with the exact output");
  add_input(simulate_cmd, false);
  simulate_cmd->add_option("--state", state_path, "input state file (default: maximally mixed)");
  simulate_cmd->add_option("--samples", samples, "number of measurement shots");
  simulate_cmd->add_option("--seed", seed, "RNG seed; fully determines the output");
  simulate_cmd->add_option("--tol", tolerance, "certificate residual tolerance");

  CLI::App* builtins_cmd = app.add_subcommand("builtins", "list builtin channels");
  builtins_cmd->add_flag("--json", as_json, "emit a JSON list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (classify_cmd->parsed())
      return run_classify(builtin, paths, as_json, tolerance, jobs);
    if (convert_cmd->parsed())
      return run_convert(builtin, paths, target, output, tolerance);
    if (extremal_cmd->parsed()) return run_extremal(builtin, paths, as_json);
    if (tmatrix_cmd->parsed())
      return run_tmatrix(builtin, paths, as_json,
                         tmatrix_cmd->count("--tol") ? tolerance : 1e-9);
    if (simulate_cmd->parsed())
      return run_simulate(builtin, paths, state_path, samples, seed, as_json,
                          tolerance);
    if (builtins_cmd->parsed()) return run_builtins(as_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
