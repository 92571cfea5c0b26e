#include <filesystem>
#include <iostream>

#include "commands.hpp"
#include "natalia/metrics/agreement.hpp"
#include "natalia/metrics/classification.hpp"
#include "natalia/metrics/tlx.hpp"

namespace fs = std::filesystem;

namespace natalia::cli {

namespace {

struct EvalArgs {
  fs::path pairs;
  fs::path rows;
  fs::path responses;
  fs::path json_out;
};

int emit(const nlohmann::json& j, const std::string& text, const fs::path& json_out) {
  std::cout << text;
  if (!json_out.empty()) write_text(json_out, j.dump(2) + "\n");
  return kOk;
}

int run_pairs(const EvalArgs& a) {
  const auto pairs = metrics::read_pairs_csv(a.pairs);
  const auto cm = metrics::confusion(pairs);
  return emit(metrics::classification_report_json(cm), metrics::classification_report_text(cm),
              a.json_out);
}

int run_agreement(const EvalArgs& a) {
  const auto report = metrics::agreement_report(metrics::read_agreement_csv(a.rows));
  return emit(metrics::agreement_report_json(report), metrics::agreement_report_text(report),
              a.json_out);
}

int run_tlx(const EvalArgs& a) {
  const auto responses = metrics::read_tlx_csv(a.responses);
  const auto summary = metrics::aggregate_tlx(responses);
  return emit(metrics::tlx_summary_json(summary), metrics::tlx_summary_text(summary), a.json_out);
}

}  // namespace

void register_eval(CLI::App& app, Action& action) {
  auto args = std::make_shared<EvalArgs>();
  auto* eval = app.add_subcommand("eval", "Evaluation reports");
  eval->add_option("--pairs", args->pairs, "CSV: true,predicted");
  eval->add_option("--json", args->json_out, "Also write the JSON report here");
  eval->require_subcommand(0, 1);

  auto* agreement = eval->add_subcommand("agreement", "Per-study plane agreement report");
  agreement->add_option("--rows", args->rows,
                        "CSV: study_id, AC..FL system counts, AC..FL specialist counts")
      ->required();
  agreement->add_option("--json", args->json_out, "Also write the JSON report here");

  auto* tlx = eval->add_subcommand("tlx", "NASA-TLX workload summary");
  tlx->add_option("--responses", args->responses,
                  "CSV: participant,mental,physical,temporal,performance,effort,frustration")
      ->required();
  tlx->add_option("--json", args->json_out, "Also write the JSON report here");

  agreement->callback([args, &action] { action = [args] { return run_agreement(*args); }; });
  tlx->callback([args, &action] { action = [args] { return run_tlx(*args); }; });
  eval->callback([args, eval, &action] {
    if (eval->get_subcommands().empty()) {
      if (args->pairs.empty()) {
        throw CLI::ParseError("eval needs --pairs or a subcommand (agreement, tlx)",
                              CLI::ExitCodes::RequiredError);
      }
      action = [args] { return run_pairs(*args); };
    } else if (!args->pairs.empty()) {
      throw CLI::ValidationError("--pairs", "cannot be combined with a subcommand");
    }
  });
}

}  // namespace natalia::cli
