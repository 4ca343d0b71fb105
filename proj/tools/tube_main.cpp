#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tube/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tube::InputError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_out(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw tube::InputError("cannot write file: " + out_path);
  out << text;
}

std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> ids;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) ids.push_back(item);
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explicit tubular-neighborhood bounds and the constructive flow"};
  app.require_subcommand(1);

  std::string config_path, out_path, checks_csv, format = "json", in_path, radius_arg = "auto";
  bool paper_alpha = false;
  int starts = 32;

  auto* cmd_bounds = app.add_subcommand("bounds", "print every constant certificate");
  cmd_bounds->add_option("--config", config_path, "scene config (json)")->required();
  cmd_bounds->add_flag("--paper-alpha", paper_alpha,
                       "also evaluate the printed closed-form alpha");
  cmd_bounds->add_option("--out", out_path, "output file (default stdout)");

  auto* cmd_verify = app.add_subcommand("verify", "run the registered check suite");
  cmd_verify->add_option("--config", config_path, "scene config (json)")->required();
  cmd_verify->add_option("--checks", checks_csv, "comma-separated check ids (default all)");
  cmd_verify->add_option("--format", format, "json | csv | text");
  cmd_verify->add_option("--out", out_path, "output file (default stdout)");

  auto* cmd_moser = app.add_subcommand("moser", "run the construction and print residuals");
  cmd_moser->add_option("--config", config_path, "scene config (json)")->required();
  cmd_moser->add_option("--radius", radius_arg, "tube radius or 'auto'");
  cmd_moser->add_option("--starts", starts, "number of flow starts");
  cmd_moser->add_option("--out", out_path, "output file (default stdout)");

  auto* cmd_report = app.add_subcommand("report", "convert a json report");
  cmd_report->add_option("--in", in_path, "report json produced by verify")->required();
  cmd_report->add_option("--format", format, "csv | text | json")->required();
  cmd_report->add_option("--out", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_bounds->parsed()) {
      const tube::harness::Scene scene = tube::harness::load_scene(slurp(config_path));
      nlohmann::ordered_json doc;
      doc["schema"] = "tube-certificates-v1";
      doc["scene"] = tube::harness::scene_summary_json(scene);
      doc["certificates"] = tube::harness::certificates_json(scene, paper_alpha);
      write_out(doc.dump(2) + "\n", out_path);
    } else if (cmd_verify->parsed()) {
      const tube::harness::Scene scene = tube::harness::load_scene(slurp(config_path));
      const auto result = tube::harness::run_suite(scene, split_ids(checks_csv));
      write_out(tube::harness::emit_report(result, format), out_path);
      for (const auto& r : result.reports)
        if (r.verdict == "fail") return 1;
    } else if (cmd_moser->parsed()) {
      const tube::harness::Scene scene = tube::harness::load_scene(slurp(config_path));
      double radius = -1.0;
      if (radius_arg != "auto") radius = std::stod(radius_arg);
      const auto doc = tube::harness::run_moser(scene, radius, starts);
      write_out(doc.dump(2) + "\n", out_path);
    } else if (cmd_report->parsed()) {
      const auto doc = nlohmann::ordered_json::parse(slurp(in_path));
      tube::harness::SuiteResult result;
      result.seed = doc.value("seed", std::uint64_t{0});
      result.scene_summary = doc.value("scene", nlohmann::ordered_json::object());
      for (const auto& j : doc.value("checks", nlohmann::ordered_json::array())) {
        tube::harness::CheckReport r;
        r.check_id = j.value("check_id", "");
        r.anchor = j.value("anchor", "");
        r.n_samples = j.value("n_samples", 0);
        r.worst_margin = j.value("worst_margin", 0.0);
        r.verdict = j.value("verdict", "");
        r.hypothesis = j.value("hypothesis", "");
        if (j.contains("inputs")) r.inputs = j["inputs"];
        if (j.contains("worst_sample")) r.worst_sample = j["worst_sample"];
        result.reports.push_back(std::move(r));
      }
      write_out(tube::harness::emit_report(result, format), out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
