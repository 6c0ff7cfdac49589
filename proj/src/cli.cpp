#include "shopsim/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "shopsim/episode.hpp"
#include "shopsim/policy.hpp"
#include "shopsim/render.hpp"

namespace shopsim {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

EpisodeValidation validate_episode_dir(const fs::path& dir) {
  EpisodeValidation v;
  const char* required[] = {"world.json",     "order.json",       "semantic_map.json",
                            "history.jsonl",  "decisions.jsonl",  "transitions.jsonl",
                            "trajectory.csv", "gates.jsonl"};
  for (const char* name : required) {
    if (!fs::exists(dir / name)) {
      v.problems.push_back(std::string("missing artifact: ") + name);
    }
  }
  if (!v.problems.empty()) return v;

  try {
    load_world_file((dir / "world.json").string());
  } catch (const Error& e) {
    v.problems.push_back(std::string("world.json: ") + e.what());
  }
  try {
    load_order(read_file(dir / "order.json"));
  } catch (const Error& e) {
    v.problems.push_back(std::string("order.json: ") + e.what());
  }
  try {
    load_map(read_file(dir / "semantic_map.json"));
  } catch (const Error& e) {
    v.problems.push_back(std::string("semantic_map.json: ") + e.what());
  }
  {
    std::ifstream in(dir / "history.jsonl");
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++n;
      try {
        HistoryEvent::from_json(nlohmann::json::parse(line));
      } catch (const std::exception& e) {
        v.problems.push_back("history.jsonl line " + std::to_string(n) + ": " + e.what());
        break;
      }
    }
  }
  {
    std::ifstream in(dir / "gates.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        ++v.ticks_checked;
        if (j.at("gates").size() > 1) ++v.gate_violations;
      } catch (const std::exception& e) {
        v.problems.push_back(std::string("gates.jsonl: ") + e.what());
        break;
      }
    }
  }
  try {
    load_trajectory_csv(read_file(dir / "trajectory.csv"));
  } catch (const Error& e) {
    v.problems.push_back(std::string("trajectory.csv: ") + e.what());
  }
  v.ok = v.problems.empty() && v.gate_violations == 0;
  return v;
}

ReplayReport replay_episode_dir(const fs::path& dir) {
  ReplayReport report;
  std::ifstream in(dir / "decisions.jsonl");
  if (!in) {
    report.warnings.push_back("decisions.jsonl missing or unreadable");
    return report;
  }
  const StoreCapabilities caps = StoreCapabilities::defaults();
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++n;
    nlohmann::json j;
    DecisionContext ctx;
    Action logged{};
    try {
      j = nlohmann::json::parse(line);
      ctx = DecisionContext::from_json(j.at("context"));
      logged = Action::parse(j.at("action").get<std::string>());
    } catch (const std::exception& e) {
      report.warnings.push_back("decisions.jsonl line " + std::to_string(n) +
                                " unusable: " + e.what());
      continue;
    }
    ++report.decisions;
    const Action oracle = decide_oracle(ctx, caps);
    const bool match = oracle == logged;
    if (match) ++report.agreements;
    std::ostringstream ss;
    ss << ctx.junction.id << ": logged " << logged.serialize() << ", oracle "
       << oracle.serialize() << (match ? " [match]" : " [diff]");
    report.lines.push_back(ss.str());
  }
  return report;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"corridor-world shopping robot simulator"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "run one seeded episode");
  std::string world_path, order_text, order_file, policy = "oracle", out_dir;
  std::uint64_t seed = 0;
  double dt = 0.05;
  long max_ticks = 200000;
  run->add_option("--world", world_path, "world JSON file")->required();
  auto* opt_text = run->add_option("--order", order_text, "order in natural language");
  auto* opt_file = run->add_option("--order-file", order_file, "file with the order text");
  opt_text->excludes(opt_file);
  run->add_option("--policy", policy, "decision policy")
      ->check(CLI::IsMember({"oracle", "llm"}));
  run->add_option("--seed", seed, "rng seed");
  run->add_option("--dt", dt, "tick length in seconds");
  run->add_option("--max-ticks", max_ticks, "tick budget");
  run->add_option("--out", out_dir, "artifact directory")->required();

  // --- validate ---
  auto* validate = app.add_subcommand("validate", "validate a world file or episode dir");
  std::string v_world, v_episode;
  validate->add_option("--world", v_world, "world JSON file to check");
  validate->add_option("--episode", v_episode, "episode directory to check");

  // --- replay ---
  auto* replay = app.add_subcommand("replay", "diff logged decisions against the oracle");
  std::string r_dir;
  replay->add_option("dir", r_dir, "episode directory")->required();

  // --- render ---
  auto* render = app.add_subcommand("render", "render an episode to SVG or ASCII");
  std::string g_dir, format = "svg", g_out;
  render->add_option("dir", g_dir, "episode directory")->required();
  render->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"svg", "ascii"}));
  render->add_option("--out", g_out, "output file (defaults inside the episode dir)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 64;
  }

  try {
    if (run->parsed()) {
      if (order_text.empty() && order_file.empty()) {
        err << "usage error: one of --order/--order-file is required\n";
        return 64;
      }
      const std::string text =
          !order_text.empty() ? order_text : read_file(order_file);
      const OrderList order = parse_order_rules(text);

      EpisodeParams params;
      params.dt = dt;
      params.max_ticks = max_ticks;
      params.policy = policy;
      params.seed = seed;
      params.out_dir = out_dir;

      std::unique_ptr<HttpLlmTransport> llm;
      if (policy == "llm") {
        llm = std::make_unique<HttpLlmTransport>(HttpLlmConfig::from_env());
      }
      const int code = run_episode_from_files(world_path, order, params, llm.get());
      out << (code == 0 ? "mission complete" : "tick budget exhausted") << "\n";
      return code;
    }

    if (validate->parsed()) {
      if (!v_world.empty()) {
        load_world_file(v_world);
        out << "world ok: " << v_world << "\n";
      }
      if (!v_episode.empty()) {
        const EpisodeValidation v = validate_episode_dir(v_episode);
        out << "ticks checked: " << v.ticks_checked
            << ", gate violations: " << v.gate_violations << "\n";
        for (const auto& p : v.problems) out << "problem: " << p << "\n";
        if (!v.ok) return 1;
        out << "episode ok: " << v_episode << "\n";
      }
      if (v_world.empty() && v_episode.empty()) {
        err << "usage error: nothing to validate\n";
        return 64;
      }
      return 0;
    }

    if (replay->parsed()) {
      const ReplayReport report = replay_episode_dir(r_dir);
      for (const auto& w : report.warnings) out << "warning: " << w << "\n";
      for (const auto& l : report.lines) out << l << "\n";
      out << "agreement: " << report.agreements << "/" << report.decisions << "\n";
      return 0;
    }

    if (render->parsed()) {
      const fs::path dir = g_dir;
      const WorldConfig config = load_world_file((dir / "world.json").string());
      const SemanticMap map = load_map(read_file(dir / "semantic_map.json"));
      const auto trajectory = load_trajectory_csv(read_file(dir / "trajectory.csv"));
      const fs::path target =
          g_out.empty() ? dir / (format == "svg" ? "render.svg" : "render.txt")
                        : fs::path(g_out);
      std::ofstream o(target, std::ios::binary);
      if (format == "svg") {
        o << render_svg(config, map, trajectory);
      } else {
        o << render_ascii(config, trajectory);
      }
      out << "wrote " << target.string() << "\n";
      return 0;
    }
  } catch (const InvalidConfig& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}

}  // namespace shopsim
