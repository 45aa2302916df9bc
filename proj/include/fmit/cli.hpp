#pragma once

// Command-line front end. run() takes its streams explicitly so the whole
// program can be driven in-process.
//
//   fmit compare A.xml B.xml [--threshold T] [--tau T] [--report [PATH]] [--json]
//   fmit merge A.xml B.xml --mode auto [--strategy S] [--out PATH]
//   fmit merge A.xml B.xml --mode semi [--decisions FILE] [--out PATH]
//   fmit enumerate M.xml [--max N]
//   fmit validate M.xml
//   fmit bench --scenarios DIR
//   fmit serve [--host H] [--port P] [--cors] [--static DIR]
//
// Exit codes: 0 success, 1 model/parse/runtime failure, 2 bad usage.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fmit/compare.hpp"
#include "fmit/json.hpp"
#include "fmit/logic.hpp"
#include "fmit/merge.hpp"
#include "fmit/report.hpp"
#include "fmit/server.hpp"
#include "fmit/session.hpp"
#include "fmit/xml.hpp"

namespace fmit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

class Failure : public std::runtime_error {
 public:
  explicit Failure(const std::string& what, int code = kExitFailure) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

namespace detail {

namespace fs = std::filesystem;

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure("cannot write '" + path + "'");
  out << content;
}

inline std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

/// Parses a model file, echoing diagnostics to err. Failure on any error.
inline FeatureModel loadModel(const std::string& path, std::ostream& err) {
  ParseResult r = parseXml(readFile(path), stem(path));
  for (const auto& d : r.diagnostics) err << path << ":" << formatDiagnostic(d) << "\n";
  if (!r.ok()) throw Failure("'" + path + "' is not a valid feature model");
  return std::move(*r.model);
}

inline std::optional<Choice> parseChoice(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "b" || s == "base" || s == "keep_base") return Choice::KeepBase;
  if (s == "o" || s == "other" || s == "keep_other") return Choice::KeepOther;
  return std::nullopt;
}

/// Lines of "conflictId choice"; blank lines and '#' comments are skipped.
inline std::map<int, Choice> readDecisions(const std::string& path) {
  std::map<int, Choice> out;
  std::istringstream lines(readFile(path));
  std::string line;
  int lineNo = 0;
  while (std::getline(lines, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string idText;
    std::string choiceText;
    if (!(fields >> idText)) continue;
    std::string extra;
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(idText, &used);
      if (used != idText.size()) throw std::invalid_argument(idText);
    } catch (const std::exception&) {
      throw Failure(path + ":" + std::to_string(lineNo) + ": bad conflict id '" + idText + "'");
    }
    auto choice = (fields >> choiceText) ? parseChoice(choiceText) : std::nullopt;
    if (!choice || (fields >> extra))
      throw Failure(path + ":" + std::to_string(lineNo) + ": expected '<conflictId> keep_base|keep_other'");
    out[id] = *choice;
  }
  return out;
}

struct Thresholds {
  double tau = kDefaultNameThreshold;
  double theta = kDefaultModeThreshold;
};

inline double envThreshold() {
  const char* v = std::getenv("FMIT_THRESHOLD");
  if (v == nullptr || *v == '\0') return kDefaultModeThreshold;
  char* end = nullptr;
  const double x = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(x > 0.0 && x <= 1.0))
    throw Failure(std::string("FMIT_THRESHOLD must be a number in (0,1], got '") + v + "'", kExitUsage);
  return x;
}

inline void addThresholdOptions(CLI::App* cmd, Thresholds& t) {
  cmd->add_option("--threshold", t.theta, "CEE threshold for automatic integration")
      ->check(CLI::PositiveNumber)
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--tau", t.tau, "minimum Jaro-Winkler score for pairing renamed features")
      ->check(CLI::PositiveNumber)
      ->check(CLI::Range(0.0, 1.0));
}

inline ComparisonOptions options(const Thresholds& t) { return {t.tau, t.theta}; }

inline std::string describeForPrompt(const Conflict& c, const FeatureModel& base) {
  switch (c.kind) {
    case ConflictKind::Name:
      return "Feature name differs: base '" + c.baseValue + "', other '" + c.otherValue + "'.";
    case ConflictKind::RelationshipKind:
      return "Relationship of '" + base.at(c.baseFeature).name + "' differs: base " + c.baseValue +
             ", other " + c.otherValue + ".";
    case ConflictKind::Structural:
      return "Depth of '" + base.at(c.baseFeature).name + "' differs: base " + c.baseValue + ", other " +
             c.otherValue + ".";
  }
  return {};
}

}  // namespace detail

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

inline int compareCommand(const std::string& a, const std::string& b, const detail::Thresholds& t,
                          std::optional<std::string> reportPath, bool json, Streams io) {
  const FeatureModel base = detail::loadModel(a, io.err);
  const FeatureModel other = detail::loadModel(b, io.err);
  const ComparisonReport r = computeCee(base, other, detail::options(t));
  const auto conflicts = detectConflicts(base, other, r.matching);
  ReportInput in{a, b, &base, &other, &r, &conflicts};
  const ReportDocument doc = renderReport(in);
  if (json) {
    Json j = toJson(r, base, other);
    j["conflicts"] = conflictsJson(conflicts, base, other);
    io.out << j.dump(2) << "\n";
  } else {
    io.out << doc.text();
  }
  if (reportPath) {
    const std::string path =
        reportPath->empty() ? defaultReportName(detail::stem(a), detail::stem(b)) : *reportPath;
    detail::writeFile(path, doc.text());
  }
  return kExitOk;
}

inline std::string autoOutputPath(const std::string& out, const std::string& a, const std::string& b,
                                  MergeStrategy s) {
  std::string stem = out;
  if (stem.empty()) {
    stem = detail::stem(a) + "_" + detail::stem(b);
  } else if (detail::fs::path(stem).extension() == ".xml") {
    stem = (detail::fs::path(stem).parent_path() / detail::fs::path(stem).stem()).string();
  }
  return stem + "_" + std::string(toString(s)) + ".xml";
}

inline int mergeAuto(const std::string& a, const std::string& b, const detail::Thresholds& t,
                     const std::string& strategy, const std::string& outPath, Streams io) {
  const FeatureModel base = detail::loadModel(a, io.err);
  const FeatureModel other = detail::loadModel(b, io.err);
  const ComparisonReport r = computeCee(base, other, detail::options(t));
  const auto conflicts = detectConflicts(base, other, r.matching);

  if (!strategy.empty()) {
    static const std::map<std::string, MergeStrategy> byName{
        {"common", MergeStrategy::Common},   {"additional", MergeStrategy::Additional},
        {"formal", MergeStrategy::Formal},   {"partial", MergeStrategy::Partial},
        {"complementary", MergeStrategy::Complementary}, {"null", MergeStrategy::Null}};
    IntegrationResult result;
    try {
      result = integrate(base, other, r.matching, byName.at(strategy));
    } catch (const IncompatibleStrategy& e) {
      throw Failure(e.what());
    }
    const std::string xml = serializeXml(result.model);
    if (outPath.empty())
      io.out << xml;
    else
      detail::writeFile(outPath, xml);
    return kExitOk;
  }

  const auto results = autoIntegrate(base, other, r.matching);
  ReportInput in{a, b, &base, &other, &r, &conflicts, &results};
  io.out << renderReport(in).text();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string path = autoOutputPath(outPath, a, b, kAutomaticStrategies[i]);
    detail::writeFile(path, serializeXml(results[i].model));
    io.out << "wrote " << path << "\n";
  }
  return kExitOk;
}

/// Asks for each resolvable conflict in turn until a valid answer is given.
/// Returns nullopt when input ends.
inline std::optional<Choice> prompt(const Conflict& c, const Session& s, Streams io) {
  io.out << "Conflict #" << c.id << ": " << detail::describeForPrompt(c, s.base) << "\n";
  while (true) {
    io.out << "Keep the base value (b) or the other value (o)? " << std::flush;
    std::string answer;
    if (!std::getline(io.in, answer)) return std::nullopt;
    if (auto choice = detail::parseChoice(std::string(fmit::detail::trim(answer)))) return choice;
    io.out << "Invalid choice, answer b or o.\n";
  }
}

inline int mergeSemi(const std::string& a, const std::string& b, const detail::Thresholds& t,
                     const std::string& decisionsPath, const std::string& outPath, Streams io) {
  Session s = startSession(detail::loadModel(a, io.err), detail::loadModel(b, io.err), detail::options(t));
  std::optional<std::map<int, Choice>> scripted;
  if (!decisionsPath.empty()) scripted = detail::readDecisions(decisionsPath);

  if (scripted)
    for (const auto& [id, choice] : *scripted) {
      try {
        s = resolve(std::move(s), id, choice);
      } catch (const SessionError& e) {
        throw Failure(decisionsPath + ": " + e.what());
      }
    }
  for (int id : s.unresolvedIds()) {
    if (scripted) throw Failure(decisionsPath + ": no decision for conflict #" + std::to_string(id));
    auto choice = prompt(*s.conflict(id), s, io);
    if (!choice) throw Failure("input ended before every conflict was resolved");
    s = resolve(std::move(s), id, *choice);
  }
  s = finalize(std::move(s));

  ReportInput in{a, b, &s.base, &s.other, &s.report, &s.conflicts, nullptr, &*s.merged, &*s.postReport};
  const std::string xml = serializeXml(*s.merged);
  if (outPath.empty()) {
    io.out << renderReport(in).text() << xml;
  } else {
    io.out << renderReport(in).text();
    detail::writeFile(outPath, xml);
  }
  return kExitOk;
}

inline int enumerateCommand(const std::string& path, std::size_t max, Streams io) {
  const FeatureModel m = detail::loadModel(path, io.err);
  std::vector<Configuration> configs;
  try {
    configs = enumerateConfigurations(m, max);
  } catch (const CapExceeded& e) {
    throw Failure(std::string(e.what()) + " (raise --max)");
  } catch (const TooManyFeatures& e) {
    throw Failure(e.what());
  }
  const auto order = preorderNames(m);
  io.out << "configurations: " << configs.size() << "\n";
  for (const auto& c : configs) {
    std::vector<std::string> names;
    for (const auto& n : order)
      if (c.selected.contains(n)) names.push_back(n);
    io.out << formatNames(names) << "\n";
  }
  return kExitOk;
}

inline int validateCommand(const std::string& path, Streams io) {
  ParseResult r = parseXml(detail::readFile(path), detail::stem(path));
  for (const auto& d : r.diagnostics) io.out << path << ":" << formatDiagnostic(d) << "\n";
  if (!r.ok()) return kExitFailure;
  io.out << path << ": ok (" << r.model->size() << " features, " << r.model->constraints.size()
         << " constraints)\n";
  return kExitOk;
}

inline int benchCommand(const std::string& dir, const detail::Thresholds& t, Streams io) {
  namespace fs = detail::fs;
  if (!fs::is_directory(dir)) throw Failure("'" + dir + "' is not a directory");
  std::vector<std::string> stems;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 6 && name.ends_with("_R.xml") && fs::exists(fs::path(dir) / (name.substr(0, name.size() - 6) + "_C.xml")))
      stems.push_back(name.substr(0, name.size() - 6));
  }
  if (stems.empty()) throw Failure("no <name>_R.xml / <name>_C.xml pairs in '" + dir + "'");
  std::sort(stems.begin(), stems.end());
  for (const auto& s : stems) {
    const FeatureModel base = detail::loadModel((fs::path(dir) / (s + "_R.xml")).string(), io.err);
    const FeatureModel other = detail::loadModel((fs::path(dir) / (s + "_C.xml")).string(), io.err);
    const ComparisonReport r = computeCee(base, other, detail::options(t));
    const auto conflicts = detectConflicts(base, other, r.matching);
    io.out << s << ": NF " << base.size() << "/" << other.size() << " NR " << notationCount(base) << "/"
           << notationCount(other) << " conflicts " << conflicts.size() << " cee " << formatScore(r.cee)
           << " mode " << toString(r.recommendedMode) << "\n";
  }
  return kExitOk;
}

inline int serveCommand(ServerOptions options, Streams io) {
  io.out << "fmit listening on http://" << options.host << ":" << options.port << "\n" << std::flush;
  Server server(std::move(options));
  if (!server.listen()) throw Failure("cannot listen on the requested address");
  return kExitOk;
}

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Streams io{in, out, err};
  CLI::App app{"Feature model comparison and integration", "fmit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  detail::Thresholds t;
  std::string a;
  std::string b;
  std::string outPath;

  auto* compare = app.add_subcommand("compare", "compare two models and print the report");
  compare->add_option("base", a, "base model")->required();
  compare->add_option("other", b, "comparison model")->required();
  detail::addThresholdOptions(compare, t);
  std::string reportPath;
  auto* reportOpt = compare->add_option("--report", reportPath, "also write the report (default <base>_<other>_fmit.txt)")
                        ->expected(0, 1);
  bool json = false;
  compare->add_flag("--json", json, "print JSON instead of the text report");

  auto* merge = app.add_subcommand("merge", "integrate two models");
  merge->add_option("base", a, "base model")->required();
  merge->add_option("other", b, "comparison model")->required();
  detail::addThresholdOptions(merge, t);
  std::string mode;
  merge->add_option("--mode", mode, "auto or semi (default: the recommended mode)")
      ->check(CLI::IsMember({"auto", "semi"}));
  std::string strategy;
  merge->add_option("--strategy", strategy, "single automatic strategy")
      ->check(CLI::IsMember({"common", "additional", "formal", "partial", "complementary", "null"}));
  std::string decisions;
  merge->add_option("--decisions", decisions, "file of '<conflictId> keep_base|keep_other' lines");
  merge->add_option("--out", outPath, "output path (auto without --strategy: file stem)");

  auto* enumerate = app.add_subcommand("enumerate", "list the valid configurations of a model");
  enumerate->add_option("model", a, "model")->required();
  std::size_t max = kDefaultConfigurationCap;
  enumerate->add_option("--max", max, "maximum number of configurations")->check(CLI::PositiveNumber);

  auto* validateCmd = app.add_subcommand("validate", "check a model file");
  validateCmd->add_option("model", a, "model")->required();

  auto* bench = app.add_subcommand("bench", "run the scenario fixtures of a directory");
  std::string scenarios;
  bench->add_option("--scenarios", scenarios, "directory of <name>_R.xml/<name>_C.xml pairs")->required();
  detail::addThresholdOptions(bench, t);

  auto* serve = app.add_subcommand("serve", "start the HTTP server");
  ServerOptions serverOptions;
  serve->add_option("--host", serverOptions.host, "bind address");
  serve->add_option("--port", serverOptions.port, "port")->check(CLI::Range(1, 65535));
  serve->add_flag("--cors", serverOptions.cors, "allow cross-origin requests");
  serve->add_option("--static", serverOptions.staticDir, "UI bundle directory")->check(CLI::ExistingDirectory);
  detail::addThresholdOptions(serve, t);

  try {
    t.theta = detail::envThreshold();
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Failure& e) {
    err << "fmit: " << e.what() << "\n";
    return e.code();
  }

  try {
    if (compare->parsed()) {
      std::optional<std::string> report;
      if (reportOpt->count() > 0) report = reportPath;
      return compareCommand(a, b, t, report, json, io);
    }
    if (merge->parsed()) {
      if (mode.empty()) {
        const FeatureModel base = detail::loadModel(a, err);
        const FeatureModel other = detail::loadModel(b, err);
        mode = computeCee(base, other, detail::options(t)).recommendedMode == IntegrationMode::Automatic ? "auto"
                                                                                                       : "semi";
        out << "recommended mode: " << mode << "\n";
      }
      if (mode == "auto") {
        if (!decisions.empty()) throw Failure("--decisions only applies to --mode semi", kExitUsage);
        return mergeAuto(a, b, t, strategy, outPath, io);
      }
      if (!strategy.empty()) throw Failure("--strategy only applies to --mode auto", kExitUsage);
      return mergeSemi(a, b, t, decisions, outPath, io);
    }
    if (enumerate->parsed()) return enumerateCommand(a, max, io);
    if (validateCmd->parsed()) return validateCommand(a, io);
    if (bench->parsed()) return benchCommand(scenarios, t, io);
    if (serve->parsed()) {
      serverOptions.comparison = detail::options(t);
      return serveCommand(std::move(serverOptions), io);
    }
  } catch (const Failure& e) {
    err << "fmit: " << e.what() << "\n";
    return e.code();
  } catch (const InvalidModel& e) {
    err << "fmit: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "fmit: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace fmit::cli
