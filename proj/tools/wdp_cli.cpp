#include "wdp/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

using namespace wdp;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 20240611;

struct Common {
  std::string output;
  bool no_meta = false;
  std::uint64_t seed = kDefaultSeed;
};

// Thrown for outcomes that are honest but unsuccessful (exit 2).
struct Incomplete {
  std::string message;
};

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InternalInconsistency:
      return 3;
    case ErrorCode::HypothesisUnknown:
    case ErrorCode::StepLimitExceeded:
    case ErrorCode::TrivialMemberWouldTwist:
    case ErrorCode::UnknownDimensions:
    case ErrorCode::HypothesisNotCertified:
    case ErrorCode::NonConvergent:
    case ErrorCode::WindowViolated:
    case ErrorCode::NotCertified:
      return 2;
    default:
      return 1;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << text;
}

std::string digest(const json& j) { return hex_digest(j.dump()); }

class Run {
 public:
  Run(std::string command, const Common& common)
      : command_(std::move(command)), common_(common), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& name, const json& normalized) { inputs_[name] = digest(normalized); }
  void fan(const SmoothToricSurface& s) { fan_ = io::fan_to_json(s); }

  void finish(json result) const {
    json report = {{"tool", "wdp"},
                   {"version", kVersion},
                   {"command", command_},
                   {"seed", common_.seed},
                   {"inputs", inputs_},
                   {"result", std::move(result)}};
    if (!fan_.is_null()) report["fan"] = fan_;
    if (!common_.no_meta) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start_);
      report["meta"] = {{"elapsed_ms", ms.count()}};
    }
    if (!common_.output.empty()) write_file(common_.output, report.dump(2) + "\n");
  }

 private:
  std::string command_;
  Common common_;
  std::chrono::steady_clock::time_point start_;
  json inputs_ = json::object();
  json fan_;
};

std::string slopes_text(const LatticeForm& form, const std::vector<KClass>& classes) {
  std::string out;
  for (const auto& k : classes) out += (out.empty() ? "" : " ") + to_string(slope(form, k));
  return out;
}

std::string window_text(const Window& w) {
  return "window " + to_string(w.width()) + (w.strict() ? " < " : " >= ") + std::to_string(w.ksq);
}

json certificate_summary(const Certificate& c) {
  return {{"id", certificate_id(c)},
          {"verdict", std::string(to_string(c.verdict))},
          {"window",
           {{"min", io::rational_to_json(c.window.min)},
            {"max", io::rational_to_json(c.window.max)},
            {"ksq", c.window.ksq}}}};
}

// --- commands ---------------------------------------------------------------

int cmd_classify(const std::string& ref, const Common& common) {
  Run run("classify", common);
  SmoothToricSurface s = io::load_fan(ref);
  run.input("fan", io::fan_to_json(s));
  run.fan(s);
  WeakDPVerdict v = classify(s);
  std::string line = std::string(to_string(v.kind));
  if (v.kind == SurfaceKind::rejected) {
    line += ": " + v.reason;
  } else {
    line += ", degree " + std::to_string(v.degree);
    const auto k = v.minus2curves.size();
    if (k == 1) line += ", one (-2)-curve";
    if (k > 1) line += ", " + std::to_string(k) + " (-2)-curves";
  }
  std::cout << s.name() << ": " << line << "\n";
  json result = {{"kind", std::string(to_string(v.kind))},
                 {"degree", v.degree},
                 {"minus2curves", v.minus2curves},
                 {"reason", v.reason}};
  run.finish(result);
  return 0;
}

int cmd_blowup(const std::string& ref, std::size_t corner, const std::string& name,
               const Common& common) {
  Run run("blowup", common);
  SmoothToricSurface s = io::load_fan(ref);
  run.input("fan", io::fan_to_json(s));
  BlowupResult up = blowup(s, corner, name);
  run.fan(up.surface);
  std::cout << up.surface.name() << ": " << up.surface.num_rays() << " rays, degree "
            << up.surface.degree() << "\n";
  run.finish({{"fan", io::fan_to_json(up.surface)},
              {"exceptional", io::divisor_to_json(up.exceptional)},
              {"kind", std::string(to_string(classify(up.surface).kind))}});
  return 0;
}

int cmd_search(const std::string& ref, Int radius, std::size_t limit, const Common& common) {
  Run run("search", common);
  SmoothToricSurface s = io::load_fan(ref);
  run.input("fan", io::fan_to_json(s));
  run.fan(s);
  auto found = search_sorted_line_collections(s, radius, limit);
  json list = json::array();
  for (const auto& c : found) list.push_back(io::collection_to_json(c));
  std::cout << s.name() << ": " << found.size() << " collection(s) at radius " << radius << "\n";
  for (const auto& c : found) std::cout << "  slopes " << slopes_text(c.form(), c.classes()) << "\n";
  run.finish({{"radius", radius}, {"limit", limit}, {"collections", list}});
  return 0;
}

int cmd_construct(const std::string& ref, const std::string& strategy, Int radius,
                  std::size_t max_steps, const std::string& trace_path,
                  const std::string& log_path, const Common& common) {
  Run run("construct", common);
  SmoothToricSurface s = io::load_fan(ref);
  run.input("fan", io::fan_to_json(s));
  run.fan(s);
  if (classify(s).kind == SurfaceKind::rejected) {
    throw Error(ErrorCode::NotWeakDelPezzo, s.name() + " is not weak del Pezzo");
  }
  ExcCollection start = [&] {
    if (strategy == "search") {
      auto found = search_sorted_line_collections(s, radius, 1);
      if (found.empty()) {
        throw Incomplete{"search found no collection at radius " + std::to_string(radius)};
      }
      return found.front();
    }
    return blowup_chain_collection(s);
  }();
  SortResult sorted = sort_by_slope(start, max_steps);
  ExtendedCollection x = process_blocks(sorted.collection);

  std::vector<json> trace, log;
  for (const auto& step : sorted.trace) trace.push_back(io::trace_step_to_json(step));
  for (const auto& e : x.log) log.push_back(io::extension_entry_to_json(e));
  if (!trace_path.empty()) write_file(trace_path, io::to_json_lines(trace));
  if (!log_path.empty()) write_file(log_path, io::to_json_lines(log));

  Certificate cert = certify_tilting(x);
  std::string problem;
  try {
    if (cert.verdict == Verdict::tilting) cert = certify_two_tilting(cert);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::WindowViolated) throw;
    problem = e.what();
  }
  std::cout << s.name() << ": " << strategy << ", " << sorted.trace.size() << " sorting step(s), "
            << x.log.size() << " extension(s)\n"
            << "  slopes " << slopes_text(s.form(), cert.classes) << "\n"
            << "  " << to_string(cert.verdict) << ", " << window_text(cert.window) << "\n";
  run.finish({{"strategy", strategy},
              {"collection", io::extended_collection_to_json(x)},
              {"trace", trace},
              {"extension_log", log},
              {"certificate", certificate_summary(cert)}});
  if (!problem.empty()) throw Incomplete{problem};
  if (cert.verdict != Verdict::two_tilting) throw Incomplete{"certification is incomplete"};
  return 0;
}

io::LoadedCollection load(const std::string& path, Run& run) {
  io::LoadedCollection c = io::load_collection(io::read_json_file(path));
  run.input("collection", io::collection_to_json(c.sorted));
  run.fan(c.sorted.surface);
  return c;
}

bool all_lines(const std::vector<Member>& ms) {
  return std::all_of(ms.begin(), ms.end(), [](const Member& m) { return m.is_line(); });
}

int cmd_certify(const std::string& path, const Common& common) {
  Run run("certify", common);
  io::LoadedCollection c = load(path, run);
  Certificate cert = c.extended ? certify_tilting(*c.extended) : certify_tilting(c.sorted);
  std::string problem;
  try {
    if (cert.verdict == Verdict::tilting) cert = certify_two_tilting(cert);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::WindowViolated) throw;
    problem = e.what();
  }
  json result = {{"certificate", io::certificate_to_json(cert)}};
  if (all_lines(c.members())) {
    TwistReport r = check_twist_vanishing(cert.surface, c.members(), &cert);
    result["twist_check"] = r.pass ? "pass" : "fail";
  }
  std::cout << to_string(cert.verdict) << ", " << window_text(cert.window) << "\n";
  for (const auto& k : cert.blocking) std::cout << "  blocking " << to_string(k) << "\n";
  run.finish(result);
  if (!problem.empty()) throw Incomplete{problem};
  if (cert.verdict != Verdict::two_tilting) throw Incomplete{"not two-tilting"};
  return 0;
}

int cmd_series(const std::string& path, std::size_t n_max, const Common& common) {
  Run run("series", common);
  io::LoadedCollection c = load(path, run);
  Certificate cert = c.certify();
  if (cert.verdict != Verdict::two_tilting) {
    throw Error(ErrorCode::NotCertified, "collection is not certified two-tilting");
  }
  const SmoothToricSurface& s = cert.surface;
  Int rank = 0;
  for (const auto& k : cert.classes) rank += k.rank;

  HilbertPrefix pi3 = pi3_hilbert(cert, n_max);
  GrowthCheck growth = check_growth_law(pi3, rank, s.degree());
  HilbertPrefix ring = anticanonical_hilbert(s, n_max);
  GorensteinCheck gor = gorenstein_symmetry(ring);

  json pi3j = io::prefix_to_json(pi3);
  pi3j["checks"] = {{"growth_law", growth.pass ? "pass" : "fail"}};
  json ringj = io::prefix_to_json(ring);
  ringj["checks"] = {{"gorenstein", std::string(to_string(gor.status))}};
  ringj["numerator"] = gor.numerator;
  json modules = json::array();
  for (const auto& m : module_hilbert(cert, c.members(), n_max)) modules.push_back(io::prefix_to_json(m));

  std::cout << "certificate " << certificate_id(cert) << "\n"
            << "  Pi3: " << json(pi3.coeffs).dump() << ", growth law "
            << (growth.pass ? "pass" : "fail") << "\n"
            << "  R: " << json(ring.coeffs).dump() << ", gorenstein " << to_string(gor.status)
            << " " << json(gor.numerator).dump() << "\n";
  run.finish({{"certificate", certificate_id(cert)},
              {"rank", rank},
              {"ksq", s.degree()},
              {"series", {pi3j, ringj}},
              {"modules", modules}});
  if (!growth.pass) {
    throw Error(ErrorCode::InternalInconsistency,
                "growth law fails at n = " + std::to_string(*growth.first_bad));
  }
  if (gor.status == Symmetry::fail) {
    throw Error(ErrorCode::InternalInconsistency, "anticanonical numerator is not palindromic");
  }
  return 0;
}

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--output,-o", common.output, "write the JSON report here");
  sub->add_flag("--no-meta", common.no_meta, "omit timing from the report");
  sub->add_option("--seed", common.seed, "seed recorded with the run");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tilting bundles on toric weak del Pezzo surfaces"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common common;

  std::string fan_ref, path, strategy = "blowup-chain", name, trace_path, log_path;
  Int radius = 1;
  std::size_t n_max = 10, max_steps = 0, limit = 20, corner = 0;

  auto* classify_cmd = app.add_subcommand("classify", "weak del Pezzo verdict for a fan");
  classify_cmd->add_option("fan", fan_ref, "fan file or catalog name")->required();

  auto* blowup_cmd = app.add_subcommand("blowup", "blow up a torus-fixed point");
  blowup_cmd->add_option("fan", fan_ref, "fan file or catalog name")->required();
  blowup_cmd->add_option("--corner", corner, "cone between rays corner and corner+1");
  blowup_cmd->add_option("--name", name, "name of the new surface");

  auto* search_cmd = app.add_subcommand("search", "sorted exceptional line bundle collections");
  search_cmd->add_option("fan", fan_ref, "fan file or catalog name")->required();
  search_cmd->add_option("--radius", radius, "coefficient bound")->check(CLI::NonNegativeNumber);
  search_cmd->add_option("--limit", limit, "maximum number of results");

  auto* construct_cmd = app.add_subcommand("construct", "build a 2-tilting bundle");
  construct_cmd->add_option("fan", fan_ref, "fan file or catalog name")->required();
  construct_cmd->add_option("--strategy", strategy, "blowup-chain or search")
      ->check(CLI::IsMember({"blowup-chain", "search"}));
  construct_cmd->add_option("--radius", radius, "search coefficient bound")->check(CLI::NonNegativeNumber);
  construct_cmd->add_option("--max-steps", max_steps, "sorting step cap (0: 64 n^2)");
  construct_cmd->add_option("--trace", trace_path, "sorting trace, JSON lines");
  construct_cmd->add_option("--log", log_path, "extension log, JSON lines");

  auto* certify_cmd = app.add_subcommand("certify", "certify a collection file");
  certify_cmd->add_option("collection", path, "collection file or construct report")->required();

  auto* series_cmd = app.add_subcommand("series", "Hilbert series for a certified collection");
  series_cmd->add_option("collection", path, "collection file or construct report")->required();
  series_cmd->add_option("--n-max", n_max, "highest degree");

  for (auto* sub : {classify_cmd, blowup_cmd, search_cmd, construct_cmd, certify_cmd, series_cmd}) {
    add_common(sub, common);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*classify_cmd) return cmd_classify(fan_ref, common);
    if (*blowup_cmd) return cmd_blowup(fan_ref, corner, name, common);
    if (*search_cmd) return cmd_search(fan_ref, radius, limit, common);
    if (*construct_cmd)
      return cmd_construct(fan_ref, strategy, radius, max_steps, trace_path, log_path, common);
    if (*certify_cmd) return cmd_certify(path, common);
    if (*series_cmd) return cmd_series(path, n_max, common);
  } catch (const Incomplete& e) {
    std::cerr << "incomplete: " << e.message << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const int code = exit_code(e.code());
    if (code == 3) {
      json repro = {{"version", kVersion}, {"error", e.what()}, {"argv", json::array()}};
      for (int i = 0; i < argc; ++i) repro["argv"].push_back(argv[i]);
      if (!path.empty()) {
        try {
          repro["input"] = io::read_json_file(path);
        } catch (const Error&) {
        }
      }
      std::cerr << repro.dump() << "\n";
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
