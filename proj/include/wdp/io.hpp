#ifndef WDP_IO_HPP
#define WDP_IO_HPP

#include "wdp/collections.hpp"
#include "wdp/lattice.hpp"
#include "wdp/series.hpp"
#include "wdp/toric.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace wdp::io {

using nlohmann::json;

inline json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, p.string() + ": " + e.what());
  }
}

inline json rational_to_json(const Rational& r) {
  if (r.denominator() == 1) return r.numerator();
  return to_string(r);
}

// --- fans -------------------------------------------------------------------

inline json fan_to_json(const SmoothToricSurface& s) {
  json rays = json::array();
  for (Ray r : s.rays()) rays.push_back({r.x, r.y});
  return {{"name", s.name()}, {"rays", rays}};
}

inline SmoothToricSurface fan_from_json(const json& j) {
  try {
    std::vector<Ray> rays;
    for (const auto& r : j.at("rays")) {
      if (!r.is_array() || r.size() != 2) throw Error(ErrorCode::InvalidInput, "ray must be [x, y]");
      rays.push_back({r.at(0).get<Int>(), r.at(1).get<Int>()});
    }
    return SmoothToricSurface::from_rays(rays, j.value("name", std::string{}));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("fan: ") + e.what());
  }
}

inline std::filesystem::path catalog_dir() {
#ifdef WDP_CATALOG_DIR
  return WDP_CATALOG_DIR;
#else
  return "data/catalog";
#endif
}

inline std::vector<std::string> catalog_names(const std::filesystem::path& dir = catalog_dir()) {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

/// A path to a fan file, or the name of a catalog entry.
inline SmoothToricSurface load_fan(const std::string& ref, const std::filesystem::path& dir = catalog_dir()) {
  std::filesystem::path p(ref);
  if (!std::filesystem::exists(p)) p = dir / (ref + ".json");
  if (!std::filesystem::exists(p)) throw Error(ErrorCode::InvalidInput, "no fan named " + ref);
  return fan_from_json(read_json_file(p));
}

// --- lattice data -------------------------------------------------------------

inline json divisor_to_json(const DivisorClass& d) { return d.coeffs; }

inline DivisorClass divisor_from_json(const json& j, std::size_t n) {
  DivisorClass d{j.get<IntVec>()};
  if (d.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "divisor has " + std::to_string(d.size()) +
                                                  " coefficients, expected " + std::to_string(n));
  }
  return d;
}

inline json kclass_to_json(const KClass& k) {
  return {{"rank", k.rank}, {"c1", k.c1.coeffs}, {"chi", k.chi}};
}

inline KClass kclass_from_json(const json& j, std::size_t n) {
  try {
    return {j.at("rank").get<Int>(), divisor_from_json(j.at("c1"), n), j.at("chi").get<Int>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("class: ") + e.what());
  }
}

inline AbstractLatticeSurface abstract_surface_from_json(const json& j) {
  try {
    AbstractLatticeSurface a;
    a.name = j.value("name", std::string{"abstract"});
    a.gram = j.at("gram").get<IntMat>();
    a.canonical = DivisorClass{j.at("canonical").get<IntVec>()};
    const auto rank = j.at("picard_rank").get<std::size_t>();
    if (a.gram.size() != rank || a.canonical.size() != rank) {
      throw Error(ErrorCode::DimensionMismatch, "gram/canonical do not match picard_rank");
    }
    for (std::size_t i = 0; i < rank; ++i) {
      if (a.gram[i].size() != rank) throw Error(ErrorCode::DimensionMismatch, "gram is not square");
      for (std::size_t k = 0; k < rank; ++k)
        if (a.gram[i][k] != a.gram[k][i]) throw Error(ErrorCode::InvalidInput, "gram not symmetric");
    }
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("abstract surface: ") + e.what());
  }
}

inline json abstract_surface_to_json(const AbstractLatticeSurface& a) {
  return {{"name", a.name}, {"picard_rank", a.gram.size()}, {"gram", a.gram},
          {"canonical", a.canonical.coeffs}};
}

// --- collections --------------------------------------------------------------

inline json flags_to_json(const MemberFlags& f) {
  json out = json::array();
  if (f.exceptional.holds) out.push_back("exceptional");
  if (f.vector_bundle.holds) out.push_back("vector-bundle");
  if (f.semistable.holds) out.push_back("semistable");
  if (f.indecomposable.holds) out.push_back("indecomposable");
  return out;
}

inline json member_to_json(const Member& m) {
  if (m.is_line()) return {{"line", m.line->coeffs}};
  json o = kclass_to_json(m.cls);
  return {{"opaque", o}, {"flags", flags_to_json(m.flags)}, {"provenance", m.provenance}};
}

inline Member member_from_json(const json& j, const SmoothToricSurface& s) {
  if (j.contains("line")) return Member::make_line(s.form(), divisor_from_json(j.at("line"), s.num_rays()));
  if (!j.contains("opaque")) throw Error(ErrorCode::InvalidInput, "member must be line or opaque");
  MemberFlags flags;
  for (const auto& f : j.value("flags", json::array())) {
    const std::string name = f.get<std::string>();
    const Flag yes = Flag::yes("declared in input");
    if (name == "exceptional") flags.exceptional = yes;
    else if (name == "vector-bundle") flags.vector_bundle = yes;
    else if (name == "semistable") flags.semistable = yes;
    else if (name == "indecomposable") flags.indecomposable = yes;
    else throw Error(ErrorCode::InvalidInput, "unknown flag " + name);
  }
  return Member::make_opaque(kclass_from_json(j.at("opaque"), s.num_rays()),
                             j.value("provenance", std::vector<std::string>{}), flags);
}

inline json collection_to_json(const ExcCollection& c) {
  json members = json::array();
  for (const auto& m : c.members) members.push_back(member_to_json(m));
  json out = {{"surface", fan_to_json(c.surface)},
              {"members", members},
              {"fullness", std::string(to_string(c.fullness))}};
  out["trivial_index"] = c.trivial_index ? json(*c.trivial_index) : json(nullptr);
  return out;
}

/// Reads a collection file. Line-only collections are re-verified honestly;
/// the declared fullness is kept only when it is not stronger than what can be
/// re-established.
inline ExcCollection collection_from_json(const json& j, const std::filesystem::path& dir = catalog_dir()) {
  try {
    const json& sj = j.at("surface");
    SmoothToricSurface s = sj.is_string() ? load_fan(sj.get<std::string>(), dir) : fan_from_json(sj);
    std::vector<Member> members;
    for (const auto& mj : j.at("members")) members.push_back(member_from_json(mj, s));
    const bool all_lines =
        std::all_of(members.begin(), members.end(), [](const Member& m) { return m.is_line(); });
    ExcCollection c{s, {}, Fullness::unknown, std::nullopt, {}};
    if (all_lines) {
      std::vector<DivisorClass> ds;
      for (const auto& m : members) ds.push_back(*m.line);
      c = verify_line_collection(s, ds);
    } else {
      c.members = std::move(members);
      c.trivial_index = detail::find_trivial(s, c.members);
      c.fullness = detail::numeric_fullness(s, c.classes());
    }
    auto declared = fullness_from_string(j.value("fullness", std::string{"unknown"}));
    if (!declared) throw Error(ErrorCode::InvalidInput, "unknown fullness value");
    if (*declared == Fullness::by_construction) c.fullness = Fullness::by_construction;
    if (j.contains("trivial_index") && !j.at("trivial_index").is_null()) {
      auto t = j.at("trivial_index").get<std::size_t>();
      if (t >= c.size() || !is_trivial_line(s, c.members[t])) {
        throw Error(ErrorCode::InvalidInput, "trivial_index does not point at O_X");
      }
      c.trivial_index = t;
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("collection: ") + e.what());
  }
}

inline json trace_step_to_json(const TraceStep& s) {
  json classes = json::array();
  for (const auto& k : s.classes) classes.push_back(kclass_to_json(k));
  return {{"rule", s.rule}, {"index", s.index}, {"classes", classes}};
}

inline std::string to_json_lines(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Block processing

inline json extension_entry_to_json(const ExtensionLogEntry& e) {
  return {{"block", e.block},
          {"pair", {e.source, e.target}},
          {"d", e.d},
          {"new_class", kclass_to_json(e.new_class)},
          {"rule", e.rule}};
}

inline json extended_member_to_json(const ExtendedMember& m) {
  if (!m.extended()) return member_to_json(m.base);
  json j = member_to_json(m.base);
  json parts = json::array();
  for (const auto& c : m.filtration) {
    parts.push_back({{"member", c.member}, {"multiplicity", c.multiplicity}, {"class", kclass_to_json(c.cls)}});
  }
  j["filtration"] = parts;
  j["may_split"] = m.may_split;
  return j;
}

/// A processed collection keeps its sorted input so that readers can redo the
/// extensions instead of trusting them.
inline json extended_collection_to_json(const ExtendedCollection& x) {
  if (x.log.empty()) return collection_to_json(x.sorted);
  json out = collection_to_json(x.sorted);
  out["sorted_members"] = out["members"];
  json members = json::array();
  for (const auto& m : x.members) members.push_back(extended_member_to_json(m));
  out["members"] = members;
  auto t = x.trivial_index();
  out["trivial_index"] = t ? json(*t) : json(nullptr);
  json log = json::array();
  for (const auto& e : x.log) log.push_back(extension_entry_to_json(e));
  out["extension_log"] = log;
  return out;
}

struct LoadedCollection {
  ExcCollection sorted;
  std::optional<ExtendedCollection> extended;

  Certificate certify() const {
    Certificate c = extended ? certify_tilting(*extended) : certify_tilting(sorted);
    return c.verdict == Verdict::tilting ? certify_two_tilting(c) : c;
  }
  std::vector<Member> members() const { return extended ? extended->as_members() : sorted.members; }
};

/// Accepts a collection file or a run report whose result holds one.
inline LoadedCollection load_collection(const json& in, const std::filesystem::path& dir = catalog_dir()) {
  const json& j = in.contains("result") && in.at("result").is_object() &&
                          in.at("result").contains("collection")
                      ? in.at("result").at("collection")
                      : in;
  if (!j.contains("sorted_members")) return {collection_from_json(j, dir), std::nullopt};
  json base = j;
  base["members"] = j.at("sorted_members");
  base.erase("trivial_index");
  ExcCollection sorted = collection_from_json(base, dir);
  ExtendedCollection x = process_blocks(sorted);
  const auto& listed = j.at("members");
  if (listed.size() != x.size()) throw Error(ErrorCode::InvalidInput, "member count differs after extensions");
  for (std::size_t i = 0; i < x.size(); ++i) {
    KClass k = listed[i].contains("line") ? line_class(x.form(), divisor_from_json(listed[i].at("line"), x.surface().num_rays()))
                                          : kclass_from_json(listed[i].at("opaque"), x.surface().num_rays());
    if (!(k == x.members[i].cls())) {
      throw Error(ErrorCode::InvalidInput, "member " + std::to_string(i) + " does not match its extensions");
    }
  }
  return {std::move(sorted), std::move(x)};
}

// ---------------------------------------------------------------------------
// Certificates and series

inline json fact_to_json(const Fact& f) {
  json j = {{"pair", {f.key.source, f.key.target}},
            {"twist", f.key.twist},
            {"p", f.key.degree},
            {"status", f.vanishes() ? "vanishes" : "dimension"},
            {"dim", f.dim},
            {"rule", std::string(to_string(f.rule))},
            {"inputs", f.inputs}};
  if (!f.note.empty()) j["note"] = f.note;
  return j;
}

inline json certificate_to_json(const Certificate& c) {
  json facts = json::array();
  for (const Fact& f : c.facts.facts()) facts.push_back(fact_to_json(f));
  json blocking = json::array();
  for (const auto& k : c.blocking) blocking.push_back(to_string(k));
  json classes = json::array();
  for (const auto& k : c.classes) classes.push_back(kclass_to_json(k));
  return {{"id", certificate_id(c)},
          {"surface", c.surface.name()},
          {"verdict", std::string(to_string(c.verdict))},
          {"window",
           {{"min", rational_to_json(c.window.min)},
            {"max", rational_to_json(c.window.max)},
            {"ksq", c.window.ksq}}},
          {"fullness", std::string(to_string(c.fullness))},
          {"classes", classes},
          {"blocking", blocking},
          {"notes", c.notes},
          {"facts", facts}};
}

inline json prefix_to_json(const HilbertPrefix& h) {
  json j = {{"label", h.label}, {"coeffs", h.coeffs}, {"method", h.method}};
  if (!h.certificate.empty()) j["certificate"] = h.certificate;
  return j;
}

}  // namespace wdp::io

#endif  // WDP_IO_HPP
