#pragma once

// JSON encoding of every domain type. Complex numbers are [re, im] pairs
// printed with the shortest decimal form that round-trips, so save/load is
// bit-exact. Non-finite reals are written as the strings "inf", "-inf", "nan".

#include "hmod/oracles.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace hmod::io {

using json = nlohmann::json;

/// Schema violation; `pointer()` is the JSON pointer of the offending node.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& pointer, const std::string& msg)
      : std::runtime_error(pointer + ": " + msg), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string child(const std::string& path, const std::string& key) {
  std::string esc;
  for (char c : key) {
    if (c == '~') esc += "~0";
    else if (c == '/') esc += "~1";
    else esc += c;
  }
  return path + "/" + esc;
}
inline std::string child(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path.empty() ? "/" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(child(path, key), "missing field");
  return *it;
}

inline const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path.empty() ? "/" : path, "expected an array");
  return j;
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<int>();
}

}  // namespace detail

inline json real_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double real_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError(path, "expected a number");
}

inline json to_json(const Complex& z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

inline Complex complex_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ParseError(path, "expected a [re, im] pair");
  return {real_from_json(j[0], detail::child(path, 0)), real_from_json(j[1], detail::child(path, 1))};
}

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const json& j, const std::string& path) {
  detail::array(j, path);
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  CMatrix m;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = detail::child(path, r);
    const json& row = detail::array(j[r], rp);
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(rp, "ragged matrix row");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          complex_from_json(row[c], detail::child(rp, c));
    }
  }
  if (cols < 0) m.resize(0, 0);
  return m;
}

inline json to_json(const AlgebraDescriptor& d) { return {{"block_dims", d.block_dims()}}; }

inline AlgebraDescriptor descriptor_from_json(const json& j, const std::string& path) {
  const std::string p = detail::child(path, "block_dims");
  const json& dims = detail::array(detail::field(j, "block_dims", path), p);
  std::vector<int> v;
  for (std::size_t i = 0; i < dims.size(); ++i) v.push_back(detail::integer(dims[i], detail::child(p, i)));
  try {
    return AlgebraDescriptor(std::move(v));
  } catch (const ShapeError& e) {
    throw ParseError(p, e.what());
  }
}

/// Element body without its descriptor: {"blocks": [...]}.
inline json element_body(const AlgebraElement& a) {
  json blocks = json::array();
  for (const auto& m : a.blocks()) blocks.push_back(to_json(m));
  return {{"blocks", std::move(blocks)}};
}

inline AlgebraElement element_from_body(const json& j, const AlgebraDescriptor& d,
                                        const std::string& path) {
  const std::string p = detail::child(path, "blocks");
  const json& blocks = detail::array(detail::field(j, "blocks", path), p);
  if (blocks.size() != d.num_blocks()) {
    throw ShapeError(p + ": expected " + std::to_string(d.num_blocks()) + " blocks, got " +
                     std::to_string(blocks.size()));
  }
  std::vector<CMatrix> b;
  for (std::size_t i = 0; i < blocks.size(); ++i) b.push_back(matrix_from_json(blocks[i], detail::child(p, i)));
  try {
    return AlgebraElement(d, std::move(b));
  } catch (const ShapeError& e) {
    throw ShapeError(p + ": " + e.what());
  }
}

inline json to_json(const AlgebraElement& a) {
  json j = element_body(a);
  j["descriptor"] = to_json(a.descriptor());
  return j;
}

inline AlgebraElement element_from_json(const json& j, const std::string& path = "") {
  const AlgebraDescriptor d =
      descriptor_from_json(detail::field(j, "descriptor", path), detail::child(path, "descriptor"));
  return element_from_body(j, d, path);
}

inline json to_json(const ModuleSpace& s) {
  return {{"descriptor", to_json(s.descriptor)}, {"rank", s.rank}};
}

inline ModuleSpace space_from_json(const json& j, const std::string& path) {
  const AlgebraDescriptor d =
      descriptor_from_json(detail::field(j, "descriptor", path), detail::child(path, "descriptor"));
  const int rank = detail::integer(detail::field(j, "rank", path), detail::child(path, "rank"));
  if (rank < 1) throw ParseError(detail::child(path, "rank"), "rank must be positive");
  return {d, rank};
}

inline json to_json(const ModuleVector& v) {
  json coords = json::array();
  for (const auto& c : v.coords()) coords.push_back(element_body(c));
  return {{"rank", v.space().rank},
          {"descriptor", to_json(v.space().descriptor)},
          {"coords", std::move(coords)}};
}

inline ModuleVector vector_from_json(const json& j, const std::string& path = "") {
  const ModuleSpace s = space_from_json(j, path);
  const std::string p = detail::child(path, "coords");
  const json& coords = detail::array(detail::field(j, "coords", path), p);
  if (coords.size() != static_cast<std::size_t>(s.rank)) {
    throw ShapeError(p + ": expected " + std::to_string(s.rank) + " coordinates");
  }
  std::vector<AlgebraElement> c;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    c.push_back(element_from_body(coords[i], s.descriptor, detail::child(p, i)));
  }
  return ModuleVector(s, std::move(c));
}

inline json to_json(const ModuleOperator& t) {
  json entries = json::array();
  for (const auto& row : t.entries()) {
    json r = json::array();
    for (const auto& e : row) r.push_back(element_body(e));
    entries.push_back(std::move(r));
  }
  return {{"domain_rank", t.domain().rank},
          {"codomain_rank", t.codomain().rank},
          {"descriptor", to_json(t.descriptor())},
          {"entries", std::move(entries)}};
}

inline ModuleOperator operator_from_json(const json& j, const std::string& path = "") {
  const AlgebraDescriptor d =
      descriptor_from_json(detail::field(j, "descriptor", path), detail::child(path, "descriptor"));
  const int n = detail::integer(detail::field(j, "domain_rank", path), detail::child(path, "domain_rank"));
  const int m =
      detail::integer(detail::field(j, "codomain_rank", path), detail::child(path, "codomain_rank"));
  if (n < 1) throw ParseError(detail::child(path, "domain_rank"), "rank must be positive");
  if (m < 1) throw ParseError(detail::child(path, "codomain_rank"), "rank must be positive");
  const std::string p = detail::child(path, "entries");
  const json& rows = detail::array(detail::field(j, "entries", path), p);
  if (rows.size() != static_cast<std::size_t>(n)) {
    throw ShapeError(p + ": expected " + std::to_string(n) + " rows (domain rank)");
  }
  std::vector<std::vector<AlgebraElement>> e;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string rp = detail::child(p, i);
    const json& row = detail::array(rows[i], rp);
    if (row.size() != static_cast<std::size_t>(m)) {
      throw ShapeError(rp + ": expected " + std::to_string(m) + " entries (codomain rank)");
    }
    std::vector<AlgebraElement> r;
    for (std::size_t l = 0; l < row.size(); ++l) r.push_back(element_from_body(row[l], d, detail::child(rp, l)));
    e.push_back(std::move(r));
  }
  return ModuleOperator::from_entries(ModuleSpace(d, n), ModuleSpace(d, m), e);
}

inline json to_json(const FrameSystem& f) {
  json vs = json::array();
  for (const auto& v : f.vectors()) vs.push_back(to_json(v));
  return {{"space", to_json(f.space())}, {"vectors", std::move(vs)}};
}

inline FrameSystem frame_from_json(const json& j, const std::string& path = "") {
  const ModuleSpace s = space_from_json(detail::field(j, "space", path), detail::child(path, "space"));
  const std::string p = detail::child(path, "vectors");
  const json& vs = detail::array(detail::field(j, "vectors", path), p);
  if (vs.empty()) throw ParseError(p, "a frame needs at least one vector");
  std::vector<ModuleVector> v;
  for (std::size_t i = 0; i < vs.size(); ++i) v.push_back(vector_from_json(vs[i], detail::child(p, i)));
  return FrameSystem::build(s, std::move(v));
}

inline json to_json(const oracle::InstanceSpec& s) {
  return {{"seed", s.seed},
          {"blocks", s.blocks},
          {"rank", s.rank},
          {"frame_size", s.frame_size},
          {"kind", oracle::to_string(s.kind)},
          {"spectrum", json::array({real_to_json(s.spectrum_lo), real_to_json(s.spectrum_hi)})}};
}

inline oracle::InstanceSpec spec_from_json(const json& j, const std::string& path = "") {
  oracle::InstanceSpec s;
  const json& seed = detail::field(j, "seed", path);
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw ParseError(detail::child(path, "seed"), "expected a non-negative integer");
  }
  s.seed = seed.get<std::uint64_t>();
  const std::string bp = detail::child(path, "blocks");
  const json& blocks = detail::array(detail::field(j, "blocks", path), bp);
  s.blocks.clear();
  for (std::size_t i = 0; i < blocks.size(); ++i) s.blocks.push_back(detail::integer(blocks[i], detail::child(bp, i)));
  s.rank = detail::integer(detail::field(j, "rank", path), detail::child(path, "rank"));
  s.frame_size = detail::integer(detail::field(j, "frame_size", path), detail::child(path, "frame_size"));
  const json& kind = detail::field(j, "kind", path);
  if (!kind.is_string()) throw ParseError(detail::child(path, "kind"), "expected a string");
  try {
    s.kind = oracle::kind_from_string(kind.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(detail::child(path, "kind"), e.what());
  }
  if (auto it = j.find("spectrum"); it != j.end()) {
    const std::string sp = detail::child(path, "spectrum");
    if (!it->is_array() || it->size() != 2) throw ParseError(sp, "expected [lo, hi]");
    s.spectrum_lo = real_from_json((*it)[0], detail::child(sp, 0));
    s.spectrum_hi = real_from_json((*it)[1], detail::child(sp, 1));
  }
  return s;
}

inline json witness_to_json(const Witness& w) {
  return std::visit(
      [](const auto& v) -> json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, AlgebraElement>) return {{"type", "element"}, {"value", to_json(v)}};
        else if constexpr (std::is_same_v<V, ModuleVector>) return {{"type", "vector"}, {"value", to_json(v)}};
        else return {{"type", "operator"}, {"value", to_json(v)}};
      },
      w);
}

inline Witness witness_from_json(const json& j, const std::string& path) {
  const json& type = detail::field(j, "type", path);
  const json& value = detail::field(j, "value", path);
  const std::string vp = detail::child(path, "value");
  if (type == "element") return element_from_json(value, vp);
  if (type == "vector") return vector_from_json(value, vp);
  if (type == "operator") return operator_from_json(value, vp);
  throw ParseError(detail::child(path, "type"), "unknown witness type");
}

inline json to_json(const VerificationReport& r) {
  json res = json::object(), tol = json::object(), flags = json::object(), wit = json::object();
  for (const auto& [k, v] : r.residuals) res[k] = real_to_json(v);
  for (const auto& [k, v] : r.tolerances) tol[k] = real_to_json(v);
  for (const auto& [k, v] : r.flags) flags[k] = v;
  for (const auto& [k, v] : r.witnesses) wit[k] = witness_to_json(v);
  return {{"theorem_id", r.theorem_id}, {"verdict", to_string(r.verdict)},
          {"residuals", std::move(res)}, {"tolerances", std::move(tol)},
          {"flags", std::move(flags)},   {"witnesses", std::move(wit)},
          {"seed", r.seed},              {"instance", r.instance}};
}

inline VerificationReport report_from_json(const json& j, const std::string& path = "") {
  VerificationReport r;
  const json& id = detail::field(j, "theorem_id", path);
  if (!id.is_string()) throw ParseError(detail::child(path, "theorem_id"), "expected a string");
  r.theorem_id = id.get<std::string>();
  const json& verdict = detail::field(j, "verdict", path);
  if (verdict == "pass") r.verdict = Verdict::pass;
  else if (verdict == "fail") r.verdict = Verdict::fail;
  else if (verdict == "hypotheses-not-met") r.verdict = Verdict::hypotheses_not_met;
  else throw ParseError(detail::child(path, "verdict"), "unknown verdict");
  auto map_of = [&](const char* key, auto&& put) {
    const std::string p = detail::child(path, key);
    const json& m = detail::field(j, key, path);
    if (!m.is_object()) throw ParseError(p, "expected an object");
    for (auto it = m.begin(); it != m.end(); ++it) put(it.key(), it.value(), detail::child(p, it.key()));
  };
  map_of("residuals", [&](const std::string& k, const json& v, const std::string& p) {
    r.residuals[k] = real_from_json(v, p);
  });
  map_of("tolerances", [&](const std::string& k, const json& v, const std::string& p) {
    r.tolerances[k] = real_from_json(v, p);
  });
  map_of("flags", [&](const std::string& k, const json& v, const std::string& p) {
    if (!v.is_boolean()) throw ParseError(p, "expected a boolean");
    r.flags[k] = v.get<bool>();
  });
  map_of("witnesses", [&](const std::string& k, const json& v, const std::string& p) {
    r.witnesses.emplace(k, witness_from_json(v, p));
  });
  const json& seed = detail::field(j, "seed", path);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ParseError(detail::child(path, "seed"), "expected an integer");
  }
  r.seed = seed.get<std::uint64_t>();
  r.instance = detail::integer(detail::field(j, "instance", path), detail::child(path, "instance"));
  return r;
}

inline json reports_to_json(const std::vector<VerificationReport>& rs) {
  json entries = json::array();
  for (const auto& r : rs) entries.push_back(to_json(r));
  return {{"entries", std::move(entries)}, {"version", 1}};
}

inline std::vector<VerificationReport> reports_from_json(const json& j) {
  const json& e = detail::array(detail::field(j, "entries", ""), "/entries");
  const json& v = detail::field(j, "version", "");
  if (v != 1) throw ParseError("/version", "unsupported report version");
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < e.size(); ++i) out.push_back(report_from_json(e[i], detail::child("/entries", i)));
  return out;
}

// ---------------------------------------------------------------------------
// Files.

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("/", std::string("malformed JSON: ") + e.what());
  }
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

template <class T>
void save(const std::string& path, const T& value) {
  write_text(path, dump(to_json(value)));
}

template <class T>
T from_json(const json& j);

template <> inline AlgebraElement from_json<AlgebraElement>(const json& j) { return element_from_json(j); }
template <> inline ModuleVector from_json<ModuleVector>(const json& j) { return vector_from_json(j); }
template <> inline ModuleOperator from_json<ModuleOperator>(const json& j) { return operator_from_json(j); }
template <> inline FrameSystem from_json<FrameSystem>(const json& j) { return frame_from_json(j); }
template <> inline oracle::InstanceSpec from_json<oracle::InstanceSpec>(const json& j) { return spec_from_json(j); }
template <> inline VerificationReport from_json<VerificationReport>(const json& j) { return report_from_json(j); }

template <class T>
T load(const std::string& path) {
  return from_json<T>(read_json(path));
}

}  // namespace hmod::io
