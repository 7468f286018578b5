#include "test_util.hpp"

#include <bit>
#include <fstream>
#include <sstream>

using namespace hmod;
using namespace hmod::testing;

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!same_bits(a(i).real(), b(i).real()) || !same_bits(a(i).imag(), b(i).imag())) return false;
  }
  return true;
}

template <class T>
T round_trip(const T& v) {
  return io::from_json<T>(io::parse_text(io::dump(io::to_json(v))));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) { return std::string(HMOD_FIXTURE_DIR) + "/" + name; }

// Values chosen to stress shortest-form printing: non-terminating binary
// fractions, subnormals, signed zero and extremes.
CMatrix awkward(Eigen::Index rows, Eigen::Index cols, int offset) {
  const double pool[] = {0.1, 0.30000000000000004, 1.0 / 3.0, -0.0, 5e-324, 1.7976931348623157e308,
                         -2.5e-17, 6.02214076e23, 1e-300, -1.0, 0.0, 123456789.123456789};
  CMatrix m(rows, cols);
  int k = offset;
  for (Eigen::Index i = 0; i < m.size(); ++i, k += 2) m(i) = Complex(pool[k % 12], pool[(k + 5) % 12]);
  return m;
}

ModuleOperator golden_operator() {
  const AlgebraDescriptor d{2, 1};
  const ModuleSpace x(d, 2), y(d, 1);
  return ModuleOperator(x, y, {awkward(2, 4, 0), awkward(1, 2, 3)});
}

FrameSystem golden_frame() {
  return FrameSystem::build(scalar_space(2), {scalar_vec({1.0, Complex(0.0, -0.5)}), scalar_vec({0.1, 2.0 / 3.0})});
}

oracle::InstanceSpec golden_spec() {
  return {18446744073709551615ull, {2, 1, 3}, 3, 5, oracle::Kind::orthogonal_parseval_pair, 0.25, 4.0};
}

VerificationReport golden_report() {
  VerificationReport r;
  r.theorem_id = "operator-bound";
  r.verdict = Verdict::hypotheses_not_met;
  r.residuals = {{"lower", std::numeric_limits<double>::infinity()},
                 {"upper", -std::numeric_limits<double>::infinity()},
                 {"ratio", 0.1}};
  r.tolerances = {{"ratio", 1e-9}};
  r.flags = {{"invertible", false}, {"kframe", true}};
  r.witnesses.emplace("xi", scalar_vec({0.1, -0.0}));
  r.seed = 42;
  r.instance = 7;
  return r;
}

}  // namespace

TEST(RoundTrip, Reals) {
  for (double v : {0.1, -0.0, 5e-324, 1.7976931348623157e308, std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()}) {
    EXPECT_TRUE(same_bits(io::real_from_json(io::parse_text(io::real_to_json(v).dump()), ""), v)) << v;
  }
  EXPECT_TRUE(std::isnan(io::real_from_json(io::parse_text(io::real_to_json(std::nan("")).dump()), "")));
}

TEST(RoundTrip, AllTypesBitExact) {
  Rng rng(81);
  for (const auto& sh : shapes()) {
    const AlgebraDescriptor d(sh);
    const ModuleSpace x(d, 2), y(d, 3);
    const AlgebraElement a = random_element(rng, d);
    const AlgebraElement ra = round_trip(a);
    for (std::size_t j = 0; j < d.num_blocks(); ++j) EXPECT_TRUE(same_bits(a.block(j), ra.block(j)));
    const ModuleVector v = random_vector(rng, x);
    EXPECT_EQ(round_trip(v), v);
    const ModuleOperator t = random_operator(rng, x, y);
    const ModuleOperator rt = round_trip(t);
    for (std::size_t j = 0; j < d.num_blocks(); ++j) EXPECT_TRUE(same_bits(t.block(j), rt.block(j)));
    const FrameSystem f = FrameSystem::from_synthesis(random_operator(rng, y, x));
    EXPECT_EQ(round_trip(f), f);
  }
  const ModuleOperator g = golden_operator();
  const ModuleOperator rg = round_trip(g);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_TRUE(same_bits(g.block(j), rg.block(j)));
  EXPECT_EQ(round_trip(golden_spec()), golden_spec());
}

TEST(RoundTrip, ReportsPreserveNonFinite) {
  const VerificationReport r = golden_report();
  const std::vector<VerificationReport> back = io::reports_from_json(io::reports_to_json({r, r}));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].theorem_id, r.theorem_id);
  EXPECT_EQ(back[0].verdict, r.verdict);
  EXPECT_TRUE(std::isinf(back[0].residuals.at("lower")) && back[0].residuals.at("lower") > 0);
  EXPECT_TRUE(std::isinf(back[0].residuals.at("upper")) && back[0].residuals.at("upper") < 0);
  EXPECT_EQ(back[0].flags, r.flags);
  EXPECT_EQ(std::get<ModuleVector>(back[0].witnesses.at("xi")), std::get<ModuleVector>(r.witnesses.at("xi")));
  EXPECT_EQ(back[1].seed, 42u);
  EXPECT_EQ(back[1].instance, 7);
  const io::json j = io::reports_to_json({r});
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_TRUE(j.at("entries").is_array());
}

TEST(Malformed, ReportsJsonPointer) {
  auto pointer_of = [](const std::string& text, auto&& load) -> std::string {
    try {
      load(io::parse_text(text));
    } catch (const io::ParseError& e) {
      return e.pointer();
    }
    return "<no error>";
  };
  auto op = [](const io::json& j) { io::operator_from_json(j); };
  auto frame = [](const io::json& j) { io::frame_from_json(j); };
  auto spec = [](const io::json& j) { io::spec_from_json(j); };
  EXPECT_EQ(pointer_of(R"({"domain_rank":1,"codomain_rank":1,"entries":[]})", op), "/descriptor");
  EXPECT_EQ(pointer_of(R"({"descriptor":{"block_dims":[1]},"domain_rank":"x","codomain_rank":1,"entries":[]})", op),
            "/domain_rank");
  EXPECT_EQ(pointer_of(R"({"descriptor":{"block_dims":[1]},"domain_rank":1,"codomain_rank":1,
                          "entries":[[{"blocks":[[[[1,"two"]]]]}]]})",
                       op),
            "/entries/0/0/blocks/0/0/0/1");
  EXPECT_EQ(pointer_of(R"({"descriptor":{"block_dims":[1]},"domain_rank":1,"codomain_rank":1,
                          "entries":[[{"blocks":[[[1]]]}]]})",
                       op),
            "/entries/0/0/blocks/0/0/0");
  EXPECT_EQ(pointer_of(R"({"space":{"descriptor":{"block_dims":[1]},"rank":1},"vectors":[]})", frame), "/vectors");
  EXPECT_EQ(pointer_of(R"({"seed":-1,"blocks":[1],"rank":1,"frame_size":1,"kind":"frame"})", spec), "/seed");
  EXPECT_EQ(pointer_of(R"({"seed":1,"blocks":[1],"rank":1,"frame_size":1,"kind":"nope"})", spec), "/kind");
  EXPECT_THROW(io::parse_text("{\"a\": [1, 2"), io::ParseError);
  EXPECT_THROW(io::reports_from_json(io::parse_text(R"({"entries":[],"version":2})")), io::ParseError);
  EXPECT_THROW(io::load<ModuleOperator>("/nonexistent/operator.json"), io::IoError);
}

TEST(Malformed, ShapeMismatchIsShapeError) {
  EXPECT_THROW(io::operator_from_json(io::parse_text(
                   R"({"descriptor":{"block_dims":[2]},"domain_rank":1,"codomain_rank":1,
                       "entries":[[{"blocks":[[[[1,0]]]]}]]})")),
               ShapeError);
  EXPECT_THROW(io::operator_from_json(io::parse_text(
                   R"({"descriptor":{"block_dims":[1]},"domain_rank":2,"codomain_rank":1,
                       "entries":[[{"blocks":[[[[1,0]]]]}]]})")),
               ShapeError);
}

TEST(Golden, FixturesParseToExpectedValues) {
  const ModuleOperator t = io::load<ModuleOperator>(fixture("operator.json"));
  const ModuleOperator g = golden_operator();
  ASSERT_EQ(t.domain(), g.domain());
  for (std::size_t j = 0; j < 2; ++j) EXPECT_TRUE(same_bits(t.block(j), g.block(j)));
  EXPECT_EQ(io::load<FrameSystem>(fixture("frame.json")), golden_frame());
  EXPECT_EQ(io::load<oracle::InstanceSpec>(fixture("spec.json")), golden_spec());
  const VerificationReport r = io::load<VerificationReport>(fixture("report.json"));
  EXPECT_EQ(io::dump(io::to_json(r)), io::dump(io::to_json(golden_report())));
}

TEST(Golden, FixturesRoundTripByteForByte) {
  for (const char* name : {"operator.json", "frame.json", "spec.json", "report.json", "element.json"}) {
    const std::string text = slurp(fixture(name));
    ASSERT_FALSE(text.empty()) << name;
    const io::json j = io::parse_text(text);
    std::string again;
    if (std::string(name) == "operator.json") again = io::dump(io::to_json(io::from_json<ModuleOperator>(j)));
    else if (std::string(name) == "frame.json") again = io::dump(io::to_json(io::from_json<FrameSystem>(j)));
    else if (std::string(name) == "spec.json") again = io::dump(io::to_json(io::from_json<oracle::InstanceSpec>(j)));
    else if (std::string(name) == "report.json") again = io::dump(io::to_json(io::from_json<VerificationReport>(j)));
    else again = io::dump(io::to_json(io::from_json<AlgebraElement>(j)));
    EXPECT_EQ(again, text) << name;
  }
}
