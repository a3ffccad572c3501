#include <clocale>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "fracell/config.hpp"
#include "fracell/io.hpp"

using namespace fracell;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("fracell_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1.0}) {
    const std::string s = format_double(x);
    EXPECT_EQ(std::stod(s), x);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(Format, IgnoresNumericLocale) {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") == nullptr) GTEST_SKIP() << "de_DE locale not installed";
  EXPECT_EQ(format_double(1.5), "1.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(Csv, RoundTripsGridFunctions) {
  const Grid g = Grid::box(1.0, 2.0, 5, 4);
  const GridFunction f = GridFunction::sample(g, [](const Point& x) { return std::exp(x[0]) / (1 + x[1]) / 3.0; });
  const auto dir = scratch("csv");
  write_csv(dir / "f.csv", grid_function_table(f));
  const GridFunction back = grid_function_from_table(g, read_csv(dir / "f.csv"));
  EXPECT_EQ((back.values - f.values).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(grid_function_from_table(Grid::box(1.0, 2.0, 4, 5), read_csv(dir / "f.csv")), Error);
  EXPECT_THROW(grid_function_from_table(Grid::line(1.0, 20), read_csv(dir / "f.csv")), Error);
  write_text(dir / "bad.csv", "a,b\n1,2\n3\n");
  EXPECT_THROW(read_csv(dir / "bad.csv"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Csv, RejectsRaggedRows) {
  CsvTable t{{"a", "b"}, {}};
  EXPECT_THROW(t.add({1.0}), Error);
  t.add({1.0, 2.0});
  EXPECT_EQ(t.str(), "a,b\n1,2\n");
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(Config, DefaultsParsingAndOverrides) {
  const RunConfig c = RunConfig::parse(Command::Solve, "# comment\n nodes = 65  # trailing\n\ns = 0.25, 0.75\n",
                                       {{"bc", "neumann"}, {"nodes", "33"}});
  EXPECT_EQ(c.integer("nodes"), 33);
  EXPECT_EQ(c.text("bc"), "neumann");
  EXPECT_EQ(c.reals("s"), (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(c.integer("dim"), 1);
  EXPECT_DOUBLE_EQ(c.real("quad_tol"), 1e-10);
  EXPECT_TRUE(c.flag("triplets"));
  EXPECT_EQ(c.grid().nodes(0), 33);
  const RunConfig d = RunConfig::parse(Command::Kernel, "dim = 2\nnodes = 9\nextent_y = 2\n");
  EXPECT_EQ(d.grid().nodes(1), 9);
  EXPECT_EQ(d.grid().extent(1), 2.0);
}

TEST(Config, ErrorsNameTheKey) {
  auto message = [](const std::string& text) {
    try {
      RunConfig::parse(Command::Solve, text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("nodez = 3\n").find("'nodez'"), std::string::npos);
  EXPECT_NE(message("nodes = 3\n").find("'nodes'"), std::string::npos);
  EXPECT_NE(message("s = 1.5\n").find("'s'"), std::string::npos);
  EXPECT_NE(message("bc = robin\n").find("'bc'"), std::string::npos);
  EXPECT_NE(message("nodes = 12.5\n").find("'nodes'"), std::string::npos);
  EXPECT_NE(message("just text\n"), "");
  EXPECT_THROW(parse_command("solver"), Error);
  EXPECT_EQ(parse_command("halfline"), Command::Halfline);
}

TEST(Config, HashIsCanonical) {
  const RunConfig a = RunConfig::parse(Command::Probe, "s = 0.5\nnodes = 65\n");
  const RunConfig b = RunConfig::parse(Command::Probe, "nodes=65\n", {{"s", "0.5"}, {"out", "elsewhere"}});
  const RunConfig c = RunConfig::parse(Command::Solve, "s = 0.5\nnodes = 65\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(a.canonical().rfind("command=probe\n", 0), 0u);
  EXPECT_EQ(a.canonical().find("out="), std::string::npos);
}

TEST(Config, EquivalentSpellingsHashTheSame) {
  const RunConfig a = RunConfig::parse(Command::Solve, "s = 0.25, 0.50\nnodes = 65\nextent = 1.0\n");
  const RunConfig b = RunConfig::parse(Command::Solve, "s=0.25,0.5\nnodes=65\n", {{"extent", "1"}});
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.reals("s"), (std::vector<double>{0.25, 0.5}));
}

TEST(Config, KeyTableCoversEveryValue) {
  const RunConfig c = RunConfig::parse(Command::Solve, "");
  EXPECT_EQ(c.values().size(), config_keys().size());
  EXPECT_EQ(module_versions().size(), 7u);
}
