#include <gtest/gtest.h>

#include "tfrcorr/domain.hpp"

using namespace tfrcorr;

namespace {

std::vector<PanelRecord> two_country_records() {
  return {
      {{"AAA"}, {1950}, 6.1, Phase::transition},      {{"AAA"}, {1955}, 5.8, Phase::transition},
      {{"AAA"}, {1960}, 5.2, Phase::transition},      {{"BBB"}, {1950}, 2.4, Phase::transition},
      {{"BBB"}, {1955}, 2.0, Phase::post_transition}, {{"BBB"}, {1960}, 1.9, Phase::post_transition},
  };
}

bool has_rule(const std::vector<PanelDiagnostic>& d, const std::string& rule) {
  for (const auto& x : d)
    if (x.rule == rule) return true;
  return false;
}

}  // namespace

TEST(ValidatePanel, WellFormedPanelHasNoDiagnostics) {
  EXPECT_TRUE(validate_panel(TFRPanel(two_country_records())).empty());
}

TEST(ValidatePanel, NegativeTfr) {
  auto r = two_country_records();
  r[1].tfr = -1.0;
  auto d = validate_panel(TFRPanel(r));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].rule, "tfr > 0 violated");
  EXPECT_EQ(d[0].country.code, "AAA");
  EXPECT_EQ(d[0].period->start_year, 1955);
}

TEST(ValidatePanel, PhaseReversal) {
  auto r = two_country_records();
  r[5].phase = Phase::transition;  // BBB goes post -> transition
  auto d = validate_panel(TFRPanel(r));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].rule, "phase order violated");
  EXPECT_EQ(d[0].period->start_year, 1960);
}

TEST(ValidatePanel, NonFiniteMisalignedAndGappedPeriods) {
  auto r = two_country_records();
  r[0].tfr = std::numeric_limits<double>::quiet_NaN();
  r[2].period = {1967};
  auto d = validate_panel(TFRPanel(r));
  EXPECT_TRUE(has_rule(d, "tfr finite violated"));
  EXPECT_TRUE(has_rule(d, "period alignment violated"));
  EXPECT_TRUE(has_rule(d, "periods consecutive violated"));
}

TEST(ValidatePanel, ConfigurableStride) {
  std::vector<PanelRecord> r{{{"AAA"}, {2000}, 2.0, Phase::post_transition},
                             {{"AAA"}, {2001}, 2.0, Phase::post_transition}};
  EXPECT_TRUE(validate_panel(TFRPanel(r, 1)).empty());
  EXPECT_FALSE(validate_panel(TFRPanel(r, 5)).empty());
}

TEST(TFRPanel, RejectsDuplicates) {
  auto r = two_country_records();
  r.push_back(r[0]);
  EXPECT_THROW(TFRPanel{r}, DomainError);
}

TEST(TFRPanel, Accessors) {
  TFRPanel p(two_country_records());
  EXPECT_EQ(p.countries().size(), 2u);
  EXPECT_EQ(p.periods().size(), 3u);
  EXPECT_EQ(p.size(), 6u);
  ASSERT_NE(p.find({"BBB"}, {1955}), nullptr);
  EXPECT_EQ(p.find({"BBB"}, {1955})->phase, Phase::post_transition);
  EXPECT_EQ(p.find({"BBB"}, {1965}), nullptr);
  EXPECT_EQ(p.previous({1955}).start_year, 1950);
  EXPECT_THROW(p.series({"ZZZ"}), MissingDataError);
}

TEST(Phase, Strings) {
  for (Phase ph : {Phase::pre_transition, Phase::transition, Phase::post_transition})
    EXPECT_EQ(parse_phase(to_string(ph)), ph);
  EXPECT_FALSE(parse_phase("Transition").has_value());
}

TEST(PairCovariates, LookupIsOrderInvariant) {
  PairCovariateTable t({{{"USA"}, {"CAN"}, {true, false, true}}, {{"MEX"}, {"USA"}, {true, false, false}}});
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"USA", "CAN"}, {"MEX", "USA"}, {"CAN", "MEX"}}) {
    EXPECT_EQ(t.get({a}, {b}), t.get({b}, {a}));
    EXPECT_EQ(t.find({a}, {b}).has_value(), t.find({b}, {a}).has_value());
  }
  EXPECT_EQ(t.get({"CAN"}, {"MEX"}), PairCovariates{});
}

TEST(PairCovariates, CombinationRoundTrip) {
  for (int k = 0; k < 8; ++k) EXPECT_EQ(PairCovariates::from_combination(k).combination(), k);
}

TEST(PairCovariates, RejectsSelfPairsAndDuplicates) {
  EXPECT_THROW(PairCovariateTable(std::vector<PairCovariateRecord>{{{"A"}, {"A"}, {}}}), DomainError);
  EXPECT_THROW(PairCovariateTable({{{"A"}, {"B"}, {}}, {{"B"}, {"A"}, {}}}), DomainError);
}

TEST(PairCovariates, MissingPairsWarnOnce) {
  PairCovariateTable t({{{"A"}, {"B"}, {true, true, true}}});
  Warnings w;
  t.report_missing({{"A"}, {"B"}, {"C"}}, w);
  ASSERT_EQ(w.messages.size(), 1u);
  EXPECT_NE(w.messages[0].find("2 country pair(s)"), std::string::npos);
  Warnings none;
  t.report_missing({{"A"}, {"B"}}, none);
  EXPECT_TRUE(none.empty());
}

TEST(CorrelationParams, RejectsInadmissible) {
  EXPECT_THROW(CorrelationParams(0.0, {0, 0, 0, 0}, {0, 0, 0, 0}), InvalidParamsError);
  EXPECT_THROW(CorrelationParams(5.0, {0.5, 0.3, 0.1, 0.1}, {0, 0, 0, 0}), InvalidParamsError);
  EXPECT_THROW(CorrelationParams(5.0, {0, 0, 0, 0}, {-0.9, -0.1, 0, 0}), InvalidParamsError);
  EXPECT_NO_THROW(CorrelationParams(5.0, {0.5, 0.3, 0.1, 0.09}, {0, 0, 0, 0}));
}

TEST(CorrelationParams, Defaults) {
  auto p = CorrelationParams::defaults();
  EXPECT_EQ(p.kappa(), 5.0);
  EXPECT_EQ(p.beta_low(), (Betas{0.11, 0.26, 0.05, 0.09}));
  EXPECT_EQ(p.beta_high(), (Betas{0.05, 0.06, 0.00, 0.02}));
  EXPECT_EQ(&p.betas(Regime::low), &p.beta_low());
}

TEST(PopulationWeights, RenormalizesWithWarning) {
  Warnings w;
  PopulationWeights pw("R", {{{"A"}, 3.0}, {{"B"}, 1.0}}, &w);
  EXPECT_EQ(w.messages.size(), 1u);
  EXPECT_DOUBLE_EQ(pw.entries()[0].second, 0.75);
  EXPECT_DOUBLE_EQ(pw.max_proportion(), 0.75);
}

TEST(PopulationWeights, SmallDeviationIsSilent) {
  Warnings w;
  PopulationWeights pw("R", {{{"A"}, 0.5 + 1e-8}, {{"B"}, 0.5}}, &w);
  EXPECT_TRUE(w.empty());
  double s = 0;
  for (auto& e : pw.entries()) s += e.second;
  EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(PopulationWeights, Rejections) {
  EXPECT_THROW(PopulationWeights("R", {}), DomainError);
  EXPECT_THROW(PopulationWeights("R", {{{"A"}, -0.1}, {{"B"}, 1.1}}), DomainError);
  EXPECT_THROW(PopulationWeights("R", {{{"A"}, 0.0}}), DomainError);
  EXPECT_THROW(PopulationWeights("R", {{{"A"}, 0.5}, {{"A"}, 0.5}}), DomainError);
}
