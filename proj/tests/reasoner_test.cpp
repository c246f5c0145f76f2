#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "xrdfs/ntriples.hpp"
#include "xrdfs/ontology.hpp"
#include "xrdfs/reasoner.hpp"

namespace xrdfs {
namespace {

using testing::brute_force_inferences;

const std::string kUb = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";
Term ub(const std::string& local) { return Term::iri(kUb + local); }

Graph student_tbox() {
  return Graph{Triple(ub("UndergraduateStudent"), vocab::sub_class_of(), ub("Student")),
               Triple(ub("Student"), vocab::sub_class_of(), ub("Person"))};
}

TEST(Ontology, EmptyGraph) {
  auto onto = extract_ontology(Graph{});
  EXPECT_TRUE(onto.empty());
  EXPECT_EQ(onto.closure_size(), 0u);
}

TEST(Ontology, ChainClosure) {
  auto onto = extract_ontology(student_tbox());
  EXPECT_TRUE(onto.closure_contains(Triple(ub("UndergraduateStudent"), vocab::sub_class_of(), ub("Person"))));
  EXPECT_FALSE(onto.closure_contains(Triple(ub("Person"), vocab::sub_class_of(), ub("Person"))));
  EXPECT_EQ(onto.classes().size(), 3u);
}

TEST(Ontology, DeclarationsAndDomains) {
  auto tbox = parse_ntriples(
      "<http://e/A> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/2002/07/owl#Class> .\n"
      "<http://e/p> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> "
      "<http://www.w3.org/2002/07/owl#ObjectProperty> .\n"
      "<http://e/q> <http://www.w3.org/2000/01/rdf-schema#domain> <http://e/B> .\n"
      "<http://e/q> <http://www.w3.org/2000/01/rdf-schema#range> <http://e/C> .\n");
  auto onto = extract_ontology(tbox);
  EXPECT_TRUE(onto.is_class(Term::iri("http://e/A")));
  EXPECT_TRUE(onto.is_class(Term::iri("http://e/B")));
  EXPECT_TRUE(onto.is_class(Term::iri("http://e/C")));
  EXPECT_TRUE(onto.is_property(Term::iri("http://e/p")));
  EXPECT_TRUE(onto.is_property(Term::iri("http://e/q")));
  EXPECT_TRUE(onto.domains(Term::iri("http://e/q")).contains(Term::iri("http://e/B")));
}

TEST(Ontology, IgnoresSchemaStatementsOverBlankNodes) {
  Graph tbox{Triple(ub("A"), vocab::sub_class_of(), Term::blank("restriction0"))};
  auto onto = extract_ontology(tbox);
  EXPECT_TRUE(onto.classes().empty());
  EXPECT_FALSE(onto.warnings().empty());
}

TEST(Ontology, ClosureMatchesBfsOnRandomDags) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    Graph tbox;
    std::vector<std::pair<std::string, std::string>> edges;
    std::bernoulli_distribution edge(0.25);
    for (int i = 0; i < 20; ++i) {
      for (int j = i + 1; j < 20; ++j) {
        if (!edge(rng)) continue;
        tbox.insert(Triple(testing::cls(i), vocab::sub_class_of(), testing::cls(j)));
        edges.emplace_back(testing::cls(i).str(), testing::cls(j).str());
      }
    }
    auto onto = extract_ontology(tbox);
    auto expected = testing::bfs_reachability(edges);
    for (int i = 0; i < 20; ++i) {
      std::set<std::string> got;
      for (const auto& c : onto.superclasses(testing::cls(i))) got.insert(c.str());
      EXPECT_EQ(got, expected[testing::cls(i).str()]) << "class " << i;
    }
    // closure . closure = closure
    for (const auto& c : onto.classes()) {
      for (const auto& d : onto.superclasses(c)) {
        for (const auto& e : onto.superclasses(d)) EXPECT_TRUE(onto.superclasses(c).contains(e));
      }
    }
    EXPECT_FALSE(onto.has_class_cycle());
  }
}

TEST(Ontology, CycleWarningAndMutualSubsumption) {
  Graph tbox{Triple(ub("A"), vocab::sub_class_of(), ub("B")), Triple(ub("B"), vocab::sub_class_of(), ub("A"))};
  auto onto = extract_ontology(tbox);
  EXPECT_TRUE(onto.has_class_cycle());
  EXPECT_TRUE(onto.superclasses(ub("A")).contains(ub("B")));
  EXPECT_TRUE(onto.superclasses(ub("B")).contains(ub("A")));
  EXPECT_FALSE(onto.superclasses(ub("A")).contains(ub("A")));
  bool warned = false;
  for (const auto& w : onto.warnings()) warned |= w.find("CycleWarning") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(Reasoner, SubclassTyping) {
  auto onto = extract_ontology(student_tbox());
  Graph abox{Triple(Term::blank("U46"), vocab::type(), ub("UndergraduateStudent"))};
  auto inferred = materialize(abox, onto);
  ASSERT_EQ(inferred.size(), 2u);
  auto j = justify(abox, onto, Triple(Term::blank("U46"), vocab::type(), ub("Student")));
  EXPECT_EQ(j.rule, Rule::SubClass);
  EXPECT_EQ(j.abox_support, std::vector<Triple>{abox.triples()[0]});
  EXPECT_EQ(j.tbox_support,
            std::vector<Triple>{Triple(ub("UndergraduateStudent"), vocab::sub_class_of(), ub("Student"))});
}

TEST(Reasoner, SummarizedJustificationCollapsesChain) {
  auto onto = extract_ontology(student_tbox());
  Graph abox{Triple(Term::blank("U46"), vocab::type(), ub("UndergraduateStudent"))};
  auto j = justify(abox, onto, Triple(Term::blank("U46"), vocab::type(), ub("Person")));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j.tbox_support.front(), Triple(ub("UndergraduateStudent"), vocab::sub_class_of(), ub("Person")));
}

TEST(Reasoner, DomainChainUsesSingleAboxTriple) {
  Graph tbox{Triple(ub("doctoralDegreeFrom"), vocab::sub_property_of(), ub("degreeFrom")),
             Triple(ub("degreeFrom"), vocab::domain(), ub("Person")),
             Triple(ub("FullProfessor"), vocab::sub_class_of(), ub("Professor")),
             Triple(ub("Professor"), vocab::sub_class_of(), ub("Person"))};
  auto onto = extract_ontology(tbox);
  Triple degree(Term::blank("FullProfessor3"), ub("doctoralDegreeFrom"), Term::iri("http://www.University879.edu"));
  Graph abox{Triple(Term::blank("FullProfessor3"), vocab::type(), ub("FullProfessor")), degree};
  auto j = justify(abox, onto, Triple(Term::blank("FullProfessor3"), vocab::type(), ub("Person")));
  EXPECT_EQ(j.rule, Rule::Domain);
  EXPECT_EQ(j.abox_support, std::vector<Triple>{degree});
  EXPECT_TRUE(j.tbox_support.empty());

  auto sp = justify(abox, onto, Triple(degree.subject, ub("degreeFrom"), degree.object));
  EXPECT_EQ(sp.rule, Rule::SubProperty);
  EXPECT_EQ(sp.size(), 2u);
}

TEST(Reasoner, RangeSkipsLiteralObjects) {
  Graph tbox{Triple(ub("name"), vocab::range(), ub("Label")), Triple(ub("knows"), vocab::range(), ub("Person"))};
  auto onto = extract_ontology(tbox);
  Graph abox{Triple(Term::blank("a"), ub("name"), Term::literal("Ann")),
             Triple(Term::blank("a"), ub("knows"), Term::blank("b"))};
  auto inferred = materialize(abox, onto);
  ASSERT_EQ(inferred.size(), 1u);
  EXPECT_EQ(inferred[0].triple, Triple(Term::blank("b"), vocab::type(), ub("Person")));
  EXPECT_EQ(inferred[0].justification.rule, Rule::Range);
}

TEST(Reasoner, ErrorsAndEmptyInput) {
  auto onto = extract_ontology(student_tbox());
  Graph abox{Triple(Term::blank("U46"), vocab::type(), ub("UndergraduateStudent"))};
  EXPECT_THROW(justify(abox, onto, abox.triples()[0]), AlreadyAsserted);
  EXPECT_THROW(justify(abox, onto, Triple(Term::blank("U46"), vocab::type(), ub("Course"))), NotDerivable);
  EXPECT_TRUE(materialize(Graph{}, onto).empty());
}

TEST(Reasoner, TieBreakPrefersSmallerThenLexicographic) {
  // Two routes to (x type Person): a two-triple subclass route and two
  // one-triple domain routes. The smaller support wins; among equals the
  // smaller N-Triples line.
  Graph tbox{Triple(ub("Student"), vocab::sub_class_of(), ub("Person")),
             Triple(ub("zeta"), vocab::domain(), ub("Person")), Triple(ub("alpha"), vocab::domain(), ub("Person"))};
  auto onto = extract_ontology(tbox);
  Graph abox{Triple(Term::blank("x"), vocab::type(), ub("Student")),
             Triple(Term::blank("x"), ub("zeta"), Term::blank("y")),
             Triple(Term::blank("x"), ub("alpha"), Term::blank("y"))};
  auto j = justify(abox, onto, Triple(Term::blank("x"), vocab::type(), ub("Person")));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j.abox_support.front().predicate, ub("alpha"));
}

TEST(Reasoner, CycleJustificationPicksSmallestObject) {
  Graph tbox{Triple(ub("A"), vocab::sub_class_of(), ub("B")), Triple(ub("B"), vocab::sub_class_of(), ub("C")),
             Triple(ub("C"), vocab::sub_class_of(), ub("A"))};
  auto onto = extract_ontology(tbox);
  Graph abox{Triple(Term::blank("x"), vocab::type(), ub("B")), Triple(Term::blank("x"), vocab::type(), ub("C"))};
  auto j = justify(abox, onto, Triple(Term::blank("x"), vocab::type(), ub("A")));
  // Both (x type B)+(B sc A) and (x type C)+(C sc A) qualify; the first sorts lower.
  EXPECT_EQ(j.abox_support.front().object, ub("B"));
}

class RandomKbTest : public ::testing::TestWithParam<int> {};

TEST_P(RandomKbTest, MatchesBruteForceAndReplays) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  for (int round = 0; round < 100; ++round) {
    auto kb = testing::random_kb(rng);
    auto onto = extract_ontology(kb.tbox);
    auto inferred = materialize(kb.abox, onto);

    Graph got;
    for (const auto& it : inferred) {
      got.insert(it.triple);
      const auto& j = it.justification;
      EXPECT_GE(j.abox_support.size(), 1u);
      EXPECT_LE(j.size(), 2u);
      EXPECT_TRUE(replays_to(j, onto, it.triple)) << it.triple.str();
      for (const auto& a : j.abox_support) EXPECT_TRUE(kb.abox.contains(a));
      for (const auto& t : j.tbox_support) EXPECT_TRUE(onto.closure_contains(t));
      EXPECT_EQ(justify(kb.abox, onto, it.triple), j);
    }
    auto expected = brute_force_inferences(kb.abox, kb.tbox);
    EXPECT_EQ(testing::to_set(got), testing::to_set(expected));

    // Idempotence: nothing new once inferences are asserted.
    Graph closed = kb.abox;
    for (const auto& t : got) closed.insert(t);
    EXPECT_TRUE(materialize(closed, onto).empty());

    // Monotonicity: adding a statement never removes an inference.
    if (!kb.abox.empty()) {
      Graph bigger = kb.abox;
      bigger.insert(Triple(Term::blank("b0"), vocab::type(), testing::cls(0)));
      Graph more;
      for (const auto& it : materialize(bigger, onto)) more.insert(it.triple);
      for (const auto& t : got) {
        if (!bigger.contains(t)) EXPECT_TRUE(more.contains(t)) << t.str();
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomKbTest, ::testing::Values(1, 2, 3));

TEST(Audit, ClassifiesPredictions) {
  Graph tbox{Triple(ub("doctoralDegreeFrom"), vocab::domain(), ub("Person")),
             Triple(ub("undergraduateDegreeFrom"), vocab::domain(), ub("Person"))};
  auto onto = extract_ontology(tbox);
  Term fp = Term::blank("FullProfessor3");
  Term u879 = Term::iri("http://www.University879.edu");
  Triple doctoral(fp, ub("doctoralDegreeFrom"), u879);
  Triple conclusion(fp, vocab::type(), ub("Person"));

  Graph abox{doctoral};
  auto canonical = justify(abox, onto, conclusion);
  EXPECT_EQ(classify_prediction(abox, onto, conclusion, {doctoral}, canonical), PredictionStatus::ExactMatch);
  // Wrong degree predicate: not in the graph.
  Triple undergrad(fp, ub("undergraduateDegreeFrom"), u879);
  EXPECT_EQ(classify_prediction(abox, onto, conclusion, {undergrad}, canonical), PredictionStatus::Invalid);
  // With both degrees asserted, the other one is a valid alternative.
  Graph both{doctoral, undergrad};
  EXPECT_EQ(classify_prediction(both, onto, conclusion, {undergrad}, canonical), PredictionStatus::ValidButDifferent);
  EXPECT_EQ(classify_prediction(both, onto, conclusion, {}, canonical), PredictionStatus::Invalid);
}

}  // namespace
}  // namespace xrdfs
