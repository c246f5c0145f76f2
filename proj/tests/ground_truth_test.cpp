#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "xrdfs/ground_truth.hpp"
#include "xrdfs/records_io.hpp"

namespace xrdfs {
namespace {

const std::string kUb = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";
Term ub(const std::string& local) { return Term::iri(kUb + local); }

Ontology student_onto() {
  return extract_ontology(Graph{Triple(ub("UndergraduateStudent"), vocab::sub_class_of(), ub("Student")),
                                Triple(ub("Student"), vocab::sub_class_of(), ub("Person")),
                                Triple(ub("takesCourse"), vocab::domain(), ub("Student")),
                                Triple(ub("takesCourse"), vocab::range(), ub("Course"))});
}

TEST(SplitDataset, SingleSubject) {
  Graph g{Triple(Term::blank("s"), vocab::type(), ub("Student")),
          Triple(Term::blank("s"), ub("takesCourse"), Term::blank("c"))};
  auto parts = split_dataset(g);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_TRUE(parts[0].graph.same_triples(g));
  EXPECT_EQ(parts[0].subject_type, ub("Student"));
}

TEST(SplitDataset, PartitionsBySubject) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 20; ++round) {
    auto kb = testing::random_kb(rng, 6, 4, 60);
    auto parts = split_dataset(kb.abox);
    std::size_t total = 0;
    std::set<std::string> subjects;
    for (const auto& p : parts) {
      EXPECT_TRUE(subjects.insert(p.subject.str()).second);
      for (const auto& t : p.graph) {
        EXPECT_EQ(t.subject, p.subject);
        EXPECT_TRUE(kb.abox.contains(t));
      }
      total += p.graph.size();
    }
    EXPECT_EQ(total, kb.abox.size());
    EXPECT_TRUE(std::is_sorted(parts.begin(), parts.end(),
                               [](const SubGraph& a, const SubGraph& b) { return a.subject.str() < b.subject.str(); }));
  }
}

TEST(SplitDataset, UntypedAndSmallestType) {
  Graph g{Triple(Term::blank("a"), ub("takesCourse"), Term::blank("c")),
          Triple(Term::blank("b"), vocab::type(), ub("Zeta")), Triple(Term::blank("b"), vocab::type(), ub("Alpha"))};
  auto parts = split_dataset(g);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].subject_type, untyped_marker());
  EXPECT_EQ(parts[1].subject_type, ub("Alpha"));
}

TEST(BuildRecords, CountsMatchOracle) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 50; ++round) {
    auto kb = testing::random_kb(rng, 8, 5, 20);
    auto onto = extract_ontology(kb.tbox);
    auto parts = split_dataset(kb.abox);
    auto records = build_records(parts, onto);
    std::size_t expected = 0;
    for (const auto& p : parts) expected += testing::brute_force_inferences(p.graph, kb.tbox).size();
    EXPECT_EQ(records.size(), expected);
    for (std::size_t i = 0; i < records.size(); ++i) {
      EXPECT_EQ(records[i].id, i);
      EXPECT_EQ(records[i].justification_length, records[i].justification.size());
    }
  }
}

TEST(BuildRecords, OverflowPolicies) {
  auto onto = student_onto();
  Graph g{Triple(Term::blank("s"), vocab::type(), ub("UndergraduateStudent"))};
  auto parts = split_dataset(g);

  GroundTruthReport skip_rep;
  auto skipped = build_records(parts, onto, GroundTruthConfig{1, OverflowPolicy::Skip, 1}, &skip_rep);
  EXPECT_TRUE(skipped.empty());
  EXPECT_EQ(skip_rep.skipped_overflow, 2u);
  EXPECT_EQ(skip_rep.overflow_lengths.at(2), 2u);

  GroundTruthReport trunc_rep;
  auto truncated = build_records(parts, onto, GroundTruthConfig{1, OverflowPolicy::Truncate, 1}, &trunc_rep);
  ASSERT_EQ(truncated.size(), 2u);
  EXPECT_EQ(trunc_rep.truncated_overflow, 2u);
  for (const auto& r : truncated) {
    EXPECT_EQ(r.justification.size(), 1u);
    EXPECT_EQ(r.justification_length, 2u);
  }
}

TEST(BuildRecords, ParallelIsDeterministic) {
  std::mt19937_64 rng(9);
  auto kb = testing::random_kb(rng, 8, 6, 30);
  Graph big = kb.abox;
  for (int i = 0; i < 5; ++i) {
    auto more = testing::random_kb(rng, 8, 6, 30);
    for (const auto& t : more.abox) big.insert(t);
  }
  auto onto = extract_ontology(kb.tbox);
  auto parts = split_dataset(big);
  auto a = build_records(parts, onto, GroundTruthConfig{2, OverflowPolicy::Skip, 1});
  auto b = build_records(parts, onto, GroundTruthConfig{2, OverflowPolicy::Skip, 4});
  std::ostringstream sa, sb;
  write_records(sa, a);
  write_records(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(BuildRecords, ReportCountsUntypedAndEmpty) {
  auto onto = student_onto();
  Graph g{Triple(Term::blank("a"), ub("takesCourse"), Term::blank("c")),
          Triple(Term::blank("b"), ub("name"), Term::literal("Bea"))};
  GroundTruthReport rep;
  auto records = build_records(split_dataset(g), onto, {}, &rep);
  EXPECT_EQ(rep.subgraphs, 2u);
  EXPECT_EQ(rep.untyped_subjects, 2u);
  EXPECT_EQ(rep.subgraphs_without_inferences, 1u);
  EXPECT_EQ(records.size(), 3u);  // a: Student and Person; c: Course
}

TEST(RecordsIo, JsonRoundTrip) {
  auto onto = student_onto();
  Graph g{Triple(Term::blank("s"), vocab::type(), ub("UndergraduateStudent")),
          Triple(Term::blank("s"), ub("takesCourse"), Term::iri("http://www.Department0.University0.edu/Course1")),
          Triple(Term::blank("s"), ub("name"), Term::literal("Line \"one\"\n", std::nullopt, "en"))};
  auto records = build_records(split_dataset(g), onto);
  ASSERT_FALSE(records.empty());
  std::stringstream buf;
  write_records(buf, records);
  auto back = read_records(buf);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i].id, records[i].id);
    EXPECT_EQ(back[i].inferred, records[i].inferred);
    EXPECT_EQ(back[i].justification, records[i].justification);
    EXPECT_EQ(back[i].justification_length, records[i].justification_length);
    EXPECT_TRUE(back[i].input.graph.same_triples(records[i].input.graph));
    EXPECT_EQ(back[i].input.subject_type, records[i].input.subject_type);
    EXPECT_EQ(back[i].strata_b(), records[i].strata_b());
  }
}

TEST(RecordsIo, BadLineReportsNumber) {
  std::stringstream buf("{\"id\":0}\nnot json\n");
  try {
    read_records(buf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace xrdfs
