#include <sstream>

#include <gtest/gtest.h>

#include "eqd/error.hpp"
#include "eqd/pedigree.hpp"
#include "instances.hpp"

using namespace eqd;

namespace {

Pedigree parse(const std::string& text) {
  std::istringstream in(text);
  return read_pedigree(in);
}

}  // namespace

TEST(Pedigree, MinimalTrio) {
  const auto ped = parse("id,sire,dam\n1,0,0\n2,0,0\n3,1,2\n");
  ASSERT_EQ(ped.size(), 3u);
  EXPECT_EQ(ped.founder_count(), 2u);
  EXPECT_EQ(ped.sire_position(2), 0);
  EXPECT_EQ(ped.dam_position(2), 1);
  EXPECT_EQ(ped.sire_position(0), Pedigree::kNone);
}

TEST(Pedigree, ParentAfterChildIsOrderError) {
  EXPECT_THROW(parse("id,sire,dam\n1,0,0\n3,4,0\n4,0,0\n"), OrderError);
}

TEST(Pedigree, SelfParentIsOrderError) {
  EXPECT_THROW(parse("id,sire,dam\n1,1,0\n"), OrderError);
}

TEST(Pedigree, DuplicateId) {
  EXPECT_THROW(parse("id,sire,dam\n1,0,0\n1,0,0\n"), DuplicateIdError);
}

TEST(Pedigree, MalformedRowReportsLine) {
  try {
    parse("id,sire,dam\n1,0,0\n2,x,0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("id,sire,dam\n1,0\n"), ParseError);
  EXPECT_THROW(parse("id,father,mother\n1,0,0\n"), ParseError);
}

TEST(Pedigree, FixtureT1) {
  const auto ped = parse("id,sire,dam\n1,0,0\n2,0,0\n3,1,2\n4,1,2\n");
  EXPECT_EQ(ped, eqd::testing::t1_pedigree());
  EXPECT_EQ(ped.size(), 4u);
  EXPECT_EQ(*ped.position_of(4), 3u);
  EXPECT_FALSE(ped.position_of(9).has_value());
}

TEST(Pedigree, WriteReadRoundTrip) {
  const auto ped = generate_pedigree(6, 2, 2, 11);
  std::ostringstream out;
  write_pedigree(out, ped);
  EXPECT_EQ(parse(out.str()), ped);
}

TEST(Pedigree, GeneratorFoundersOnly) {
  const auto ped = generate_pedigree(2, 0, 3, 5);
  EXPECT_EQ(ped.size(), 2u);
  EXPECT_EQ(ped.founder_count(), 2u);
  const auto kin = KinshipSystem::build(ped);
  EXPECT_TRUE(kin.dense().isApprox(Matrix::Identity(2, 2), 0.0));
}

TEST(Pedigree, GeneratorIsDeterministic) {
  EXPECT_EQ(generate_pedigree(10, 3, 2, 7), generate_pedigree(10, 3, 2, 7));
  EXPECT_FALSE(generate_pedigree(10, 3, 2, 7) == generate_pedigree(10, 3, 2, 8));
}

TEST(Pedigree, GeneratorParentsPrecedeChildren) {
  const auto ped = generate_pedigree(4, 2, 2, 1);
  for (std::size_t i = 0; i < ped.size(); ++i) {
    EXPECT_LT(ped.sire_position(i), static_cast<int>(i));
    EXPECT_LT(ped.dam_position(i), static_cast<int>(i));
    if (i >= 4) {
      EXPECT_NE(ped.sire_position(i), Pedigree::kNone);
      EXPECT_NE(ped.dam_position(i), Pedigree::kNone);
    }
  }
  std::ostringstream out;
  write_pedigree(out, ped);
  EXPECT_NO_THROW(parse(out.str()));
}

TEST(Pedigree, GeneratorRejectsTooFewFounders) {
  EXPECT_THROW(generate_pedigree(1, 2, 2, 1), InputError);
}
