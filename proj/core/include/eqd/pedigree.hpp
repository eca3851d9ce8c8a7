#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace eqd {

using IndividualId = std::int64_t;

/// Id used for an unknown parent, both in files and in records.
inline constexpr IndividualId kUnknownParent = 0;

struct PedigreeRecord {
  IndividualId id = 0;
  IndividualId sire = kUnknownParent;
  IndividualId dam = kUnknownParent;

  friend bool operator==(const PedigreeRecord&, const PedigreeRecord&) = default;
};

/// Topologically ordered parent records. Position i (0-based) is the i-th
/// record; every known parent sits at an earlier position.
class Pedigree {
 public:
  /// Sentinel position for an unknown parent.
  static constexpr int kNone = -1;

  Pedigree() = default;

  /// Validates ordering and id uniqueness.
  /// Throws OrderError or DuplicateIdError.
  explicit Pedigree(std::vector<PedigreeRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  std::span<const PedigreeRecord> records() const noexcept { return records_; }
  const PedigreeRecord& operator[](std::size_t i) const { return records_[i]; }

  std::optional<std::size_t> position_of(IndividualId id) const;

  /// Position of the sire / dam of the individual at `i`, or kNone.
  int sire_position(std::size_t i) const { return sire_pos_[i]; }
  int dam_position(std::size_t i) const { return dam_pos_[i]; }

  std::size_t founder_count() const;

  friend bool operator==(const Pedigree& a, const Pedigree& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<PedigreeRecord> records_;
  std::vector<int> sire_pos_;
  std::vector<int> dam_pos_;
  std::unordered_map<IndividualId, std::size_t> index_;
};

/// Reads a pedigree CSV with header `id,sire,dam`.
/// Throws ParseError, OrderError or DuplicateIdError.
Pedigree read_pedigree(std::istream& in);
Pedigree load_pedigree(const std::filesystem::path& path);

void write_pedigree(std::ostream& out, const Pedigree& pedigree);

/// Random pedigree: `founders` unrelated individuals followed by
/// `generations` generations. Each generation has max(1, previous / 2)
/// crosses between two distinct members of the previous generation (a
/// single-member generation selfs), and each cross yields
/// `offspring_per_cross` children. Ids are 1..Z in file order.
Pedigree generate_pedigree(int founders, int generations,
                           int offspring_per_cross, std::uint64_t seed);

}  // namespace eqd
