#include "eqd/pedigree.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "eqd/error.hpp"
#include "eqd/io.hpp"

namespace eqd {

Pedigree::Pedigree(std::vector<PedigreeRecord> records)
    : records_(std::move(records)) {
  const auto n = records_.size();
  sire_pos_.assign(n, kNone);
  dam_pos_.assign(n, kNone);
  index_.reserve(n);

  const auto resolve = [&](IndividualId parent, IndividualId child) -> int {
    if (parent == kUnknownParent) {
      return kNone;
    }
    const auto it = index_.find(parent);
    if (it == index_.end()) {
      throw OrderError("parent " + std::to_string(parent) + " of " +
                       std::to_string(child) + " is not listed before it");
    }
    return static_cast<int>(it->second);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records_[i];
    if (r.id <= 0) {
      throw InputError("ids must be positive, got " + std::to_string(r.id));
    }
    if (r.sire < 0 || r.dam < 0) {
      throw InputError("negative parent id for " + std::to_string(r.id));
    }
    if (index_.contains(r.id)) {
      throw DuplicateIdError("duplicate id " + std::to_string(r.id));
    }
    // Resolve before inserting so an individual cannot be its own parent.
    sire_pos_[i] = resolve(r.sire, r.id);
    dam_pos_[i] = resolve(r.dam, r.id);
    index_.emplace(r.id, i);
  }
}

std::optional<std::size_t> Pedigree::position_of(IndividualId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::size_t Pedigree::founder_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    count += (sire_pos_[i] == kNone && dam_pos_[i] == kNone) ? 1 : 0;
  }
  return count;
}

Pedigree read_pedigree(std::istream& in) {
  CsvReader csv(in);
  constexpr std::array<std::string_view, 3> header{"id", "sire", "dam"};
  csv.expect_header(header);

  std::vector<PedigreeRecord> records;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 3) {
      throw ParseError("expected 3 fields, got " + std::to_string(f.size()),
                       csv.line());
    }
    PedigreeRecord r{parse_int(f[0], csv.line()), parse_int(f[1], csv.line()),
                     parse_int(f[2], csv.line())};
    if (r.id <= 0 || r.sire < 0 || r.dam < 0) {
      throw ParseError("ids must be positive (0 = unknown parent)", csv.line());
    }
    records.push_back(r);
  }
  return Pedigree(std::move(records));
}

Pedigree load_pedigree(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string(), 0);
  }
  return read_pedigree(in);
}

void write_pedigree(std::ostream& out, const Pedigree& pedigree) {
  out << "id,sire,dam\n";
  for (const auto& r : pedigree.records()) {
    out << r.id << ',' << r.sire << ',' << r.dam << '\n';
  }
}

Pedigree generate_pedigree(int founders, int generations,
                           int offspring_per_cross, std::uint64_t seed) {
  if (founders < 2) {
    throw InputError("generate_pedigree needs at least 2 founders");
  }
  if (generations < 0) {
    throw InputError("generations must be non-negative");
  }
  if (generations > 0 && offspring_per_cross < 1) {
    throw InputError("offspring_per_cross must be positive");
  }

  std::mt19937_64 rng(seed);
  std::vector<PedigreeRecord> records;
  IndividualId next_id = 1;

  std::vector<IndividualId> previous;
  for (int f = 0; f < founders; ++f) {
    records.push_back({next_id, kUnknownParent, kUnknownParent});
    previous.push_back(next_id++);
  }

  for (int gen = 0; gen < generations; ++gen) {
    const auto crosses = std::max<std::size_t>(1, previous.size() / 2);
    std::vector<IndividualId> current;
    for (std::size_t c = 0; c < crosses; ++c) {
      IndividualId sire = previous.front();
      IndividualId dam = previous.front();
      if (previous.size() >= 2) {
        std::uniform_int_distribution<std::size_t> pick(0, previous.size() - 1);
        const auto a = pick(rng);
        auto b = pick(rng);
        while (b == a) {
          b = pick(rng);
        }
        sire = previous[a];
        dam = previous[b];
      }
      for (int k = 0; k < offspring_per_cross; ++k) {
        records.push_back({next_id, sire, dam});
        current.push_back(next_id++);
      }
    }
    previous = std::move(current);
  }
  return Pedigree(std::move(records));
}

}  // namespace eqd
