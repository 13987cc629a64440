#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace xplat {

struct RecordKey {
  std::uint32_t platform = 1;
  std::uint32_t part = 0;
  std::uint32_t config = 0;
  std::uint32_t unitary_index = 0;
  std::string cut_input;  // one '0'/'1' per prepared cut of the part

  auto operator<=>(const RecordKey&) const = default;
};

/// Outcome table of one circuit execution. Index = output-wire bits followed
/// by measured-cut bits, most significant first. shots == 0 marks an exact
/// table whose counts are probabilities.
struct OutcomeTable {
  int bits = 0;
  std::vector<double> counts;
  std::uint64_t shots = 0;

  bool exact() const { return shots == 0; }
  double frequency(std::size_t i) const { return exact() ? counts[i] : counts[i] / static_cast<double>(shots); }
  std::vector<double> frequencies() const;
  bool operator==(const OutcomeTable&) const = default;
};

OutcomeTable make_exact_table(int bits, std::vector<double> probs);
OutcomeTable make_count_table(int bits, const std::vector<std::uint64_t>& counts);

/// Shot records of one platform.
class RecordSet {
 public:
  RecordSet() = default;
  explicit RecordSet(std::uint32_t platform) : platform_(platform) {}

  std::uint32_t platform() const { return platform_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Inserting an existing key with an identical table is a no-op; a
  /// conflicting table throws.
  void insert(RecordKey key, OutcomeTable table);
  const OutcomeTable* find(std::uint32_t part, std::uint32_t config, std::uint32_t unitary,
                           const std::string& cut_input) const;
  const OutcomeTable& at(std::uint32_t part, std::uint32_t config, std::uint32_t unitary,
                         const std::string& cut_input) const;

  const std::map<RecordKey, OutcomeTable>& records() const { return records_; }

  /// Rows "platform,part,config,unitary_index,cut_input,outcome,count"; zero rows omitted.
  void write_csv(std::ostream& out, bool header = true) const;
  /// Reads rows for every platform in the stream; result keyed by platform.
  static std::map<std::uint32_t, RecordSet> read_csv(std::istream& in);

 private:
  std::uint32_t platform_ = 1;
  std::map<RecordKey, OutcomeTable> records_;
};

}  // namespace xplat
