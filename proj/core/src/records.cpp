#include "xplat/records.hpp"

#include <cmath>
#include <sstream>

#include "xplat/qsim.hpp"
#include "xplat/types.hpp"

namespace xplat {

std::vector<double> OutcomeTable::frequencies() const {
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = frequency(i);
  return out;
}

OutcomeTable make_exact_table(int bits, std::vector<double> probs) {
  if (probs.size() != (std::size_t{1} << bits)) throw DimensionError("outcome table size mismatch");
  return OutcomeTable{bits, std::move(probs), 0};
}

OutcomeTable make_count_table(int bits, const std::vector<std::uint64_t>& counts) {
  if (counts.size() != (std::size_t{1} << bits)) throw DimensionError("outcome table size mismatch");
  OutcomeTable t{bits, std::vector<double>(counts.size()), 0};
  for (std::size_t i = 0; i < counts.size(); ++i) {
    t.counts[i] = static_cast<double>(counts[i]);
    t.shots += counts[i];
  }
  if (t.shots == 0) throw InvalidArgument("count table has no shots");
  return t;
}

void RecordSet::insert(RecordKey key, OutcomeTable table) {
  if (key.platform != platform_) throw InvalidArgument("record platform does not match record set");
  auto it = records_.find(key);
  if (it != records_.end()) {
    if (!(it->second == table)) throw ProtocolError("conflicting records for the same key");
    return;
  }
  records_.emplace(std::move(key), std::move(table));
}

const OutcomeTable* RecordSet::find(std::uint32_t part, std::uint32_t config, std::uint32_t unitary,
                                    const std::string& cut_input) const {
  auto it = records_.find(RecordKey{platform_, part, config, unitary, cut_input});
  return it == records_.end() ? nullptr : &it->second;
}

const OutcomeTable& RecordSet::at(std::uint32_t part, std::uint32_t config, std::uint32_t unitary,
                                  const std::string& cut_input) const {
  const OutcomeTable* t = find(part, config, unitary, cut_input);
  if (!t)
    throw EstimationError("missing record: platform " + std::to_string(platform_) + " part " + std::to_string(part) +
                          " config " + std::to_string(config) + " unitary " + std::to_string(unitary) +
                          " input '" + cut_input + "'");
  return *t;
}

void RecordSet::write_csv(std::ostream& out, bool header) const {
  if (header) out << "platform,part,config,unitary_index,cut_input,outcome,count\n";
  out.precision(17);
  for (const auto& [key, table] : records_) {
    for (std::size_t i = 0; i < table.counts.size(); ++i) {
      if (table.counts[i] == 0.0) continue;
      out << key.platform << ',' << key.part << ',' << key.config << ',' << key.unitary_index << ','
          << key.cut_input << ',' << bitstring(i, table.bits) << ',';
      if (table.exact())
        out << table.counts[i];
      else
        out << static_cast<std::uint64_t>(table.counts[i]);
      out << '\n';
    }
  }
}

std::map<std::uint32_t, RecordSet> RecordSet::read_csv(std::istream& in) {
  std::map<std::uint32_t, std::map<RecordKey, OutcomeTable>> tables;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("platform,", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 7) throw InvalidArgument("record row " + std::to_string(line_no) + " needs 7 fields");
    try {
      RecordKey key{static_cast<std::uint32_t>(std::stoul(fields[0])), static_cast<std::uint32_t>(std::stoul(fields[1])),
                    static_cast<std::uint32_t>(std::stoul(fields[2])), static_cast<std::uint32_t>(std::stoul(fields[3])),
                    fields[4]};
      const std::string& outcome = fields[5];
      const int bits = static_cast<int>(outcome.size());
      std::uint64_t index = 0;
      for (char c : outcome) {
        if (c != '0' && c != '1') throw InvalidArgument("outcome must be a bitstring");
        index = (index << 1) | static_cast<std::uint64_t>(c - '0');
      }
      const double count = std::stod(fields[6]);
      auto& table = tables[key.platform][key];
      if (table.counts.empty()) {
        table.bits = bits;
        table.counts.assign(std::size_t{1} << bits, 0.0);
      } else if (table.bits != bits) {
        throw InvalidArgument("inconsistent outcome width");
      }
      table.counts[index] += count;
    } catch (const std::logic_error&) {
      throw InvalidArgument("malformed record row " + std::to_string(line_no));
    }
  }
  std::map<std::uint32_t, RecordSet> out;
  for (auto& [platform, entries] : tables) {
    RecordSet set(platform);
    for (auto& [key, table] : entries) {
      bool integral = true;
      double total = 0.0;
      for (double c : table.counts) {
        integral = integral && std::floor(c) == c;
        total += c;
      }
      table.shots = integral ? static_cast<std::uint64_t>(total) : 0;
      set.insert(key, std::move(table));
    }
    out.emplace(platform, std::move(set));
  }
  return out;
}

}  // namespace xplat
