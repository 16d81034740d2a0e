#ifndef MELAB_IO_HPP
#define MELAB_IO_HPP

#include <filesystem>
#include <string>

#include "melab/entropy.hpp"
#include "melab/measure.hpp"
#include "melab/recoding.hpp"
#include "melab/suspension.hpp"
#include "melab/weakstar.hpp"

namespace melab {

// Shift spec documents:
//   {"type":"finite","vertices":N,"edges":[[i,j],...]}
//   {"type":"truncated","rule":"full","cutoff":K}
//   {"type":"loops","counts":[c1,...]} | {"type":"loops","rule":"ones","cutoff":K}
// Unknown keys are rejected.
ShiftSpec parse_shift_spec(const std::string& text);
ShiftSpec load_shift_spec(const std::filesystem::path& file);
std::string serialize_shift_spec(const ShiftSpec& spec);

// Measure documents over a given ambient truncation:
//   {"type":"markov","support":[...],"P":[[...]],"p":[...](optional)}
//   {"type":"bernoulli","support":[...],"p":[...]}
//   {"type":"dirac","support":[orbit in order]}
MarkovMeasure parse_measure(const std::string& text, TruncationPtr ambient);
std::string serialize_measure(const MarkovMeasure& mu);

// Roof documents: {"depth":d,"values":{"i j ...":tau,...}} or
// {"depth":d,"constant":c}.
RoofFunction parse_roof(const std::string& text);
RoofFunction load_roof(const std::filesystem::path& file);
std::string serialize_roof(const RoofFunction& roof);

// Loop-system document: the loop spec plus the labeling table.
std::string serialize_loop_system(const LoopSystem& ls);

// CSV with 17-significant-digit floats, written atomically (temp + rename).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  void write(const std::filesystem::path& file) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// %.17g rendering used everywhere a float reaches an artifact.
std::string format_double(double v);

std::string entropy_diagnostics_csv(const EntropyEstimate& e);
std::string partition_table_csv(const PartitionEntropyTable& t);
std::string convergence_report_csv(const ConvergenceReport& rep,
                                   const std::vector<double>& entropies = {});
std::string usc_report_json(const UscReport& rep);

void write_text_atomic(const std::filesystem::path& file, const std::string& content);

}  // namespace melab

#endif  // MELAB_IO_HPP
