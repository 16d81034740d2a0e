#include "melab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace melab {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("malformed document: invalid JSON");
  return doc;
}

void reject_unknown_keys(const json& doc, std::initializer_list<const char*> allowed) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ParseError("unknown key \"" + it.key() + "\"");
  }
}

void require_keys(const json& doc, std::initializer_list<const char*> keys) {
  for (const char* k : keys)
    if (!doc.contains(k)) throw ParseError(std::string("missing key \"") + k + "\"");
}

long checked_long(const json& v, const char* what) {
  if (!v.is_number_integer())
    throw ParseError(std::string(what) + " must be an integer");
  return v.get<long>();
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<int> parse_word_key(const std::string& key) {
  std::istringstream is(key);
  std::vector<int> w;
  int v;
  while (is >> v) w.push_back(v);
  if (w.empty()) throw ParseError("empty word key \"" + key + "\"");
  return w;
}

std::string word_key(std::span<const int> w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ' ';
    os << w[i];
  }
  return os.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ShiftSpec parse_shift_spec(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("spec document must be an object");
  require_keys(doc, {"type"});
  const std::string type = doc.at("type").is_string()
                               ? doc.at("type").get<std::string>()
                               : throw ParseError("type must be a string");
  if (type == "finite") {
    reject_unknown_keys(doc, {"type", "vertices", "edges"});
    require_keys(doc, {"vertices", "edges"});
    const long n = checked_long(doc.at("vertices"), "vertices");
    if (n <= 0) throw ParseError("vertices must be positive");
    if (!doc.at("edges").is_array()) throw ParseError("edges must be an array");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw ParseError("each edge must be a pair [i,j]");
      edges.emplace_back(static_cast<int>(checked_long(e[0], "edge endpoint")),
                         static_cast<int>(checked_long(e[1], "edge endpoint")));
    }
    return ShiftSpec::finite_graph(static_cast<int>(n), edges);
  }
  if (type == "truncated") {
    reject_unknown_keys(doc, {"type", "rule", "cutoff"});
    require_keys(doc, {"rule", "cutoff"});
    const std::string rule = doc.at("rule").get<std::string>();
    const long cutoff = checked_long(doc.at("cutoff"), "cutoff");
    if (cutoff < 0) throw ParseError("cutoff must be nonnegative");
    if (rule == "full") return ShiftSpec::full_shift_rule(static_cast<int>(cutoff));
    throw ParseError("unknown truncated rule \"" + rule + "\" (known: full)");
  }
  if (type == "loops") {
    reject_unknown_keys(doc, {"type", "counts", "rule", "cutoff"});
    if (doc.contains("counts")) {
      reject_unknown_keys(doc, {"type", "counts"});
      if (!doc.at("counts").is_array()) throw ParseError("counts must be an array");
      std::vector<std::uint64_t> counts;
      for (const auto& c : doc.at("counts")) {
        const long v = checked_long(c, "loop count");
        if (v < 0) throw ParseError("negative loop count");
        counts.push_back(static_cast<std::uint64_t>(v));
      }
      return ShiftSpec::loop_counts(std::move(counts));
    }
    require_keys(doc, {"rule", "cutoff"});
    const std::string rule = doc.at("rule").get<std::string>();
    const long cutoff = checked_long(doc.at("cutoff"), "cutoff");
    if (cutoff < 1) throw ParseError("cutoff must be positive");
    if (rule == "ones")
      return ShiftSpec::loop_counts(
          std::vector<std::uint64_t>(static_cast<std::size_t>(cutoff), 1));
    throw ParseError("unknown loops rule \"" + rule + "\" (known: ones)");
  }
  throw ParseError("unknown spec type \"" + type + "\"");
}

ShiftSpec load_shift_spec(const std::filesystem::path& file) {
  return parse_shift_spec(read_file(file));
}

std::string serialize_shift_spec(const ShiftSpec& spec) {
  json doc;
  switch (spec.kind()) {
    case SpecKind::finite_graph: {
      doc["type"] = "finite";
      const TruncationPtr t = spec.full_truncation();
      doc["vertices"] = t->size();
      json edges = json::array();
      for (int i = 0; i < t->size(); ++i)
        for (int j : t->neighbors(i)) edges.push_back({i, j});
      doc["edges"] = std::move(edges);
      break;
    }
    case SpecKind::truncated_countable:
      doc["type"] = "truncated";
      doc["rule"] = spec.rule_name();
      doc["cutoff"] = spec.cutoff();
      break;
    case SpecKind::loop_counts:
      doc["type"] = "loops";
      doc["counts"] = spec.counts();
      break;
  }
  return doc.dump();
}

MarkovMeasure parse_measure(const std::string& text, TruncationPtr ambient) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("measure document must be an object");
  require_keys(doc, {"type", "support"});
  const std::string type = doc.at("type").get<std::string>();
  if (!doc.at("support").is_array()) throw ParseError("support must be an array");
  std::vector<int> support;
  for (const auto& v : doc.at("support"))
    support.push_back(static_cast<int>(checked_long(v, "support vertex")));
  auto parse_vector = [&](const json& arr) {
    std::vector<double> out;
    for (const auto& v : arr) {
      if (!v.is_number()) throw ParseError("vector entries must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  };
  if (type == "markov") {
    reject_unknown_keys(doc, {"type", "support", "P", "p"});
    require_keys(doc, {"P"});
    const auto& rows = doc.at("P");
    const int m = static_cast<int>(support.size());
    if (!rows.is_array() || static_cast<int>(rows.size()) != m)
      throw ParseError("P must have one row per support vertex");
    Eigen::MatrixXd P(m, m);
    for (int i = 0; i < m; ++i) {
      const auto row = parse_vector(rows[static_cast<std::size_t>(i)]);
      if (static_cast<int>(row.size()) != m) throw ParseError("P row size mismatch");
      for (int j = 0; j < m; ++j) P(i, j) = row[static_cast<std::size_t>(j)];
    }
    std::optional<Eigen::VectorXd> p;
    if (doc.contains("p")) {
      const auto vec = parse_vector(doc.at("p"));
      if (static_cast<int>(vec.size()) != m) throw ParseError("p size mismatch");
      p = Eigen::Map<const Eigen::VectorXd>(vec.data(), m);
    }
    return MarkovMeasure::markov(std::move(ambient), std::move(support), std::move(P), p);
  }
  if (type == "bernoulli") {
    reject_unknown_keys(doc, {"type", "support", "p"});
    require_keys(doc, {"p"});
    return MarkovMeasure::bernoulli(std::move(ambient), std::move(support),
                                    parse_vector(doc.at("p")));
  }
  if (type == "dirac") {
    reject_unknown_keys(doc, {"type", "support"});
    return MarkovMeasure::dirac_periodic(std::move(ambient), std::move(support));
  }
  throw ParseError("unknown measure type \"" + type + "\"");
}

std::string serialize_measure(const MarkovMeasure& mu) {
  json doc;
  doc["type"] = to_string(mu.kind());
  doc["support"] = mu.support();
  switch (mu.kind()) {
    case MeasureKind::markov: {
      json rows = json::array();
      const auto& P = mu.transition_matrix();
      for (int i = 0; i < mu.support_size(); ++i) {
        json row = json::array();
        for (int j = 0; j < mu.support_size(); ++j) row.push_back(P(i, j));
        rows.push_back(std::move(row));
      }
      doc["P"] = std::move(rows);
      json p = json::array();
      for (int i = 0; i < mu.support_size(); ++i) p.push_back(mu.stationary(i));
      doc["p"] = std::move(p);
      break;
    }
    case MeasureKind::bernoulli:
      doc["p"] = mu.weights();
      break;
    case MeasureKind::dirac_periodic:
      break;  // the sorted support is the orbit up to rotation
  }
  return doc.dump();
}

RoofFunction parse_roof(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("roof document must be an object");
  require_keys(doc, {"depth"});
  reject_unknown_keys(doc, {"depth", "values", "constant"});
  const int depth = static_cast<int>(checked_long(doc.at("depth"), "depth"));
  if (doc.contains("constant")) {
    if (!doc.at("constant").is_number()) throw ParseError("constant must be a number");
    return RoofFunction::constant(doc.at("constant").get<double>(), depth);
  }
  require_keys(doc, {"values"});
  if (!doc.at("values").is_object()) throw ParseError("values must be an object");
  std::map<std::vector<int>, double> table;
  for (auto it = doc.at("values").begin(); it != doc.at("values").end(); ++it) {
    if (!it.value().is_number()) throw ParseError("roof values must be numbers");
    table[parse_word_key(it.key())] = it.value().get<double>();
  }
  return RoofFunction::from_table(depth, std::move(table));
}

RoofFunction load_roof(const std::filesystem::path& file) {
  return parse_roof(read_file(file));
}

std::string serialize_roof(const RoofFunction& roof) {
  json doc;
  doc["depth"] = roof.depth();
  if (roof.fn().is_constant()) {
    const std::vector<int> probe(static_cast<std::size_t>(roof.depth()), 0);
    doc["constant"] = roof(std::span<const int>(probe));
  } else {
    json values;
    for (const auto& [w, v] : roof.fn().table()) values[word_key(w)] = v;
    doc["values"] = std::move(values);
  }
  return doc.dump();
}

std::string serialize_loop_system(const LoopSystem& ls) {
  json doc;
  doc["spec"] = json::parse(serialize_shift_spec(ls.loop_spec()));
  doc["source_vertex"] = ls.source_vertex;
  doc["horizon"] = ls.horizon;
  doc["labeled_horizon"] = ls.labeled_horizon;
  json counts = json::array();
  for (const auto& c : ls.counts) counts.push_back(c.str());
  doc["counts"] = std::move(counts);
  json table = json::array();
  for (int n = 0; n < static_cast<int>(ls.labels.size()); ++n) {
    for (int i = 0; i < static_cast<int>(ls.labels[static_cast<std::size_t>(n)].size()); ++i) {
      json entry;
      entry["level"] = n;
      entry["index"] = i;
      entry["word"] = ls.labels[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)].symbols;
      table.push_back(std::move(entry));
    }
  }
  doc["labels"] = std::move(table);
  return doc.dump();
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw PreconditionError("CSV row width mismatch");
  rows_.push_back(cells);
}

std::string CsvWriter::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

void CsvWriter::write(const std::filesystem::path& file) const {
  write_text_atomic(file, str());
}

void write_text_atomic(const std::filesystem::path& file, const std::string& content) {
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, file);
}

std::string entropy_diagnostics_csv(const EntropyEstimate& e) {
  CsvWriter csv({"index", "partial", "delta"});
  for (std::size_t i = 0; i < e.diagnostics.size(); ++i) {
    const double delta =
        i == 0 ? 0.0 : e.diagnostics[i].second - e.diagnostics[i - 1].second;
    csv.add_row({std::to_string(e.diagnostics[i].first),
                 format_double(e.diagnostics[i].second), format_double(delta)});
  }
  return csv.str();
}

std::string partition_table_csv(const PartitionEntropyTable& t) {
  CsvWriter csv({"n", "H_n", "H_n_over_n", "increment"});
  for (std::size_t i = 0; i < t.H.size(); ++i) {
    const double inc = i == 0 ? t.H[0] : t.H[i] - t.H[i - 1];
    csv.add_row({std::to_string(i + 1), format_double(t.H[i]),
                 format_double(t.ratio[i]), format_double(inc)});
  }
  return csv.str();
}

std::string convergence_report_csv(const ConvergenceReport& rep,
                                   const std::vector<double>& entropies) {
  CsvWriter csv(entropies.empty()
                    ? std::vector<std::string>{"index", "deviation", "metric"}
                    : std::vector<std::string>{"index", "deviation", "metric", "entropy"});
  for (std::size_t i = 0; i < rep.sup_dev.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), format_double(rep.sup_dev[i]),
                                 format_double(rep.metric[i])};
    if (!entropies.empty()) row.push_back(format_double(entropies[i]));
    csv.add_row(row);
  }
  return csv.str();
}

std::string usc_report_json(const UscReport& rep) {
  json doc;
  doc["verdict"] = to_string(rep.verdict);
  doc["witness"] = rep.witness;
  doc["tol"] = rep.tol;
  doc["tail_max_entropy"] = rep.tail_max_entropy;
  doc["limit_entropy"] = rep.limit_entropy;
  doc["convergence"] = to_string(rep.convergence.verdict);
  return doc.dump();
}

}  // namespace melab
