#include "runner/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "common/error.hpp"

namespace mlfw::runner {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::string num(std::optional<double> v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string num(double v) { return num(std::optional<double>(v)); }

SourceClass parse_class(const std::string& s) {
  for (auto c : {SourceClass::Unmetatrained, SourceClass::Regular, SourceClass::ContextFree,
                 SourceClass::ContextSensitive, SourceClass::ZooSimple, SourceClass::ZooComplex})
    if (s == to_string(c)) return c;
  fail(ErrorCode::Format, "unknown source class '" + s + "'");
}

bool within_bucket(const ResultRow& r) { return r.length_bucket.rfind("le", 0) == 0; }

struct Moments {
  std::size_t n = 0;
  double sum = 0.0, sum_sq = 0.0;
  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  // Sample standard deviation; 0 for fewer than two values.
  double sd() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)));
  }
};

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "meta_source,source_class,arch,target,n_strings,seed,self_transfer,status,length_bucket,records,"
         "mean_f1,mean_p_val,mean_bt\n";
  for (const auto& r : rows) {
    out << quote(r.meta_source) << ',' << to_string(r.source_class) << ',' << quote(r.arch) << ',' << r.target
        << ',' << r.n_strings << ',' << r.seed << ',' << (r.self_transfer ? 1 : 0) << ',' << quote(r.status) << ','
        << r.length_bucket << ',' << r.records << ',' << num(r.mean_f1) << ',' << num(r.mean_p_val) << ','
        << num(r.mean_bt) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  std::size_t line_no = 1;
  auto opt = [](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 13) fail(ErrorCode::Format, "results line " + std::to_string(line_no) + ": expected 13 fields");
    try {
      ResultRow r;
      r.meta_source = f[0];
      r.source_class = parse_class(f[1]);
      r.arch = f[2];
      r.target = f[3];
      r.n_strings = std::stoi(f[4]);
      r.seed = std::stoull(f[5]);
      r.self_transfer = f[6] == "1";
      r.status = f[7];
      r.length_bucket = f[8];
      r.records = std::stoull(f[9]);
      r.mean_f1 = opt(f[10]);
      r.mean_p_val = opt(f[11]);
      r.mean_bt = opt(f[12]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      fail(ErrorCode::Format, "results line " + std::to_string(line_no) + ": bad number");
    }
  }
  return rows;
}

std::vector<ClassRow> class_table(const std::vector<ResultRow>& rows, std::vector<std::string>* warnings) {
  std::map<std::tuple<std::string, int, SourceClass>, Moments> acc;
  std::map<std::pair<std::string, int>, bool> groups;
  for (const auto& r : rows) {
    if (!within_bucket(r)) continue;
    groups[{r.arch, r.n_strings}] = true;
    if (r.status != "ok" || r.self_transfer || !r.mean_f1) continue;
    acc[{r.arch, r.n_strings, r.source_class}].add(*r.mean_f1);
  }
  std::vector<ClassRow> out;
  for (const auto& [g, _] : groups) {
    for (auto c : {SourceClass::Unmetatrained, SourceClass::Regular, SourceClass::ContextFree,
                   SourceClass::ContextSensitive, SourceClass::ZooSimple, SourceClass::ZooComplex}) {
      auto it = acc.find({g.first, g.second, c});
      if (it == acc.end()) {
        if (warnings)
          warnings->push_back("class " + std::string(to_string(c)) + " has no rows for " + g.first +
                              " n=" + std::to_string(g.second) + "; omitted");
        continue;
      }
      out.push_back({g.first, g.second, c, it->second.n, it->second.mean(), it->second.sd()});
    }
  }
  return out;
}

std::vector<ArchRow> arch_table(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, int, std::string>, Moments> acc;
  std::map<std::pair<std::string, int>, Moments> baseline;
  std::vector<std::string> source_order;
  for (const auto& r : rows) {
    if (!within_bucket(r) || r.status != "ok" || r.self_transfer || !r.mean_f1) continue;
    acc[{r.meta_source, r.n_strings, r.arch}].add(*r.mean_f1);
    if (r.source_class == SourceClass::Unmetatrained) baseline[{r.arch, r.n_strings}].add(*r.mean_f1);
  }
  std::vector<ArchRow> out;
  for (const auto& [k, m] : acc) {
    ArchRow row;
    std::tie(row.meta_source, row.n_strings, row.arch) = k;
    row.rows = m.n;
    row.mean_f1 = m.mean();
    auto b = baseline.find({row.arch, row.n_strings});
    if (b != baseline.end()) {
      row.baseline_f1 = b->second.mean();
      row.improvement = row.mean_f1 - *row.baseline_f1;
    }
    out.push_back(row);
  }
  return out;
}

std::vector<LengthRow> length_table(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, std::string, std::string, int, int>, Moments> acc;
  for (const auto& r : rows) {
    if (within_bucket(r) || r.status != "ok" || !r.mean_f1) continue;
    acc[{r.meta_source, r.arch, r.target, r.n_strings, std::stoi(r.length_bucket)}].add(*r.mean_f1);
  }
  std::vector<LengthRow> out;
  for (const auto& [k, m] : acc) {
    LengthRow row;
    std::tie(row.meta_source, row.arch, row.target, row.n_strings, row.length) = k;
    row.seeds = m.n;
    row.mean_f1 = m.mean();
    row.sd_f1 = m.sd();
    out.push_back(row);
  }
  return out;
}

void write_class_csv(std::ostream& out, const std::vector<ClassRow>& rows) {
  out << "arch,n_strings,source_class,rows,mean_f1,sd_f1\n";
  for (const auto& r : rows)
    out << r.arch << ',' << r.n_strings << ',' << to_string(r.source_class) << ',' << r.rows << ','
        << num(r.mean_f1) << ',' << num(r.sd_f1) << '\n';
}

void write_arch_csv(std::ostream& out, const std::vector<ArchRow>& rows) {
  out << "meta_source,n_strings,arch,rows,mean_f1,baseline_f1,improvement\n";
  for (const auto& r : rows)
    out << quote(r.meta_source) << ',' << r.n_strings << ',' << r.arch << ',' << r.rows << ',' << num(r.mean_f1)
        << ',' << num(r.baseline_f1) << ',' << num(r.improvement) << '\n';
}

void write_length_csv(std::ostream& out, const std::vector<LengthRow>& rows) {
  out << "meta_source,arch,target,n_strings,length,seeds,mean_f1,sd_f1\n";
  for (const auto& r : rows)
    out << quote(r.meta_source) << ',' << r.arch << ',' << r.target << ',' << r.n_strings << ',' << r.length << ','
        << r.seeds << ',' << num(r.mean_f1) << ',' << num(r.sd_f1) << '\n';
}

// Blocks are separated by two blank lines so gnuplot's `index` selects them.
void write_class_dat(std::ostream& out, const std::vector<ClassRow>& rows) {
  std::string group;
  for (const auto& r : rows) {
    const std::string g = r.arch + " n=" + std::to_string(r.n_strings);
    if (g != group) {
      if (!group.empty()) out << "\n\n";
      out << "# " << g << "\n# class_index class mean_f1 sd_f1 rows\n";
      group = g;
    }
    out << static_cast<int>(r.source_class) << ' ' << to_string(r.source_class) << ' ' << num(r.mean_f1) << ' '
        << num(r.sd_f1) << ' ' << r.rows << '\n';
  }
}

void write_arch_dat(std::ostream& out, const std::vector<ArchRow>& rows) {
  std::string group;
  for (const auto& r : rows) {
    const std::string g = r.arch + " n=" + std::to_string(r.n_strings);
    if (g != group) {
      if (!group.empty()) out << "\n\n";
      out << "# " << g << "\n# meta_source mean_f1 baseline_f1 improvement\n";
      group = g;
    }
    out << r.meta_source << ' ' << num(r.mean_f1) << ' ' << (r.baseline_f1 ? num(r.baseline_f1) : "NaN") << ' '
        << (r.improvement ? num(r.improvement) : "NaN") << '\n';
  }
}

void write_length_dat(std::ostream& out, const std::vector<LengthRow>& rows) {
  std::string group;
  for (const auto& r : rows) {
    const std::string g = r.meta_source + " " + r.arch + " " + r.target + " n=" + std::to_string(r.n_strings);
    if (g != group) {
      if (!group.empty()) out << "\n\n";
      out << "# " << g << "\n# length mean_f1 sd_f1 seeds\n";
      group = g;
    }
    out << r.length << ' ' << num(r.mean_f1) << ' ' << num(r.sd_f1) << ' ' << r.seeds << '\n';
  }
}

std::vector<std::string> write_reports(const std::vector<ResultRow>& rows, const std::string& out_dir) {
  std::vector<std::string> warnings;
  if (rows.empty()) fail(ErrorCode::InvalidArgument, "report needs at least one result row");
  const std::filesystem::path root(out_dir);
  std::filesystem::create_directories(root);
  auto emit = [&](const char* name, auto&& fn) {
    std::ofstream out(root / name, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + (root / name).string());
    fn(out);
  };
  const auto classes = class_table(rows, &warnings);
  const auto archs = arch_table(rows);
  const auto lengths = length_table(rows);
  emit("aggregates.csv", [&](std::ostream& o) { write_class_csv(o, classes); });
  emit("aggregates.dat", [&](std::ostream& o) { write_class_dat(o, classes); });
  emit("arch.csv", [&](std::ostream& o) { write_arch_csv(o, archs); });
  emit("arch.dat", [&](std::ostream& o) { write_arch_dat(o, archs); });
  emit("lengths.csv", [&](std::ostream& o) { write_length_csv(o, lengths); });
  emit("lengths.dat", [&](std::ostream& o) { write_length_dat(o, lengths); });
  return warnings;
}

}  // namespace mlfw::runner
