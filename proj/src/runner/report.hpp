#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "runner/experiment.hpp"

namespace mlfw::runner {

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

struct ClassRow {
  std::string arch;
  int n_strings = 0;
  SourceClass source_class = SourceClass::Unmetatrained;
  std::size_t rows = 0;
  double mean_f1 = 0.0, sd_f1 = 0.0;
};

struct ArchRow {
  std::string meta_source;
  int n_strings = 0;
  std::string arch;
  std::size_t rows = 0;
  double mean_f1 = 0.0;
  std::optional<double> baseline_f1;  // unmetatrained mean for the same arch and n
  std::optional<double> improvement;
};

struct LengthRow {
  std::string meta_source, arch, target;
  int n_strings = 0;
  int length = 0;
  std::size_t seeds = 0;
  double mean_f1 = 0.0, sd_f1 = 0.0;
};

// Only ok rows of the le<max_length> bucket enter the class and arch tables;
// self-transfer rows are excluded there. Empty classes are omitted with a
// warning.
std::vector<ClassRow> class_table(const std::vector<ResultRow>& rows, std::vector<std::string>* warnings = nullptr);
std::vector<ArchRow> arch_table(const std::vector<ResultRow>& rows);
std::vector<LengthRow> length_table(const std::vector<ResultRow>& rows);

void write_class_csv(std::ostream& out, const std::vector<ClassRow>& rows);
void write_arch_csv(std::ostream& out, const std::vector<ArchRow>& rows);
void write_length_csv(std::ostream& out, const std::vector<LengthRow>& rows);
// gnuplot data: whitespace columns, one indexable block per group.
void write_class_dat(std::ostream& out, const std::vector<ClassRow>& rows);
void write_arch_dat(std::ostream& out, const std::vector<ArchRow>& rows);
void write_length_dat(std::ostream& out, const std::vector<LengthRow>& rows);

// Emits the three tables (csv + dat) into out_dir; returns warnings.
std::vector<std::string> write_reports(const std::vector<ResultRow>& rows, const std::string& out_dir);

}  // namespace mlfw::runner
