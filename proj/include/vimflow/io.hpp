#pragma once

#include <string>

#include "vimflow/verify.hpp"
#include "vimflow/vim.hpp"

namespace vimflow {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  int line = 0;
  ConfigError(const std::string& what, int line_no)
      : std::runtime_error("config line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

struct SliceSelector {
  std::optional<std::size_t> i1, i2, i3, it;
};

// CSV with header x1,x2,x3,t,value at 17 significant digits, rows in grid
// traversal order; fixed axes pinned by the selector.
void write_field_csv(const ScalarField& f, const std::string& path,
                     const SliceSelector& sel = {});

// Reads a full-field CSV (no slicing) back onto the given grid.
ScalarField read_field_csv(const std::string& path, const GridSpec& g);

// Newline-delimited records, one object per iteration, then a summary line.
void write_report(const ConvergenceReport& rep, const std::string& path);

struct ReportLine {
  std::size_t n = 0;
  double d_u = 0.0, d_w = 0.0, d_p = 0.0;
  std::optional<double> gamma;
};

std::vector<ReportLine> read_report(const std::string& path);

struct RunManifest {
  std::string config_hash;
  GridSpec grid;
  std::string command;
  std::string status;
  double final_d_u = 0.0, final_d_w = 0.0, final_d_p = 0.0;
  std::size_t iterations = 0;
};

void write_manifest(const RunManifest& m, const std::string& path);

// FNV-1a over the canonicalized (byte-for-byte) config text.
std::string config_hash(std::string_view text);

struct RunConfig {
  ProblemSpec prob;
  IterationConfig iter;
  std::optional<ManufacturedCase> mms;
  std::string raw_text;
};

// Strict INI-style config: sections [grid] [params] [forcing] [boundary]
// [initial] [iteration] [case]; unknown or duplicate keys are errors.
RunConfig read_config(const std::string& path);
RunConfig read_config_text(const std::string& text);

}  // namespace vimflow
