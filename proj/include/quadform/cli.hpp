#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quadform/ratio.hpp"
#include "quadform/types.hpp"

namespace quadform::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitNotApplicable = 4;

enum class DocKind { raw, raw_complex, reduced, ratio };

struct Document {
  DocKind kind = DocKind::reduced;
  RawForm raw;
  RawComplexForm complex;
  ReducedForm reduced;
  RatioSpec ratio;
  std::optional<std::string> method;
  std::optional<double> tol;
};

// Throws InvalidInput naming the offending field.
Document parse_document(const std::string& text);

// Reduction of a raw, raw_complex or reduced document (InvalidInput for ratio).
ReducedForm reduced_form(const Document& doc);

// args excludes the program name. Writes the result document (or an error
// document) to out and diagnostics to err; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quadform::cli
