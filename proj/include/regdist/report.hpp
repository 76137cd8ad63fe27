#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace regdist {

enum class Outcome { pass, fail, ambiguous, info };
const char* outcome_name(Outcome o);

/// One checked inequality observed ≤ claimed, with a tolerance band.
struct CheckEntry {
  std::string stage;
  std::string check;
  std::string location;
  double claimed = 0.0;
  double observed = 0.0;
  double margin = 0.0;
  Outcome outcome = Outcome::pass;
};

/// Aggregates checked inequalities. Keeps the worst entry of every
/// (stage, check) pair plus every failing or ambiguous entry up to a cap.
class CertificateReport {
 public:
  /// observed ≤ claimed passes, observed ≤ claimed + margin is ambiguous,
  /// anything larger fails.
  Outcome record(const std::string& stage, const std::string& check, const std::string& location, double claimed,
                 double observed, double margin = 0.0);
  /// Records a pass/fail condition that has no numeric bound.
  void require(const std::string& stage, const std::string& check, const std::string& location, bool ok);
  /// Informational value, e.g. a fitted constant.
  void note(const std::string& stage, const std::string& name, double value, const std::string& location = "");
  void merge(const CertificateReport& other);

  Outcome verdict() const;
  bool passed() const { return verdict() == Outcome::pass; }
  double worst_ratio() const { return worst_ratio_; }
  std::size_t checks() const { return checks_; }
  std::size_t failures() const { return failures_; }
  std::size_t ambiguous() const { return ambiguous_; }
  /// Value of a note, or NaN when absent.
  double fitted(const std::string& name) const;
  const std::map<std::string, double>& notes() const { return notes_; }

  std::vector<CheckEntry> rows() const;
  void write_csv(std::ostream& os, bool header = true) const;

  static constexpr std::size_t kViolationCap = 2000;

 private:
  std::map<std::pair<std::string, std::string>, CheckEntry> worst_;
  std::vector<CheckEntry> violations_;
  std::vector<CheckEntry> info_;
  std::map<std::string, double> notes_;
  std::size_t checks_ = 0, failures_ = 0, ambiguous_ = 0;
  double worst_ratio_ = 0.0;
};

/// "%.17g" formatting used by every CSV writer.
std::string fmt17(double v);
/// Coordinates joined by ';', the location field of report rows.
std::string point_label(std::span<const double> x);

}  // namespace regdist
