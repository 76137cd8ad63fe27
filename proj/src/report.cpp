#include "regdist/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace regdist {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::ambiguous: return "ambiguous";
    case Outcome::info: return "info";
  }
  return "?";
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double severity(const CheckEntry& e) {
  if (e.claimed > 0.0) return e.observed / e.claimed;
  return e.observed - e.claimed;
}

}  // namespace

Outcome CertificateReport::record(const std::string& stage, const std::string& check, const std::string& location,
                                  double claimed, double observed, double margin) {
  CheckEntry e{stage, check, location, claimed, observed, margin, Outcome::pass};
  if (std::isnan(observed) || std::isnan(claimed)) {
    e.outcome = Outcome::fail;
  } else if (observed <= claimed) {
    e.outcome = Outcome::pass;
  } else if (observed <= claimed + margin) {
    e.outcome = Outcome::ambiguous;
  } else {
    e.outcome = Outcome::fail;
  }
  ++checks_;
  if (claimed > 0.0 && std::isfinite(observed)) worst_ratio_ = std::max(worst_ratio_, observed / claimed);
  else if (e.outcome == Outcome::fail) worst_ratio_ = std::numeric_limits<double>::infinity();
  if (e.outcome == Outcome::fail) ++failures_;
  if (e.outcome == Outcome::ambiguous) ++ambiguous_;
  if (e.outcome != Outcome::pass && violations_.size() < kViolationCap) violations_.push_back(e);

  auto key = std::make_pair(stage, check);
  auto it = worst_.find(key);
  if (it == worst_.end() || severity(e) > severity(it->second)) worst_[key] = e;
  return e.outcome;
}

void CertificateReport::require(const std::string& stage, const std::string& check, const std::string& location, bool ok) {
  record(stage, check, location, 0.0, ok ? 0.0 : 1.0, 0.0);
}

void CertificateReport::note(const std::string& stage, const std::string& name, double value, const std::string& location) {
  notes_[stage + "/" + name] = value;
  info_.push_back({stage, name, location, std::numeric_limits<double>::quiet_NaN(), value, 0.0, Outcome::info});
}

void CertificateReport::merge(const CertificateReport& o) {
  for (const auto& [k, e] : o.worst_) {
    auto it = worst_.find(k);
    if (it == worst_.end() || severity(e) > severity(it->second)) worst_[k] = e;
  }
  for (const auto& e : o.violations_)
    if (violations_.size() < kViolationCap) violations_.push_back(e);
  info_.insert(info_.end(), o.info_.begin(), o.info_.end());
  for (const auto& [k, v] : o.notes_) notes_[k] = v;
  checks_ += o.checks_;
  failures_ += o.failures_;
  ambiguous_ += o.ambiguous_;
  worst_ratio_ = std::max(worst_ratio_, o.worst_ratio_);
}

Outcome CertificateReport::verdict() const {
  if (failures_ > 0) return Outcome::fail;
  if (ambiguous_ > 0) return Outcome::ambiguous;
  return Outcome::pass;
}

double CertificateReport::fitted(const std::string& name) const {
  auto it = notes_.find(name);
  return it == notes_.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

std::vector<CheckEntry> CertificateReport::rows() const {
  std::vector<CheckEntry> out = info_;
  for (const auto& [k, e] : worst_) out.push_back(e);
  for (const auto& e : violations_) out.push_back(e);
  return out;
}

void CertificateReport::write_csv(std::ostream& os, bool header) const {
  if (header) os << "stage,check,location,claimed,observed,margin,verdict\n";
  for (const auto& e : rows()) {
    os << e.stage << ',' << e.check << ',' << e.location << ',' << fmt17(e.claimed) << ',' << fmt17(e.observed) << ','
       << fmt17(e.margin) << ',' << outcome_name(e.outcome) << '\n';
  }
}

std::string point_label(std::span<const double> x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ";" : "") + fmt17(x[i]);
  return s;
}

}  // namespace regdist
