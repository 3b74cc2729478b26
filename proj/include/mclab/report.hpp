#pragma once

// BoundReport: one inequality or identity check, and its tabular (CSV) and
// structured (JSON lines) renderings.

#include "mclab/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mclab {

enum class Verdict { AssertedExact, MeasuredOnly };

inline std::string_view to_string(Verdict v) {
  return v == Verdict::AssertedExact ? "AssertedExact" : "MeasuredOnly";
}

// Either an exact rational or a high-precision real (possibly +-inf).
class Quantity {
 public:
  Quantity() : value_(Rational(0)) {}
  Quantity(Rational q) : value_(std::move(q)) {}  // NOLINT(google-explicit-constructor)
  Quantity(Real r) : value_(std::move(r)) {}      // NOLINT(google-explicit-constructor)
  Quantity(long v) : value_(Rational(v)) {}       // NOLINT(google-explicit-constructor)
  Quantity(int v) : value_(Rational(v)) {}        // NOLINT(google-explicit-constructor)

  static Quantity infinity() { return Quantity(real_infinity()); }

  // Complexity values: a count, or +inf for "not witnessed".
  static Quantity count(const std::optional<std::size_t>& v) {
    return v ? Quantity(Rational(static_cast<long>(*v))) : infinity();
  }

  bool is_rational() const { return std::holds_alternative<Rational>(value_); }
  const Rational& rational() const { return std::get<Rational>(value_); }
  Real real() const { return is_rational() ? to_real(rational()) : std::get<Real>(value_); }
  bool is_infinite() const { return !is_rational() && boost::multiprecision::isinf(std::get<Real>(value_)); }

  // 12 significant digits for reals, exact p/q for rationals.
  std::string render(int real_digits = 12) const {
    if (is_rational()) return rational().str();
    const Real& r = std::get<Real>(value_);
    if (boost::multiprecision::isinf(r)) return r > 0 ? "inf" : "-inf";
    if (boost::multiprecision::isnan(r)) return "nan";
    std::ostringstream os;
    os << std::setprecision(real_digits) << r;
    return os.str();
  }

  std::string render_full() const { return render(std::numeric_limits<Real>::max_digits10); }

  bool operator==(const Quantity& o) const {
    if (is_rational() != o.is_rational()) return false;
    if (is_rational()) return rational() == o.rational();
    const Real& a = std::get<Real>(value_);
    const Real& b = std::get<Real>(o.value_);
    if (boost::multiprecision::isnan(a) || boost::multiprecision::isnan(b))
      return boost::multiprecision::isnan(a) && boost::multiprecision::isnan(b);
    return a == b;
  }

 private:
  std::variant<Rational, Real> value_;
};

// b - a with infinities: inf - inf is reported as 0 (both sides unwitnessed).
inline Quantity difference(const Quantity& b, const Quantity& a) {
  if (a.is_rational() && b.is_rational()) return Quantity(b.rational() - a.rational());
  if (a.is_infinite() && b.is_infinite() && (a.real() > 0) == (b.real() > 0)) return Quantity(Rational(0));
  return Quantity(b.real() - a.real());
}

inline Quantity sum(const std::vector<Quantity>& terms) {
  bool exact = true;
  for (const auto& t : terms) exact = exact && t.is_rational();
  if (exact) {
    Rational s = 0;
    for (const auto& t : terms) s += t.rational();
    return Quantity(s);
  }
  Real s = 0;
  for (const auto& t : terms) s += t.real();
  return Quantity(s);
}

struct BoundReport {
  std::string name;
  Quantity lhs;
  std::vector<std::pair<std::string, Quantity>> rhs_terms;
  Quantity slack;
  Verdict verdict = Verdict::MeasuredOnly;
  double tolerance = 0.0;
  bool passed = true;
  std::vector<std::pair<std::string, long long>> budgets;
  std::string note;

  bool operator==(const BoundReport&) const = default;
};

// Builds a report with slack = sum(rhs) - lhs and, for asserted checks,
// passed = slack >= -tolerance.
inline BoundReport make_report(std::string name, Quantity lhs,
                               std::vector<std::pair<std::string, Quantity>> rhs_terms,
                               Verdict verdict, double tolerance = 0.0,
                               std::vector<std::pair<std::string, long long>> budgets = {},
                               std::string note = {}) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = std::move(lhs);
  r.rhs_terms = std::move(rhs_terms);
  std::vector<Quantity> terms;
  for (const auto& t : r.rhs_terms) terms.push_back(t.second);
  r.slack = difference(sum(terms), r.lhs);
  r.verdict = verdict;
  r.tolerance = tolerance;
  if (verdict == Verdict::AssertedExact) {
    if (r.slack.is_rational()) r.passed = r.slack.rational() >= 0 || (tolerance > 0 && r.slack.real() >= -tolerance);
    else r.passed = !boost::multiprecision::isnan(r.slack.real()) && r.slack.real() >= -Real(tolerance);
  }
  r.budgets = std::move(budgets);
  r.note = std::move(note);
  return r;
}

// A pass/fail fact with no numeric sides (e.g. "set is prefix-free").
inline BoundReport make_check(std::string name, bool ok, std::string note = {},
                              std::vector<std::pair<std::string, long long>> budgets = {}) {
  BoundReport r = make_report(std::move(name), Quantity(Rational(ok ? 0 : 1)), {{"ok", Quantity(Rational(0))}},
                              Verdict::AssertedExact, 0.0, std::move(budgets), std::move(note));
  return r;
}

inline bool all_asserted_pass(const std::vector<BoundReport>& reports) {
  for (const auto& r : reports)
    if (r.verdict == Verdict::AssertedExact && !r.passed) return false;
  return true;
}

enum class ReportFormat { Tabular, Structured };

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

inline nlohmann::json quantity_json(const Quantity& q) {
  if (q.is_rational()) return nlohmann::json{{"q", q.render()}};
  return nlohmann::json{{"r", q.render_full()}};
}

inline Quantity quantity_from_json(const nlohmann::json& j) {
  if (j.contains("q")) return Quantity(Rational(j.at("q").get<std::string>()));
  const std::string s = j.at("r").get<std::string>();
  if (s == "inf") return Quantity(real_infinity());
  if (s == "-inf") return Quantity(-real_infinity());
  if (s == "nan") return Quantity(std::numeric_limits<Real>::quiet_NaN());
  return Quantity(Real(s));
}

}  // namespace detail

inline const char* kTabularHeader = "name,lhs,rhs_terms,slack,verdict,passed,budgets,note";

inline std::string render_tabular_row(const BoundReport& r) {
  std::string rhs;
  for (const auto& [k, v] : r.rhs_terms) {
    if (!rhs.empty()) rhs += ";";
    rhs += k + "=" + v.render();
  }
  std::string budgets;
  for (const auto& [k, v] : r.budgets) {
    if (!budgets.empty()) budgets += ";";
    budgets += k + "=" + std::to_string(v);
  }
  std::string row;
  row += detail::csv_escape(r.name) + ",";
  row += detail::csv_escape(r.lhs.render()) + ",";
  row += detail::csv_escape(rhs) + ",";
  row += detail::csv_escape(r.slack.render()) + ",";
  row += std::string(to_string(r.verdict)) + ",";
  row += std::string(r.passed ? "true" : "false") + ",";
  row += detail::csv_escape(budgets) + ",";
  row += detail::csv_escape(r.note);
  return row;
}

inline nlohmann::json report_to_json(const BoundReport& r) {
  nlohmann::json rhs = nlohmann::json::array();
  for (const auto& [k, v] : r.rhs_terms) rhs.push_back({{"name", k}, {"value", detail::quantity_json(v)}});
  nlohmann::json budgets = nlohmann::json::array();
  for (const auto& [k, v] : r.budgets) budgets.push_back({{"name", k}, {"value", v}});
  return nlohmann::json{{"name", r.name},
                        {"lhs", detail::quantity_json(r.lhs)},
                        {"rhs_terms", rhs},
                        {"slack", detail::quantity_json(r.slack)},
                        {"verdict", std::string(to_string(r.verdict))},
                        {"tolerance", r.tolerance},
                        {"passed", r.passed},
                        {"budgets", budgets},
                        {"note", r.note}};
}

inline BoundReport report_from_json(const nlohmann::json& j) {
  BoundReport r;
  try {
    r.name = j.at("name").get<std::string>();
    r.lhs = detail::quantity_from_json(j.at("lhs"));
    for (const auto& t : j.at("rhs_terms"))
      r.rhs_terms.emplace_back(t.at("name").get<std::string>(), detail::quantity_from_json(t.at("value")));
    r.slack = detail::quantity_from_json(j.at("slack"));
    const std::string v = j.at("verdict").get<std::string>();
    if (v != "AssertedExact" && v != "MeasuredOnly") throw FormatError("unknown verdict " + v);
    r.verdict = v == "AssertedExact" ? Verdict::AssertedExact : Verdict::MeasuredOnly;
    r.tolerance = j.at("tolerance").get<double>();
    r.passed = j.at("passed").get<bool>();
    for (const auto& b : j.at("budgets")) r.budgets.emplace_back(b.at("name").get<std::string>(), b.at("value").get<long long>());
    r.note = j.at("note").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report record: ") + e.what());
  }
  return r;
}

inline std::string render_reports(const std::vector<BoundReport>& reports, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Tabular) {
    out += kTabularHeader;
    out += "\n";
    for (const auto& r : reports) out += render_tabular_row(r) + "\n";
  } else {
    for (const auto& r : reports) out += report_to_json(r).dump() + "\n";
  }
  return out;
}

inline std::vector<BoundReport> parse_structured(std::string_view text) {
  std::vector<BoundReport> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed report line: ") + e.what());
    }
    out.push_back(report_from_json(j));
  }
  return out;
}

inline void emit_report(const std::vector<BoundReport>& reports, ReportFormat format,
                        const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open report file " + path.string());
  out << render_reports(reports, format);
  if (!out) throw IoError("failed writing report file " + path.string());
}

}  // namespace mclab
