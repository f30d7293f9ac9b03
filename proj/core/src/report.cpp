#include "ibpf/report.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ibpf/io.hpp"

namespace ibpf::report {

using nlohmann::json;

namespace {

void quote(std::string& out, const std::string& s) {
  // reuse the library's escaping for strings
  out += json(s).dump();
}

void emit(std::string& out, const json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: already sorted
        if (!first) out += ",\n";
        first = false;
        out += pad;
        quote(out, it.key());
        out += ": ";
        emit(out, it.value(), depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(out, j[i], depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? io::format_double(v) : "null";
      return;
    }
    case json::value_t::string:
      quote(out, j.get<std::string>());
      return;
    default:
      out += j.dump();
  }
}

json terms_json(const std::vector<verify::RhsTerm>& terms, bool boundary) {
  json a = json::array();
  for (const auto& t : terms) {
    const bool is_boundary = t.name != "remainder";
    if (is_boundary != boundary) continue;
    a.push_back({{"name", t.name}, {"value", t.value}, {"error", t.error}});
  }
  return a;
}

json rhs_json(const verify::RhsResult& r) {
  double rem = 0.0;
  for (const auto& t : r.terms)
    if (t.name == "remainder") rem = t.value;
  return {{"form", verify::form_name(r.form)},
          {"reading", r.remainder_reading},
          {"remainder", rem},
          {"boundary", terms_json(r.terms, true)},
          {"total", r.value},
          {"quad_error", r.quad_error},
          {"stat_error", r.stat_error}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string dump(const json& j) {
  std::string out;
  emit(out, j, 0);
  out += "\n";
  return out;
}

json to_json(const verify::IbPFReport& r) {
  json meta = {{"delta", r.regime.delta},
               {"kappa", r.regime.kappa},
               {"k_index", r.regime.k_index},
               {"regime", r.regime.name()},
               {"functional", r.functional},
               {"direction", r.direction},
               {"method", r.method},
               {"seed", r.seed},
               {"paths", r.paths},
               {"grid", r.grid_points},
               {"notes", r.notes}};
  json j = {{"meta", meta},
            {"lhs",
             {{"dh", r.lhs.dh.value},
              {"h2", r.lhs.h2.value},
              {"dh_error", r.lhs.dh.error},
              {"h2_error", r.lhs.h2.error},
              {"total", r.lhs.total.value},
              {"error", r.lhs.total.error}}},
            {"rhs", rhs_json(r.rhs)},
            {"gap", r.gap},
            {"budget", {{"quad", r.budget_quad}, {"stat", r.budget_stat}, {"total", r.budget}}},
            {"pass", r.pass}};
  if (r.method == "closedform") {
    j["sigma_form"] = rhs_json(r.rhs_sigma);
    j["forms_gap"] = r.forms_gap;
  }
  if (r.literal_reading) {
    j["literal_reading"] = {{"eps", r.literal_reading->eps},
                            {"values", r.literal_reading->values},
                            {"diverges", r.literal_reading->diverges}};
  }
  return j;
}

json to_json(const verify::BoundsReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"r", x.r},
                    {"b", x.b},
                    {"t0", x.t0},
                    {"t0_bound", x.t0_bound},
                    {"t0_stat", x.t0_stat},
                    {"t0_ok", x.t0_ok},
                    {"t2", x.t2},
                    {"t2_bound", x.t2_bound},
                    {"t2_stat", x.t2_stat},
                    {"t2_ok", x.t2_ok}});
  return {{"L", r.L},
          {"L2", r.L2},
          {"fitted_M", r.fitted_M},
          {"fitted_M_l2norm", r.fitted_M_l2norm},
          {"first_derivative_slope", r.first_derivative_slope},
          {"l2norm_slope", r.l2norm_slope},
          {"rows", rows},
          {"pass", r.pass}};
}

json to_json(const verify::ConsistencyReport& r) {
  json a = json::array();
  for (const auto& c : r.checks)
    a.push_back({{"name", c.name},
                 {"worst", c.worst},
                 {"tolerance", c.tolerance},
                 {"pass", c.pass},
                 {"detail", c.detail}});
  return {{"checks", a}, {"pass", r.pass()}};
}

json to_json(const verify::ContinuityProbe& p) {
  return {{"deltas", p.deltas},  {"values", p.values}, {"extrapolated", p.extrapolated},
          {"at_one", p.at_one}, {"gap", p.gap},       {"pass", p.pass}};
}

std::string csv(const std::vector<verify::IbPFReport>& reports) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : reports) {
    out += io::format_double(r.regime.delta) + "," + csv_field(r.functional) + "," + r.method + "," +
           io::format_double(r.lhs.total.value) + "," + io::format_double(r.rhs.value) + "," +
           io::format_double(r.gap) + "," + io::format_double(r.budget) + "," + (r.pass ? "true" : "false") +
           "\n";
  }
  return out;
}

std::string approx_csv(const std::vector<approx::DominationRow>& rows) {
  std::string out = "k,sup_gap,deriv_ratio,lip_ratio\n";
  for (const auto& r : rows)
    out += std::to_string(r.k) + "," + io::format_double(r.sup_gap) + "," + io::format_double(r.deriv_ratio) + "," +
           io::format_double(r.lip_ratio) + "\n";
  return out;
}

void write(const std::string& path, const std::string& content) {
  try {
    io::atomic_write(path, content);
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot write " + path + ": " + e.what());
  }
}

}  // namespace ibpf::report
