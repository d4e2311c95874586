#include "trinet/json_io.hpp"

#include <stdexcept>

namespace trinet::jsonio {

json to_json(const TripartiteDistribution& d) {
  json j;
  j["order"] = "abc";
  j["p"] = d.values();
  return j;
}

TripartiteDistribution distribution_from_json(const json& j) {
  if (!j.contains("p") || !j["p"].is_array() || j["p"].size() != 8)
    throw std::invalid_argument("distribution JSON needs a 'p' array of 8");
  if (j.value("order", "abc") != "abc")
    throw std::invalid_argument("distribution JSON: unsupported order");
  std::array<double, 8> p{};
  for (int i = 0; i < 8; ++i) p[i] = j["p"][i].get<double>();
  return TripartiteDistribution::from_values(p, 1e-8);
}

namespace {

json table_to_json(const ResponseTable& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows; ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < t.cols; ++k) row.push_back(t(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

ResponseTable table_from_json(const json& j) {
  ResponseTable t;
  t.rows = j.size();
  t.cols = t.rows > 0 ? j.at(0).size() : 0;
  for (const auto& row : j) {
    if (row.size() != t.cols)
      throw std::invalid_argument("response table JSON: ragged rows");
    for (const auto& v : row) t.p0.push_back(v.get<double>());
  }
  return t;
}

}  // namespace

json to_json(const LocalModel& m) {
  json j;
  j["cardinalities"] = {m.card_alpha(), m.card_beta(), m.card_gamma()};
  j["q"] = m.q;
  j["r"] = m.r;
  j["s"] = m.s;
  j["p_a"] = table_to_json(m.pa);
  j["p_b"] = table_to_json(m.pb);
  j["p_c"] = table_to_json(m.pc);
  return j;
}

LocalModel local_model_from_json(const json& j) {
  LocalModel m;
  m.q = j.at("q").get<std::vector<double>>();
  m.r = j.at("r").get<std::vector<double>>();
  m.s = j.at("s").get<std::vector<double>>();
  m.pa = table_from_json(j.at("p_a"));
  m.pb = table_from_json(j.at("p_b"));
  m.pc = table_from_json(j.at("p_c"));
  m.validate();
  return m;
}

json to_json(const ModelParams& p) {
  json j;
  j["p0"] = p.p0;
  j["p_empty"] = p.p_empty;
  j["omega"] = p.omega;
  j["theta0"] = p.theta0;
  j["theta1"] = p.theta1;
  return j;
}

ModelParams params_from_json(const json& j) {
  ModelParams p;
  p.p0 = j.at("p0").get<double>();
  p.p_empty = j.at("p_empty").get<double>();
  p.omega = j.at("omega").get<double>();
  p.theta0 = j.at("theta0").get<double>();
  p.theta1 = j.at("theta1").get<double>();
  return p;
}

json to_json(const FitResult& f) {
  json j;
  j["params"] = to_json(f.params);
  j["l2"] = f.l2;
  j["v"] = f.v.str();
  j["iterations"] = f.iterations;
  return j;
}

json to_json(const Tester& t) {
  json j;
  j["d_in"] = t.d_in;
  j["d_out"] = t.d_out;
  json els = json::array();
  for (const auto& e : t.elements) {
    json re = json::array(), im = json::array();
    for (std::size_t i = 0; i < e.rows(); ++i) {
      json re_row = json::array(), im_row = json::array();
      for (std::size_t k = 0; k < e.cols(); ++k) {
        re_row.push_back(e(i, k).real());
        im_row.push_back(e(i, k).imag());
      }
      re.push_back(std::move(re_row));
      im.push_back(std::move(im_row));
    }
    els.push_back(json{{"re", std::move(re)}, {"im", std::move(im)}});
  }
  j["elements"] = std::move(els);
  return j;
}

Tester tester_from_json(const json& j) {
  Tester t;
  t.d_in = j.at("d_in").get<std::size_t>();
  t.d_out = j.at("d_out").get<std::size_t>();
  for (const auto& el : j.at("elements")) {
    const auto& re = el.at("re");
    const auto& im = el.at("im");
    const std::size_t n = re.size();
    if (n != t.dim() || im.size() != n)
      throw std::invalid_argument("tester JSON: element dimension mismatch");
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (re[i].size() != n || im[i].size() != n)
        throw std::invalid_argument("tester JSON: ragged element");
      for (std::size_t k = 0; k < n; ++k)
        m(i, k) = cxd{re[i][k].get<double>(), im[i][k].get<double>()};
    }
    t.elements.push_back(std::move(m));
  }
  if (t.elements.empty())
    throw std::invalid_argument("tester JSON: no elements");
  return t;
}

json certificate_json(const inflation::InflationLP& lp,
                      const inflation::Certificate& cert) {
  json j;
  j["level"] = lp.level;
  j["reduced"] = lp.reduced;
  j["verified_float"] = cert.verified_float;
  j["verified_exact"] = cert.verified_exact;
  json coeffs = json::array();
  if (!cert.y_exact.empty()) {
    for (std::size_t i = 0; i < cert.y_exact.size(); ++i) {
      if (cert.y_exact[i] == 0) continue;
      json entry;
      entry["constraint"] = i;
      entry["name"] = lp.constraint_names[i];
      entry["num"] = boost::multiprecision::numerator(cert.y_exact[i]).str();
      entry["den"] = boost::multiprecision::denominator(cert.y_exact[i]).str();
      coeffs.push_back(std::move(entry));
    }
  } else {
    for (std::size_t i = 0; i < cert.y.size(); ++i) {
      if (cert.y[i] == 0.0) continue;
      json entry;
      entry["constraint"] = i;
      entry["name"] = lp.constraint_names[i];
      entry["value"] = cert.y[i];
      coeffs.push_back(std::move(entry));
    }
  }
  j["coefficients"] = std::move(coeffs);
  return j;
}

}  // namespace trinet::jsonio
