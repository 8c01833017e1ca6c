#include <set>

#include "quadfit/error.hpp"
#include "quadfit_cli/cli.hpp"

namespace quadfit::cli {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T, class F>
json opt_obj(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : json(nullptr);
}

json config_json(const RunConfig& c) {
  return json{{"command", c.command},
              {"data", c.data},
              {"kernel", c.kernel},
              {"null", c.null_text},
              {"model", c.model},
              {"estimator", c.estimator},
              {"pvalue", c.pvalues},
              {"draws", c.draws},
              {"boot", c.boot},
              {"seed", opt(c.seed)},
              {"out", c.out},
              {"full_spectrum", c.full_spectrum},
              {"centered", c.centered},
              {"max_terms", c.max_terms},
              {"spectrum_route", c.spectrum_route},
              {"nystrom_points", c.nystrom_points}};
}

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("expected an object");
  }

  const json& operator[](const std::string& key) {
    if (!j_.contains(key)) fail("missing field '" + key + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  std::string str(const std::string& key) { return typed<std::string>(key, (*this)[key].is_string()); }
  bool boolean(const std::string& key) { return typed<bool>(key, (*this)[key].is_boolean()); }
  double number(const std::string& key) { return typed<double>(key, (*this)[key].is_number()); }
  std::size_t count(const std::string& key) {
    return typed<std::size_t>(key, (*this)[key].is_number_unsigned() ||
                                       ((*this)[key].is_number_integer() && (*this)[key].get<long long>() >= 0));
  }
  std::optional<double> opt_number(const std::string& key) {
    const auto& v = (*this)[key];
    if (v.is_null()) return std::nullopt;
    return number(key);
  }
  std::vector<double> numbers(const std::string& key) {
    const auto& v = (*this)[key];
    if (!v.is_array()) fail("field '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail("field '" + key + "' must hold numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail("unknown field '" + k + "'");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("report " + where_ + ": " + what, 0); }

 private:
  template <class T>
  T typed(const std::string& key, bool ok) {
    if (!ok) fail("field '" + key + "' has the wrong type");
    return j_.at(key).get<T>();
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

RunConfig config_from(const json& j) {
  Reader r(j, "config");
  RunConfig c;
  c.command = r.str("command");
  c.data = r.str("data");
  c.kernel = r.str("kernel");
  c.null_text = r.str("null");
  c.model = r.str("model");
  c.estimator = r.str("estimator");
  const auto& pv = r["pvalue"];
  if (!pv.is_array()) r.fail("field 'pvalue' must be an array");
  c.pvalues.clear();
  for (const auto& x : pv) {
    if (!x.is_string()) r.fail("field 'pvalue' must hold strings");
    c.pvalues.push_back(x.get<std::string>());
  }
  c.draws = r.count("draws");
  c.boot = r.count("boot");
  if (r["seed"].is_null()) {
    c.seed.reset();
  } else {
    c.seed = static_cast<std::uint64_t>(r.count("seed"));
  }
  c.out = r.str("out");
  c.full_spectrum = r.boolean("full_spectrum");
  c.centered = r.boolean("centered");
  c.max_terms = r.count("max_terms");
  c.spectrum_route = r.str("spectrum_route");
  c.nystrom_points = r.count("nystrom_points");
  r.finish();
  return c;
}

}  // namespace

json to_json(const Report& r) {
  json j;
  j["command"] = r.command;
  j["config"] = config_json(r.config);
  j["n"] = opt(r.n);
  j["estimator"] = opt(r.estimator);
  j["statistic"] = opt(r.statistic);
  j["v_stat"] = opt(r.v_stat);
  j["u_stat"] = opt(r.u_stat);
  j["theta"] = r.theta;
  j["trace"] = opt(r.trace);
  j["trace_sq"] = opt(r.trace_sq);
  j["scale"] = opt(r.scale);
  j["dof"] = opt(r.dof);
  j["trace_method"] = r.trace_method;
  j["heuristic_dof_range"] = opt_obj(r.heuristic_dof_range, [](const HeuristicRange& h) {
    return json{{"lower", h.lower}, {"upper", h.upper}, {"inverted", h.inverted}, {"warning", h.warning}};
  });
  j["spectrum"] = opt_obj(r.spectrum, [](const SpectrumHead& s) {
    return json{{"eigenvalues", s.eigenvalues},
                {"total_terms", s.total_terms},
                {"tail_bound", s.tail_bound},
                {"method", s.method}};
  });
  j["mehler"] = opt_obj(r.mehler, [](const MehlerEcho& m) {
    return json{{"r", m.r},         {"w", m.w},         {"a", m.a},
                {"b", m.b},         {"alpha", m.alpha}, {"beta", m.beta},
                {"printed_a", m.printed_a}, {"printed_alpha", m.printed_alpha}};
  });
  j["pvalues"] = opt_obj(r.pvalues, [](const PValues& p) {
    return json{{"spectral", opt_obj(p.spectral,
                                     [](const SpectralP& s) {
                                       return json{{"p", s.p}, {"se", s.se}, {"draws", s.draws}};
                                     })},
                {"satterthwaite", opt(p.satterthwaite)},
                {"bootstrap", opt_obj(p.bootstrap,
                                      [](const BootstrapP& b) {
                                        return json{{"p", b.p},
                                                    {"se", b.se},
                                                    {"replicates", b.replicates},
                                                    {"discarded", b.discarded}};
                                      })},
                {"normal_reference", p.normal_reference}};
  });
  j["wall_time_seconds"] = r.wall_time_seconds;
  return j;
}

Report report_from_json(const json& j) {
  Reader r(j, "root");
  Report out;
  out.command = r.str("command");
  out.config = config_from(r["config"]);
  if (!r["n"].is_null()) out.n = r.count("n");
  if (!r["estimator"].is_null()) out.estimator = r.str("estimator");
  out.statistic = r.opt_number("statistic");
  out.v_stat = r.opt_number("v_stat");
  out.u_stat = r.opt_number("u_stat");
  out.theta = r.numbers("theta");
  out.trace = r.opt_number("trace");
  out.trace_sq = r.opt_number("trace_sq");
  out.scale = r.opt_number("scale");
  out.dof = r.opt_number("dof");
  out.trace_method = r.str("trace_method");
  if (const auto& h = r["heuristic_dof_range"]; !h.is_null()) {
    Reader hr(h, "heuristic_dof_range");
    HeuristicRange v;
    v.lower = hr.number("lower");
    v.upper = hr.number("upper");
    v.inverted = hr.boolean("inverted");
    v.warning = hr.str("warning");
    hr.finish();
    out.heuristic_dof_range = v;
  }
  if (const auto& s = r["spectrum"]; !s.is_null()) {
    Reader sr(s, "spectrum");
    SpectrumHead v;
    v.eigenvalues = sr.numbers("eigenvalues");
    v.total_terms = sr.count("total_terms");
    v.tail_bound = sr.number("tail_bound");
    v.method = sr.str("method");
    sr.finish();
    out.spectrum = v;
  }
  if (const auto& m = r["mehler"]; !m.is_null()) {
    Reader mr(m, "mehler");
    MehlerEcho v;
    v.r = mr.number("r");
    v.w = mr.number("w");
    v.a = mr.number("a");
    v.b = mr.number("b");
    v.alpha = mr.number("alpha");
    v.beta = mr.number("beta");
    v.printed_a = mr.number("printed_a");
    v.printed_alpha = mr.number("printed_alpha");
    mr.finish();
    out.mehler = v;
  }
  if (const auto& p = r["pvalues"]; !p.is_null()) {
    Reader pr(p, "pvalues");
    PValues v;
    if (const auto& s = pr["spectral"]; !s.is_null()) {
      Reader sr(s, "pvalues.spectral");
      v.spectral = SpectralP{sr.number("p"), sr.number("se"), sr.count("draws")};
      sr.finish();
    }
    v.satterthwaite = pr.opt_number("satterthwaite");
    if (const auto& b = pr["bootstrap"]; !b.is_null()) {
      Reader br(b, "pvalues.bootstrap");
      v.bootstrap = BootstrapP{br.number("p"), br.number("se"), br.count("replicates"), br.count("discarded")};
      br.finish();
    }
    v.normal_reference = pr.boolean("normal_reference");
    pr.finish();
    out.pvalues = v;
  }
  out.wall_time_seconds = r.number("wall_time_seconds");
  r.finish();
  return out;
}

std::string dump(const Report& r) { return to_json(r).dump(2) + "\n"; }

}  // namespace quadfit::cli
