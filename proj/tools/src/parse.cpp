#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "quadfit/error.hpp"
#include "quadfit_cli/cli.hpp"

namespace quadfit::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

struct Parts {
  std::string head;
  std::string rest;
};

Parts split_head(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {trim(text), ""};
  return {trim(text.substr(0, colon)), trim(text.substr(colon + 1))};
}

std::map<std::string, double> parse_params(const std::string& what, const std::string& body,
                                           std::initializer_list<const char*> allowed) {
  std::map<std::string, double> out;
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument(what + ": expected key=value, got '" + item + "'");
    const auto key = trim(item.substr(0, eq));
    const auto val = to_double(trim(item.substr(eq + 1)));
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw InvalidArgument(what + ": unknown parameter '" + key + "'");
    if (!val) throw InvalidArgument(what + ": parameter '" + key + "' is not a number");
    out[key] = *val;
  }
  return out;
}

double required(const std::map<std::string, double>& p, const std::string& key, const std::string& what) {
  const auto it = p.find(key);
  if (it == p.end()) throw InvalidArgument(what + ": missing parameter '" + key + "'");
  return it->second;
}

void no_params(const Parts& s) {
  if (!s.rest.empty()) throw InvalidArgument(s.head + " takes no parameters");
}

}  // namespace

Kernel parse_kernel(const std::string& text) {
  const auto s = split_head(text);
  if (s.head == "normal") {
    const auto p = parse_params("normal kernel", s.rest, {"h2"});
    return Kernel::normal(required(p, "h2", "normal kernel"));
  }
  if (s.head == "poisson") {
    const auto p = parse_params("poisson kernel", s.rest, {"rho", "lo", "hi"});
    const double lo = p.count("lo") ? p.at("lo") : 0.0;
    const double hi = p.count("hi") ? p.at("hi") : kTwoPi;
    return Kernel::poisson(required(p, "rho", "poisson kernel"), lo, hi);
  }
  if (s.head == "cvm") {
    no_params(s);
    return Kernel::cvm();
  }
  if (s.head == "pearson") {
    no_params(s);
    return Kernel::pearson();
  }
  if (s.head == "identity") {
    no_params(s);
    return Kernel::identity();
  }
  throw InvalidArgument("unknown kernel '" + s.head + "'");
}

BaselineMeasure parse_measure(const std::string& text) {
  const auto s = split_head(text);
  if (s.head == "uniform01") {
    no_params(s);
    return BaselineMeasure::uniform01();
  }
  if (s.head == "circle") {
    no_params(s);
    return BaselineMeasure::circle();
  }
  if (s.head == "uniform") {
    const auto p = parse_params("uniform measure", s.rest, {"lo", "hi"});
    return BaselineMeasure::uniform(required(p, "lo", "uniform measure"), required(p, "hi", "uniform measure"));
  }
  if (s.head == "normal") {
    const auto p = parse_params("normal measure", s.rest, {"mu", "sigma2"});
    return BaselineMeasure::normal(required(p, "mu", "normal measure"), required(p, "sigma2", "normal measure"));
  }
  if (s.head == "exponential") {
    const auto p = parse_params("exponential measure", s.rest, {"rate"});
    return BaselineMeasure::exponential(required(p, "rate", "exponential measure"));
  }
  if (s.head == "pmf") {
    if (s.rest.empty()) throw InvalidArgument("pmf measure needs a path");
    return ingest_pmf(s.rest);
  }
  if (s.head == "sample") {
    if (s.rest.empty()) throw InvalidArgument("sample measure needs a path");
    return BaselineMeasure::empirical(ingest(s.rest));
  }
  throw InvalidArgument("unknown measure '" + s.head + "'");
}

ModelPtr parse_model(const std::string& text) {
  const auto s = split_head(text);
  if (s.head == "normal") {
    no_params(s);
    return normal_model();
  }
  if (s.head == "exponential") {
    no_params(s);
    return exponential_model();
  }
  if (s.head == "independence") {
    const auto p = parse_params("independence model", s.rest, {"rows", "cols"});
    const double r = required(p, "rows", "independence model");
    const double c = required(p, "cols", "independence model");
    if (r != std::floor(r) || c != std::floor(c) || r < 2 || c < 2)
      throw InvalidArgument("independence model: rows and cols must be integers >= 2");
    return independence_model(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
  throw InvalidArgument("unknown model '" + s.head + "'");
}

namespace {

std::vector<double> ingest_impl(std::istream& in, const std::string& source) {
  const std::string prefix = source.empty() ? "" : source + ": ";
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto v = to_double(t);
    if (!v) {
      if (!seen_content) {
        seen_content = true;  // header
        continue;
      }
      throw ParseError(prefix + "'" + t + "' is not a number", lineno);
    }
    seen_content = true;
    if (!std::isfinite(*v)) throw ParseError(prefix + "non-finite value '" + t + "'", lineno);
    out.push_back(*v);
  }
  if (out.empty()) throw ParseError(prefix + "no observations found", 0);
  return out;
}

}  // namespace

std::vector<double> ingest(std::istream& in) { return ingest_impl(in, ""); }

std::vector<double> ingest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open data file '" + path.string() + "'");
  return ingest_impl(in, path.string());
}

BaselineMeasure ingest_pmf(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open pmf file '" + path.string() + "'");
  std::vector<double> support;
  std::vector<double> probs;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string a;
    std::string b;
    std::string extra;
    if (!(fields >> a)) continue;
    fields >> b;
    const auto x = to_double(a);
    const auto p = to_double(b);
    if (!x || !p || (fields >> extra)) {
      if (!seen_content) {
        seen_content = true;
        continue;
      }
      throw ParseError(path.string() + ": expected 'value prob'", lineno);
    }
    seen_content = true;
    if (!std::isfinite(*x) || !std::isfinite(*p)) throw ParseError(path.string() + ": non-finite entry", lineno);
    support.push_back(*x);
    probs.push_back(*p);
  }
  if (support.empty()) throw ParseError(path.string() + ": no pmf entries found", 0);
  return BaselineMeasure::discrete(std::move(support), std::move(probs));
}

}  // namespace quadfit::cli
