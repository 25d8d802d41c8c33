#include "nca/artifacts.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nca::io {

using nlohmann::json;

namespace {

json matrix_to_json(const gf::FieldMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

gf::FieldMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ParseError("expected a matrix (array of arrays)");
  gf::FieldMatrix m(j.size(), j[0].size());
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (j[r].size() != m.cols) throw ParseError("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols; ++c)
      m.at(r, c) = j[r][c].get<std::uint64_t>();
  }
  return m;
}

json fraction_to_json(const align::Fraction& f) {
  return json::array({f.num, f.den});
}

json verdict_to_json(const transfer::IdentityVerdict& v) {
  json j;
  j["kind"] = transfer::to_string(v.kind);
  j["error_bound"] = v.error_bound;
  if (!v.witness.empty()) {
    json w = json::array();
    for (const auto& a : v.witness) w.push_back(a);
    j["witness"] = std::move(w);
  }
  if (v.ratio) j["ratio"] = *v.ratio;
  return j;
}

std::string pair_key(std::pair<int, int> pr) {
  return std::to_string(pr.first) + std::to_string(pr.second);
}

}  // namespace

std::string design_to_json(const align::CodeDesign& d) {
  json j;
  j["version"] = kVersion;
  j["network_digest"] = d.network_digest;
  j["n"] = d.n;
  j["p"] = d.p;
  j["seed"] = d.seed;
  j["attempt"] = d.attempt;
  j["case"] = d.classification.tag();
  if (!d.classification.trivial_pairs.empty()) {
    json pairs = json::array();
    for (auto [a, b] : d.classification.trivial_pairs)
      pairs.push_back(json::array({a, b}));
    j["trivial_pairs"] = std::move(pairs);
  }
  if (d.pre.c_tilde) j["c_tilde"] = *d.pre.c_tilde;
  if (d.pre.theta_seed) j["theta_seed"] = *d.pre.theta_seed;
  j["z"] = matrix_to_json(d.z.rows);
  json eta = json::object();
  for (const auto& [pr, value] : d.pre.virtual_values) eta[pair_key(pr)] = value;
  j["eta"] = std::move(eta);
  j["V1"] = matrix_to_json(d.pre.V1);
  j["V2"] = matrix_to_json(d.pre.V2);
  j["V3"] = matrix_to_json(d.pre.V3);
  j["W1"] = matrix_to_json(d.W1);
  j["W2"] = matrix_to_json(d.W2);
  j["W3"] = matrix_to_json(d.W3);
  j["rates"] = json::array({fraction_to_json(d.rates[0]),
                            fraction_to_json(d.rates[1]),
                            fraction_to_json(d.rates[2])});
  return j.dump(2) + "\n";
}

align::CodeDesign design_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid design JSON: ") + e.what());
  }
  try {
    align::CodeDesign d;
    d.network_digest = j.at("network_digest").get<std::string>();
    d.n = j.at("n").get<unsigned>();
    d.p = j.at("p").get<std::uint64_t>();
    d.seed = j.value("seed", std::uint64_t{0});
    d.attempt = j.value("attempt", 0u);

    const std::string tag = j.at("case").get<std::string>();
    using Kind = transfer::Classification::Kind;
    if (tag == "CaseI_GenericRatio")
      d.classification.kind = Kind::CaseI_GenericRatio;
    else if (tag == "CaseI_ConstantRatio")
      d.classification.kind = Kind::CaseI_ConstantRatio;
    else if (tag == "CaseII")
      d.classification.kind = Kind::CaseII;
    else
      throw ParseError("unknown design case: " + tag);
    if (j.contains("trivial_pairs"))
      for (const auto& pr : j["trivial_pairs"])
        d.classification.trivial_pairs.emplace_back(pr[0].get<int>(),
                                                    pr[1].get<int>());
    if (j.contains("c_tilde")) {
      d.pre.c_tilde = j["c_tilde"].get<std::uint64_t>();
      d.classification.c_tilde = d.pre.c_tilde;
    }
    if (j.contains("theta_seed"))
      d.pre.theta_seed = j["theta_seed"].get<std::uint64_t>();

    d.z.n = d.n;
    d.z.rows = matrix_from_json(j.at("z"));
    for (const auto& [key, value] : j.at("eta").items()) {
      if (key.size() != 2) throw ParseError("bad eta key: " + key);
      d.pre.virtual_values[{key[0] - '0', key[1] - '0'}] =
          value.get<std::uint64_t>();
    }
    d.pre.V1 = matrix_from_json(j.at("V1"));
    d.pre.V2 = matrix_from_json(j.at("V2"));
    d.pre.V3 = matrix_from_json(j.at("V3"));
    d.pre.construction = d.pre.theta_seed ? Kind::CaseI_ConstantRatio
                                          : Kind::CaseI_GenericRatio;
    d.W1 = matrix_from_json(j.at("W1"));
    d.W2 = matrix_from_json(j.at("W2"));
    d.W3 = matrix_from_json(j.at("W3"));
    const auto& rates = j.at("rates");
    for (int i = 0; i < 3; ++i)
      d.rates[i] = align::Fraction{rates[i][0].get<std::uint64_t>(),
                                   rates[i][1].get<std::uint64_t>()};

    const std::size_t len = 2 * std::size_t{d.n} + 1;
    if (d.z.rows.rows != len || d.pre.V1.rows != len ||
        d.pre.V1.cols != d.n + 1 || d.pre.V2.cols != d.n ||
        d.pre.V3.cols != d.n || d.W1.rows != len || d.W1.cols != len)
      throw ValidationError("design matrices have inconsistent shapes");
    return d;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed design file: ") + e.what());
  }
}

std::string simulation_to_json(const sim::SimulationReport& r) {
  json j;
  j["version"] = kVersion;
  j["blocks"] = r.blocks;
  j["seed"] = r.seed;
  j["successes"] = r.successes;
  json rates = json::array();
  for (const auto& f : r.rates)
    rates.push_back(f ? fraction_to_json(*f) : json(nullptr));
  j["rates"] = std::move(rates);
  j["first_failure"] =
      r.first_failure ? json(*r.first_failure) : json(nullptr);
  return j.dump(2) + "\n";
}

sim::SimulationReport simulation_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid report JSON: ") + e.what());
  }
  sim::SimulationReport r;
  r.blocks = j.at("blocks").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (int i = 0; i < 3; ++i) {
    r.successes[i] = j.at("successes")[i].get<std::uint64_t>();
    const auto& f = j.at("rates")[i];
    if (!f.is_null())
      r.rates[i] = align::Fraction{f[0].get<std::uint64_t>(),
                                   f[1].get<std::uint64_t>()};
  }
  if (!j.at("first_failure").is_null())
    r.first_failure = j["first_failure"].get<std::uint64_t>();
  return r;
}

std::string analysis_to_json(const transfer::AnalysisReport& r) {
  json j;
  j["version"] = kVersion;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["case"] = r.classification.tag();
  if (!r.classification.trivial_pairs.empty()) {
    json pairs = json::array();
    for (auto [a, b] : r.classification.trivial_pairs)
      pairs.push_back(json::array({a, b}));
    j["trivial_pairs"] = std::move(pairs);
  }
  if (r.classification.c_tilde) j["c_tilde"] = *r.classification.c_tilde;
  j["mincuts"] = r.mincuts;
  j["observed_rank"] = r.observed_rank;

  json a1 = json::array();
  double a1_bound = 0.0;
  for (int i = 0; i < 3; ++i) {
    json row = json::array();
    for (int jj = 0; jj < 3; ++jj) {
      if (!r.a1[i][jj]) {
        row.push_back(nullptr);
      } else {
        row.push_back(verdict_to_json(*r.a1[i][jj]));
        a1_bound = std::max(a1_bound, r.a1[i][jj]->error_bound);
      }
    }
    a1.push_back(std::move(row));
  }
  j["a1"] = std::move(a1);
  if (r.ratio) j["ratio"] = verdict_to_json(*r.ratio);
  json asym = json::object();
  double asym_bound = 0.0;
  for (const auto& [name, verdict] : r.asymmetry) {
    asym[name] = verdict_to_json(verdict);
    asym_bound = std::max(asym_bound, verdict.error_bound);
  }
  j["asymmetry"] = std::move(asym);
  j["error_bounds"] = {{"a1", a1_bound},
                       {"ratio", r.ratio ? r.ratio->error_bound : 1.0},
                       {"asymmetry", asym_bound}};
  return j.dump(2) + "\n";
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string verdict_line(const transfer::IdentityVerdict& v) {
  using K = transfer::VerdictKind;
  switch (v.kind) {
    case K::CertifiedAsymmetric: return "certified asymmetric (witness pair)";
    case K::Unverified: return "unverified (advisory)";
    default: return transfer::to_string(v.kind);
  }
}

std::string rate_cell(const std::optional<align::Fraction>& f) {
  if (!f) return "- (-)";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", f->value());
  return f->str() + " (" + buf + ")";
}

}  // namespace

std::string render_analysis(const transfer::AnalysisReport& r) {
  std::ostringstream os;
  os << "case: " << r.classification.tag();
  if (r.classification.c_tilde)
    os << " (c~ = " << *r.classification.c_tilde << ")";
  if (!r.classification.trivial_pairs.empty()) {
    os << " (zero entries:";
    for (auto [i, j] : r.classification.trivial_pairs)
      os << " (" << i << "," << j << ")";
    os << ")";
  }
  os << "\n";
  os << "mincut: " << r.mincuts[0] << " " << r.mincuts[1] << " "
     << r.mincuts[2] << "\n";
  os << "observed transfer rank: " << r.observed_rank << "\n";
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      if (i == j || !r.a1[i - 1][j - 1]) continue;
      os << "A1 (" << i << "," << j
         << "): " << transfer::to_string(r.a1[i - 1][j - 1]->kind) << "\n";
    }
  if (r.ratio) os << "ratio a/b: " << verdict_line(*r.ratio) << "\n";
  for (const auto& [name, verdict] : r.asymmetry)
    os << name << ": " << verdict_line(verdict) << "\n";
  return os.str();
}

std::string render_design(const align::CodeDesign& d,
                          const align::ConditionReport& check) {
  std::ostringstream os;
  os << "case: " << d.classification.tag() << "\n";
  os << "n: " << d.n << "  p: " << d.p << "  seed: " << d.seed
     << "  attempt: " << d.attempt << "\n";
  os << "rates: " << d.rates[0].str() << ", " << d.rates[1].str() << ", "
     << d.rates[2].str() << "\n";
  os << "conditions: " << check.summary() << "\n";
  return os.str();
}

std::string render_simulation(const sim::SimulationReport& r) {
  std::ostringstream os;
  os << "blocks: " << r.blocks << "  seed: " << r.seed << "\n";
  for (int i = 0; i < 3; ++i)
    os << "session " << i + 1 << ": " << r.successes[i] << "/" << r.blocks
       << " exact decodes, rate " << rate_cell(r.rates[i]) << "\n";
  if (r.first_failure)
    os << "first failure: block " << *r.first_failure << "\n";
  else
    os << "first failure: none\n";
  return os.str();
}

}  // namespace nca::io
