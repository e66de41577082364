#include "fermispin/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "fermispin/bell.hpp"
#include "fermispin/cache.hpp"
#include "fermispin/entanglement.hpp"
#include "fermispin/matching.hpp"
#include "fermispin/rational_matrix.hpp"
#include "fermispin/reduction.hpp"
#include "fermispin/rho.hpp"

namespace fermispin::cli {
namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

json rational_json(const Rational& r) {
  return json{{"num", std::to_string(r.num)}, {"den", std::to_string(r.den)}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_field(fields[i]);
  return line;
}

struct OutputOptions {
  std::string format = "pretty";  // json | csv | pretty
};

struct CommonOptions {
  OutputOptions output;
  std::optional<std::filesystem::path> cache_dir;
  int max_n = kDefaultMaxParticles;
};

std::vector<int> parse_index_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw CLI::ValidationError("index list", "bad index '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("index list", "no indices in '" + s + "'");
  return out;
}

/// "i,j,...|k,l,..." -> Bipartition with part A from the left side. The two
/// sides must partition {0..n-1}.
Bipartition parse_split(const std::string& spec, int n) {
  const auto bar = spec.find('|');
  if (bar == std::string::npos)
    throw CLI::ValidationError("--split", "expected 'i,j,...|k,l,...' in '" + spec + "'");
  const auto a = parse_index_list(spec.substr(0, bar));
  auto b = parse_index_list(spec.substr(bar + 1));
  Bipartition bp(a, n);
  std::sort(b.begin(), b.end());
  if (b != bp.part_b)
    throw CLI::ValidationError("--split", "sides of '" + spec + "' do not partition 0.." + std::to_string(n - 1));
  return bp;
}

/// "keep=i,j,..." (the keep= prefix is optional).
SubsystemMask parse_mask(const std::string& spec, int n) {
  std::string body = spec;
  if (body.rfind("keep=", 0) == 0) body = body.substr(5);
  auto keep = parse_index_list(body);
  std::sort(keep.begin(), keep.end());
  return SubsystemMask(keep, n);
}

long parse_particle_count(const std::string& s, bool allow_inf) {
  if (allow_inf && (s == "inf" || s == "infinity")) return kInfiniteParticles;
  try {
    size_t pos = 0;
    const long n = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return n;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--n", "bad particle count '" + s + "'");
  }
}

void emit(const json& doc, const std::vector<std::string>& csv_lines, const std::string& pretty,
          const CommonOptions& opts, std::ostream& out) {
  if (opts.output.format == "json") {
    out << doc.dump(2) << '\n';
  } else if (opts.output.format == "csv") {
    for (const auto& line : csv_lines) out << line << '\n';
  } else {
    out << pretty;
  }
}

RationalMatrix fetch_matrix(Builder b, int n, const CommonOptions& opts, std::ostream& err) {
  return cache_get_or_build(b, n, opts.cache_dir, opts.max_n, &err);
}

std::string split_to_string(const Bipartition& bp) {
  std::string s;
  for (size_t i = 0; i < bp.part_a.size(); ++i) s += (i ? "," : "") + std::to_string(bp.part_a[i]);
  s += "|";
  for (size_t i = 0; i < bp.part_b.size(); ++i) s += (i ? "," : "") + std::to_string(bp.part_b[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_build(Builder builder, int n, const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  const RationalMatrix m = fetch_matrix(builder, n, opts, err);
  json entries = json::array();
  std::vector<std::string> csv{"i,j,num,den"};
  long nonzero = 0;
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    for (Eigen::Index j = 0; j < m.dim(); ++j) {
      if (m.num(i, j) == 0) continue;
      ++nonzero;
      entries.push_back(json::array({i, j, std::to_string(m.num(i, j))}));
      csv.push_back(std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(m.num(i, j)) + "," +
                    std::to_string(m.den));
    }
  }
  json doc{{"command", "build"},
           {"builder", builder_name(builder)},
           {"n", n},
           {"dim", m.dim()},
           {"den", std::to_string(m.den)},
           {"trace", rational_json(trace_of(m))},
           {"nonzero_entries", nonzero},
           {"entries", entries}};
  std::ostringstream pretty;
  pretty << "density matrix (" << builder_name(builder) << ") n=" << n << "\n"
         << "  dimension " << m.dim() << "x" << m.dim() << ", common denominator " << m.den << "\n"
         << "  " << nonzero << " nonzero entries, trace " << trace_of(m).to_string() << "\n";
  emit(doc, csv, pretty.str(), opts, out);
  return kExitOk;
}

int cmd_reduce(int n, const std::string& mask_spec, const CommonOptions& opts, std::ostream& out,
               std::ostream& err) {
  const SubsystemMask mask = parse_mask(mask_spec, n);
  const RationalMatrix reduced = partial_trace(fetch_matrix(Builder::pairing, n, opts, err), mask);
  json entries = json::array();
  std::vector<std::string> csv{"i,j,num,den"};
  for (Eigen::Index i = 0; i < reduced.dim(); ++i)
    for (Eigen::Index j = 0; j < reduced.dim(); ++j)
      if (reduced.num(i, j) != 0) {
        entries.push_back(json::array({i, j, std::to_string(reduced.num(i, j))}));
        csv.push_back(std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(reduced.num(i, j)) +
                      "," + std::to_string(reduced.den));
      }
  json doc{{"command", "reduce"}, {"n", n},
           {"keep", mask.keep},   {"dim", reduced.dim()},
           {"den", std::to_string(reduced.den)}, {"trace", rational_json(trace_of(reduced))},
           {"entries", entries}};
  std::ostringstream pretty;
  pretty << "reduced matrix of n=" << n << " onto spins";
  for (int k : mask.keep) pretty << ' ' << k;
  pretty << "\n  dimension " << reduced.dim() << "x" << reduced.dim() << ", common denominator " << reduced.den
         << "\n";
  for (Eigen::Index i = 0; i < reduced.dim(); ++i) {
    pretty << "  ";
    for (Eigen::Index j = 0; j < reduced.dim(); ++j)
      pretty << std::setw(8) << reduced.entry(i, j).to_string();
    pretty << "\n";
  }
  emit(doc, csv, pretty.str(), opts, out);
  return kExitOk;
}

int cmd_correlate(long n, const CommonOptions& opts, std::ostream& out) {
  const Rational r = pair_correlation(n);
  json doc{{"command", "correlate"},
           {"n", n == kInfiniteParticles ? json("inf") : json(n)},
           {"correlation", rational_json(r)},
           {"value", r.to_double()}};
  std::vector<std::string> csv{"n,num,den,value",
                               (n == kInfiniteParticles ? std::string("inf") : std::to_string(n)) + "," +
                                   std::to_string(r.num) + "," + std::to_string(r.den) + "," +
                                   fmt_double(r.to_double())};
  std::ostringstream pretty;
  pretty << "pair spin correlation for n=" << (n == kInfiniteParticles ? std::string("inf") : std::to_string(n))
         << ": " << r.to_string() << " = " << fmt_double(r.to_double()) << "\n";
  emit(doc, csv, pretty.str(), opts, out);
  return kExitOk;
}

int cmd_negativity(int n, const std::string& split_spec, const CommonOptions& opts, std::ostream& out,
                   std::ostream& err) {
  const Bipartition bp = parse_split(split_spec, n);
  const auto result = negativity_measure(fetch_matrix(Builder::pairing, n, opts, err), bp);
  json doc{{"command", "negativity"},
           {"n", n},
           {"split", split_to_string(bp)},
           {"eigenvalues", result.eigenvalues},
           {"negativity", result.negativity},
           {"entangled", result.entangled()}};
  std::vector<std::string> csv{"n,split,negativity,entangled",
                               csv_row({std::to_string(n), split_to_string(bp), fmt_double(result.negativity),
                                        result.entangled() ? "true" : "false"})};
  csv.push_back("eigenvalue");
  for (double ev : result.eigenvalues) csv.push_back(fmt_double(ev));
  std::ostringstream pretty;
  pretty << "negativity of n=" << n << " under split " << split_to_string(bp) << "\n  E = "
         << fmt_double(result.negativity) << (result.entangled() ? "  (entangled)" : "  (PPT)") << "\n"
         << "  eigenvalues of the partial transpose:\n   ";
  for (double ev : result.eigenvalues) pretty << ' ' << fmt_double(ev);
  pretty << "\n";
  emit(doc, csv, pretty.str(), opts, out);
  return kExitOk;
}

int cmd_witness(int n, const std::string& split_spec, const CommonOptions& opts, std::ostream& out,
                std::ostream& err) {
  const Bipartition bp = parse_split(split_spec, n);
  const auto w = sylvester_witness(fetch_matrix(Builder::pairing, n, opts, err), bp);
  json wj = nullptr;
  if (w) {
    wj = json{{"row", w->row},
              {"col", w->col},
              {"source_row", w->source_row},
              {"source_col", w->source_col},
              {"source_element", rational_json(w->source_element)},
              {"minor", rational_json(w->minor_value)},
              {"block_sz_twice_row", w->block_sz_twice_row},
              {"block_sz_twice_col", w->block_sz_twice_col}};
  }
  json doc{{"command", "witness"}, {"n", n}, {"split", split_to_string(bp)}, {"found", w.has_value()},
           {"witness", wj}};
  std::vector<std::string> csv{"n,split,found,row,col,minor_num,minor_den"};
  std::ostringstream pretty;
  if (w) {
    csv.push_back(csv_row({std::to_string(n), split_to_string(bp), "true", std::to_string(w->row),
                           std::to_string(w->col), std::to_string(w->minor_value.num),
                           std::to_string(w->minor_value.den)}));
    pretty << "negative principal minor found for n=" << n << " under split " << split_to_string(bp) << "\n"
           << "  source element rho[" << w->source_row << "," << w->source_col
           << "] = " << w->source_element.to_string() << "\n"
           << "  lands at (" << w->row << "," << w->col << ") in the 2Sz=(" << w->block_sz_twice_row << ","
           << w->block_sz_twice_col << ") block; minor = " << w->minor_value.to_string() << " < 0\n"
           << "  the partial transpose is not PSD: the state is entangled\n";
  } else {
    csv.push_back(csv_row({std::to_string(n), split_to_string(bp), "false", "", "", "", ""}));
    pretty << "no negative principal minor found for n=" << n << " under split " << split_to_string(bp) << "\n";
  }
  emit(doc, csv, pretty.str(), opts, out);
  return kExitOk;
}

int cmd_chsh(long n, const std::string& route, int alice, const CommonOptions& opts, std::ostream& out,
             std::ostream& err) {
  std::optional<RationalMatrix> override_rho;
  // Within the dense limit the matrix comes from the cache; beyond it the
  // evaluation itself raises the error that points at the reduced route.
  if (route == "full" && n <= opts.max_n && n >= 2)
    override_rho = fetch_matrix(Builder::pairing, static_cast<int>(n), opts, err);
  const ChshReport r = chsh_classical_bound_check(n, route, override_rho, alice, opts.max_n);
  json doc{{"command", "chsh"},
           {"n", r.n},
           {"route", r.route},
           {"value", r.value},
           {"value_pre_sqrt2", rational_json(r.value_pre_sqrt2)},
           {"classical_bound", r.classical_bound},
           {"tsirelson_bound", r.tsirelson_bound},
           {"violated", r.violated},
           {"operator_norms", json{{"Q", r.q_norm}, {"R", r.r_norm}, {"S", r.s_norm}, {"T", r.t_norm}}}};
  std::vector<std::string> csv{"n,route,value,classical_bound,tsirelson_bound,violated",
                               std::to_string(r.n) + "," + r.route + "," + fmt_double(r.value) + "," +
                                   fmt_double(r.classical_bound) + "," + fmt_double(r.tsirelson_bound) + "," +
                                   (r.violated ? "true" : "false")};
  std::ostringstream pretty;
  pretty << "CHSH value for n=" << r.n << " (" << r.route << " route): " << fmt_double(r.value) << "\n"
         << "  = sqrt(2) x " << r.value_pre_sqrt2.to_string() << " exactly\n"
         << "  classical bound 2, Tsirelson bound " << fmt_double(r.tsirelson_bound) << ", violated="
         << (r.violated ? "true" : "false") << "\n"
         << "  operator norms: |Q|=|R|=1, |S|=|T|=" << fmt_double(r.s_norm) << "\n";
  emit(doc, csv, pretty.str(), opts, out);
  return kExitOk;
}

int cmd_entropy(Builder builder, int n, const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  const RationalMatrix m = fetch_matrix(builder, n, opts, err);
  // The projector builder returns the unnormalized projector; entropy is
  // defined for the normalized state.
  RationalMatrix state = m;
  const Rational tr = trace_of(m);
  if (tr != Rational(1)) state = scale(m, Rational(tr.den, tr.num));
  const double s = von_neumann_entropy(state);
  json doc{{"command", "entropy"}, {"builder", builder_name(builder)}, {"n", n}, {"entropy_nats", s}};
  std::vector<std::string> csv{"n,builder,entropy_nats",
                               std::to_string(n) + "," + builder_name(builder) + "," + fmt_double(s)};
  std::ostringstream pretty;
  pretty << "von Neumann entropy of the n=" << n << " state (" << builder_name(builder)
         << " builder): " << fmt_double(s) << " nats\n";
  emit(doc, csv, pretty.str(), opts, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report: the whole closed-form reproduction table in one command.

struct ReportRow {
  std::string id;
  std::string description;
  std::string expected;
  std::string computed;
  bool pass = false;
};

std::vector<ReportRow> build_report(const CommonOptions& opts, std::ostream& err) {
  std::vector<ReportRow> rows;
  auto row = [&rows](std::string id, std::string desc, std::string expected, std::string computed, bool pass) {
    rows.push_back({std::move(id), std::move(desc), std::move(expected), std::move(computed), pass});
  };

  // Pairing-state overlaps of the three four-spin pairings.
  {
    const auto ms = enumerate_matchings(4);
    const auto v0 = pairing_state(ms[0]), v1 = pairing_state(ms[1]), v2 = pairing_state(ms[2]);
    const Rational o01 = overlap(v0, v1), o02 = overlap(v0, v2), o12 = overlap(v1, v2);
    row("overlaps_n4", "pairing overlaps <01,23|02,13> <01,23|03,12> <02,13|03,12>", "1/2 -1/2 1/2",
        o01.to_string() + " " + o02.to_string() + " " + o12.to_string(),
        o01 == Rational(1, 2) && o02 == Rational(-1, 2) && o12 == Rational(1, 2));
  }

  // Matching counts against the closed form.
  {
    std::string got;
    bool ok = true;
    for (int n = 2; n <= 8; n += 2) {
      const auto count = enumerate_matchings(n).size();
      ok = ok && count == matching_count(n);
      got += (n > 2 ? " " : "") + std::to_string(count);
    }
    row("matching_counts", "pairing counts for n=2 4 6 8", "1 3 15 105", got, ok);
  }

  const RationalMatrix rho4 = fetch_matrix(Builder::pairing, 4, opts, err);

  // Route equivalence.
  {
    const RationalMatrix oracle = fetch_matrix(Builder::slater, 4, opts, err);
    row("rho4_pairing_vs_slater", "pairing sum equals determinant oracle for n=4 (exact)", "equal",
        rho4 == oracle ? "equal" : "differ", rho4 == oracle);
    const auto proj = build_singlet_projector(4);
    const double diff = max_abs_difference(scale(proj.projector, Rational(1, proj.rank)), rho4);
    row("rho4_vs_projector", "pairing sum equals singlet projector / rank for n=4 (<=1e-12)", "<=1e-12",
        fmt_double(diff), diff <= 1e-12);
    row("singlet_dim_n4", "singlet subspace dimension, n=4", "2", std::to_string(proj.rank), proj.rank == 2);
    const auto proj6 = build_singlet_projector(6);
    row("singlet_dim_n6", "singlet subspace dimension, n=6", "5", std::to_string(proj6.rank), proj6.rank == 5);
  }

  // Entropies.
  {
    const double s4 = von_neumann_entropy(rho4);
    row("entropy_n4", "von Neumann entropy of the n=4 state", "ln 2 = " + fmt_double(std::log(2.0)),
        fmt_double(s4), std::abs(s4 - std::log(2.0)) <= 1e-9);
    const double s6 = von_neumann_entropy(fetch_matrix(Builder::pairing, 6, opts, err));
    row("entropy_n6", "von Neumann entropy of the n=6 state", "ln 5 = " + fmt_double(std::log(5.0)),
        fmt_double(s6), std::abs(s6 - std::log(5.0)) <= 1e-9);
  }

  // Reduced pair states.
  {
    const RationalMatrix pair4 = partial_trace(rho4, SubsystemMask({0, 1}, 4));
    const RationalMatrix expect4 = two_spin_matrix(two_spin_reduced_analytic(4));
    row("pair_state_n4", "reduced pair state of n=4: singlet 1/2, each triplet 1/6", "exact match",
        pair4 == expect4 ? "exact match" : "differ", pair4 == expect4);
    const RationalMatrix pair6 =
        partial_trace(fetch_matrix(Builder::pairing, 6, opts, err), SubsystemMask({0, 1}, 6));
    const RationalMatrix expect6 = two_spin_matrix(two_spin_reduced_analytic(6));
    row("pair_state_n6", "reduced pair state of n=6: singlet 2/5, each triplet 1/5", "exact match",
        pair6 == expect6 ? "exact match" : "differ", pair6 == expect6);
  }

  // Correlation law.
  {
    bool ok = true;
    for (int n = 2; n <= 10; n += 2) {
      const RationalMatrix pair =
          partial_trace(fetch_matrix(Builder::pairing, n, opts, err), SubsystemMask({0, 1}, n));
      ok = ok && pair_correlation_from_matrix(pair) == pair_correlation(n);
    }
    row("correlation_law", "pair correlation -1/(n-1), numeric vs analytic, n=2..10", "exact match",
        ok ? "exact match" : "differ", ok);
    row("correlation_n4", "pair correlation at n=4", "-1/3", pair_correlation(4).to_string(),
        pair_correlation(4) == Rational(-1, 3));
    row("correlation_limit", "pair correlation in the infinite limit", "0",
        pair_correlation(kInfiniteParticles).to_string(), pair_correlation(kInfiniteParticles) == Rational(0));
  }

  // Negativity of the half/half split of n=4.
  {
    const auto neg = negativity_measure(rho4, Bipartition({0, 1}, 4));
    int half = 0, sixth = 0, neg_sixth = 0;
    for (double ev : neg.eigenvalues) {
      if (std::abs(ev - 0.5) <= 1e-10) ++half;
      if (std::abs(ev - 1.0 / 6.0) <= 1e-10) ++sixth;
      if (std::abs(ev + 1.0 / 6.0) <= 1e-10) ++neg_sixth;
    }
    row("negativity_spectrum_n4", "PT spectrum of n=4 half/half: 1/2 x1, 1/6 x6, -1/6 x3", "1,6,3",
        std::to_string(half) + "," + std::to_string(sixth) + "," + std::to_string(neg_sixth),
        half == 1 && sixth == 6 && neg_sixth == 3);
    row("negativity_E_n4", "doubled negativity E of n=4 half/half", "1", fmt_double(neg.negativity),
        std::abs(neg.negativity - 1.0) <= 1e-10);
  }

  // Pair separability.
  {
    bool ok = !ppt_separability_pair(2);
    for (int n = 4; n <= 12; n += 2) ok = ok && ppt_separability_pair(n);
    row("pair_ppt", "reduced pair is NPT at n=2 and PPT for n=4..12", "NPT then PPT",
        ok ? "NPT then PPT" : "differ", ok);
  }

  // Sylvester witnesses.
  {
    const auto w6 = sylvester_witness(fetch_matrix(Builder::pairing, 6, opts, err), Bipartition({0, 1, 2}, 6));
    row("witness_n6_half", "negative minor for n=6 under 012|345", "found, M<0",
        w6 && w6->minor_value < Rational(0) ? "found, M<0" : "not found",
        w6.has_value() && w6->minor_value < Rational(0));
    bool ok = true;
    for (int n = 4; n <= 10; n += 2) {
      const auto w = sylvester_witness(fetch_matrix(Builder::pairing, n, opts, err), Bipartition({0}, n));
      ok = ok && w && w->minor_value < Rational(0);
    }
    row("witness_one_vs_rest", "negative minor for every 1|(n-1) split, n=4..10", "found, M<0",
        ok ? "found, M<0" : "not found", ok);
  }

  // CHSH.
  {
    bool ok = true;
    std::string got;
    for (int n = 2; n <= 6; n += 2) {
      const double v = chsh_evaluate(fetch_matrix(Builder::pairing, n, opts, err)).value();
      ok = ok && std::abs(v - kTsirelsonBound) <= 1e-10;
      got += (n > 2 ? " " : "") + fmt_double(v);
    }
    row("chsh_full", "CHSH value, full route, n=2 4 6", "2*sqrt(2) each", got, ok);
    const auto reduced = chsh_evaluate_reduced(1000000);
    row("chsh_reduced_1e6", "CHSH value, reduced route, n=10^6 (exact pre-sqrt2 factor)", "2",
        reduced.value_pre_sqrt2().to_string(), reduced.value_pre_sqrt2() == Rational(2));
    RationalMatrix product = make_zero_matrix(2, 4);
    product.num.setIdentity();
    const auto prod_report = chsh_classical_bound_check(2, "full", product);
    row("chsh_product_state", "CHSH value of the maximally mixed pair", "0", fmt_double(prod_report.value),
        prod_report.value == 0.0 && !prod_report.violated);
    const auto sep = chsh_classical_bound_check(2, "full", two_spin_matrix(two_spin_reduced_analytic(4)));
    row("chsh_separable_pair", "CHSH value of the n=4 reduced pair state (<=2)", "<=2", fmt_double(sep.value),
        sep.value <= 2.0 && !sep.violated);
  }

  // Symmetry: permutation invariance, rotation invariance, block support.
  {
    bool ok = true;
    std::vector<int> perm{0, 1, 2, 3};
    do {
      ok = ok && conjugate_by_spin_permutation(rho4, perm) == rho4;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (char axis : {'x', 'y', 'z'}) ok = ok && total_pauli_commutator_max_abs(rho4, axis) == 0;
    for (Eigen::Index i = 0; i < rho4.dim() && ok; ++i)
      for (Eigen::Index j = 0; j < rho4.dim() && ok; ++j)
        if (rho4.num(i, j) != 0)
          ok = sz_twice(static_cast<BasisIndex>(i), 4) == 0 && sz_twice(static_cast<BasisIndex>(j), 4) == 0;
    row("symmetry_n4", "n=4 state: all 24 permutations, exact Pauli commutation, Sz=0 support", "invariant",
        ok ? "invariant" : "broken", ok);
  }

  // Cache round trip.
  {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fermispin_report_cache";
    fs::remove_all(dir);
    cache_get_or_build(Builder::pairing, 4, dir, opts.max_n, &err);
    const bool ok = cache_get_or_build(Builder::pairing, 4, dir, opts.max_n, &err) == rho4;
    fs::remove_all(dir);
    row("cache_round_trip", "cached n=4 matrix equals a fresh build entrywise", "identical",
        ok ? "identical" : "differ", ok);
  }

  return rows;
}

int cmd_report(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  const auto rows = build_report(opts, err);
  bool all = true;
  json jrows = json::array();
  std::vector<std::string> csv{"id,description,expected,computed,pass"};
  std::ostringstream pretty;
  size_t wid = 0;
  for (const auto& r : rows) wid = std::max(wid, r.id.size());
  for (const auto& r : rows) {
    all = all && r.pass;
    jrows.push_back(json{{"id", r.id},
                         {"description", r.description},
                         {"expected", r.expected},
                         {"computed", r.computed},
                         {"pass", r.pass}});
    csv.push_back(csv_row({r.id, r.description, r.expected, r.computed, r.pass ? "true" : "false"}));
    pretty << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(static_cast<int>(wid) + 2) << r.id
           << " expected: " << r.expected << "  computed: " << r.computed << "\n";
  }
  pretty << (all ? "all checks passed" : "SOME CHECKS FAILED") << " (" << rows.size() << " rows)\n";
  json doc{{"command", "report"}, {"rows", jrows}, {"all_pass", all}};
  emit(doc, csv, pretty.str(), opts, out);
  return all ? kExitOk : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact spin density matrices, reductions, entanglement and CHSH for even fermion counts"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CommonOptions common;
  std::string cache_dir_flag;
  app.add_option("--format", common.output.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "pretty"}))
      ->capture_default_str();
  app.add_option("--cache-dir", cache_dir_flag, "matrix cache directory (or FERMISPIN_CACHE_DIR)");
  app.add_option("--max-n", common.max_n, "override the dense size limit")->capture_default_str();

  std::string n_str = "4";
  std::string split_spec, mask_spec, route = "full", builder_str = "pairing";
  int alice = 0;

  auto* c_build = app.add_subcommand("build", "build a density matrix and print its exact entries");
  c_build->add_option("--n", n_str, "particle count (even)")->required();
  c_build->add_option("--builder", builder_str, "pairing | slater | projector")
      ->check(CLI::IsMember({"pairing", "slater", "projector"}));

  auto* c_reduce = app.add_subcommand("reduce", "partial trace onto a subset of spins");
  c_reduce->add_option("--n", n_str, "particle count (even)")->required();
  c_reduce->add_option("--keep", mask_spec, "spins to keep, e.g. keep=0,1")->required();

  auto* c_corr = app.add_subcommand("correlate", "closed-form pair spin correlation -1/(n-1)");
  c_corr->add_option("--n", n_str, "particle count (even) or 'inf'")->required();

  auto* c_neg = app.add_subcommand("negativity", "PT eigenvalues and doubled negativity for a bipartition");
  c_neg->add_option("--n", n_str, "particle count (even)")->required();
  c_neg->add_option("--split", split_spec, "bipartition, e.g. 0,1|2,3")->required();

  auto* c_wit = app.add_subcommand("witness", "eigensolve-free negative principal minor search");
  c_wit->add_option("--n", n_str, "particle count (even)")->required();
  c_wit->add_option("--split", split_spec, "bipartition, e.g. 0,1,2|3,4,5")->required();

  auto* c_chsh = app.add_subcommand("chsh", "CHSH combination against the classical bound");
  c_chsh->add_option("--n", n_str, "particle count (even)")->required();
  c_chsh->add_option("--route", route, "full | reduced")->check(CLI::IsMember({"full", "reduced"}));
  c_chsh->add_option("--alice", alice, "which spin the single-particle observer measures");

  auto* c_ent = app.add_subcommand("entropy", "von Neumann entropy of the n-particle state");
  c_ent->add_option("--n", n_str, "particle count (even)")->required();
  c_ent->add_option("--builder", builder_str, "pairing | slater | projector")
      ->check(CLI::IsMember({"pairing", "slater", "projector"}));

  auto* c_report = app.add_subcommand("report", "run the whole closed-form reproduction table");
  (void)c_report;

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << app.help() << '\n';
    out << json{{"error", e.what()}, {"exit", kExitUsage}}.dump() << '\n';
    return kExitUsage;
  }

  if (!cache_dir_flag.empty()) {
    common.cache_dir = cache_dir_flag;
  } else if (const char* env = std::getenv("FERMISPIN_CACHE_DIR"); env && *env) {
    common.cache_dir = std::filesystem::path(env);
  }

  try {
    const Builder builder = *builder_from_name(builder_str);
    if (app.got_subcommand(c_build)) {
      return cmd_build(builder, static_cast<int>(parse_particle_count(n_str, false)), common, out, err);
    } else if (app.got_subcommand(c_reduce)) {
      return cmd_reduce(static_cast<int>(parse_particle_count(n_str, false)), mask_spec, common, out, err);
    } else if (app.got_subcommand(c_corr)) {
      return cmd_correlate(parse_particle_count(n_str, true), common, out);
    } else if (app.got_subcommand(c_neg)) {
      return cmd_negativity(static_cast<int>(parse_particle_count(n_str, false)), split_spec, common, out, err);
    } else if (app.got_subcommand(c_wit)) {
      return cmd_witness(static_cast<int>(parse_particle_count(n_str, false)), split_spec, common, out, err);
    } else if (app.got_subcommand(c_chsh)) {
      return cmd_chsh(parse_particle_count(n_str, false), route, alice, common, out, err);
    } else if (app.got_subcommand(c_ent)) {
      return cmd_entropy(builder, static_cast<int>(parse_particle_count(n_str, false)), common, out, err);
    } else if (app.got_subcommand(c_report)) {
      return cmd_report(common, out, err);
    }
    out << json{{"error", "no command"}, {"exit", kExitUsage}}.dump() << '\n';
    return kExitUsage;
  } catch (const ResourceLimitError& e) {
    out << json{{"error", e.what()}, {"exit", kExitResource}}.dump() << '\n';
    return kExitResource;
  } catch (const CLI::ValidationError& e) {
    err << app.help() << '\n';
    out << json{{"error", e.what()}, {"exit", kExitUsage}}.dump() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    out << json{{"error", e.what()}, {"exit", kExitUsage}}.dump() << '\n';
    return kExitUsage;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace fermispin::cli
