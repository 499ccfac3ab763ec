#pragma once

// latdir command line: subcommands over the library with CSV / JSON output.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "latdir/latdir.hpp"

namespace latdir::cli {

// ---------------------------------------------------------------------------
// Argument parsing

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::vector<double> parse_reals(const std::string& s, std::size_t expect = 0) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_real(part));
  if (expect && out.size() != expect) {
    throw InvalidInput("expected " + std::to_string(expect) + " comma-separated numbers in '" + s + "'");
  }
  return out;
}

inline LongVec2 parse_xi(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw InvalidInput("xi needs two components, got '" + s + "'");
  return {parse_real_ld(parts[0]), parse_real_ld(parts[1])};
}

inline std::array<Rational, 2> parse_rational_pair(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw InvalidInput("expected two fractions, got '" + s + "'");
  std::array<Rational, 2> out;
  for (int i = 0; i < 2; ++i) {
    const auto r = parse_rational(parts[i]);
    if (!r) throw InvalidInput("'" + parts[i] + "' is not a rational number p/q");
    out[i] = *r;
  }
  return out;
}

inline std::array<std::int64_t, 2> parse_int_pair(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw InvalidInput("expected two integers, got '" + s + "'");
  std::array<std::int64_t, 2> out{};
  for (int i = 0; i < 2; ++i) {
    const auto r = parse_rational(parts[i]);
    if (!r || r->denominator() != 1) throw InvalidInput("'" + parts[i] + "' is not an integer");
    out[i] = r->numerator();
  }
  return out;
}

inline Mat2 parse_basis(const std::string& s) {
  const auto v = parse_reals(s, 4);
  return {v[0], v[1], v[2], v[3]};
}

inline DomainShape parse_shape(const std::string& s) {
  if (s == "square") return Square{};
  if (s == "annulus" || s == "disc") return Annulus{0.0};
  if (s.rfind("annulus:", 0) == 0) return Annulus{parse_real(s.substr(8))};
  throw InvalidInput("shape must be annulus:c or square, got '" + s + "'");
}

inline Interval parse_interval(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw InvalidInput("interval must be a:b, got '" + s + "'");
  const Interval iv{parse_real(parts[0]), parse_real(parts[1])};
  if (!(iv.lo < iv.hi)) throw InvalidInput("interval needs a < b, got '" + s + "'");
  return iv;
}

inline std::vector<double> parse_bins(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw InvalidInput("bins must be lo:hi:width, got '" + s + "'");
  return make_edges(parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2]));
}

/// "re", "im i", "re+im i" or "re-im i".
inline std::complex<double> parse_complex(std::string s) {
  if (s.empty()) throw InvalidInput("empty exponent");
  if (s.back() != 'i') return {parse_real(s), 0.0};
  s.pop_back();
  std::size_t cut = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  if (cut == std::string::npos) {
    const double im = (s.empty() || s == "+") ? 1.0 : (s == "-" ? -1.0 : parse_real(s));
    return {0.0, im};
  }
  const std::string re = s.substr(0, cut), im = s.substr(cut);
  const double imv = im == "+" ? 1.0 : (im == "-" ? -1.0 : parse_real(im));
  return {parse_real(re), imv};
}

/// "k" or "a..b".
inline std::vector<std::size_t> parse_k_range(const std::string& s) {
  const auto dots = s.find("..");
  const auto to_k = [&](const std::string& t) {
    const auto r = parse_rational(t);
    if (!r || r->denominator() != 1 || r->numerator() < 1) throw InvalidInput("k must be a positive integer");
    return static_cast<std::size_t>(r->numerator());
  };
  if (dots == std::string::npos) return {to_k(s)};
  const std::size_t a = to_k(s.substr(0, dots)), b = to_k(s.substr(dots + 2));
  if (a > b) throw InvalidInput("empty k range '" + s + "'");
  std::vector<std::size_t> out;
  for (std::size_t k = a; k <= b; ++k) out.push_back(k);
  return out;
}

inline XiClass parse_class(const std::string& name, const std::optional<std::string>& xi) {
  if (name == "integer") return IntegerClass{};
  if (name == "irrational") return IrrationalClass{};
  if (name != "rational") throw InvalidInput("class must be integer, rational or irrational");
  if (!xi) throw InvalidInput("rational class needs --xi p1/q1,p2/q2");
  const auto r = parse_rational_pair(*xi);
  const std::int64_t q = std::lcm(r[0].denominator(), r[1].denominator());
  if (q == 1) throw InvalidInput("xi is an integer vector; use --class integer");
  return RationalClass{r[0].numerator() * (q / r[0].denominator()), r[1].numerator() * (q / r[1].denominator()), q};
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Context {
  std::ostream& out;  // data when no --out is given
  std::ostream& err;
  std::string cmd;    // recorded command line (without --out / --threads)
  std::string seed = "none";
};

/// Destination for one output file: the given path, or the context's stdout.
class Sink {
 public:
  Sink(const Context& ctx, const std::string& path) : ctx_(ctx) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidInput("cannot open output file '" + path + "'");
    }
  }

  std::ostream& stream() { return file_ ? *file_ : ctx_.out; }

  void csv_header(const std::string& columns) {
    stream() << "# latdir v" << LATDIR_VERSION << ", seed=" << ctx_.seed << ", cmd=" << ctx_.cmd << '\n'
             << columns << '\n';
  }

 private:
  const Context& ctx_;
  std::unique_ptr<std::ofstream> file_;
};

inline void write_json(const Context& ctx, const std::string& path, const nlohmann::ordered_json& j) {
  Sink sink(ctx, path);
  sink.stream() << j.dump(2) << '\n';
}

inline void write_histogram(Sink& sink, const Histogram& h) {
  sink.csv_header("bin_lo,bin_hi,density");
  for (std::size_t b = 0; b < h.bins(); ++b) {
    sink.stream() << fmt(h.edges[b]) << ',' << fmt(h.edges[b + 1]) << ',' << fmt(h.values[b]) << '\n';
  }
}

/// Summary lines go to stdout when data went to a file, else to stderr.
inline std::ostream& summary(const Context& ctx, const std::string& out_path) {
  return out_path.empty() ? ctx.err : ctx.out;
}

// ---------------------------------------------------------------------------
// Commands

struct LatticeArgs {
  std::string xi = "0,0";
  std::string basis = "1,0,0,1";
  std::string shape = "annulus:0";
  double T = 100.0;
  std::size_t max_points = 200'000'000;

  void add(CLI::App* app) {
    app->add_option("--xi", xi, "shift vector a,b (cbrt2, cbrt4, sqrt2, golden, p/q allowed)");
    app->add_option("--basis", basis, "unimodular basis a,b,c,d (rows (a,b), (c,d))");
    app->add_option("--shape", shape, "annulus:c or square");
    app->add_option("--T", T, "dilation parameter")->required();
    app->add_option("--max-points", max_points, "capacity limit on enumerated points");
  }

  AffineLatticeSpec lattice() const {
    const LongVec2 s = parse_xi(xi);
    return {parse_basis(basis), {static_cast<double>(s.x), static_cast<double>(s.y)}};
  }

  DirectionSet directions(unsigned threads) const {
    return direction_set(lattice(), parse_shape(shape), T, EnumerateOptions{max_points, threads});
  }
};

struct SampleArgs {
  std::string cls = "irrational";
  std::optional<std::string> xi;
  double c = 0.0;
  std::vector<std::string> windows;
  std::size_t n = 100'000;
  std::uint64_t seed = 1;

  void add(CLI::App* app, bool with_windows = true) {
    app->add_option("--class", cls, "integer, rational or irrational");
    app->add_option("--xi", xi, "rational shift p1/q,p2/q for --class rational");
    app->add_option("--c", c, "annulus parameter c in [0, 1)");
    if (with_windows) app->add_option("--I", windows, "window a:b (repeatable)");
    app->add_option("--n", n, "number of samples");
    app->add_option("--seed", seed, "random seed");
  }

  IntervalBox box() const {
    IntervalBox b;
    if (windows.empty()) b.intervals.push_back({0.0, 1.0});
    for (const auto& w : windows) b.intervals.push_back(parse_interval(w));
    return b;
  }

  XiClass xi_class() const {
    if (!(c >= 0.0 && c < 1.0)) throw InvalidInput("c must lie in [0, 1)");
    return parse_class(cls, xi);
  }
};

/// Recorded form of argv for CSV headers: --out and --threads are dropped so
/// that reruns to other files or with other thread counts compare equal.
inline std::string recorded_command(int argc, const char* const* argv) {
  std::string cmd;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" || a == "--threads") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0 || a.rfind("--threads=", 0) == 0) continue;
    if (!cmd.empty()) cmd += ' ';
    cmd += a;
  }
  return cmd;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"latdir: directions in affine lattices and their limiting statistics"};
  app.require_subcommand(1);
  unsigned threads = default_threads();
  std::string out_path;
  app.add_option("--threads", threads, "worker threads (default: LATDIR_THREADS or hardware)");

  Context ctx{out, err, recorded_command(argc, argv)};
  std::function<void()> action;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--threads", threads, "worker threads");
  };

  // enumerate
  LatticeArgs lat;
  auto* en = app.add_subcommand("enumerate", "sorted directions alpha_j");
  lat.add(en);
  add_common(en);
  en->callback([&] {
    action = [&] {
      const DirectionSet d = lat.directions(threads);
      Sink sink(ctx, out_path);
      sink.csv_header("alpha");
      for (double a : d.alphas) sink.stream() << fmt(a) << '\n';
      summary(ctx, out_path) << "enumerate: N=" << d.size() << " N/area=" << fmt(d.size() / expected_count(d.shape, d.T))
                             << '\n';
    };
  });

  // spacings
  LatticeArgs lat_sp;
  std::string k_range = "1";
  std::string sp_bins = "0:30:0.1";
  auto* sp = app.add_subcommand("spacings", "histograms of k-th neighbour spacings N (alpha_{j+k} - alpha_j)");
  lat_sp.add(sp);
  sp->add_option("--k", k_range, "k or a range a..b; one output per k");
  sp->add_option("--bins", sp_bins, "lo:hi:width");
  add_common(sp);
  sp->callback([&] {
    action = [&] {
      const auto ks = parse_k_range(k_range);
      const auto edges = parse_bins(sp_bins);
      const DirectionSet d = lat_sp.directions(threads);
      for (std::size_t k : ks) {
        const Histogram h = spacing_histogram(d, k, edges);
        const std::string path = out_path.empty() ? "" : out_path + "_k" + std::to_string(k) + ".csv";
        Sink sink(ctx, path);
        if (out_path.empty()) sink.stream() << "# k=" << k << '\n';
        write_histogram(sink, h);
      }
      summary(ctx, out_path) << "spacings: N=" << d.size() << " histograms=" << ks.size() << '\n';
    };
  });

  // paircorr
  LatticeArgs lat_pc;
  std::string pc_bins = "-10:10:0.5";
  bool fold = false, weighted = false;
  auto* pc = app.add_subcommand("paircorr", "two-point correlation density of the directions");
  lat_pc.add(pc);
  pc->add_option("--bins", pc_bins, "lo:hi:width");
  pc->add_flag("--fold", fold, "histogram |delta|");
  pc->add_flag("--weighted", weighted, "weight pairs by 1/rho for the square domain");
  add_common(pc);
  pc->callback([&] {
    action = [&] {
      const auto edges = parse_bins(pc_bins);
      const DirectionSet d = lat_pc.directions(threads);
      PairCorrelationOptions opt;
      opt.fold = fold;
      opt.threads = threads;
      if (weighted) {
        if (!std::holds_alternative<Square>(d.shape)) throw InvalidInput("--weighted applies to the square shape");
        opt.density = rho_square;
      }
      const Histogram h = pair_correlation(d, edges, opt);
      Sink sink(ctx, out_path);
      write_histogram(sink, h);
      double mean = 0.0;
      for (double v : h.values) mean += v;
      summary(ctx, out_path) << "paircorr: N=" << d.size() << " mean density=" << fmt(mean / h.bins()) << '\n';
    };
  });

  // moments
  LatticeArgs lat_mo;
  std::vector<std::string> mo_windows, mo_s;
  std::optional<std::int64_t> K;
  std::string form = "shifted";
  std::size_t quad = 20'001;
  auto* mo = app.add_subcommand("moments", "mixed moment of N(I_j, alpha) over uniform alpha");
  lat_mo.add(mo);
  mo->add_option("--I", mo_windows, "window a:b (repeatable)")->required();
  mo->add_option("--s", mo_s, "exponent re+imi per window (repeatable)")->required();
  mo->add_option("--K", K, "restrict to max_j N_j <= K");
  mo->add_option("--form", form, "shifted: (N+1)^s, raw: N^s");
  mo->add_option("--quad", quad, "midpoint grid size for alpha");
  add_common(mo);
  mo->callback([&] {
    action = [&] {
      if (mo_windows.size() != mo_s.size()) throw InvalidInput("need one --s per --I");
      if (form != "shifted" && form != "raw") throw InvalidInput("form must be shifted or raw");
      IntervalBox box;
      MomentSpec spec;
      spec.cap = K;
      for (std::size_t j = 0; j < mo_windows.size(); ++j) {
        box.intervals.push_back(parse_interval(mo_windows[j]));
        spec.exponents.push_back(parse_complex(mo_s[j]));
      }
      const DirectionSet d = lat_mo.directions(threads);
      const auto v = mixed_moment(d, box, spec, MeasureSpec::uniform(quad),
                                  form == "raw" ? MomentForm::raw : MomentForm::shifted);
      nlohmann::ordered_json j;
      j["s"] = nlohmann::json::array();
      for (const auto& s : spec.exponents) j["s"].push_back({s.real(), s.imag()});
      j["K"] = K ? nlohmann::json(*K) : nlohmann::json(nullptr);
      j["value_re"] = v.real();
      j["value_im"] = v.imag();
      write_json(ctx, out_path, j);
      summary(ctx, out_path) << "moments: N=" << d.size() << " value=" << fmt(v.real()) << "+" << fmt(v.imag()) << "i\n";
    };
  });

  // limit-sample
  SampleArgs ls;
  auto* lsc = app.add_subcommand("limit-sample", "Monte Carlo law of the limiting counts");
  ls.add(lsc);
  add_common(lsc);
  lsc->callback([&] {
    action = [&] {
      ctx.seed = std::to_string(ls.seed);
      const IntervalBox box = ls.box();
      const KDistribution dist = estimate_E(ls.c, ls.xi_class(), box, ls.n, ls.seed, threads);
      Sink sink(ctx, out_path);
      std::string cols;
      for (std::size_t j = 0; j < box.dim(); ++j) cols += "k" + std::to_string(j + 1) + ",";
      sink.csv_header(cols + "count");
      for (const auto& [k, cnt] : dist.counts) {
        for (auto kj : k) sink.stream() << kj << ',';
        sink.stream() << cnt << '\n';
      }
      summary(ctx, out_path) << "limit-sample: n=" << ls.n << " seed=" << ls.seed << " distinct=" << dist.counts.size()
                             << '\n';
    };
  });

  // limit-moments
  SampleArgs lm;
  std::vector<std::string> lm_s;
  auto* lmc = app.add_subcommand("limit-moments", "E prod_j N_j^{s_j} under the limit law (integer s_j)");
  lm.add(lmc);
  lmc->add_option("--s", lm_s, "nonnegative integer power per window (repeatable)")->required();
  add_common(lmc);
  lmc->callback([&] {
    action = [&] {
      ctx.seed = std::to_string(lm.seed);
      const IntervalBox box = lm.box();
      if (lm_s.size() != box.dim()) throw InvalidInput("need one --s per --I");
      std::vector<int> powers;
      int total = 0;
      for (const auto& s : lm_s) {
        const auto r = parse_rational(s);
        if (!r || r->denominator() != 1 || r->numerator() < 0 || r->numerator() > 16) {
          throw InvalidInput("limit moment powers must be integers in [0, 16]");
        }
        powers.push_back(static_cast<int>(r->numerator()));
        total += powers.back();
      }
      const XiClass cls = lm.xi_class();
      const LimitRun run = sample_counts(lm.c, cls, box, lm.n, lm.seed, threads);
      const auto x = run_products(run, powers);
      const double heavy = std::holds_alternative<IrrationalClass>(cls) ? 2.0 : 1.5;
      const bool mom = total >= heavy;
      const Estimate e = mom ? median_of_means(x) : mean_estimate(x);
      nlohmann::ordered_json j;
      j["powers"] = powers;
      j["class"] = to_string(cls);
      j["estimate"] = e.estimate;
      j["se"] = e.se;
      j["n"] = e.n;
      j["seed"] = lm.seed;
      j["method"] = mom ? "median_of_means" : "mean";
      write_json(ctx, out_path, j);
      summary(ctx, out_path) << "limit-moments: " << fmt(e.estimate) << " +- " << fmt(e.se) << '\n';
    };
  });

  // tails
  SampleArgs tl;
  std::string tl_window = "0:1";
  std::int64_t k_min = 5;
  std::optional<std::int64_t> k_max;
  std::uint64_t min_tail = 30;
  auto* tlc = app.add_subcommand("tails", "log-log slope of P(N >= k) under the limit law");
  tl.add(tlc, false);
  tlc->add_option("--I", tl_window, "window a:b");
  tlc->add_option("--kmin", k_min, "first k of the fit");
  tlc->add_option("--kmax", k_max, "last k of the fit (default: tail holds --min-tail samples)");
  tlc->add_option("--min-tail", min_tail, "samples required in the last fitted tail");
  add_common(tlc);
  tlc->callback([&] {
    action = [&] {
      ctx.seed = std::to_string(tl.seed);
      const XiClass cls = tl.xi_class();
      const KDistribution dist = estimate_E(tl.c, cls, IntervalBox{{parse_interval(tl_window)}}, tl.n, tl.seed, threads);
      const TailFit fit = tail_exponent(dist, k_min, k_max, min_tail);
      nlohmann::ordered_json j;
      j["class"] = to_string(cls);
      j["slope"] = fit.slope;
      j["k_min"] = fit.k_min;
      j["k_max"] = fit.k_max;
      j["points"] = fit.points;
      j["n"] = tl.n;
      j["seed"] = tl.seed;
      write_json(ctx, out_path, j);
      summary(ctx, out_path) << "tails: slope=" << fmt(fit.slope) << " over k in [" << fit.k_min << ", " << fit.k_max
                             << "]\n";
    };
  });

  // siegel
  std::string which = "classic";
  std::size_t sg_n = 100'000;
  std::uint64_t sg_seed = 1;
  auto* sg = app.add_subcommand("siegel", "Monte Carlo check of the Siegel mean value formulas");
  sg->add_option("--which", which, "classic or affine");
  sg->add_option("--n", sg_n, "number of samples");
  sg->add_option("--seed", sg_seed, "random seed");
  add_common(sg);
  sg->callback([&] {
    action = [&] {
      SiegelKind kind;
      if (which == "classic") kind = SiegelKind::classic;
      else if (which == "affine") kind = SiegelKind::affine_pair;
      else throw InvalidInput("--which must be classic or affine");
      const SiegelResult r = siegel_check(kind, sg_n, sg_seed, threads);
      nlohmann::ordered_json j;
      j["which"] = which;
      j["estimate"] = r.lhs.estimate;
      j["se"] = r.lhs.se;
      j["exact"] = r.exact;
      j["n"] = r.lhs.n;
      j["seed"] = r.seed;
      write_json(ctx, out_path, j);
      summary(ctx, out_path) << "siegel: " << fmt(r.lhs.estimate) << " +- " << fmt(r.lhs.se) << " (exact "
                             << fmt(r.exact) << ")\n";
    };
  });

  // cusp-sum
  std::string cs_xi = "cbrt4,cbrt2", cs_basis = "1,0,0,1", cs_support = "-1:1", cs_R = "2", cs_v = "1e-2";
  std::string method = "midpoint";
  double beta = 1.0, width = 1.0;
  std::size_t nquad = 4096;
  auto* cs = app.add_subcommand("cusp-sum", "horocycle integrals of the cusp function F_{R,beta}");
  cs->add_option("--xi", cs_xi, "shift vector");
  cs->add_option("--basis", cs_basis, "unimodular M as a,b,c,d");
  cs->add_option("--beta", beta, "height exponent");
  cs->add_option("--R", cs_R, "comma-separated cusp cutoffs");
  cs->add_option("--v", cs_v, "comma-separated horocycle heights");
  cs->add_option("--support", cs_support, "support a:b of the bump h");
  cs->add_option("--width", width, "Gaussian width of f");
  cs->add_option("--nquad", nquad, "quadrature points");
  cs->add_option("--method", method, "midpoint or per-coset");
  add_common(cs);
  cs->callback([&] {
    action = [&] {
      HorocycleSpec hs;
      const LongVec2 xi = parse_xi(cs_xi);
      hs.xi = {static_cast<double>(xi.x), static_cast<double>(xi.y)};
      hs.M = parse_basis(cs_basis);
      hs.support = parse_interval(cs_support);
      hs.n_quad = nquad;
      if (method == "midpoint") hs.method = HorocycleQuadrature::midpoint;
      else if (method == "per-coset") hs.method = HorocycleQuadrature::per_coset;
      else throw InvalidInput("--method must be midpoint or per-coset");
      const auto Rs = parse_reals(cs_R), vs = parse_reals(cs_v);
      Sink sink(ctx, out_path);
      sink.csv_header("R,v,integral");
      for (double R : Rs) {
        for (double v : vs) {
          hs.v = v;
          const double val = escape_integral(hs, CuspSpec{beta, R, width});
          sink.stream() << fmt(R) << ',' << fmt(v) << ',' << fmt(val) << '\n';
        }
      }
      summary(ctx, out_path) << "cusp-sum: " << Rs.size() * vs.size() << " integrals\n";
    };
  });

  // dioph
  std::string dp_xi = "cbrt4,cbrt2";
  double kappa = 2.0;
  std::int64_t radius = 200;
  auto* dp = app.add_subcommand("dioph", "minimum of |r.xi + m| (|r1| + |r2|)^kappa over a search radius");
  dp->add_option("--xi", dp_xi, "shift vector");
  dp->add_option("--kappa", kappa, "Diophantine exponent");
  dp->add_option("--radius", radius, "bound on |r1| + |r2|");
  add_common(dp);
  dp->callback([&] {
    action = [&] {
      const DiophReport r = dioph_scan(parse_xi(dp_xi), kappa, radius, threads);
      nlohmann::ordered_json j;
      j["kappa"] = r.kappa;
      j["radius"] = r.search_radius;
      j["min_value"] = r.min_value;
      j["argmin"] = r.argmin;
      write_json(ctx, out_path, j);
      summary(ctx, out_path) << "dioph: min=" << fmt(r.min_value) << " at r=(" << r.argmin[0] << "," << r.argmin[1]
                             << ") m=" << r.argmin[2] << '\n';
    };
  });

  // singular-probe
  std::string sv_xi = "1/2,1/2", sv_r = "1,1", sv_T = "250,500,1000", sv_basis = "1,0,0,1";
  std::optional<std::string> sv_n, sv_omega, sv_l;
  double eps = 0.5, sv_c = 0.0;
  auto* sv = app.add_subcommand("singular-probe",
                                "counts along a rational line, or (with --omega) build xi = n omega + l");
  sv->add_option("--xi", sv_xi, "rational shift p1/q1,p2/q2");
  sv->add_option("--r", sv_r, "integer relation vector r1,r2");
  sv->add_option("--eps", eps, "window half width");
  sv->add_option("--T", sv_T, "comma-separated dilation parameters");
  sv->add_option("--c", sv_c, "annulus parameter");
  sv->add_option("--basis", sv_basis, "unimodular basis a,b,c,d");
  sv->add_option("--n", sv_n, "integer vector n1,n2");
  sv->add_option("--omega", sv_omega, "real omega");
  sv->add_option("--l", sv_l, "rational vector l1,l2");
  add_common(sv);
  sv->callback([&] {
    action = [&] {
      if (sv_omega) {
        if (!sv_n || !sv_l) throw InvalidInput("--omega needs --n and --l");
        const auto l = parse_rational_pair(*sv_l);
        const auto n = parse_int_pair(*sv_n);
        const Vec2 xi = singular_vector(n, parse_real_ld(*sv_omega), l);
        const Rational det = Rational(n[0]) * l[1] - Rational(n[1]) * l[0];
        nlohmann::ordered_json j;
        j["xi"] = {xi.x, xi.y};
        j["det"] = std::to_string(det.numerator()) + "/" + std::to_string(det.denominator());
        write_json(ctx, out_path, j);
        summary(ctx, out_path) << "singular-probe: xi=(" << fmt(xi.x) << "," << fmt(xi.y) << ")\n";
        return;
      }
      const auto Ts = parse_reals(sv_T);
      const DivergenceProbe p = rational_divergence_probe(parse_rational_pair(sv_xi), parse_int_pair(sv_r), eps, Ts,
                                                          parse_basis(sv_basis), sv_c, EnumerateOptions{200'000'000, threads});
      Sink sink(ctx, out_path);
      sink.csv_header("T,count");
      for (std::size_t i = 0; i < Ts.size(); ++i) sink.stream() << fmt(Ts[i]) << ',' << p.counts[i] << '\n';
      summary(ctx, out_path) << "singular-probe: alpha_r=" << fmt(p.alpha_r) << '\n';
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  if (threads == 0) threads = 1;
  try {
    action();
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace latdir::cli
