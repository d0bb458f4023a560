#include "hyplab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace hyplab {

namespace {

using nlohmann::json;

constexpr double kFactorizationTol = 1e-12;

// periodic-dichotomy constants, tuned so the period map splits into an
// expanding cluster of four (|lambda| ~ 4.45) against a contracting rest
// (|lambda| <= 0.86), log-margin ~ 0.15 at reference resolution. The eps
// shift lowers both diagonals, so the margin only widens along the sweep.
constexpr double kPdSpeed = 2.0;
constexpr double kPdGain1 = -4.0;   // diagonal b for the expanding component
constexpr double kPdGain2 = 1.0;    // diagonal b for the contracting component
constexpr double kPdRipple = 0.25;  // 2d-periodic ripple on both diagonals
constexpr double kPdCoupling12 = 0.75;
constexpr double kPdCoupling21 = 1.7;
constexpr double kPdReflection = 0.6;
constexpr double kPdEpsShift = 0.8;  // eps * shift applied to both diagonals
constexpr double kPdPeriod = 2.0;    // equals 2d for this scenario
constexpr double kPdEps0 = 0.25;

}  // namespace

double Scenario::b_eval(int j, int k, double x, double t, double eps) const {
    if (j == k) return b_diag[j].eval(x, t, eps);
    const CoefficientSeries* g = gamma_at(j, k);
    if (g == nullptr) return 0.0;
    return g->eval(x, t, eps) * (a[k].eval(x, t, eps) - a[j].eval(x, t, eps));
}

double Scenario::b_dt(int j, int k, double x, double t, double eps) const {
    if (j == k) return b_diag[j].dt(x, t, eps);
    const CoefficientSeries* g = gamma_at(j, k);
    if (g == nullptr) return 0.0;
    const double diff = a[k].eval(x, t, eps) - a[j].eval(x, t, eps);
    const double ddiff = a[k].dt(x, t, eps) - a[j].dt(x, t, eps);
    return g->dt(x, t, eps) * diff + g->eval(x, t, eps) * ddiff;
}

double Scenario::b_deps(int j, int k, double x, double t, double eps) const {
    if (j == k) return b_diag[j].deps(x, t);
    const CoefficientSeries* g = gamma_at(j, k);
    if (g == nullptr) return 0.0;
    const double diff = a[k].eval(x, t, eps) - a[j].eval(x, t, eps);
    const double ddiff = a[k].deps(x, t) - a[j].deps(x, t);
    return g->deps(x, t) * diff + g->eval(x, t, eps) * ddiff;
}

const CoefficientSeries* Scenario::gamma_at(int j, int k) const {
    auto it = gamma.find({j, k});
    return it == gamma.end() ? nullptr : &it->second;
}

const CoefficientSeries* Scenario::beta_at(int j, int k) const {
    auto it = beta.find({j, k});
    return it == beta.end() ? nullptr : &it->second;
}

double Scenario::reflection_coeff(int j, int k, double t) const {
    const CoefficientSeries& row =
        rightward(j) ? p[j][k] : q[j - m][k];
    return row.eval(0.0, t, 0.0);
}

bool Scenario::reflection_nonzero(int j, int k) const {
    const CoefficientSeries& row = rightward(j) ? p[j][k] : q[j - m][k];
    return !row.is_zero();
}

bool Scenario::reflection_all_zero() const {
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (reflection_nonzero(j, k)) return false;
    return true;
}

bool Scenario::b_offdiag_all_zero() const {
    for (const auto& [jk, g] : gamma)
        if (!g.is_zero()) return false;
    return true;
}

double Scenario::max_period() const {
    double period = 0.0;
    auto scan = [&period](const CoefficientSeries& s) { period = std::max(period, s.max_period()); };
    for (const auto& s : a) scan(s);
    for (const auto& s : b_diag) scan(s);
    for (const auto& [jk, s] : gamma) scan(s);
    for (const auto& [jk, s] : beta) scan(s);
    for (const auto& row : p)
        for (const auto& s : row) scan(s);
    for (const auto& row : q)
        for (const auto& s : row) scan(s);
    return period;
}

void Scenario::check_structure() const {
    if (n < 1) throw StructuralError("n", "need n >= 1");
    if (m < 0 || m > n) throw StructuralError("m", "need 0 <= m <= n");
    if (!(eps0 > 0.0)) throw StructuralError("eps0", "need eps0 > 0");
    if (static_cast<int>(a.size()) != n) throw StructuralError("a", "expected n series");
    if (static_cast<int>(b_diag.size()) != n) throw StructuralError("b_diag", "expected n series");
    if (static_cast<int>(p.size()) != m) throw StructuralError("p", "expected m rows");
    for (const auto& row : p)
        if (static_cast<int>(row.size()) != n) throw StructuralError("p", "expected n columns per row");
    if (static_cast<int>(q.size()) != n - m) throw StructuralError("q", "expected n-m rows");
    for (const auto& row : q)
        if (static_cast<int>(row.size()) != n) throw StructuralError("q", "expected n columns per row");
    auto check_offdiag = [this](const char* field,
                                const std::map<std::pair<int, int>, CoefficientSeries>& entries) {
        for (const auto& [jk, s] : entries) {
            (void)s;
            if (jk.first < 0 || jk.first >= n || jk.second < 0 || jk.second >= n ||
                jk.first == jk.second)
                throw StructuralError(field, "entries must have 0 <= j != k < n");
        }
    };
    check_offdiag("gamma", gamma);
    check_offdiag("beta", beta);
    for (const auto& row : p)
        for (const auto& s : row)
            if (!s.x_independent() || !s.eps_independent())
                throw StructuralError("p", "boundary coefficients must depend on t only");
    for (const auto& row : q)
        for (const auto& s : row)
            if (!s.x_independent() || !s.eps_independent())
                throw StructuralError("q", "boundary coefficients must depend on t only");
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " extremal=" << c.extremal;
        if (!c.detail.empty()) os << " (" << c.detail << ")";
        os << "\n";
    }
    os << (pass ? "overall: pass" : "overall: FAIL") << "\n";
    return os.str();
}

namespace {

struct SampleGrid {
    std::vector<double> xs, ts, eps;
};

SampleGrid make_grid(const Scenario& spec, int density) {
    if (density < 2) throw DomainError("sample density must be >= 2");
    SampleGrid g;
    const double t_window = std::max(1.0, spec.max_period());
    g.xs.resize(density);
    g.ts.resize(density);
    for (int i = 0; i < density; ++i) {
        g.xs[i] = static_cast<double>(i) / (density - 1);
        g.ts[i] = t_window * static_cast<double>(i) / (density - 1);
    }
    g.eps = {0.0, spec.eps0 / 2.0, spec.eps0};
    return g;
}

}  // namespace

ValidationReport validate(const Scenario& spec, int sample_density) {
    spec.check_structure();
    const SampleGrid grid = make_grid(spec, sample_density);

    ValidationReport report;
    report.sample_density = sample_density;
    report.t_window = grid.ts.back();
    report.eps_samples = grid.eps;

    // Sign condition on the speeds.
    {
        AssumptionCheck c{"speed_sign", "", std::numeric_limits<double>::infinity(), true};
        std::ostringstream bad;
        for (int j = 0; j < spec.n; ++j) {
            double worst = spec.rightward(j) ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity();
            for (double x : grid.xs)
                for (double t : grid.ts)
                    for (double e : grid.eps) {
                        const double v = spec.a_eval(j, x, t, e);
                        worst = spec.rightward(j) ? std::min(worst, v) : std::max(worst, v);
                    }
            const bool ok = spec.rightward(j) ? worst > 0.0 : worst < 0.0;
            if (!ok) {
                c.pass = false;
                bad << (bad.tellp() > 0 ? "," : "") << "j=" << (j + 1);
            }
            c.extremal = std::min(c.extremal, spec.rightward(j) ? worst : -worst);
        }
        if (!c.pass) c.detail = "violated for " + bad.str();
        report.checks.push_back(c);
    }

    // Separation from zero.
    {
        AssumptionCheck c{"speed_separation", "min sampled |a_j|",
                          std::numeric_limits<double>::infinity(), true};
        for (int j = 0; j < spec.n; ++j)
            for (double x : grid.xs)
                for (double t : grid.ts)
                    for (double e : grid.eps)
                        c.extremal = std::min(c.extremal, std::abs(spec.a_eval(j, x, t, e)));
        c.pass = c.extremal > 0.0;
        report.checks.push_back(c);
    }

    // Sampled sup bounds; pass means the sampled bound is finite.
    {
        AssumptionCheck c{"speed_bounds", "sup of |a|, |da/dx|, |da/dt|, |da/deps|", 0.0, true};
        for (int j = 0; j < spec.n; ++j)
            for (double x : grid.xs)
                for (double t : grid.ts)
                    for (double e : grid.eps) {
                        c.extremal = std::max({c.extremal, std::abs(spec.a_eval(j, x, t, e)),
                                               std::abs(spec.a_dx(j, x, t, e)),
                                               std::abs(spec.a_dt(j, x, t, e)),
                                               std::abs(spec.a_deps(j, x, t))});
                    }
        c.pass = std::isfinite(c.extremal);
        report.checks.push_back(c);
    }
    {
        AssumptionCheck c{"coupling_bounds", "sup of |p|, |q|, |b|, |db/deps|, |db/dt|", 0.0, true};
        for (int j = 0; j < spec.n; ++j)
            for (int k = 0; k < spec.n; ++k) {
                for (double t : grid.ts)
                    c.extremal = std::max(c.extremal, std::abs(spec.reflection_coeff(j, k, t)));
                for (double x : grid.xs)
                    for (double t : grid.ts)
                        for (double e : grid.eps)
                            c.extremal = std::max({c.extremal, std::abs(spec.b_eval(j, k, x, t, e)),
                                                   std::abs(spec.b_deps(j, k, x, t, e)),
                                                   std::abs(spec.b_dt(j, k, x, t, e))});
            }
        c.pass = std::isfinite(c.extremal);
        report.checks.push_back(c);
    }
    {
        AssumptionCheck c{"factor_bounds", "sup of |dbeta/dx|, |dbeta/dt|, |dgamma/dx|, |dgamma/dt|",
                          0.0, true};
        auto scan = [&](const std::map<std::pair<int, int>, CoefficientSeries>& entries) {
            for (const auto& [jk, s] : entries) {
                (void)jk;
                for (double x : grid.xs)
                    for (double t : grid.ts)
                        for (double e : grid.eps)
                            c.extremal = std::max({c.extremal, std::abs(s.dx(x, t, e)),
                                                   std::abs(s.dt(x, t, e))});
            }
        };
        scan(spec.gamma);
        scan(spec.beta);
        c.pass = std::isfinite(c.extremal);
        report.checks.push_back(c);
    }

    // Factorization residuals for off-diagonal b.
    {
        AssumptionCheck cg{"factorization_gamma", "max |b_jk - gamma_jk (a_k - a_j)|", 0.0, true};
        AssumptionCheck cb{"factorization_beta",
                           "max |b_jk(.,0) - beta_jk(.,eps) (a_k(.,eps) - a_j(.,0))|", 0.0, true};
        for (int j = 0; j < spec.n; ++j)
            for (int k = 0; k < spec.n; ++k) {
                if (j == k) continue;
                const CoefficientSeries* g = spec.gamma_at(j, k);
                const CoefficientSeries* be = spec.beta_at(j, k);
                for (double x : grid.xs)
                    for (double t : grid.ts)
                        for (double e : grid.eps) {
                            const double bjk = spec.b_eval(j, k, x, t, e);
                            const double gv = g == nullptr ? 0.0 : g->eval(x, t, e);
                            const double rg = std::abs(
                                bjk - gv * (spec.a_eval(k, x, t, e) - spec.a_eval(j, x, t, e)));
                            cg.extremal = std::max(cg.extremal, rg);
                            const double b0 = spec.b_eval(j, k, x, t, 0.0);
                            const double bv = be == nullptr ? 0.0 : be->eval(x, t, e);
                            const double rb = std::abs(
                                b0 - bv * (spec.a_eval(k, x, t, e) - spec.a_eval(j, x, t, 0.0)));
                            cb.extremal = std::max(cb.extremal, rb);
                        }
            }
        cg.pass = cg.extremal <= kFactorizationTol;
        cb.pass = cb.extremal <= kFactorizationTol;
        report.checks.push_back(cg);
        report.checks.push_back(cb);
    }

    report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const AssumptionCheck& c) { return c.pass; });
    return report;
}

double transit_max(const Scenario& spec, int sample_density) {
    const SampleGrid grid = make_grid(spec, std::max(sample_density, 2));
    double worst = 0.0;
    for (int j = 0; j < spec.n; ++j) {
        // Trapezoid over xi of the pointwise-in-xi worst case of 1/|a_j|.
        double integral = 0.0;
        double prev = 0.0;
        for (std::size_t i = 0; i < grid.xs.size(); ++i) {
            double slow = 0.0;
            for (double t : grid.ts)
                for (double e : grid.eps)
                    slow = std::max(slow, 1.0 / std::abs(spec.a_eval(j, grid.xs[i], t, e)));
            if (i > 0) integral += 0.5 * (prev + slow) * (grid.xs[i] - grid.xs[i - 1]);
            prev = slow;
        }
        worst = std::max(worst, integral);
    }
    return worst;
}

double max_speed(const Scenario& spec, int sample_density) {
    const SampleGrid grid = make_grid(spec, std::max(sample_density, 2));
    double worst = 0.0;
    for (int j = 0; j < spec.n; ++j)
        for (double x : grid.xs)
            for (double t : grid.ts)
                for (double e : grid.eps)
                    worst = std::max(worst, std::abs(spec.a_eval(j, x, t, e)));
    return worst;
}

namespace {

CoefficientSeries zero_series() { return CoefficientSeries(); }

std::vector<std::vector<CoefficientSeries>> zero_rows(int rows, int cols) {
    return std::vector<std::vector<CoefficientSeries>>(
        rows, std::vector<CoefficientSeries>(cols, zero_series()));
}

SeriesTerm cos_term(double c0, double c_eps, double period, int harmonic = 1) {
    SeriesTerm t;
    t.kind = TermKind::PolyCos;
    t.ct = harmonic;
    t.period = period;
    t.coeff0 = c0;
    t.coeff_eps = c_eps;
    return t;
}

Scenario base_2x2() {
    Scenario s;
    s.n = 2;
    s.m = 1;
    s.eps0 = 0.1;
    s.a = {CoefficientSeries::constant(1.0), CoefficientSeries::constant(-1.0)};
    s.b_diag = {zero_series(), zero_series()};
    s.p = zero_rows(1, 2);
    s.q = zero_rows(1, 2);
    return s;
}

}  // namespace

Scenario catalog(const std::string& name) {
    if (name == "decoupled-extinction") {
        // No coupling anywhere, so the factorization constraints are vacuous
        // and the speeds can carry the full eps-dependence of the family.
        Scenario s = base_2x2();
        s.id = name;
        s.eps0 = 0.25;
        SeriesTerm a10;
        a10.coeff0 = 1.0;
        a10.coeff_eps = 0.2;
        SeriesTerm a11;
        a11.cx = 1;
        a11.coeff_eps = 0.1;
        s.a[0] = CoefficientSeries({a10, a11});
        s.a[1] = CoefficientSeries::constant(-1.0, -0.15);
        return s;
    }
    if (name == "feedback-2x2") {
        // Reflection chain 2 -> 1 only, so (reflection o transport)^2 vanishes.
        Scenario s = base_2x2();
        s.id = name;
        s.p[0][1] = CoefficientSeries::constant(0.5);
        return s;
    }
    if (name == "kinetics-2x2") {
        // feedback-2x2 plus two-way zero-order coupling, which keeps the
        // dynamics alive past the reflection window. The speeds stay
        // eps-free, so beta = gamma at eps = 0 satisfies the factorization
        // exactly while b and gamma carry the perturbation.
        Scenario s = base_2x2();
        s.id = name;
        s.eps0 = 0.25;
        s.b_diag[0] = CoefficientSeries::constant(0.3, 0.15);
        s.b_diag[1] = CoefficientSeries::constant(-0.2, 0.1);
        s.p[0][1] = CoefficientSeries::constant(0.5);
        s.gamma[{0, 1}] = CoefficientSeries::constant(0.3, 0.2);
        s.gamma[{1, 0}] = CoefficientSeries::constant(-0.25);
        s.beta[{0, 1}] = s.gamma.at({0, 1}).at_eps_zero();
        s.beta[{1, 0}] = s.gamma.at({1, 0}).at_eps_zero();
        return s;
    }
    if (name == "periodic-dichotomy") {
        // Counter-flowing pair with strong diagonal gain/loss, cross coupling
        // through gamma, and a terminating reflection chain. Coefficients are
        // periodic with period 2d = 2 transitMax * k = 2.
        Scenario s;
        s.id = name;
        s.n = 2;
        s.m = 1;
        s.eps0 = kPdEps0;
        s.a = {CoefficientSeries::constant(kPdSpeed), CoefficientSeries::constant(-kPdSpeed)};
        SeriesTerm g1;
        g1.coeff0 = kPdGain1;
        g1.coeff_eps = kPdEpsShift;
        SeriesTerm g2;
        g2.coeff0 = kPdGain2;
        g2.coeff_eps = kPdEpsShift;
        s.b_diag = {
            CoefficientSeries({g1, cos_term(kPdRipple, 0.0, kPdPeriod)}),
            CoefficientSeries({g2, cos_term(kPdRipple, 0.0, kPdPeriod)}),
        };
        s.p = zero_rows(1, 2);
        s.q = zero_rows(1, 2);
        s.p[0][1] = CoefficientSeries::constant(kPdReflection);
        s.gamma[{0, 1}] = CoefficientSeries::constant(kPdCoupling12);
        s.gamma[{1, 0}] = CoefficientSeries::constant(kPdCoupling21);
        s.beta[{0, 1}] = s.gamma.at({0, 1}).at_eps_zero();
        s.beta[{1, 0}] = s.gamma.at({1, 0}).at_eps_zero();
        return s;
    }
    throw LookupError("unknown catalog scenario '" + name + "'");
}

std::vector<std::string> catalog_names() {
    return {"decoupled-extinction", "feedback-2x2", "periodic-dichotomy", "kinetics-2x2"};
}

double apriori_cap(const std::string& scenario_id, double T) {
    // base * exp(rate * T), measured once at reference resolution (N = 200)
    // and frozen with a factor-2 headroom.
    struct Cap {
        double base, rate;
    };
    // Measured worst ratios at N = 200 over sine/constant/hat data and
    // eps in {0, eps0}: 1.00, 1.00, 1.76, and 5.32 * exp(0.86 (T - 1)).
    static const std::map<std::string, Cap> caps = {
        {"decoupled-extinction", {1.0 + 1e-9, 0.0}},
        {"feedback-2x2", {1.05, 0.0}},
        {"kinetics-2x2", {2.6, 0.0}},
        {"periodic-dichotomy", {4.5, 0.9}},
    };
    auto it = caps.find(scenario_id);
    if (it == caps.end())
        throw LookupError("no recorded amplification cap for scenario '" + scenario_id + "'");
    return it->second.base * std::exp(it->second.rate * T);
}

// ---------------------------------------------------------------------------
// JSON scenario files
// ---------------------------------------------------------------------------

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end())
            throw ParseError("unknown key '" + it.key() + "' in " + where);
    }
}

SeriesTerm parse_term(const json& jt, const std::string& where) {
    if (!jt.is_object()) throw ParseError("term must be an object in " + where);
    reject_unknown_keys(jt, {"cx", "ct", "kind", "coeff0", "coeffEps", "period"}, where);
    SeriesTerm term;
    term.cx = jt.at("cx").get<int>();
    term.ct = jt.at("ct").get<int>();
    term.kind = term_kind_from_string(jt.at("kind").get<std::string>());
    term.coeff0 = jt.at("coeff0").get<double>();
    term.coeff_eps = jt.at("coeffEps").get<double>();
    if (term.kind == TermKind::PolyPoly) {
        if (jt.contains("period"))
            throw ParseError("'period' is only valid for trigonometric terms in " + where);
    } else {
        if (!jt.contains("period"))
            throw ParseError("trigonometric term requires 'period' in " + where);
        term.period = jt.at("period").get<double>();
        if (!(term.period > 0.0)) throw ParseError("'period' must be positive in " + where);
    }
    return term;
}

CoefficientSeries parse_series(const json& js, const std::string& where) {
    if (!js.is_array()) throw ParseError("series must be an array of terms in " + where);
    std::vector<SeriesTerm> terms;
    terms.reserve(js.size());
    for (const auto& jt : js) terms.push_back(parse_term(jt, where));
    try {
        return CoefficientSeries(std::move(terms));
    } catch (const StructuralError& e) {
        throw ParseError(std::string(e.what()) + " in " + where);
    }
}

json term_to_json(const SeriesTerm& term) {
    json jt;
    jt["cx"] = term.cx;
    jt["ct"] = term.ct;
    jt["kind"] = to_string(term.kind);
    jt["coeff0"] = term.coeff0;
    jt["coeffEps"] = term.coeff_eps;
    if (term.kind != TermKind::PolyPoly) jt["period"] = term.period;
    return jt;
}

json series_to_json(const CoefficientSeries& s) {
    json arr = json::array();
    for (const auto& term : s.terms()) arr.push_back(term_to_json(term));
    return arr;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("scenario file must contain a JSON object");
    reject_unknown_keys(root, {"id", "n", "m", "eps0", "a", "b_diag", "gamma", "beta", "p", "q"},
                        "scenario");

    Scenario s;
    if (root.contains("id")) s.id = root.at("id").get<std::string>();
    s.n = root.at("n").get<int>();
    s.m = root.at("m").get<int>();
    s.eps0 = root.at("eps0").get<double>();

    auto parse_series_list = [&](const char* key, int count) {
        const json& arr = root.at(key);
        if (!arr.is_array() || static_cast<int>(arr.size()) != count)
            throw ParseError(std::string("'") + key + "' must be an array of " +
                             std::to_string(count) + " series");
        std::vector<CoefficientSeries> out;
        for (int i = 0; i < count; ++i)
            out.push_back(parse_series(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
        return out;
    };
    s.a = parse_series_list("a", s.n);
    s.b_diag = parse_series_list("b_diag", s.n);

    auto parse_offdiag = [&](const char* key) {
        std::map<std::pair<int, int>, CoefficientSeries> out;
        if (!root.contains(key)) return out;
        const json& arr = root.at(key);
        if (!arr.is_array()) throw ParseError(std::string("'") + key + "' must be an array");
        for (const auto& entry : arr) {
            reject_unknown_keys(entry, {"j", "k", "terms"}, key);
            const int j = entry.at("j").get<int>();
            const int k = entry.at("k").get<int>();
            if (j < 1 || j > s.n || k < 1 || k > s.n || j == k)
                throw ParseError(std::string("'") + key + "' entries need 1 <= j != k <= n");
            out[{j - 1, k - 1}] =
                parse_series(entry.at("terms"), std::string(key) + "(" + std::to_string(j) + "," +
                                                    std::to_string(k) + ")");
        }
        return out;
    };
    s.gamma = parse_offdiag("gamma");
    s.beta = parse_offdiag("beta");
    // Default companion factor: gamma restricted to eps = 0. Exact whenever
    // a_k(.,eps) - a_j(.,0) does not actually depend on eps; the validator
    // checks the residual either way.
    for (const auto& [jk, g] : s.gamma)
        if (s.beta.find(jk) == s.beta.end()) s.beta[jk] = g.at_eps_zero();

    auto parse_rows = [&](const char* key, int rows) {
        const json& arr = root.at(key);
        if (!arr.is_array() || static_cast<int>(arr.size()) != rows)
            throw ParseError(std::string("'") + key + "' must be an array of " +
                             std::to_string(rows) + " rows");
        std::vector<std::vector<CoefficientSeries>> out;
        for (int r = 0; r < rows; ++r) {
            const json& row = arr[r];
            if (!row.is_array() || static_cast<int>(row.size()) != s.n)
                throw ParseError(std::string("'") + key + "' rows must have n entries");
            std::vector<CoefficientSeries> series_row;
            for (int c = 0; c < s.n; ++c)
                series_row.push_back(parse_series(
                    row[c], std::string(key) + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                "]"));
            out.push_back(std::move(series_row));
        }
        return out;
    };
    s.p = parse_rows("p", s.m);
    s.q = parse_rows("q", s.n - s.m);

    s.check_structure();
    return s;
}

std::string scenario_to_json_text(const Scenario& spec) {
    json root;
    root["id"] = spec.id;
    root["n"] = spec.n;
    root["m"] = spec.m;
    root["eps0"] = spec.eps0;
    root["a"] = json::array();
    for (const auto& s : spec.a) root["a"].push_back(series_to_json(s));
    root["b_diag"] = json::array();
    for (const auto& s : spec.b_diag) root["b_diag"].push_back(series_to_json(s));
    auto offdiag_to_json = [](const std::map<std::pair<int, int>, CoefficientSeries>& entries) {
        json arr = json::array();
        for (const auto& [jk, s] : entries) {
            json e;
            e["j"] = jk.first + 1;
            e["k"] = jk.second + 1;
            e["terms"] = series_to_json(s);
            arr.push_back(e);
        }
        return arr;
    };
    root["gamma"] = offdiag_to_json(spec.gamma);
    root["beta"] = offdiag_to_json(spec.beta);
    auto rows_to_json = [](const std::vector<std::vector<CoefficientSeries>>& rows) {
        json arr = json::array();
        for (const auto& row : rows) {
            json jrow = json::array();
            for (const auto& s : row) jrow.push_back(series_to_json(s));
            arr.push_back(jrow);
        }
        return arr;
    };
    root["p"] = rows_to_json(spec.p);
    root["q"] = rows_to_json(spec.q);
    return root.dump(2);
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LookupError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    Scenario s = scenario_from_json_text(buf.str());
    if (s.id == "custom") s.id = path;
    return s;
}

void save_scenario_file(const Scenario& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write scenario file '" + path + "'");
    out << scenario_to_json_text(spec) << "\n";
}

Scenario resolve_scenario(const std::string& name_or_path) {
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end())
        return catalog(name_or_path);
    return load_scenario_file(name_or_path);
}

}  // namespace hyplab
