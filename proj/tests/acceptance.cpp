// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "blender/blender.hpp"
#include "support.hpp"

using namespace blender;
namespace fs = std::filesystem;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }

struct Outcome {
    bool ok = true;
    std::string note;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            note = what;
        }
    }
};

int failures = 0;

void run(const char* id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && limit_s > 0 && secs >= limit_s) o = {false, "over time limit of " + std::to_string(limit_s) + " s"};
    if (!o.ok) ++failures;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(3);
    line << (o.ok ? "[PASS] " : "[FAIL] ") << id << ' ' << title << " (" << secs << " s)";
    if (!o.note.empty()) line << ": " << o.note;
    std::cout << line.str() << std::endl;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool satisfies_gap(const CheckpointPair& p, std::size_t N) {
    return p.n1 >= N && p.n2 >= N && abs(p.avg1 - p.avg2) > q(1, 2);
}

Outcome covering_defaults() {
    Outcome o;
    const SkewSystem sys = build_system(SystemParams{});
    const CoveringCertificate c = check_covering(sys.ifs(), sys.region());
    o.require(c.covered, "not covered");
    o.require(c.images.size() == 2 && c.images[0] == Interval::open(q(1, 150), q(33, 50)) &&
                  c.images[1] == Interval::open(q(17, 50), q(149, 150)),
              "images differ");
    o.require(c.lebesgue_number && *c.lebesgue_number == q(4, 25), "L != 4/25");
    const Interval k = sys.region().closure();
    bool all = true;
    for (const Rational& x : testing::grid(k.lo(), k.hi(), 9999)) all = all && testing::member_any(c.images, x);
    o.require(all == c.covered, "grid oracle disagrees on coverage");
    // Spacing 1/10000 on cl B = [1/100, 99/100] puts the overlap midpoint 1/2 on the grid.
    o.require(testing::grid_lebesgue(c.images, k, 9800) == *c.lebesgue_number, "grid oracle disagrees on L");
    o.note = o.ok ? "L = " + c.lebesgue_number->str() : o.note;
    return o;
}

Outcome covering_threshold() {
    Outcome o;
    const auto covered = [](const Rational& eps) {
        SystemParams p;
        p.eps = eps;
        const AffineIFS ifs({AffineMap{Rational(1) / p.lambda, Rational(0)}, AffineMap{Rational(1) / p.lambda, p.mu / p.lambda}});
        const Rational right = (p.mu + 1) / p.lambda - eps;
        if (!(eps < right)) return false;
        return check_covering(ifs, Interval::open(eps, right)).covered;
    };
    for (long k = 1; k <= 300; ++k) {
        const Rational eps(k, 1000);
        o.require(covered(eps) == (eps < q(1, 4)), "flip not at 1/4 for eps " + eps.str());
    }
    Rational lo = q(1, 100), hi = q(3, 10);
    o.require(covered(lo) && !covered(hi), "bracket does not straddle the flip");
    const Rational tol(1, 1000000);
    while (hi - lo >= tol) {
        const Rational mid = (lo + hi) / Rational(2);
        (covered(mid) ? lo : hi) = mid;
    }
    o.require(lo < q(1, 4) && q(1, 4) <= hi, "bisection bracket misses 1/4");
    if (o.ok) o.note = "boundary in [" + io::decimal(lo) + ", " + io::decimal(hi) + "]";
    return o;
}

Outcome historic(std::size_t depth) {
    Outcome o;
    const SkewSystem sys = build_system(SystemParams{});
    const ObservableSpec spec = ObservableSpec::defaults_for(sys.params());
    const Schedule s = make_schedule(10, depth, q(1, 100), transit_bounds(sys, spec));
    const HistoricCertificate cert = construct_historic_point(sys, spec, s);
    o.require(cert.pairs.size() == depth, "expected " + std::to_string(depth) + " pair(s)");
    for (const CheckpointPair& p : cert.pairs) o.require(satisfies_gap(p, 10), "pair fails the 1/2 gap");
    if (depth == 1 && !cert.pairs.empty()) {
        const CheckpointPair& p = cert.pairs.front();
        o.require(p.avg1 > q(7, 8), "avg1 <= 7/8");
        o.require(p.avg2 < q(1, 8), "avg2 >= 1/8");
        o.require(cert.gap > q(3, 4), "gap <= 3/4");
    }
    o.require(cert.horizon() <= 100000, "horizon above 1e5");
    const Verdict v = verify_certificate(sys, spec, cert);
    o.require(v.passed, "replay rejected: " + v.reason);
    if (o.ok) o.note = "horizon " + std::to_string(cert.horizon()) + ", gap ~ " + io::decimal(cert.gap);
    return o;
}

Outcome invariance_endurance() {
    Outcome o;
    testing::Gen gen(20240607);
    std::size_t steps = 0;
    for (int uu = 1; uu <= 2 && o.ok; ++uu) {
        SystemParams p;
        p.uu_dim = uu;
        const SkewSystem sys = build_system(p);
        const InvarianceStepper stepper(sys);
        const Rational L = stepper.lebesgue_number();
        const Interval b = sys.region();
        for (int disc = 0; disc < 500 && o.ok; ++disc) {
            // Lipschitz budget c < L/2 keeps the range width 2c below L.
            const Rational c = gen.rational(Rational(0), L / Rational(2), 1000) * q(999, 1000);
            std::vector<Rational> slopes;
            Rational left = c;
            for (int k = 0; k < uu; ++k) {
                const Rational a = k + 1 == uu ? left : gen.rational(Rational(0), left);
                left -= a;
                slopes.push_back(gen.coin() ? a : -a);
            }
            const Rational center = gen.rational(b.lo() + c, b.hi() - c, 100000);
            VerticalDisc d({gen.rational(q(-1), q(1))}, center, slopes);
            if (!stepper.admissible(d)) {
                o.require(false, "generator produced an inadmissible disc");
                break;
            }
            for (int t = 0; t < 1000; ++t) {
                auto [symbol, next] = stepper.step(d);
                ++steps;
                if (!b.contains(next.fiber_range()) || !stepper.admissible(next)) {
                    o.require(false, "disc " + std::to_string(disc) + " left B at step " + std::to_string(t));
                    break;
                }
                d = std::move(next);
            }
        }
    }
    if (o.ok) o.note = std::to_string(steps) + " steps";
    return o;
}

Outcome hyperbolicity() {
    Outcome o;
    SystemParams p;
    const HyperbolicityReport h = hyperbolicity_report(build_system(p));
    o.require(h.chain_holds, "chain fails at defaults");
    o.require(h.norm_s == q(1, 3) && h.norm_cu == q(3, 2) && h.conorm_uu == q(3), "norms differ");
    p.lambda = p.rho;
    o.require(!hyperbolicity_report(p).chain_holds, "chain holds with lambda = rho");
    return o;
}

Outcome distal() {
    Outcome o;
    const SkewSystem sys = build_system(SystemParams{});
    const DistalReport d = distal_report(sys, q(1, 200));
    o.require(d.is_distal, "not distal");
    o.require(d.distance_to_family == q(1, 100), "distance " + d.distance_to_family.str());
    o.require(d.witness_word == Word::repeat(1, 6), "witness " + d.witness_word.str());
    return o;
}

Outcome negative_controls() {
    Outcome o;
    const SkewSystem sys = build_system(SystemParams{});
    const ObservableSpec spec = ObservableSpec::defaults_for(sys.params());
    for (std::size_t N : {1u, 10u, 1000u})
        o.require(!detect_historic(sys, spec, sys.fixed_point(), N, 10000), "witness found on P");

    const HistoricCertificate good =
        construct_historic_point(sys, spec, make_schedule(10, 1, q(1, 100), transit_bounds(sys, spec)));
    o.require(verify_certificate(sys, spec, good).passed, "untampered certificate rejected");
    std::vector<std::pair<std::string, std::function<void(HistoricCertificate&)>>> edits = {
        {"avg1", [](HistoricCertificate& c) { c.pairs[0].avg1 += q(1, 1000000); }},
        {"avg2", [](HistoricCertificate& c) { c.pairs[0].avg2 -= q(1, 1000000); }},
        {"n1", [](HistoricCertificate& c) { c.pairs[0].n1 += 1; }},
        {"n2", [](HistoricCertificate& c) { c.pairs[0].n2 -= 1; }},
        {"gap", [](HistoricCertificate& c) { c.gap += q(1, 1000); }},
        {"N", [](HistoricCertificate& c) { c.N = 1000; }},
        {"fiber", [](HistoricCertificate& c) { c.chosen_point.fiber += q(1, 1000000); }},
        {"base_s", [](HistoricCertificate& c) { c.chosen_point.base_s[0] += q(1, 1000); }},
        {"base_uu", [](HistoricCertificate& c) { c.chosen_point.base_uu[0] = q(1); }},
        {"params.lambda", [](HistoricCertificate& c) { c.params.lambda = q(7, 5); }},
        {"params.eps", [](HistoricCertificate& c) { c.params.eps = q(1, 50); }},
        {"observable.one", [](HistoricCertificate& c) { c.observable.one = q(1, 1000); }},
        {"realized_blocks", [](HistoricCertificate& c) { c.realized_blocks[1].length += 1; }},
        {"schedule.checkpoint", [](HistoricCertificate& c) { c.schedule.checkpoints[0].n += 1; }},
        {"word", [](HistoricCertificate& c) {
             std::vector<int> s = c.constraint.word.symbols();
             s[40] = 3 - s[40];
             c.constraint.word = Word(s);
         }},
        {"start_enclosure", [](HistoricCertificate& c) {
             c.constraint.start_enclosure = Interval::point(c.constraint.start_enclosure.hi() + q(1));
         }},
    };
    for (const auto& [field, edit] : edits) {
        HistoricCertificate c = good;
        edit(c);
        o.require(!verify_certificate(sys, spec, c).passed, "tampered " + field + " accepted");
    }
    if (o.ok) o.note = std::to_string(edits.size()) + " single-field tamperings rejected";
    return o;
}

Outcome determinism() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "blender_acceptance";
    fs::create_directories(dir);
    std::string certs[2], csvs[2];
    for (int run = 0; run < 2; ++run) {
        cli::ConstructOptions c;
        c.common.reproducible = true;
        c.certificate_path = (dir / ("cert" + std::to_string(run) + ".json")).string();
        c.csv_path = (dir / ("orbit" + std::to_string(run) + ".csv")).string();
        std::ostringstream out, err;
        o.require(cli::cmd_construct(c, out, err) == cli::kOk, "construct failed: " + err.str());
        certs[run] = slurp(c.certificate_path);
        csvs[run] = slurp(c.csv_path);
    }
    fs::remove_all(dir);
    o.require(!certs[0].empty() && certs[0] == certs[1], "certificates differ");
    o.require(csvs[0] == csvs[1], "csv files differ");
    return o;
}

}  // namespace

int main() {
    run("AC1", "covering certification at defaults", 1.0, covering_defaults);
    run("AC2", "covering threshold at eps = 1/4", 10.0, covering_threshold);
    run("AC3", "historic construction, N=10, depth 1", 10.0, [] { return historic(1); });
    run("AC4", "historic construction, N=10, depth 3", 300.0, [] { return historic(3); });
    run("AC5", "strict invariance endurance, 1000 discs x 1000 steps", 0, invariance_endurance);
    run("AC6", "hyperbolicity chain", 0, hyperbolicity);
    run("AC7", "distal certification at defaults", 0, distal);
    run("AC8", "negative controls", 0, negative_controls);
    run("AC9", "reproducible construct output", 0, determinism);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
