// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fracgrad/fracgrad.hpp"

using namespace fracgrad;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

ScalarField random_field(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(g);
    for (auto& v : f.values) v = u(rng);
    return f;
}

double sup_relative(const ScalarField& a, const ScalarField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num = std::max(num, std::abs(a.values[i] - b.values[i]));
        den = std::max(den, std::abs(b.values[i]));
    }
    return num / den;
}

Criterion fft_matches_direct() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double a : {0.3, 0.5, 1.0, 1.7}) {
        const ScalarField f = random_field(Grid::cube(2, -1.0, 1.0, 32), 11);
        worst = std::max(worst, sup_relative(riesz_fft(f, a), riesz_direct(f, a)));
    }
    for (double a : {0.5, 1.5, 2.5}) {
        const ScalarField f = random_field(Grid::cube(3, -1.0, 1.0, 16), 12);
        worst = std::max(worst, sup_relative(riesz_fft(f, a), riesz_direct(f, a)));
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-6 && secs < 30.0, "max sup-relative " + fmt(worst) + " (< 1e-6), " + fmt(secs) + " s (< 30)"};
}

Criterion disk_centre_value() {
    // 256^2 grid with a cell centre at the origin.
    const std::size_t n = 256;
    const double half = 1.5, h = 2.0 * half / n, o = -static_cast<double>(n / 2) * h - 0.5 * h;
    const Grid g(2, {o, o, 0}, {2 * half, 2 * half, 0}, {n, n, 0});
    const ScalarField chi = indicator_ball(g, {0, 0, 0}, 1.0).indicator();
    std::size_t centre = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::hypot(g.center(i)[0], g.center(i)[1]) < 1e-9) centre = i;
    double worst = 0.0;
    for (double a : {0.3, 0.5, 0.7}) {
        const double exact = 2.0 * std::numbers::pi / a / gamma_norm(2, a);
        worst = std::max(worst, std::abs(riesz_fft(chi, a).values[centre] / exact - 1.0));
    }
    return {worst <= 0.01, "max relative error " + fmt(worst) + " over alpha in {0.3,0.5,0.7} (<= 1%)"};
}

Criterion semigroup() {
    const Grid g = Grid::cube(2, -1.0, 1.0, 128);
    const ScalarField f = smooth_bump(g, {0, 0, 0}, 0.5);
    double worst = 0.0;
    for (auto [a, b] : {std::pair{0.4, 0.4}, std::pair{0.3, 0.5}, std::pair{0.2, 0.7}}) {
        const Report r = semigroup_check(f, a, b, 4);
        worst = std::max(worst, r.metrics["l2_relative_deviation"].get<double>());
    }
    return {worst < 0.02, "max L2-relative deviation " + fmt(worst) + " (< 2%)"};
}

Criterion lemma1() {
    const Grid g = Grid::cube(2, -0.5, 1.5, 128);
    const TimeGrid tg = TimeGrid::for_grid(g);
    double worst = 0.0;
    std::size_t points = 0;
    bool all = true;
    for (const char* name : {"cube", "ball"}) {
        const VoxelSet e = make_shape(name, g);
        for (double a : {0.3, 0.5, 0.7}) {
            const Report r = verify_lemma1(e, a, tg);
            all = all && r.verdict == Verdict::pass;
            worst = std::max(worst, r.metrics["max_ratio"].get<double>());
            points += r.metrics["sampled_points"].get<std::size_t>();
        }
    }
    return {all && worst <= 1.02, "max LHS/RHS " + fmt(worst) + " over " + std::to_string(points) +
                                      " sampled points, cube and ball, 3 orders (<= 1.02)"};
}

Criterion lemma2() {
    const Grid g = Grid::cube(2, -1.0, 2.0, 96);
    const Report r = verify_lemma2(make_family(shape_names(), g), 0.5, {0.5, 1.0, 2.0, 4.0});
    const double spread = r.metrics["max_dilation_spread"].get<double>();
    const double ratio = r.metrics["max_ratio"].get<double>();
    return {r.verdict == Verdict::pass && spread <= 0.05 && std::isfinite(ratio),
            "6 sets, max dilation spread " + fmt(spread) + " (<= 5%), max ratio " + fmt(ratio)};
}

Criterion counterexample() {
    const auto t0 = std::chrono::steady_clock::now();
    const Report r = counterexample_profile(2, {1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
    const double secs = seconds_since(t0);
    const double slope = r.metrics["slope"].get<double>(), res = r.metrics["residual"].get<double>();
    return {r.verdict == Verdict::pass && std::abs(slope / 2.0 - 1.0) <= 0.01 && res < 0.02 && secs < 60.0,
            "slope " + fmt(slope) + " vs 2 (1%), residual " + fmt(res) + " (< 2%), " + fmt(secs) + " s"};
}

Criterion weak_type() {
    const Report r = weak_type_growth(2, 1.0, {5, 10, 20, 40});
    const auto lower = r.table("growth").numbers("lower_bound");
    bool ratios = true;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        const double expect = std::ldexp(1.0, static_cast<int>(i));
        ratios = ratios && std::abs(lower[i] / lower[0] / expect - 1.0) <= 0.1;
    }
    const double growth = lower.back() / lower.front();
    return {r.verdict == Verdict::pass && ratios && growth >= 7.0,
            "lower bounds 1:" + fmt(lower[1] / lower[0]) + ":" + fmt(lower[2] / lower[0]) + ":" + fmt(growth) +
                " (1:2:4:8 within 10%)"};
}

Criterion trace_failure() {
    const Report r = verify_trace_failure(2, 0.5, {1e-1, 1e-2, 1e-3, 1e-4}, 16);
    const double growth = r.metrics["growth"].get<double>();
    const double den = r.find_check("denominator_deviation").value;
    const bool monotone = r.find_check("monotone_in_s").pass;
    return {r.verdict == Verdict::pass && growth >= 4.0 && den <= 0.02 && monotone,
            "growth " + fmt(growth) + "x (>= 4), denominator within " + fmt(100 * den) +
                "% of Per (<= 2%), monotone " + (monotone ? "yes" : "no") + ", consistency " +
                fmt(r.find_check("consistency").value)};
}

Criterion norm_chain() {
    double chain = 0.0, exact = 0.0;
    for (int d : {2, 3}) {
        const Grid g = Grid::cube(d, -1.0, 2.0, d == 2 ? 192 : 48);
        const double p = d / (d - 1.0);
        for (const auto& [name, e] : make_family(shape_names(), g)) {
            const ScalarField u = e.indicator();
            chain = std::max(chain, lp_norm(u, p) / lorentz_p1(u, p));
            exact = std::max(exact, std::abs(lorentz_p1(u, p) / std::pow(e.volume(), 1.0 / p) - 1.0));
        }
        const ScalarField bump = smooth_bump(g, {0.5, 0.5, 0.5}, 0.8);
        chain = std::max(chain, lp_norm(bump, p) / lorentz_p1(bump, p));
    }
    return {chain <= 1.005 && exact <= 0.005, "max L^p / L^{p,1} " + fmt(chain) + " (<= 1.005), indicator error " +
                                                  fmt(exact) + " (<= 0.5%), d = 2 and 3"};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FRACGRAD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Criterion end_to_end() {
    const fs::path base = fs::temp_directory_path() / "fracgrad_acceptance";
    fs::remove_all(base);
    const std::string config = (fs::path(FRACGRAD_SOURCE_DIR) / "configs" / "default.ini").string();
    std::array<double, 2> secs{};
    std::array<int, 2> codes{};
    for (int k = 0; k < 2; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        codes[k] = run_cli("all -q -c " + config + " --seed 1 -o " + (base / std::to_string(k)).string());
        secs[k] = seconds_since(t0);
    }
    std::size_t files = 0, differ = 0;
    for (const auto& entry : fs::directory_iterator(base / "0")) {
        ++files;
        const fs::path other = base / "1" / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differ;
    }
    std::size_t other_files = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(base / "1")) ++other_files;
    const bool ok = codes[0] == 0 && codes[1] == 0 && secs[0] < 600.0 && secs[1] < 600.0 && differ == 0 &&
                    files == other_files && files > 0;
    return {ok, "exit " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + ", " + fmt(secs[0]) + " s / " +
                    fmt(secs[1]) + " s (< 600), " + std::to_string(files) + " files, " + std::to_string(differ) +
                    " differ between runs"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria{
        {"oracle equivalence (FFT vs direct)", fft_matches_direct},
        {"analytic disk-centre value", disk_centre_value},
        {"semigroup property", semigroup},
        {"pointwise interpolation with explicit constant", lemma1},
        {"Lorentz bound: dilation invariance", lemma2},
        {"counterexample log blow-up", counterexample},
        {"weak-type divergence", weak_type},
        {"trace inequality failure", trace_failure},
        {"norm chain and indicator exactness", norm_chain},
        {"end-to-end CLI reproducibility", end_to_end},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Criterion o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed ? 1 : 0;
}
