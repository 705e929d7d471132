// airy-wanderers: sampling, kernel evaluation, Fredholm CDFs and acceptance checks.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
// 4 verification failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aw/config.hpp"
#include "aw/fredholm.hpp"
#include "aw/kernels.hpp"
#include "aw/lpp.hpp"
#include "aw/stats.hpp"
#include "aw/verify.hpp"

namespace {

using namespace aw;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            require(static_cast<bool>(*file_), "cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

struct Options {
    std::string config, out, suite = "all", reference, check, prelimit;
    std::optional<std::uint64_t> seed;
    std::optional<long> samples;
};

RunConfig resolve(const Options& o, bool required) {
    RunConfig c;
    if (!o.config.empty()) c = load_config(o.config);
    else require(!required, "--config FILE is required for this command");
    if (o.seed) c.seed = *o.seed;
    if (o.samples) c.samples = *o.samples;
    require(c.samples >= 1, "--samples must be positive");
    return c;
}

int cmd_sample(const Options& o) {
    const RunConfig c = resolve(o, true);
    const ScalingPlan plan = build_scaling_plan(c.params, c.q, c.times, c.N);
    std::vector<PointConfig> configs(static_cast<std::size_t>(c.samples));
    parallel_for(configs.size(), [&](std::size_t s) {
        const std::uint64_t seed = c.seed + s;
        configs[s] = point_config(sample_schur_process(plan.x_seq, plan.y_seq, seed), plan, seed);
    });
    Output out(o.out);
    std::ostream& os = out.stream();
    os << "seed,time,index,position\n";
    for (const PointConfig& pc : configs)
        for (std::size_t j = 0; j < pc.times.size(); ++j)
            for (std::size_t i = 0; i < pc.points[j].size(); ++i)
                os << pc.seed << ',' << num(pc.times[j]) << ',' << i + 1 << ',' << num(pc.points[j][i]) << '\n';
    return 0;
}

std::vector<ContourChoice> alpha_beta_choices(const ParamSet& p) {
    const double a = std::isfinite(p.a_bar) ? p.a_bar : 2.0;
    const double b = std::isfinite(p.b_bar) ? p.b_bar : -2.0;
    return {{a - 0.5, b + 0.5}, {a - 1.0, b + 1.3}, {a - 0.3, b + 0.8}};
}

long parse_prelimit(const std::string& s) {
    const std::string v = s.rfind("N=", 0) == 0 ? s.substr(2) : s;
    try {
        std::size_t used = 0;
        const long N = std::stol(v, &used);
        require(used == v.size() && N >= 1, "");
        return N;
    } catch (const std::exception&) {
        throw config_error("--prelimit expects N=<positive integer>, got '" + s + "'");
    }
}

int cmd_kernel(const Options& o) {
    const RunConfig c = resolve(o, true);
    require(!c.kernel_points.empty(), "kernel command needs kernel.points or kernel.grid in the config");
    require(o.reference.empty() || o.reference == "airy", "--reference accepts only 'airy'");
    require(o.check.empty() || o.check == "alpha-beta", "--check accepts only 'alpha-beta'");
    const std::optional<long> prelimit_N =
        o.prelimit.empty() ? std::nullopt : std::optional<long>(parse_prelimit(o.prelimit));

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::size_t n = c.kernel_points.size();
    std::vector<std::string> rows(n);
    std::vector<int> failed(n, 0);
    parallel_for(n, [&](std::size_t r) {
        const KernelPoint& kp = c.kernel_points[r];
        std::ostringstream os;
        os << num(kp.t1) << ',' << num(kp.x1) << ',' << num(kp.t2) << ',' << num(kp.x2);
        try {
            const KernelValue kv = limit_kernel(c.params, kp.t1, kp.x1, kp.t2, kp.x2, c.quad);
            os << ',' << num(kv.k1.real()) << ',' << num(kv.k1.imag()) << ',' << num(kv.k2.real()) << ','
               << num(kv.k3.real()) << ',' << num(kv.k3.imag()) << ',' << num(kv.value.real()) << ','
               << num(kv.value.imag()) << ',' << num(kv.err);
            if (!o.reference.empty()) os << ',' << num(kp.t1 == kp.t2 ? airy_kernel(kp.x1, kp.x2) : nan);
            if (!o.check.empty()) {
                double dev = 0.0;
                std::vector<cplx> vals;
                for (const auto& ch : alpha_beta_choices(c.params))
                    vals.push_back(limit_kernel(c.params, kp.t1, kp.x1, kp.t2, kp.x2, c.quad, ch).value);
                for (std::size_t a = 0; a < vals.size(); ++a)
                    for (std::size_t b = a + 1; b < vals.size(); ++b) dev = std::max(dev, relative_gap(vals[a], vals[b]));
                os << ',' << num(dev);
            }
            if (prelimit_N) {
                std::vector<double> times{kp.t1};
                if (kp.t2 != kp.t1) times.push_back(kp.t2);
                std::sort(times.begin(), times.end());
                const std::size_t u = kp.t1 == times[0] ? 0 : 1, v = kp.t2 == times[0] ? 0 : 1;
                const ScalingPlan plan = build_scaling_plan(c.params, c.q, times, *prelimit_N);
                const cplx kn = prelimit_kernel(plan, u, lattice_position(plan, u, kp.x1), v,
                                                lattice_position(plan, v, kp.x2), c.quad)
                                    .value *
                                (std::cbrt(static_cast<double>(plan.N)) * plan.sigma);
                const cplx li = limit_parts_infinity(c.params, c.q, kp.t1, kp.x1, kp.t2, kp.x2, c.quad).value;
                os << ',' << num(kn.real()) << ',' << num(kn.imag()) << ',' << num(li.real()) << ','
                   << num(li.imag());
            }
        } catch (const numerical_error& e) {
            failed[r] = 1;
            std::ostringstream bad;
            bad << num(kp.t1) << ',' << num(kp.x1) << ',' << num(kp.t2) << ',' << num(kp.x2);
            bad << ",nan,nan,nan,nan,nan,nan,nan,inf";
            const int extra = !o.reference.empty() + !o.check.empty() + (prelimit_N ? 4 : 0);
            for (int k = 0; k < extra; ++k) bad << ",nan";
            os.str(bad.str());
            std::cerr << "row " << r + 1 << ": " << e.what() << '\n';
        }
        rows[r] = os.str();
    });
    Output out(o.out);
    std::ostream& os = out.stream();
    os << "t1,x1,t2,x2,k1_re,k1_im,k2,k3_re,k3_im,total_re,total_im,err";
    if (!o.reference.empty()) os << ",airy";
    if (!o.check.empty()) os << ",alpha_beta_dev";
    if (prelimit_N) os << ",prelimit_re,prelimit_im,limit_re,limit_im";
    os << '\n';
    for (const auto& r : rows) os << r << '\n';
    for (int f : failed)
        if (f) return 3;
    return 0;
}

int cmd_fredholm(const Options& o) {
    const RunConfig c = resolve(o, true);
    const ParamSet p = c.params;
    const QuadOpts quad = c.quad;
    const double time = c.fredholm_time;
    OnePointKernel k;
    k.block = [p, quad, time](const std::vector<double>& xs, const std::vector<double>& ys) {
        const KernelBlock kb = limit_kernel_block(p, time, xs, ys, quad);
        if (!kb.converged) throw numerical_error("kernel block quadrature did not converge");
        return kb.value;
    };
    k.eval = [blk = k.block](double x, double y) { return blk({x}, {y})(0, 0); };
    k.floor = 0.0;
    k.decay_rate = 1.0;
    certify_decay(k);
    Output out(o.out);
    std::ostream& os = out.stream();
    os << "t,cdf,err,method\n";
    for (double t : c.fredholm_t) {
        FredholmMethod m = NystromMethod{c.fredholm_nodes, c.fredholm_window};
        if (c.fredholm_method == "series") m = SeriesMethod{c.fredholm_n_max, 0};
        const FredholmResult r = fredholm_cdf(k, t, m);
        os << num(t) << ',' << num(r.value) << ',' << num(r.err) << ',' << c.fredholm_method << '\n';
    }
    return 0;
}

int cmd_verify(const Options& o) {
    std::vector<std::string> suites;
    if (o.suite == "all") suites = suite_names();
    else suites.push_back(o.suite);
    bool ok = true;
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& s : suites) {
        const SuiteReport r = run_suite(s);
        ok = ok && r.overall();
        reports.push_back(r.to_json());
    }
    Output out(o.out);
    out.stream() << (reports.size() == 1 ? reports[0] : reports).dump(2) << '\n';
    return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Airy wanderer kernels, Schur process sampling and Fredholm CDFs"};
    app.require_subcommand(1, 1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration");
        sub->add_option("--out", o.out, "output file (default stdout)");
        sub->add_option("--seed", o.seed, "base seed, overrides the config");
        sub->add_option("--samples", o.samples, "sample count, overrides the config");
    };
    auto* sample = app.add_subcommand("sample", "rescaled point configurations as CSV");
    auto* kernel = app.add_subcommand("kernel", "limit kernel parts on a grid as CSV");
    auto* fredholm = app.add_subcommand("fredholm", "rightmost-particle CDF as CSV");
    auto* verify = app.add_subcommand("verify", "acceptance suites as a JSON report");
    for (auto* s : {sample, kernel, fredholm, verify}) common(s);
    kernel->add_option("--reference", o.reference, "add a reference column (airy)");
    kernel->add_option("--check", o.check, "add an invariance column (alpha-beta)");
    kernel->add_option("--prelimit", o.prelimit, "add scaled prelimit and limit columns, e.g. N=1000");
    std::vector<std::string> names = suite_names();
    names.push_back("all");
    verify->add_option("suite", o.suite, "suite name")->check(CLI::IsMember(names));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*sample) return cmd_sample(o);
        if (*kernel) return cmd_kernel(o);
        if (*fredholm) return cmd_fredholm(o);
        return cmd_verify(o);
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
