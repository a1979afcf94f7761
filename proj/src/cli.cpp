#include "pdw/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pdw/fixed_points.hpp"
#include "pdw/io.hpp"
#include "pdw/linearized.hpp"

namespace pdw {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFell = 2;
constexpr int kExitUsage = 64;
constexpr int kExitBadParam = 65;
constexpr int kExitCantWrite = 73;
constexpr int kMaxResolution = 4096;

struct CommonFlags {
    double gamma = 0.011;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double t_max = 50.0;
    double max_step = 0.25;
    int workers = 0;  // 0 = auto
};

void add_common(CLI::App* cmd, CommonFlags& c) {
    cmd->add_option("--gamma", c.gamma, "Slope angle [rad]");
    cmd->add_option("--rel-tol", c.rel_tol, "Integrator relative tolerance");
    cmd->add_option("--abs-tol", c.abs_tol, "Integrator absolute tolerance");
    cmd->add_option("--t-max", c.t_max, "Time budget per step attempt");
    cmd->add_option("--max-step", c.max_step, "Maximum integrator step");
    cmd->add_option("--workers", c.workers, "Worker threads (0 = hardware, env PDW_WORKERS)");
}

int resolve_workers(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("PDW_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // library resolves 0 to hardware concurrency
}

bool common_valid(const CommonFlags& c, IntegratorConfig& cfg) {
    cfg.rel_tol = c.rel_tol;
    cfg.abs_tol = c.abs_tol;
    cfg.t_max = c.t_max;
    cfg.max_step = c.max_step;
    return WalkerParams{c.gamma}.valid() && cfg.valid();
}

bool parse_pair(const std::string& s, double& a, double& b) {
    std::istringstream in(s);
    char comma = 0;
    in >> a >> comma >> b;
    return bool(in) && comma == ',';
}

void push_common_params(RunManifest& m, const CommonFlags& c) {
    m.parameters.emplace_back("gamma", format_g17(c.gamma));
    m.parameters.emplace_back("rel_tol", format_g17(c.rel_tol));
    m.parameters.emplace_back("abs_tol", format_g17(c.abs_tol));
    m.parameters.emplace_back("t_max", format_g17(c.t_max));
    m.parameters.emplace_back("max_step", format_g17(c.max_step));
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int finish_manifest(RunManifest& manifest, const std::string& out_base, const Stopwatch& sw) {
    manifest.wall_time_s = sw.seconds();
    atomic_write_file(out_base + ".manifest.json", manifest.to_json());
    return kExitOk;
}

// ---------------------------------------------------------------- step

struct StepArgs {
    CommonFlags common;
    std::string q = "0.2,-0.2";
    int n = 1;
    std::string out;
};

int cmd_step(const StepArgs& a) {
    IntegratorConfig cfg;
    double q1 = 0, q2 = 0;
    if (!parse_pair(a.q, q1, q2)) {
        std::cerr << "step: --q expects \"theta1,dtheta1\"\n";
        return kExitUsage;
    }
    if (!common_valid(a.common, cfg) || !(q1 > 0.0) || a.n < 1) return kExitBadParam;

    Stopwatch sw;
    RunManifest manifest;
    manifest.command = "step";
    push_common_params(manifest, a.common);
    manifest.parameters.emplace_back("q", a.q);
    manifest.parameters.emplace_back("n", std::to_string(a.n));

    std::string csv = "step,theta1,dtheta1,duration\n";
    WalkerParams p{a.common.gamma};
    SectionPoint q{q1, q2};
    csv += "0," + format_g17(q.theta1) + "," + format_g17(q.dtheta1) + ",0\n";
    std::size_t survived = 0;
    for (int i = 0; i < a.n; ++i) {
        const StepOutcome st = step(q, p, cfg);
        if (st.kind != StepOutcome::Kind::Stepped) break;
        q = st.next;
        ++survived;
        csv += std::to_string(survived) + "," + format_g17(q.theta1) + "," +
               format_g17(q.dtheta1) + "," + format_g17(st.duration) + "\n";
    }

    try {
        if (!a.out.empty()) {
            write_output(manifest, a.out, csv);
            finish_manifest(manifest, a.out, sw);
        } else {
            std::fwrite(csv.data(), 1, csv.size(), stdout);
        }
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitCantWrite;
    }
    if (survived < static_cast<std::size_t>(a.n)) {
        std::cerr << survived << "\n";
        return kExitFell;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- raster / basin

struct RasterArgs {
    CommonFlags common;
    GridSpec grid;
    int n_max = 3;
    int n_short = 50, n_long = 200;
    bool supersample = false;
    bool rotated = false;
    std::string out = "raster";
    bool basin = false;
};

void add_grid(CLI::App* cmd, RasterArgs& a) {
    cmd->add_option("--theta1-lo", a.grid.theta1_lo, "Window: theta1 low edge");
    cmd->add_option("--theta1-hi", a.grid.theta1_hi, "Window: theta1 high edge");
    cmd->add_option("--dtheta1-lo", a.grid.dtheta1_lo, "Window: dtheta1 low edge");
    cmd->add_option("--dtheta1-hi", a.grid.dtheta1_hi, "Window: dtheta1 high edge");
    cmd->add_option("--nx", a.grid.nx, "Cells along theta1");
    cmd->add_option("--ny", a.grid.ny, "Cells along dtheta1");
    cmd->add_flag("--supersample", a.supersample, "2x2 subsamples per cell (minimum survival)");
    cmd->add_flag("--rotated", a.rotated, "Also export rotated-coordinate CSV");
    cmd->add_option("--out", a.out, "Output base path");
}

int cmd_raster(const RasterArgs& a) {
    IntegratorConfig cfg;
    if (!common_valid(a.common, cfg) || !a.grid.valid() || a.grid.nx > kMaxResolution ||
        a.grid.ny > kMaxResolution || a.n_max < 1 ||
        (a.basin && !(a.n_short > 0 && a.n_short < a.n_long)))
        return kExitBadParam;

    Stopwatch sw;
    RunManifest manifest;
    manifest.command = a.basin ? "basin" : "raster";
    push_common_params(manifest, a.common);
    manifest.parameters.emplace_back("theta1_lo", format_g17(a.grid.theta1_lo));
    manifest.parameters.emplace_back("theta1_hi", format_g17(a.grid.theta1_hi));
    manifest.parameters.emplace_back("dtheta1_lo", format_g17(a.grid.dtheta1_lo));
    manifest.parameters.emplace_back("dtheta1_hi", format_g17(a.grid.dtheta1_hi));
    manifest.parameters.emplace_back("nx", std::to_string(a.grid.nx));
    manifest.parameters.emplace_back("ny", std::to_string(a.grid.ny));
    manifest.parameters.emplace_back("supersample", a.supersample ? "1" : "0");
    if (a.basin) {
        manifest.parameters.emplace_back("n_short", std::to_string(a.n_short));
        manifest.parameters.emplace_back("n_long", std::to_string(a.n_long));
    } else {
        manifest.parameters.emplace_back("n_max", std::to_string(a.n_max));
    }

    const int workers = resolve_workers(a.common.workers);
    manifest.workers = workers;
    const WalkerParams p{a.common.gamma};
    const RegionRaster raster =
        a.basin ? compute_basin(p, a.grid, cfg, a.n_short, a.n_long, workers, a.supersample)
                : compute_raster(p, a.grid, a.n_max, cfg, workers, a.supersample);

    try {
        write_output(manifest, a.out + ".csv", raster_to_csv(raster));
        write_output(manifest, a.out + ".pgm", raster_to_pgm(raster));
        write_output(manifest, a.out + ".meta.json", raster_metadata_json(raster));
        if (a.rotated) write_output(manifest, a.out + "_rotated.csv", raster_to_rotated_csv(raster));
        return finish_manifest(manifest, a.out, sw);
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitCantWrite;
    }
}

// ---------------------------------------------------------------- scan

struct ScanArgs {
    CommonFlags common;
    double gamma_lo = 0.010, gamma_hi = 0.020, gamma_step = 2e-4;
    std::string out = "scan";
};

int cmd_scan(const ScanArgs& a) {
    IntegratorConfig cfg;
    if (!common_valid(a.common, cfg) || !(a.gamma_lo < a.gamma_hi) || !(a.gamma_step > 0) ||
        !WalkerParams{a.gamma_lo}.valid() || !WalkerParams{a.gamma_hi}.valid())
        return kExitBadParam;

    Stopwatch sw;
    RunManifest manifest;
    manifest.command = "scan";
    push_common_params(manifest, a.common);
    manifest.parameters.emplace_back("gamma_lo", format_g17(a.gamma_lo));
    manifest.parameters.emplace_back("gamma_hi", format_g17(a.gamma_hi));
    manifest.parameters.emplace_back("gamma_step", format_g17(a.gamma_step));

    const auto records = scan_bifurcation(gamma_grid(a.gamma_lo, a.gamma_hi, a.gamma_step), cfg);

    std::string csv = "gamma,kind,period,largest_multiplier_modulus,n_samples\n";
    std::string samples = "gamma,theta1,dtheta1\n";
    for (const auto& r : records) {
        const char* kind = r.kind == AttractorKind::Period    ? "period"
                           : r.kind == AttractorKind::Chaotic ? "chaotic"
                                                              : "none";
        csv += format_g17(r.gamma);
        csv += ',';
        csv += kind;
        csv += ',';
        csv += std::to_string(r.period);
        csv += ',';
        csv += format_g17(r.largest_multiplier_modulus);
        csv += ',';
        csv += std::to_string(r.samples.size());
        csv += '\n';
        for (const auto& s : r.samples)
            samples += format_g17(r.gamma) + "," + format_g17(s.theta1) + "," +
                       format_g17(s.dtheta1) + "\n";
    }
    try {
        write_output(manifest, a.out + ".csv", csv);
        write_output(manifest, a.out + "_samples.csv", samples);
        return finish_manifest(manifest, a.out, sw);
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitCantWrite;
    }
}

// ---------------------------------------------------------------- orbit-find

struct OrbitArgs {
    CommonFlags common;
    int period = 1;
    std::string guess = "0.2,-0.2";
    std::string out;
};

int cmd_orbit_find(const OrbitArgs& a) {
    IntegratorConfig cfg;
    double g1 = 0, g2 = 0;
    if (!parse_pair(a.guess, g1, g2)) {
        std::cerr << "orbit-find: --guess expects \"theta1,dtheta1\"\n";
        return kExitUsage;
    }
    if (!common_valid(a.common, cfg) || a.period < 1 || !(g1 > 0.0)) return kExitBadParam;

    Stopwatch sw;
    const auto res = find_periodic_orbit(WalkerParams{a.common.gamma}, a.period,
                                         SectionPoint{g1, g2}, cfg);
    if (res.status != OrbitSolveStatus::Converged) {
        std::cerr << "orbit-find: "
                  << (res.status == OrbitSolveStatus::FellDuringNewton ? "fell during iteration"
                                                                       : "did not converge")
                  << "\n";
        return kExitFell;
    }
    const PeriodicOrbit& orbit = res.orbit;
    std::string csv = "index,theta1,dtheta1\n";
    for (std::size_t i = 0; i < orbit.points.size(); ++i)
        csv += std::to_string(i) + "," + format_g17(orbit.points[i].theta1) + "," +
               format_g17(orbit.points[i].dtheta1) + "\n";

    std::printf("period %d orbit at gamma=%s, residual %s\n", orbit.period,
                format_g17(orbit.gamma).c_str(), format_g17(orbit.residual).c_str());
    for (const auto& q : orbit.points)
        std::printf("  (%s, %s)\n", format_g17(q.theta1).c_str(), format_g17(q.dtheta1).c_str());
    auto fmt_complex = [](const std::complex<double>& z) {
        std::string s = format_g17(z.real());
        s += (z.imag() < 0 ? " - " : " + ") + format_g17(std::abs(z.imag())) + "i";
        return s;
    };
    std::printf("multipliers: %s, %s (moduli %s, %s)\n", fmt_complex(orbit.multipliers[0]).c_str(),
                fmt_complex(orbit.multipliers[1]).c_str(),
                format_g17(std::abs(orbit.multipliers[0])).c_str(),
                format_g17(std::abs(orbit.multipliers[1])).c_str());

    if (!a.out.empty()) {
        RunManifest manifest;
        manifest.command = "orbit-find";
        push_common_params(manifest, a.common);
        manifest.parameters.emplace_back("period", std::to_string(a.period));
        manifest.parameters.emplace_back("guess", a.guess);
        try {
            write_output(manifest, a.out, csv);
            finish_manifest(manifest, a.out, sw);
        } catch (const std::runtime_error& e) {
            std::cerr << e.what() << "\n";
            return kExitCantWrite;
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- crisis

struct CrisisArgs {
    CommonFlags common;
    double gamma_lo = 0.0185, gamma_hi = 0.0200, gamma_step = 5e-4;
    int raster_res = 400;
    std::string out = "crisis";
};

int cmd_crisis(const CrisisArgs& a) {
    IntegratorConfig cfg;
    if (!common_valid(a.common, cfg) || !(a.gamma_lo < a.gamma_hi) || !(a.gamma_step > 0) ||
        a.raster_res < 2 || a.raster_res > kMaxResolution)
        return kExitBadParam;

    Stopwatch sw;
    RunManifest manifest;
    manifest.command = "crisis";
    push_common_params(manifest, a.common);
    manifest.parameters.emplace_back("gamma_lo", format_g17(a.gamma_lo));
    manifest.parameters.emplace_back("gamma_hi", format_g17(a.gamma_hi));
    manifest.parameters.emplace_back("gamma_step", format_g17(a.gamma_step));
    manifest.parameters.emplace_back("raster_res", std::to_string(a.raster_res));
    CrisisOptions opts;
    opts.raster_nx = opts.raster_ny = a.raster_res;
    opts.workers = resolve_workers(a.common.workers);
    manifest.workers = opts.workers;

    const CrisisResult res = detect_crisis(a.gamma_lo, a.gamma_hi, a.gamma_step, cfg, opts);

    std::string csv = "gamma,gap,cell_diag,survived_long,attractor_samples\n";
    for (const auto& r : res.records)
        csv += format_g17(r.gamma) + "," + format_g17(r.gap) + "," + format_g17(r.cell_diag) +
               "," + (r.survived_long ? "1" : "0") + "," + std::to_string(r.attractor_samples) +
               "\n";
    const std::string estimate = "{\n  \"gamma_crisis_lo\": " + format_g17(res.gamma_crisis_lo) +
                                 ",\n  \"gamma_crisis_hi\": " + format_g17(res.gamma_crisis_hi) +
                                 "\n}\n";
    std::printf("crisis bracket: (%s, %s)\n", format_g17(res.gamma_crisis_lo).c_str(),
                format_g17(res.gamma_crisis_hi).c_str());
    try {
        write_output(manifest, a.out + ".csv", csv);
        write_output(manifest, a.out + "_estimate.json", estimate);
        return finish_manifest(manifest, a.out, sw);
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitCantWrite;
    }
}

// ---------------------------------------------------------------- wcs

struct WcsArgs {
    CommonFlags common;
    int samples = 512;
    double theta1_lo = 0.01, theta1_hi = 1.0;
    std::string out = "wcs";
};

int cmd_wcs(const WcsArgs& a) {
    IntegratorConfig cfg;
    if (!common_valid(a.common, cfg) || a.samples < 2 || !(a.theta1_lo > 0.0) ||
        !(a.theta1_lo < a.theta1_hi))
        return kExitBadParam;

    Stopwatch sw;
    RunManifest manifest;
    manifest.command = "wcs";
    push_common_params(manifest, a.common);
    manifest.parameters.emplace_back("samples", std::to_string(a.samples));
    manifest.parameters.emplace_back("theta1_lo", format_g17(a.theta1_lo));
    manifest.parameters.emplace_back("theta1_hi", format_g17(a.theta1_hi));

    std::vector<double> ths;
    for (int i = 0; i < a.samples; ++i)
        ths.push_back(a.theta1_lo + (a.theta1_hi - a.theta1_lo) * i / (a.samples - 1.0));
    std::string csv = "theta1,dtheta1\n";
    for (const auto& q : wcs_curve(WalkerParams{a.common.gamma}, ths))
        csv += format_g17(q.theta1) + "," + format_g17(q.dtheta1) + "\n";
    try {
        write_output(manifest, a.out + ".csv", csv);
        return finish_manifest(manifest, a.out, sw);
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitCantWrite;
    }
}

// ---------------------------------------------------------------- linearized

struct LinearizedArgs {
    CommonFlags common;
    int samples = 101;
    std::string out = "linearized";
};

int cmd_linearized(const LinearizedArgs& a) {
    IntegratorConfig cfg;
    if (!common_valid(a.common, cfg) || a.samples < 2) return kExitBadParam;

    Stopwatch sw;
    RunManifest manifest;
    manifest.command = "linearized";
    push_common_params(manifest, a.common);
    manifest.parameters.emplace_back("samples", std::to_string(a.samples));

    const auto rows = deformation_study(WalkerParams{a.common.gamma}, a.samples);
    std::string csv =
        "c2,c1,delta,phi_unwrapped,phi_mod,k,theta1_back,dtheta1_back,d_exact,d_paper_approx,"
        "lhs20,status\n";
    for (const auto& r : rows) {
        csv += format_g17(r.c2) + "," + format_g17(r.c1) + ",";
        if (r.status == BackstepStatus::Ok) {
            csv += format_g17(r.delta) + "," + format_g17(r.phi_unwrapped) + "," +
                   format_g17(r.phi_mod) + "," + format_g17(r.k) + "," +
                   format_g17(r.theta1_back) + "," + format_g17(r.dtheta1_back) + "," +
                   format_g17(r.d_exact) + "," + format_g17(r.d_paper_approx) + "," +
                   format_g17(r.lhs20) + ",";
        } else {
            csv += ",,,,,,,,,";
        }
        csv += to_string(r.status);
        csv += '\n';
    }
    try {
        write_output(manifest, a.out + ".csv", csv);
        return finish_manifest(manifest, a.out, sw);
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitCantWrite;
    }
}

// ---------------------------------------------------------------- preimage

struct PreimageArgs {
    CommonFlags common;
    std::string in;
    std::string out = "preimage";
};

int cmd_preimage(const PreimageArgs& a) {
    if (a.in.empty()) {
        std::cerr << "preimage: --in raster CSV is required\n";
        return kExitUsage;
    }
    Stopwatch sw;
    std::string content;
    try {
        content = read_file(a.in);
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitBadParam;
    }

    RunManifest manifest;
    manifest.command = "preimage";
    manifest.parameters.emplace_back("in", a.in);

    std::istringstream lines(content);
    std::string line;
    std::getline(lines, line);  // header
    std::string csv = "theta1_pre,dtheta1_pre,theta1_post,dtheta1_post\n";
    int skipped = 0;
    while (std::getline(lines, line)) {
        double th = 0, dth = 0;
        int surv = 0, in_d = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%d,%d", &th, &dth, &surv, &in_d) != 4) continue;
        if (!in_d) continue;
        if (std::abs(2.0 * th) >= kPi / 2.0 - 1e-6) {
            ++skipped;
            continue;
        }
        const auto pre = preimage_T_of({SectionPoint{th, dth}});
        csv += format_g17(pre[0].theta1) + "," + format_g17(pre[0].dtheta1) + "," +
               format_g17(th) + "," + format_g17(dth) + "\n";
    }
    manifest.parameters.emplace_back("skipped_singular", std::to_string(skipped));
    try {
        write_output(manifest, a.out + ".csv", csv);
        return finish_manifest(manifest, a.out, sw);
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitCantWrite;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Passive-walker section-map toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file: key=value, one [section] per subcommand");
    app.allow_config_extras(CLI::config_extras_mode::ignore_all);

    StepArgs step_args;
    auto* step_cmd = app.add_subcommand("step", "Iterate the section map from a point");
    add_common(step_cmd, step_args.common);
    step_cmd->add_option("--q", step_args.q, "Start point \"theta1,dtheta1\"");
    step_cmd->add_option("--n", step_args.n, "Steps to attempt");
    step_cmd->add_option("--out", step_args.out, "Orbit CSV path (default: stdout)");

    RasterArgs raster_args;
    auto* raster_cmd = app.add_subcommand("raster", "Survival raster over a section window");
    add_common(raster_cmd, raster_args.common);
    add_grid(raster_cmd, raster_args);
    raster_cmd->add_option("--n-max", raster_args.n_max, "Step cap per cell");

    RasterArgs basin_args;
    basin_args.basin = true;
    basin_args.out = "basin";
    auto* basin_cmd = app.add_subcommand("basin", "Basin raster (short/long survival protocol)");
    add_common(basin_cmd, basin_args.common);
    add_grid(basin_cmd, basin_args);
    basin_cmd->add_option("--n-short", basin_args.n_short, "Short survival threshold");
    basin_cmd->add_option("--n-long", basin_args.n_long, "Long survival threshold");

    ScanArgs scan_args;
    auto* scan_cmd = app.add_subcommand("scan", "Attractor classification over a slope range");
    add_common(scan_cmd, scan_args.common);
    scan_cmd->add_option("--gamma-lo", scan_args.gamma_lo, "Scan start");
    scan_cmd->add_option("--gamma-hi", scan_args.gamma_hi, "Scan end");
    scan_cmd->add_option("--step", scan_args.gamma_step, "Scan step");
    scan_cmd->add_option("--out", scan_args.out, "Output base path");

    OrbitArgs orbit_args;
    auto* orbit_cmd = app.add_subcommand("orbit-find", "Newton solve for a periodic orbit");
    add_common(orbit_cmd, orbit_args.common);
    orbit_cmd->add_option("--period", orbit_args.period, "Orbit period");
    orbit_cmd->add_option("--guess", orbit_args.guess, "Initial guess \"theta1,dtheta1\"");
    orbit_cmd->add_option("--out", orbit_args.out, "Orbit CSV path");

    CrisisArgs crisis_args;
    auto* crisis_cmd = app.add_subcommand("crisis", "Attractor/basin-boundary gap and collapse");
    add_common(crisis_cmd, crisis_args.common);
    crisis_cmd->add_option("--gamma-lo", crisis_args.gamma_lo, "Range start");
    crisis_cmd->add_option("--gamma-hi", crisis_args.gamma_hi, "Range end");
    crisis_cmd->add_option("--step", crisis_args.gamma_step, "Range step");
    crisis_cmd->add_option("--raster-res", crisis_args.raster_res, "Basin raster resolution");
    crisis_cmd->add_option("--out", crisis_args.out, "Output base path");

    WcsArgs wcs_args;
    auto* wcs_cmd = app.add_subcommand("wcs", "Closed-form separatrix curve on the section");
    add_common(wcs_cmd, wcs_args.common);
    wcs_cmd->add_option("--samples", wcs_args.samples, "Sample count");
    wcs_cmd->add_option("--theta1-lo", wcs_args.theta1_lo, "Curve start");
    wcs_cmd->add_option("--theta1-hi", wcs_args.theta1_hi, "Curve end");
    wcs_cmd->add_option("--out", wcs_args.out, "Output base path");

    LinearizedArgs lin_args;
    auto* lin_cmd = app.add_subcommand("linearized", "Backstep deformation table along PQ");
    add_common(lin_cmd, lin_args.common);
    lin_cmd->add_option("--samples", lin_args.samples, "Rows along the segment");
    lin_cmd->add_option("--out", lin_args.out, "Output base path");

    PreimageArgs pre_args;
    auto* pre_cmd = app.add_subcommand("preimage", "Jump-map preimage of a raster's domain cells");
    add_common(pre_cmd, pre_args.common);
    pre_cmd->add_option("--in", pre_args.in, "Raster CSV to read");
    pre_cmd->add_option("--out", pre_args.out, "Output base path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (step_cmd->parsed()) return cmd_step(step_args);
    if (raster_cmd->parsed()) return cmd_raster(raster_args);
    if (basin_cmd->parsed()) return cmd_raster(basin_args);
    if (scan_cmd->parsed()) return cmd_scan(scan_args);
    if (orbit_cmd->parsed()) return cmd_orbit_find(orbit_args);
    if (crisis_cmd->parsed()) return cmd_crisis(crisis_args);
    if (wcs_cmd->parsed()) return cmd_wcs(wcs_args);
    if (lin_cmd->parsed()) return cmd_linearized(lin_args);
    if (pre_cmd->parsed()) return cmd_preimage(pre_args);
    return kExitUsage;
}

}  // namespace pdw
