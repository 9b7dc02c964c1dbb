// synqkd: command-line surface for the synchronous-correlation QKD
// toolkit. Subcommands: ideal (exact tables), simulate (protocol Monte
// Carlo), eve (adversary thresholds and feasibility curves), rigidity
// (canonical-form bound verification).
//
// Exit codes: 0 success / protocol accepted / all bounds hold,
//             2 protocol aborted / a bound margin is negative,
//             1 usage or estimation errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "synqkd/adversary.hpp"
#include "synqkd/bell.hpp"
#include "synqkd/correlations.hpp"
#include "synqkd/io.hpp"
#include "synqkd/protocol.hpp"
#include "synqkd/rigidity.hpp"

namespace {

constexpr const char* tool_version = "0.1.0";

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << bytes;
}

void write_bias(synqkd::JsonWriter& w, const synqkd::BiasForm& b) {
    w.begin_object().key("a").begin_array();
    for (double v : b.a) w.value(v);
    w.end_array().key("b").begin_array();
    for (double v : b.b) w.value(v);
    w.end_array().key("c").begin_array();
    for (const auto& row : b.c) {
        w.begin_array();
        for (double v : row) w.value(v);
        w.end_array();
    }
    w.end_array().end_object();
}

void write_bell(synqkd::JsonWriter& w, const synqkd::BellReport& r) {
    w.begin_object().key("j").begin_array();
    for (double v : r.j) w.value(v);
    w.end_array();
    w.key("classical").value(r.classical);
    w.key("quantum_feasible").value(r.quantum_feasible);
    w.key("violated_index");
    if (r.violated_index)
        w.value(*r.violated_index);
    else
        w.null();
    w.end_object();
}

int cmd_ideal() {
    const synqkd::Correlation table = synqkd::ideal_correlation();
    const synqkd::BiasForm bias = synqkd::to_bias_form(table);
    const synqkd::BellReport bell = synqkd::classify(table);
    const synqkd::Asynchronicity s = synqkd::asynchronicity(table);

    synqkd::JsonWriter w;
    w.begin_object();
    w.key("command").value("ideal");
    w.key("version").value(tool_version);
    w.key("table");
    write_correlation(w, table);
    w.key("bias");
    write_bias(w, bias);
    w.key("bell");
    write_bell(w, bell);
    w.key("j3_effective").value(synqkd::j3_effective(table));
    w.key("asynchronicity").begin_object();
    w.key("total").value(s.total);
    w.key("per_basis").begin_array();
    for (double v : s.per_basis) w.value(v);
    w.end_array().end_object();
    w.end_object();
    std::cout << w.str() << "\n";
    return 0;
}

struct SimulateArgs {
    std::string protocol = "A";
    std::uint64_t n = 100000;
    std::uint64_t m = 0;
    double lambda = 0.01;
    double mu = 0.01;
    std::uint64_t seed = 0;
    std::string device = "ideal";
    std::string transcript_path;
    std::string out_path;
    unsigned threads = 1;
};

synqkd::Correlation device_table(const std::string& name) {
    if (name == "ideal") return synqkd::ideal_correlation();
    if (name == "uniform") return synqkd::uniform_correlation();
    return synqkd::load_correlation_file(name);
}

int cmd_simulate(const SimulateArgs& a) {
    synqkd::ProtocolConfig cfg;
    cfg.variant = (a.protocol == "B") ? synqkd::ProtocolVariant::B : synqkd::ProtocolVariant::A;
    cfg.n = a.n;
    cfg.m = a.m;
    cfg.lambda = a.lambda;
    cfg.mu = a.mu;
    cfg.seed = a.seed;
    cfg.threads = a.threads;

    const synqkd::Device dev(device_table(a.device));
    const synqkd::ProtocolOutcome outcome = synqkd::run_protocol(cfg, dev);

    if (!a.transcript_path.empty()) {
        std::ofstream t(a.transcript_path, std::ios::binary);
        if (!t) throw std::runtime_error(a.transcript_path + ": cannot open for writing");
        synqkd::write_transcript(t, outcome.transcript);
    }

    synqkd::JsonWriter w;
    w.begin_object();
    w.key("command").value("simulate");
    w.key("version").value(tool_version);
    w.key("config").begin_object();
    w.key("protocol").value(synqkd::to_string(cfg.variant));
    w.key("n").value(cfg.n);
    w.key("m").value(cfg.m);
    w.key("lambda").value(cfg.lambda);
    w.key("mu").value(cfg.mu);
    w.key("seed").value(cfg.seed);
    w.key("input_distribution").begin_array();
    for (double v : cfg.input_distribution) w.value(v);
    w.end_array();
    w.key("threads").value(cfg.threads);
    w.key("device").value(a.device);
    w.end_object();

    w.key("estimates").begin_object();
    w.key("j3").value(outcome.j3_hat);
    w.key("s");
    if (outcome.s_hat)
        w.value(*outcome.s_hat);
    else
        w.null();
    w.key("key_rounds").value(outcome.key_rounds);
    w.key("j3_rounds").value(outcome.j3_rounds);
    w.key("s_rounds").value(outcome.s_rounds);
    w.key("key_mismatches").value(outcome.key_mismatches);
    w.key("counts").begin_array();
    for (std::uint64_t c : outcome.counts) w.value(c);
    w.end_array();
    w.end_object();

    w.key("verdict").value(synqkd::to_string(outcome.verdict));
    w.key("key").begin_object();
    w.key("bits").value(outcome.raw_key.size());
    w.key("hex").value(synqkd::key_to_hex(outcome.raw_key));
    w.end_object();

    w.key("outputs").begin_object();
    w.key("transcript");
    if (a.transcript_path.empty())
        w.null();
    else
        w.value(a.transcript_path);
    w.key("out");
    if (a.out_path.empty())
        w.null();
    else
        w.value(a.out_path);
    w.end_object();
    w.end_object();

    const std::string doc = w.str() + "\n";
    std::cout << doc;
    if (!a.out_path.empty()) write_file(a.out_path, doc);
    return outcome.verdict == synqkd::Verdict::accepted ? 0 : 2;
}

struct EveArgs {
    std::optional<double> epsilon;
    double lambda = 0.0;
    std::optional<double> mu;
    std::optional<double> delta;
    bool curve = false;
    double mu_max = 0.05;
    double step = 0.005;
    std::string out_path;
};

int cmd_eve(const EveArgs& a) {
    if (a.curve) {
        if (a.out_path.empty()) throw std::invalid_argument("eve --curve requires --out");
        const synqkd::FeasibilityCurve curve =
            synqkd::feasibility_curve(a.lambda, a.mu_max, a.delta.value_or(0.0), a.step);
        std::string data;
        for (const auto& [mu, eps] : curve.points)
            data += synqkd::format_double(mu) + " " + synqkd::format_double(eps) + "\n";
        write_file(a.out_path, data);

        synqkd::JsonWriter w;
        w.begin_object();
        w.key("command").value("eve");
        w.key("version").value(tool_version);
        w.key("mode").value("curve");
        w.key("lambda").value(a.lambda);
        w.key("delta").value(a.delta.value_or(0.0));
        w.key("mu_max").value(a.mu_max);
        w.key("step").value(a.step);
        w.key("out").value(a.out_path);
        w.key("points").value(curve.points.size());
        w.key("monotone").value(curve.monotone);
        w.end_object();
        std::cout << w.str() << "\n";
        return 0;
    }

    if (!a.mu) throw std::invalid_argument("eve: --mu is required in point mode");
    const double mu = *a.mu;

    synqkd::JsonWriter w;
    w.begin_object();
    w.key("command").value("eve");
    w.key("version").value(tool_version);
    w.key("mode").value("point");
    w.key("lambda").value(a.lambda);
    w.key("mu").value(mu);
    w.key("delta");
    if (a.delta)
        w.value(*a.delta);
    else
        w.null();
    w.key("epsilon");
    if (a.epsilon)
        w.value(*a.epsilon);
    else
        w.null();

    w.key("eve_stats");
    if (a.epsilon) {
        const synqkd::EveStats st = synqkd::invert_stats(a.lambda, mu, *a.epsilon);
        w.begin_object();
        w.key("j3").value(st.j3);
        w.key("s").value(st.s);
        w.end_object();
    } else {
        w.null();
    }

    const synqkd::Thresholds th =
        synqkd::compute_thresholds(a.lambda, mu, a.delta.value_or(0.0));
    w.key("epsilon_max");
    if (th.eps_max)
        w.value(*th.eps_max);
    else
        w.null();
    w.key("epsilon_delta_max");
    if (a.delta && th.eps_delta_max)
        w.value(*th.eps_delta_max);
    else
        w.null();
    w.end_object();
    std::cout << w.str() << "\n";
    return 0;
}

struct RigidityArgs {
    std::vector<double> angles;
    std::uint64_t l00 = 0, l01 = 0, l10 = 0, l11 = 0;
    std::uint64_t sweep = 0;
    std::uint64_t seed = 0;
    double tol = 1e-9;
};

void write_report(synqkd::JsonWriter& w, const synqkd::RigidityReport& r) {
    w.begin_object();
    w.key("d").value(r.d);
    w.key("j3").value(r.j3);
    w.key("lambda").value(r.lambda);
    w.key("l_ratio").value(r.l_ratio);
    w.key("deviation").value(r.deviation);
    w.key("stat_diff").value(r.stat_diff);
    w.key("l_ratio_bound").value(r.l_ratio_bound);
    w.key("deviation_bound").value(r.deviation_bound);
    w.key("stat_diff_bound").value(r.stat_diff_bound);
    w.key("l_ratio_margin").value(r.l_ratio_margin);
    w.key("deviation_margin").value(r.deviation_margin);
    w.key("stat_diff_margin").value(r.stat_diff_margin);
    w.key("delta_identity_residual").value(r.delta_identity_residual);
    w.key("l_ratio_ok").value(r.l_ratio_ok);
    w.key("deviation_ok").value(r.deviation_ok);
    w.key("stat_diff_ok").value(r.stat_diff_ok);
    w.key("all_ok").value(r.all_ok);
    w.key("tol").value(r.tol);
    w.end_object();
}

int cmd_rigidity(const RigidityArgs& a) {
    synqkd::JsonWriter w;
    w.begin_object();
    w.key("command").value("rigidity");
    w.key("version").value(tool_version);

    bool ok = false;
    if (a.sweep > 0) {
        const synqkd::SweepSummary s = synqkd::sweep_forms(a.sweep, a.seed, 50, a.tol);
        w.key("mode").value("sweep");
        w.key("count").value(s.count);
        w.key("seed").value(a.seed);
        w.key("summary").begin_object();
        w.key("bound_violations").value(s.bound_violations);
        w.key("quantum_bound_violations").value(s.quantum_bound_violations);
        w.key("min_margin").value(s.min_margin);
        w.key("max_identity_residual").value(s.max_identity_residual);
        w.key("min_j").value(s.min_j);
        w.key("all_ok").value(s.all_ok);
        w.end_object();
        ok = s.all_ok;
    } else {
        if (a.angles.empty())
            throw std::invalid_argument("rigidity: provide --angles or --sweep");
        synqkd::TwoProjectionForm f;
        f.theta = a.angles;
        f.l00 = a.l00;
        f.l01 = a.l01;
        f.l10 = a.l10;
        f.l11 = a.l11;
        const synqkd::RigidityReport r = synqkd::verify_main_bound(f, a.tol);
        w.key("mode").value("single");
        w.key("form").begin_object();
        w.key("l00").value(f.l00);
        w.key("l01").value(f.l01);
        w.key("l10").value(f.l10);
        w.key("l11").value(f.l11);
        w.key("angles").begin_array();
        for (double t : f.theta) w.value(t);
        w.end_array().end_object();
        w.key("report");
        write_report(w, r);
        ok = r.all_ok;
    }
    w.end_object();
    std::cout << w.str() << "\n";
    return ok ? 0 : 2;
}

unsigned default_threads() {
    if (const char* env = std::getenv("SYNQKD_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synchronous-correlation QKD toolkit"};
    app.require_subcommand(1);

    auto* ideal = app.add_subcommand("ideal", "print the exact ideal statistics");

    SimulateArgs sim;
    sim.threads = default_threads();
    auto* simulate = app.add_subcommand("simulate", "run a protocol simulation");
    simulate->add_option("--protocol", sim.protocol, "protocol variant")
        ->check(CLI::IsMember({"A", "B"}));
    simulate->add_option("--n", sim.n, "number of rounds");
    simulate->add_option("--m", sim.m, "sacrifice period (protocol B)");
    simulate->add_option("--lambda", sim.lambda, "accepted |J3 + 1/8| deviation");
    simulate->add_option("--mu", sim.mu, "accepted asynchronicity (protocol B)");
    simulate->add_option("--seed", sim.seed, "simulation seed");
    simulate->add_option("--device", sim.device, "ideal | uniform | path to table JSON");
    simulate->add_option("--transcript", sim.transcript_path, "write JSON-lines transcript here");
    simulate->add_option("--out", sim.out_path, "also write the outcome JSON here");
    simulate->add_option("--threads", sim.threads, "sampling threads (env SYNQKD_THREADS)");

    EveArgs eve;
    auto* eve_cmd = app.add_subcommand("eve", "adversary feasibility analysis");
    eve_cmd->add_option("--epsilon", eve.epsilon, "Eve's basis uncertainty");
    eve_cmd->add_option("--lambda", eve.lambda, "allowed |J3 + 1/8| deviation")->required();
    eve_cmd->add_option("--mu", eve.mu, "allowed asynchronicity (point mode)");
    eve_cmd->add_option("--delta", eve.delta, "lower bound on Eve's asynchronicity");
    eve_cmd->add_flag("--curve", eve.curve, "tabulate thresholds over a mu grid");
    eve_cmd->add_option("--mu-max", eve.mu_max, "curve: largest mu");
    eve_cmd->add_option("--step", eve.step, "curve: mu grid step");
    eve_cmd->add_option("--out", eve.out_path, "curve: output .data path");

    RigidityArgs rig;
    auto* rig_cmd = app.add_subcommand("rigidity", "verify the perturbation bounds");
    rig_cmd->add_option("--angles", rig.angles, "block angles, comma separated")
        ->delimiter(',');
    rig_cmd->add_option("--l00", rig.l00, "junk dimension l00");
    rig_cmd->add_option("--l01", rig.l01, "junk dimension l01");
    rig_cmd->add_option("--l10", rig.l10, "junk dimension l10");
    rig_cmd->add_option("--l11", rig.l11, "junk dimension l11");
    rig_cmd->add_option("--sweep", rig.sweep, "verify this many random forms");
    rig_cmd->add_option("--seed", rig.seed, "sweep seed");
    rig_cmd->add_option("--tol", rig.tol, "margin tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (ideal->parsed()) return cmd_ideal();
        if (simulate->parsed()) return cmd_simulate(sim);
        if (eve_cmd->parsed()) return cmd_eve(eve);
        if (rig_cmd->parsed()) return cmd_rigidity(rig);
    } catch (const synqkd::EstimationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
