#include <iostream>

#include "CLI11.hpp"

#include "blender/cli.hpp"

namespace bc = blender::cli;

namespace {

void add_common(CLI::App* sub, bc::CommonOptions& common) {
    sub->add_option("-c,--config", common.config_path, "key = value config file");
    sub->add_option("-s,--set", common.overrides, "override a config key, e.g. --set eps=1/50");
    sub->add_flag("--reproducible", common.reproducible, "omit the timestamp from reports");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blender-horseshoe lab: exact covering certificates and historic orbits"};
    app.require_subcommand(1);

    bc::CertifyOptions certify;
    auto* c = app.add_subcommand("certify", "certify covering, hyperbolicity and the distal point");
    add_common(c, certify.common);
    c->add_option("-o,--out", certify.report_path, "report file (JSON)");

    bc::ConstructOptions construct;
    std::optional<std::size_t> N, depth;
    std::optional<std::string> slack;
    auto* k = app.add_subcommand("construct", "build and verify a historic-behavior certificate");
    add_common(k, construct.common);
    k->add_option("-N,--N", N, "first checkpoint index");
    k->add_option("-d,--depth", depth, "number of checkpoint pairs");
    k->add_option("--slack", slack, "margin on the 7/8 and 1/8 bounds");
    k->add_option("-o,--out", construct.certificate_path, "certificate file (JSON)");
    k->add_option("--csv", construct.csv_path, "orbit time series");

    bc::VerifyOptions verify;
    auto* v = app.add_subcommand("verify", "replay a certificate");
    v->add_option("certificate", verify.certificate_path)->required();

    bc::SweepOptions sweep;
    auto* s = app.add_subcommand("sweep", "covering outcome over a (lambda, mu, eps) grid");
    add_common(s, sweep.common);
    s->add_option("--lambda", sweep.lambda_axis, "list a,b,c or range lo:hi:step");
    s->add_option("--mu", sweep.mu_axis, "list or range");
    s->add_option("--eps", sweep.eps_axis, "list or range");
    s->add_option("-o,--out", sweep.csv_path, "CSV file");
    s->add_option("-j,--threads", sweep.threads, "worker threads (0: all cores)");

    bc::DetectOptions detect;
    std::string point;
    auto* d = app.add_subcommand("detect", "search an orbit for a historic witness pair");
    add_common(d, detect.common);
    d->add_option("--point", point, "P for the fixed point")->check(CLI::IsMember({"P"}));
    d->add_option("--fiber", detect.fiber, "fiber coordinate");
    d->add_option("--base-s", detect.base_s, "stable coordinates, comma-separated");
    d->add_option("--base-uu", detect.base_uu, "unstable coordinates, comma-separated");
    d->add_option("--certificate", detect.certificate_path, "use the chosen point of a certificate");
    d->add_option("-N,--N", detect.N);
    d->add_option("--horizon", detect.horizon);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : bc::kConfigError;
    }

    if (*c) return bc::cmd_certify(certify);
    if (*k) {
        if (N) construct.common.overrides.push_back("N=" + std::to_string(*N));
        if (depth) construct.common.overrides.push_back("depth=" + std::to_string(*depth));
        if (slack) construct.common.overrides.push_back("slack=" + *slack);
        return bc::cmd_construct(construct);
    }
    if (*v) return bc::cmd_verify(verify);
    if (*s) return bc::cmd_sweep(sweep);
    detect.fixed_point = point == "P";
    return bc::cmd_detect(detect);
}
