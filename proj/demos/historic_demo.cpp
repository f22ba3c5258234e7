// Certifies the default blender, builds one historic orbit and prints its
// checkpoint averages.
#include <iostream>

#include "blender/blender_cert.hpp"
#include "blender/historic.hpp"
#include "blender/io.hpp"

int main() {
    using namespace blender;
    const SkewSystem sys = build_system(SystemParams{});
    const BlenderReport rep = covering_conditions_report(sys, Rational(0));
    std::cout << "B = " << sys.region().str() << ", L = " << rep.lebesgue_number->str()
              << (rep.overall ? " (blender certified)\n" : " (not certified)\n");

    const ObservableSpec spec = ObservableSpec::defaults_for(sys.params());
    const Schedule plan = make_schedule(10, 2, Rational(1, 100), transit_bounds(sys, spec));
    const HistoricCertificate cert = construct_historic_point(sys, spec, plan);
    std::cout << "word length " << cert.horizon() << ", start fiber ~ " << io::decimal(cert.chosen_point.fiber) << '\n';
    for (const CheckpointPair& p : cert.pairs)
        std::cout << "  a(" << p.n1 << ") = " << io::decimal(p.avg1) << "   a(" << p.n2 << ") = " << io::decimal(p.avg2)
                  << '\n';
    std::cout << (verify_certificate(sys, spec, cert) ? "replay ok\n" : "replay FAILED\n");
}
