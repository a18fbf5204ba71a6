// Command-line front end: structure checks, cocycle verification, cohomology
// tables and connecting constants, with markdown or byte-stable JSON output.
//
// Exit codes: 0 all checks passed, 1 a check mismatched, 2 usage error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "veccoh/report.hpp"

namespace {

using namespace veccoh;

struct OutputOptions {
    bool json = false;
    bool markdown = false;
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
    cmd->add_flag("--json", out.json, "emit the report as JSON");
    cmd->add_flag("--markdown", out.markdown, "emit the report as markdown (default)");
}

int emit(const RunReport& rep, const OutputOptions& out) {
    if (out.json)
        std::cout << rep.to_json().dump(2) << "\n";
    else
        std::cout << rep.to_markdown();
    return rep.exit_code();
}

Species parse_species(const std::string& s) {
    if (s == "mv" || s == "multivector") return Species::multivector;
    if (s == "form") return Species::form;
    if (s == "fn" || s == "function") return Species::function;
    throw CLI::ValidationError("--species", "expected mv, form or fn");
}

CocycleTag parse_family(const std::string& s) {
    if (s == "div") return CocycleTag::div;
    if (s == "id_times" || s == "id") return CocycleTag::id_times;
    if (s == "iota" || s == "iota_dc") return CocycleTag::iota_dc;
    if (s == "c0") return CocycleTag::c0;
    if (s == "c01") return CocycleTag::c01;
    if (s == "c10") return CocycleTag::c10;
    if (s == "c2") return CocycleTag::c2;
    throw CLI::ValidationError("--family", "unknown family '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact workbench for the projective-subalgebra cohomology of operator modules on R^m"};
    app.require_subcommand(1);

    // structure
    auto* structure = app.add_subcommand("structure", "verify the embedded subalgebra");
    int s_m = 2;
    OutputOptions s_out;
    structure->add_option("--m", s_m, "dimension (at least 2)")->required();
    add_output_flags(structure, s_out);

    // cocycle
    auto* cocycle = app.add_subcommand("cocycle", "verify a named 1-cocycle family");
    std::string c_family;
    int c_m = 2, c_p = 0, c_q = 0, c_k = 0, c_trials = 50, c_maxdeg = 3;
    std::uint64_t c_seed = 1;
    OutputOptions c_out;
    cocycle->add_option("--family", c_family, "div, id_times, iota, c0, c01, c10 or c2")->required();
    cocycle->add_option("--m", c_m, "dimension")->required();
    auto* c_p_opt = cocycle->add_option("--p", c_p, "source degree");
    auto* c_q_opt = cocycle->add_option("--q", c_q, "target degree");
    cocycle->add_option("--k", c_k, "order bound");
    cocycle->add_option("--trials", c_trials, "number of random field pairs");
    cocycle->add_option("--max-deg", c_maxdeg, "random field degree bound");
    cocycle->add_option("--seed", c_seed, "random seed");
    add_output_flags(cocycle, c_out);

    // cohomology
    auto* cohomology = app.add_subcommand("cohomology", "compute one cohomology dimension");
    std::string h_species;
    int h_m = 2, h_p = 0, h_q = 0, h_k = 0, h_u = 1;
    std::string h_dump;
    OutputOptions h_out;
    cohomology->add_option("--species", h_species, "mv or form")->required();
    cohomology->add_option("--m", h_m, "dimension")->required();
    cohomology->add_option("--p", h_p, "source degree")->required();
    cohomology->add_option("--q", h_q, "target degree")->required();
    cohomology->add_option("--k", h_k, "order bound")->required();
    cohomology->add_option("--u", h_u, "cohomology degree (0 or 1)")->required();
    cohomology->add_option("--dump-matrices", h_dump, "write weight-zero coboundary matrices to DIR");
    add_output_flags(cohomology, h_out);

    // theta
    auto* theta = app.add_subcommand("theta", "compute the order-filtration connecting constant");
    std::string t_species;
    int t_m = 2, t_p = 1, t_q = 0, t_a = 0;
    OutputOptions t_out;
    theta->add_option("--species", t_species, "mv or form")->required();
    theta->add_option("--m", t_m, "dimension")->required();
    theta->add_option("--p", t_p, "source degree")->required();
    theta->add_option("--q", t_q, "target degree")->required();
    theta->add_option("--a", t_a, "gl-cochain degree of gamma (0 or 1)");
    add_output_flags(theta, t_out);

    // report
    auto* report = app.add_subcommand("report", "full dimension table against the built-in targets");
    int r_m = 2, r_maxk = 2;
    std::string r_dump;
    OutputOptions r_out;
    report->add_option("--m", r_m, "dimension")->required();
    report->add_option("--max-k", r_maxk, "largest order bound");
    report->add_option("--dump-matrices", r_dump, "write weight-zero coboundary matrices to DIR");
    add_output_flags(report, r_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (structure->parsed()) {
            if (s_m < 2) {
                std::cerr << "structure: --m must be at least 2\n";
                return 2;
            }
            if (s_m > 3)
                std::cerr << "note: m > 3 grows quickly; expect a long run\n";
            return emit(run_structure(s_m), s_out);
        }
        if (cocycle->parsed()) {
            // derive the missing degree from the family's shape constraint
            CocycleTag tag = parse_family(c_family);
            if (c_p_opt->count() == 0 && c_q_opt->count() > 0) {
                if (tag == CocycleTag::iota_dc) c_p = c_q + 1;
                if (tag == CocycleTag::id_times || tag == CocycleTag::c0) c_p = c_q;
            } else if (c_q_opt->count() == 0 && c_p_opt->count() > 0) {
                if (tag == CocycleTag::id_times || tag == CocycleTag::c0) c_q = c_p;
                if (tag == CocycleTag::c01 || tag == CocycleTag::c10) c_q = c_p + 1;
                if (tag == CocycleTag::c2) c_q = c_p + 2;
                if (tag == CocycleTag::iota_dc && c_p >= 1) c_q = c_p - 1;
            }
            return emit(run_cocycle(tag, c_m, c_p, c_q, c_k, c_trials, c_maxdeg, c_seed), c_out);
        }
        if (cohomology->parsed())
            return emit(run_cohomology(parse_species(h_species), h_m, h_p, h_q, h_k, h_u,
                                       h_dump.empty() ? std::nullopt : std::make_optional(h_dump)),
                        h_out);
        if (theta->parsed())
            return emit(run_theta(parse_species(t_species), t_m, t_p, t_q, t_a), t_out);
        if (report->parsed())
            return emit(run_report(r_m, r_maxk, r_dump.empty() ? std::nullopt : std::make_optional(r_dump)),
                        r_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
