// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front-end: index -> darray -> clcp -> acs / ms, plus verify.
// Exit status: 0 ok, 1 validation failure, 2 I/O failure, 3 verify mismatch.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "clcp/acs.hpp"
#include "clcp/pipeline.hpp"
#include "clcp/verify.hpp"

namespace {

using namespace clcp;

void report(const StageSummary& s) { std::cerr << s.line() << '\n'; }

Color parse_color(const CollectionManifest& m, const std::string& selector) {
    if (!selector.empty() && selector.find_first_not_of("0123456789") == std::string::npos) {
        auto c = std::stoul(selector);
        if (c > m.num_subjects)
            throw ValidationError("color " + selector + " out of range");
        return static_cast<Color>(c);
    }
    return m.color_of(selector);
}

void ensure_upstream(const IndexFiles& files, std::optional<std::uint64_t> block_rows) {
    if (!darray_present(files))
        report(darray_stage(files));
    if (!clcp_present(files)) {
        ClcpOptions opt;
        opt.block_rows = block_rows;
        report(clcp_stage(files, opt));
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path);
    return out;
}

int print_failures(const VerifyTally& tally) {
    for (const auto& [name, n] : tally.compared)
        std::cerr << "verify: " << name << " comparisons=" << n << '\n';
    if (tally.ok()) {
        std::cerr << "verify: OK (" << tally.instances << " instances)\n";
        return 0;
    }
    const auto& f = tally.failures.front();
    std::cerr << "verify: MISMATCH in " << f.check << ": " << f.detail << " (" << tally.failures.size()
              << " failure(s) total)\n";
    return static_cast<int>(ErrorKind::Mismatch);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Colored LCP array and multi-string ACS over disk-resident index files"};
    app.require_subcommand(1);

    // index
    std::string fasta, chi, out_dir, width_arg = "auto", alphabet = std::string(kDnaAlphabet);
    auto* index_cmd = app.add_subcommand("index", "Build ebwt/id/lcp/pos/lcp_chi files from a FASTA file");
    index_cmd->add_option("--fasta", fasta, "Input FASTA")->required();
    index_cmd->add_option("--chi", chi, "Name of the query record")->required();
    index_cmd->add_option("--out", out_dir, "Output index directory")->required();
    index_cmd->add_option("--lcp-width", width_arg, "Bytes per lcp entry: auto, 1, 2, 4 or 8")
        ->check(CLI::IsMember({"auto", "1", "2", "4", "8"}));
    index_cmd->add_option("--alphabet", alphabet, "Allowed symbols (default ACGT)");

    // darray / clcp / acs / ms share --index
    std::string index_dir;
    auto* darray_cmd = app.add_subcommand("darray", "Compute the D array");
    darray_cmd->add_option("--index", index_dir, "Index directory")->required();

    std::optional<std::uint64_t> block_rows;
    std::string emit_matrix, emit_rows;
    auto* clcp_cmd = app.add_subcommand("clcp", "Forward scan plus propagation passes");
    clcp_cmd->add_option("--index", index_dir, "Index directory")->required();
    clcp_cmd->add_option("--block-rows", block_rows, "Chi matrix rows per block (Q >= 2)");
    clcp_cmd->add_option("--emit-matrix", emit_matrix, "Also copy the finalized chi matrix here");
    clcp_cmd->add_option("--emit-rows", emit_rows, "Also copy the per-row (row, color, u, l) records here");

    std::optional<unsigned> sigma;
    std::string acs_out;
    bool phylip = false;
    auto* acs_cmd = app.add_subcommand("acs", "ACS distances of the query against every subject");
    acs_cmd->add_option("--index", index_dir, "Index directory")->required();
    acs_cmd->add_option("--sigma", sigma, "Alphabet size used in the normalization");
    acs_cmd->add_option("--out", acs_out, "Output file (default stdout)");
    acs_cmd->add_flag("--phylip", phylip, "Write `count` then `name distance` lines instead of TSV");
    acs_cmd->add_option("--block-rows", block_rows, "Q used if the clcp stage has to run");

    std::string target, ms_out;
    bool reverse = false;
    auto* ms_cmd = app.add_subcommand("ms", "Matching statistics of one subject");
    ms_cmd->add_option("--index", index_dir, "Index directory")->required();
    ms_cmd->add_option("--target", target, "Subject color or name")->required();
    ms_cmd->add_option("--out", ms_out, "Output file")->required();
    ms_cmd->add_flag("--reverse", reverse, "Emit MS(query, target) instead of MS(target, query)");

    bool random = false;
    RandomSuiteOptions ropt;
    std::optional<unsigned> verify_sigma;
    std::string scratch;
    auto* verify_cmd = app.add_subcommand("verify", "Compare against brute-force reference implementations");
    auto* vindex = verify_cmd->add_option("--index", index_dir, "Index directory to re-derive and diff");
    auto* vrandom = verify_cmd->add_flag("--random", random, "Run the randomized oracle suite");
    vindex->excludes(vrandom);
    verify_cmd->add_option("--trials", ropt.trials, "Random trials per sigma")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", ropt.seed, "RNG seed");
    verify_cmd->add_option("--sigma", verify_sigma, "Alphabet size: 2 or 4 (default both)")
        ->check(CLI::IsMember({2u, 4u}));
    verify_cmd->add_option("--max-len", ropt.max_len, "Maximum string length")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--max-m", ropt.max_m, "Maximum number of subjects")->check(CLI::Range(2u, 1000u));
    verify_cmd->add_option("--scratch", scratch, "Scratch directory for random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorKind::Validation);
    }

    try {
        IndexFiles files{index_dir};
        if (*index_cmd) {
            IndexOptions opt;
            opt.alphabet = alphabet;
            opt.lcp_width = width_arg == "auto" ? 0 : static_cast<unsigned>(std::stoul(width_arg));
            report(index_stage(fasta, chi, out_dir, opt));
        } else if (*darray_cmd) {
            report(darray_stage(files));
        } else if (*clcp_cmd) {
            ClcpOptions opt;
            opt.block_rows = block_rows;
            report(clcp_stage(files, opt));
            if (!emit_matrix.empty())
                std::filesystem::copy_file(files.clcp_chi(), emit_matrix,
                                           std::filesystem::copy_options::overwrite_existing);
            if (!emit_rows.empty())
                std::filesystem::copy_file(files.rows(), emit_rows, std::filesystem::copy_options::overwrite_existing);
        } else if (*acs_cmd) {
            ensure_upstream(files, block_rows);
            StageTimer t;
            auto manifest = load_manifest(files);
            auto report_data = finalize(accumulate(files, manifest), manifest, sigma);
            auto write = [&](std::ostream& os) {
                if (phylip)
                    write_phylip(os, report_data);
                else
                    write_tsv(os, report_data);
            };
            if (acs_out.empty()) {
                write(std::cout);
            } else {
                auto out = open_out(acs_out);
                write(out);
                if (!out)
                    throw IoError("failed writing " + acs_out);
            }
            report({"acs", manifest.total_rows, 2 * std::size_t{manifest.num_subjects}, t.seconds()});
        } else if (*ms_cmd) {
            ensure_upstream(files, block_rows);
            StageTimer t;
            auto manifest = load_manifest(files);
            Color c = parse_color(manifest, target);
            auto ms = reverse ? matching_statistics_query(files, manifest, c) : matching_statistics(files, manifest, c);
            auto out = open_out(ms_out);
            for (auto v : ms)
                out << v << '\n';
            if (!out)
                throw IoError("failed writing " + ms_out);
            report({"ms", manifest.total_rows, ms.size(), t.seconds()});
        } else if (*verify_cmd) {
            VerifyTally tally;
            if (random) {
                if (verify_sigma)
                    ropt.sigmas = {*verify_sigma};
                std::filesystem::path dir =
                    scratch.empty() ? std::filesystem::temp_directory_path() / "clcp-verify" : std::filesystem::path(scratch);
                std::filesystem::create_directories(dir);
                tally = verify_random(ropt, dir);
            } else if (!index_dir.empty()) {
                ensure_upstream(files, std::nullopt);
                tally.instances = 1;
                verify_index_files(files, tally);
            } else {
                throw ValidationError("verify needs --index <dir> or --random");
            }
            return print_failures(tally);
        }
    } catch (const clcp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Io);
    }
    return 0;
}
