/* Copyright 2026 The rigidity-lab Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ========================================================================= */
// rigidity-lab: command line front end.
//
//   rigidity-lab <subcommand> --config path [--out dir] [--seed n]
//
// Exit status: 0 on success (whatever the verdict), 2 on configuration errors,
// 1 on runtime errors, 3 when replay finds a mismatch.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rigidity_lab/config.hpp"
#include "rigidity_lab/gallery.hpp"
#include "rigidity_lab/reporting.hpp"

namespace {

using namespace rigidity_lab;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Options& o, bool config_required) {
    auto* c = cmd->add_option("--config", o.config, "experiment config (JSON)");
    if (config_required) c->required();
    cmd->add_option("--out", o.out, "output directory (overrides output.dir)");
    cmd->add_option("--seed", o.seed, "seed (overrides the config seed)");
}

ExperimentConfig load(const Options& o) {
    auto cfg = ExperimentConfig::from_file(o.config);
    if (o.seed) cfg.set_seed(*o.seed);
    if (!o.out.empty()) cfg.set_output_dir(o.out);
    return cfg;
}

void print(const RunResult& r) {
    for (const auto& l : r.lines) std::cout << l << "\n";
    std::cout << "artifacts: " << r.dir.string() << "\n";
}

int replay(const Options& o) {
    std::filesystem::path dir = o.out;
    if (dir.empty()) {
        if (o.config.empty()) throw ConfigError("", "replay needs --out or --config");
        dir = load(o).output_dir();
    }
    const auto rep = replay_directory(dir);
    for (const auto& e : rep.certificates)
        std::cout << (e.identical ? "identical  " : "DIFFERS    ") << e.path
                  << (e.detail.empty() ? "" : "  (" + e.detail + ")") << "\n";
    for (const auto& m : rep.manifest_mismatches) std::cout << "hash mismatch  " << m << "\n";
    if (rep.certificates.empty()) std::cout << "no certificates under " << dir.string() << "\n";
    if (!rep.manifest_present) std::cout << "no manifest.json under " << dir.string() << "\n";
    return rep.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rigidity lab for small actions of H x| Z on the interval and the circle"};
    app.require_subcommand(1);
    Options o;
    auto* constants = app.add_subcommand("constants", "A, K, k0, k, eigenvalues and p0 of the presentation");
    auto* splitting = app.add_subcommand("splitting", "stable and unstable subspaces and projections");
    auto* cert = app.add_subcommand("certify", "build the action and certify it");
    auto* sweep = app.add_subcommand("sweep", "certify a scaled family over analysis.eps_list");
    auto* replay_cmd = app.add_subcommand("replay", "re-derive every certificate in an output directory");
    auto* list = app.add_subcommand("gallery-list", "list the gallery constructions");
    for (auto* c : {constants, splitting, cert, sweep}) add_common(c, o, true);
    add_common(replay_cmd, o, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& e : gallery_entries())
                std::cout << e.name << (e.scalable ? "  [eps family]  " : "  ") << e.summary << "\n";
            return 0;
        }
        if (replay_cmd->parsed()) return replay(o);
        const auto cfg = load(o);
        if (constants->parsed()) print(run_constants(cfg));
        if (splitting->parsed()) print(run_splitting(cfg));
        if (cert->parsed()) print(run_certify(cfg));
        if (sweep->parsed()) print(run_sweep(cfg));
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
