// Copyright 2026 The FisherLens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Writes the seeded synthetic blob dataset (PGMs sorted by emotion plus a
// manifest) so the pipeline can run without any external data.

#include <CLI11.hpp>

#include <iostream>

#include "fisherlens/dataset.hpp"
#include "fisherlens/error.hpp"
#include "fisherlens/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic blob dataset", "fisherlens_blobs"};
    std::string out;
    fisherlens::BlobSpec spec;
    app.add_option("--out", out, "Output directory")->required();
    app.add_option("--classes", spec.classes)->capture_default_str()->check(CLI::Range(2, 8));
    app.add_option("--per-class", spec.per_class)->capture_default_str()->check(CLI::Range(2, 100000));
    app.add_option("--seed", spec.seed)->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        const auto manifest = fisherlens::write_blob_dataset(out, spec);
        fisherlens::write_manifest(std::filesystem::path(out) / "manifest.json", manifest);
        std::cout << manifest.records.size() << " blob faces -> " << out << "\n";
    } catch (const std::exception& e) {
        std::cerr << "fisherlens_blobs: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
