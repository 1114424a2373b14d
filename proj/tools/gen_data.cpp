// Regenerates the bundled data files from the oracles.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "yl/bundled.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Write the bundled data files"};
    std::string dir = yl::data_dir();
    app.add_option("--out", dir, "Output directory");
    CLI11_PARSE(app, argc, argv);
    for (const auto& [name, j] : yl::bundled_files()) {
        std::string path = dir + "/" + name;
        std::ofstream out(path);
        if (!out) {
            std::cerr << "cannot write " << path << "\n";
            return 2;
        }
        out << j.dump(1) << "\n";
        std::cerr << "wrote " << path << "\n";
    }
    return 0;
}
