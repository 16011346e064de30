// `scale_constants IN OUT FACTOR`: writes IN with every value multiplied by FACTOR.

#include "smallball/bounds.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    if (argc != 4) {
        std::cerr << "usage: scale_constants IN OUT FACTOR\n";
        return 2;
    }
    try {
        const double factor = std::stod(argv[3]);
        auto set = smallball::ConstantSet::load(argv[1]);
        for (auto c : set.all()) {
            c.value *= factor;
            set.set(c);
        }
        set.save(argv[2]);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
