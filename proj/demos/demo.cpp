// Walks through the library on the square and triangle 0-cycles.
#include "modp/modp.hpp"

#include <iostream>

using namespace modp;

int main() {
    ExactZeroChain square = check::fig2_square();
    auto b = bockstein_b(square);
    std::cout << "b(square), p = 2: " << b.terms.size() << " terms, " << b.chain.atoms.size() << " atoms after merging\n";
    for (auto& a : b.chain.atoms) std::cout << "  (" << a.x[0] << ", " << a.x[1] << ") c = " << a.c << "\n";

    auto c = cyc_0(square);
    std::cout << "cyc(square): " << c.atoms.size() << " (line, midpoint) atoms\n";

    ExactZeroChain tri = check::fig2_triangle();
    auto bt = bockstein_b(tri);
    std::cout << "b(triangle), p = 3:\n";
    for (auto& a : bt.chain.atoms) std::cout << "  (" << a.x[0] << ", " << a.x[1] << ") c = " << a.c << "\n";

    // b(square) is a relative cycle in the disk; its flat norm is the cost of pushing
    // every atom to the boundary or cancelling them in pairs.
    ZeroChain z = to_double(b.chain);
    ZeroChain zero(z.p, z.ambient, z.relative);
    auto fl = flat_distance_0(z, zero);
    std::cout << "Fl(b(square), 0) = " << fl.value << (fl.verified ? " (certificate verified)" : "") << "\n";

    auto g = standard_gluing(torus_family(8, 12, 3), BaseChain{3, {{0.1, 0.1 + 2 * M_PI, 1}}, {}});
    std::cout << "glued torus: mass " << g.mass_out << ", C = " << g.C << "\n";

    auto L = lens_complex(3, 5);
    std::cout << "H_*(lens(3, 5); Z):";
    for (auto& h : integral_homology(L)) std::cout << " " << h.str();
    std::cout << "\n";
    return 0;
}
