// Two-photon emission into two modes without recoil: occupations come out
// pairwise equal, with a geometric diagonal like a two-mode squeezed state.

#include <cmath>
#include <cstdio>

#include "recoil/recoil.hpp"

int main() {
    const double p = -1000.0;  // one-photon mismatch phase
    const int n_max = 20;
    const recoil::LatticePhases phases = recoil::reduced_lattice_phases(1e5, 2, p, n_max);

    for (double g_eff : {0.1, 0.2, 0.3}) {
        const double g = std::sqrt(g_eff * std::abs(p));
        const recoil::TwoModeWaveFunction state = recoil::evolve_two_mode(phases, g);
        const recoil::TwinStatistics ts = recoil::twin_statistics(state);
        const double mean = ts.mode1.mean_photons;
        const auto fit = recoil::best_phase_fidelity(
            state, [&](double phase) { return recoil::twin_beam_from_mean(mean, phase, n_max); });
        std::printf("g_eff %.1f: <n1> = %.4f, <n2> = %.4f, diagonal weight %.5f, ratio %.4f, twin-beam fidelity %.5f\n",
                    g_eff, mean, ts.mode2.mean_photons, ts.diagonal_weight, ts.geometric_ratio.value_or(NAN),
                    fit.fidelity);
    }
}
