// Heralded single photons: a 5 keV electron and a 2.33 eV cavity mode.
// Longer interactions shrink sigma, and g2 falls with it.

#include <cstdio>

#include "recoil/recoil.hpp"

int main() {
    recoil::PhysicalConfig c;
    c.electron_kinetic_kev = 5.0;
    c.photon_energy_ev = {2.33};
    c.coupling_g_qu = 0.1;
    c.truncation_n_max = 16;

    std::printf("%10s %10s %12s %12s\n", "L [um]", "sigma", "<N>", "g2");
    for (double length : {25.0, 50.0, 100.0, 200.0, 400.0, 800.0}) {
        c.interaction_length_um = length;
        const recoil::LadderPhases phases = recoil::mismatch_phases_physical(c);
        const recoil::WaveFunction out =
            recoil::evolve_exact(phases, c.coupling_g_qu, recoil::WaveFunction::initial(phases));
        const recoil::PhotonStatistics st = recoil::photon_statistics(out);
        std::printf("%10.0f %10.4f %12.4e %12.4f\n", length, recoil::sigma_full(5.0, 2.33, length), st.mean_photons,
                    *st.g2);
    }
}
