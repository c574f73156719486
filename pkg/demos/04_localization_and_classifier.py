"""Transport diagnostics across the coupling transition, and the classifier.

Below the self-dual point the bulk eigenvectors decay at the cocycle rate
ln(t^-2); above it they spread across the sample.  The classifier reads the
same transition off the arithmetic of the flux and phase alone.
"""

import math

import numpy as np

from lieb_spectra.arithmetic import Flux
from lieb_spectra.dynamics import eig_localization_profile, lyapunov
from lieb_spectra.operators import GeneralParams, LiebParams, build_lieb_1d
from lieb_spectra.spectra import amo_bands_rational
from lieb_spectra.verify import classify_regime

GOLDEN = Flux.named("golden")


def main():
    print("Lyapunov exponents at strong coupling (expect ln 4 = %.4f on bands):" % math.log(4))
    bands = amo_bands_rational(13, 21, 4.0)
    for lo, hi in list(bands.intervals)[:4]:
        e = 0.5 * (lo + hi)
        print(f"  E = {e:>8.4f}: LE = {lyapunov(e, 4.0, GOLDEN, 0.1, 50000):.4f}")

    print("\nLocalization contrast on a 400-cell chain (golden flux, theta = 0.1):")
    for t, window in [(0.5, (1.0, 2.0)), (2.0, (2.0, 4.0))]:
        M = build_lieb_1d(LiebParams(alpha=GOLDEN, theta=0.1, t=t), 400)
        prof = eig_localization_profile(M, window)
        rates = [fit.rate for _, fit, _ in prof]
        iprs = [ipr for _, _, ipr in prof]
        print(
            f"  t = {t}: {len(prof):>4} states, median decay rate {np.median(rates):+.3f}, "
            f"median IPR {np.median(iprs):.5f}"
        )

    print("\nRegime classifier:")
    sc_flux = Flux.from_quotients([1] * 8 + [int(np.round(np.exp(102.0)))])
    cases = [
        ("golden flux, t = 0.5", GOLDEN, 0.0, LiebParams(alpha=GOLDEN, theta=0.0, t=0.5)),
        ("Liouville-type flux, t = 0.5", sc_flux, 0.0, LiebParams(alpha=sc_flux, theta=0.0, t=0.5)),
        ("any irrational, t = 2", GOLDEN, 0.2, LiebParams(alpha=GOLDEN, theta=0.2, t=2.0)),
        ("self-dual t = 1", GOLDEN, 0.3, LiebParams(alpha=GOLDEN, theta=0.3, t=1.0)),
        ("general couplings (0.7, 1.3, 0.9)", GOLDEN, 0.0,
         GeneralParams(alpha=GOLDEN, theta=0.0, t2=0.7, t3=1.3, t4=0.9)),
        ("rational flux 1/3", Flux.rational(1, 3), 0.0,
         LiebParams(alpha=Flux.rational(1, 3), theta=0.0, t=0.5)),
    ]
    for name, alpha, theta, model in cases:
        label = classify_regime(alpha, theta, model)
        print(f"  {name:<36} -> {label.regime.value}")


if __name__ == "__main__":
    main()
