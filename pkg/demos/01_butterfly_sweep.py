"""Hofstadter-style butterfly sweep: band sets over every reduced flux p/q.

Computes the almost Mathieu and Lieb band sets for all reduced fractions up
to q = 12, writes both CSVs next to this script, and prints how the total
bandwidth of the critical-coupling spectrum collapses along Fibonacci
approximants of the golden mean.
"""

import math
import pathlib

from lieb_spectra.spectra import (
    amo_bands_rational,
    lieb_bands_rational,
    measure,
    write_bands_csv,
)

HERE = pathlib.Path(__file__).resolve().parent
Q_MAX = 12


def reduced_fractions(q_max):
    for q in range(1, q_max + 1):
        for p in range(q):
            if math.gcd(p, q) == 1:
                yield p, q


def main():
    amo_sets = [amo_bands_rational(p, q, 1.0) for p, q in reduced_fractions(Q_MAX)]
    lieb_sets = [lieb_bands_rational(p, q, 1.0) for p, q in reduced_fractions(Q_MAX)]
    write_bands_csv(amo_sets, str(HERE / "amo_butterfly.csv"))
    write_bands_csv(lieb_sets, str(HERE / "lieb_butterfly.csv"))
    print(f"wrote {HERE / 'amo_butterfly.csv'} ({sum(len(b) for b in amo_sets)} bands)")
    print(f"wrote {HERE / 'lieb_butterfly.csv'} ({sum(len(b) for b in lieb_sets)} bands)")

    print("\nBandwidth collapse at critical coupling along golden approximants:")
    print(f"{'p/q':>9} {'measure':>12} {'q * measure':>12}")
    for p, q in [(3, 5), (5, 8), (8, 13), (13, 21), (21, 34), (34, 55), (55, 89)]:
        m = measure(amo_bands_rational(p, q, 1.0))
        print(f"{p:>4}/{q:<4} {m:>12.6f} {q * m:>12.4f}")
    print("\nThe q * measure column stabilizing while the measure itself shrinks")
    print("is the finite-flux shadow of the zero-measure critical spectrum.")


if __name__ == "__main__":
    main()
