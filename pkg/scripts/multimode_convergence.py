"""How the multimode populations and the effective-model discrepancy depend on K and L.

Prints, for each (K, L), the multimode (n_U, n_L), the effective-model values
and the relative discrepancies at a few couplings on resonance.
"""

import argparse

from polariton_lab import microscopic


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lams", type=float, nargs="+", default=[0.05, 0.2, 0.3])
    ap.add_argument("--cavity", type=int, nargs="+", default=[5, 25, 100, 400])
    ap.add_argument("--matter", type=int, nargs="+", default=[1, 2, 5, 10])
    ap.add_argument("--delta", type=float, default=0.0)
    args = ap.parse_args(argv)

    print("lam,K,L,nU_mic,nL_mic,nU_eff,nL_eff,rel_U,rel_L")
    for lam in args.lams:
        for k in args.cavity:
            for l in args.matter:
                c = microscopic.compare_multimode_vs_effective(1.0 + args.delta, 1.0, lam, k, l)
                print(f"{lam:g},{k},{l},{c.n_mic[0]:.6e},{c.n_mic[1]:.6e},"
                      f"{c.n_eff[0]:.6e},{c.n_eff[1]:.6e},{c.discrepancy[0]:.4f},{c.discrepancy[1]:.4f}")


if __name__ == "__main__":
    main()
