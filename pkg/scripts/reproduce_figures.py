"""Write the data behind every figure to a directory of CSV (or JSON) files.

    python scripts/reproduce_figures.py --outdir results --threads 4
    python scripts/reproduce_figures.py --only fig1 fig4
"""

import argparse
import sys
import time
from pathlib import Path

from polariton_lab import cli, figures


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--only", nargs="+", choices=sorted(figures.BUILDERS.keys() - {"sweep"}))
    ap.add_argument("--format", choices=cli.FORMATS, default="csv")
    ap.add_argument("--threads", type=int)
    args = ap.parse_args(argv)

    outdir = Path(args.outdir)
    for name in args.only or ("fig1", "fig2", "fig3", "fig4", "fig5"):
        t0 = time.perf_counter()
        cfg = cli.RunConfig(name, format=args.format, threads=args.threads,
                            out=str(outdir / f"{name}.{args.format}"))
        tables = cli.run_figure(cfg)
        paths = cli.write_tables(name, tables, cfg.format, cfg.out)
        print(f"{name}: {len(paths)} file(s) in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
