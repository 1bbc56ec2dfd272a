"""CH residual of a two-time history as the dephasing couplings are scaled."""
import argparse

import numpy as np

from qtense.consistency import ch_residual
from qtense.logic import History
from qtense.model import generate_dephasing_model


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--base", default="1.0,0.6", help="comma-separated base couplings")
    ap.add_argument("--splitting", type=float, default=1.0)
    args = ap.parse_args()
    base = np.array([float(x) for x in args.base.split(",")])
    h = History.from_steps([(1.0, {0}), (2.0, {0})])
    print("scale,max_coupling,ch_residual")
    for scale in np.logspace(-2, 2, 9):
        m = generate_dephasing_model(len(base), args.splitting, list(scale * base), args.seed)
        print(f"{scale:.4g},{scale * base.max():.4g},{ch_residual(m, h).max_residual!r}")


if __name__ == "__main__":
    main()
