"""Search dephasing seeds for a CH falsifier and print the recorded constants.

A case qualifies when the two-time history F[1](A) & F[2](A) has CH residual
above 1e-3, the Theorem-6 split with the earlier one-time fact fails by more
than 1e-3, and the CH fast path disagrees with the general formula by more
than 1e-3.
"""
import argparse

from qtense.consistency import ch_residual
from qtense.logic import History
from qtense.model import generate_dephasing_model
from qtense.valuation import CH_FAST, GENERAL, history_amplitude
from qtense.verify import DEPHASING_PRESET

THRESHOLD = 1e-3


def t6_violation(m, t1=1.0, t2=2.0):
    def tau(*steps):
        return history_amplitude(m, History.from_steps(steps)).real

    return abs(tau((t1, {0}), (t2, {0})) + tau((t1, {1}), (t2, {0})) - tau((t2, {0})))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-seed", type=int, default=50)
    args = ap.parse_args()
    h = History.from_steps([(1.0, {0}), (2.0, {0})])
    for seed in range(args.max_seed):
        m = generate_dephasing_model(seed=seed, **DEPHASING_PRESET)
        res = ch_residual(m, h).max_residual
        gap = abs(history_amplitude(m, h, GENERAL) - history_amplitude(m, h, CH_FAST))
        t6 = t6_violation(m)
        if min(res, gap, t6) > THRESHOLD:
            print(f"seed={seed} ch_residual={res!r} t6_violation={t6!r} fast_gap={gap!r}")
            return
    print("no falsifier found")


if __name__ == "__main__":
    main()
