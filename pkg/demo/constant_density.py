import logging

import numpy as np
import pandas as pd

from nlsignal import breakdown, extended
from nlsignal.quad import extrapolate_constant_density

logging.basicConfig(level=logging.INFO)


def closed_form_correction(pair, sd):
    return breakdown(pair, sd).correction


def main():
    pair = extended(omega=1.0, separation=7.0, duration=2.0, start=8.0, end=8.1)
    rows = []
    for ell in np.logspace(-2, -1, 5):
        epsilons = ell**2 * np.array([0.5, 0.25, 0.125])
        closed, _ = extrapolate_constant_density(pair, ell, epsilons, closed_form_correction)
        oracle, _ = extrapolate_constant_density(pair, ell, epsilons)
        rows.append([ell, closed, oracle, closed / ell**2])
    return pd.DataFrame(rows, columns=["ell", "Closed form", "Oracle", "Correction / ell^2"])


if __name__ == "__main__":
    print(main())
