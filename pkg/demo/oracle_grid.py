import logging

import pandas as pd

from nlsignal import TaskManager, breakdown, delayed, integrate_s2_nonlocal
from nlsignal.configurations import acceptance_grid

logging.basicConfig(level=logging.INFO)


def compare(pair, sd):
    closed = breakdown(pair, sd).s2_ell
    oracle = integrate_s2_nonlocal(pair, sd, 1e-10)
    return closed, oracle.value, oracle.error_estimate


def results_to_table(grid, results):
    rows = [
        [
            type(pair.bob).__name__,
            pair.geometry.value,
            pair.omega,
            pair.bob.support,
            sd.ell / pair.separation,
            closed,
            oracle,
            abs(closed - oracle) / max(abs(closed), 1e-300),
        ]
        for (pair, sd), (closed, oracle, _) in zip(grid, results)
    ]
    return pd.DataFrame(
        rows,
        columns=["Bob", "Geometry", "Omega", "Window", "ell/R", "Closed form", "Oracle", "Rel. diff"],
    )


def main():
    grid = acceptance_grid()
    manager = TaskManager()
    manager.add_tasks(delayed(compare)(pair, sd) for pair, sd in grid)
    return results_to_table(grid, manager.run())


if __name__ == "__main__":
    with pd.option_context("display.max_rows", None, "display.width", 160):
        print(main())
