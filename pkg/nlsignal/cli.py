"""
Command-line front end::

    nlsignal --scenario Fig3 --out results/fig3
    nlsignal --config fig3.cfg --oracle --workers 4 --cache oracle.sqlite --out results/fig3
"""
import logging
import sys

import click

from nlsignal.caching import CACHE_PATH_VARIABLE, FileSystemOracleCache
from nlsignal.configurations import (
    SCENARIO_PRESETS,
    Scenario,
    default_workers,
    dump,
    load,
)
from nlsignal.exceptions import SpecValidationError
from nlsignal.runner import EXIT_INVALID, execute

logger = logging.getLogger(__name__)

SCENARIO_NAMES = [scenario.value for scenario in Scenario]


class _SpecCommand(click.Command):
    """Reports malformed flags with the validation exit code rather than click's 2."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as error:
            error.exit_code = EXIT_INVALID
            raise


@click.command(cls=_SpecCommand, context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--scenario", type=click.Choice(SCENARIO_NAMES), help="Named experiment.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Experiment spec file (key = value lines); flags override it.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="out",
              show_default=True, help="Directory for results.csv and summary.json.")
@click.option("--ell-min", type=float)
@click.option("--ell-max", type=float)
@click.option("--ell-count", type=int)
@click.option("--ell-spacing", type=click.Choice(["log", "linear"]))
@click.option("--oracle/--no-oracle", "oracle_check", default=None,
              help="Cross-check every closed form against the quadrature oracle.")
@click.option("--tolerance", type=float, help="Relative tolerance of the oracle integrals.")
@click.option("--omega", type=float, help="Detector energy gap.")
@click.option("--R", "R", type=float, help="Distance between the detectors.")
@click.option("--T", "T", type=float, help="Duration of Alice's window [0, T].")
@click.option("--tau", type=float, help="Time of Bob's kick.")
@click.option("--a", type=float, help="Start of Bob's window.")
@click.option("--b", type=float, help="End of Bob's window.")
@click.option("--kappa", type=float, help="Strength of Bob's kick.")
@click.option("--alpha", type=float, help="Coefficient of the Gaussian spectral density.")
@click.option("--dump-config", type=click.Path(dir_okay=False),
              help="Write the resolved spec to this file.")
@click.option("--workers", type=int,
              help="Worker processes (default: $NLSIGNAL_WORKERS or one per CPU).")
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False),
              help=f"sqlite file caching oracle results (also ${CACHE_PATH_VARIABLE}).")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]),
              default="INFO", show_default=True)
@click.option("--dry-run", is_flag=True, help="Log the run plan and exit.")
def main(  # pylint: disable=too-many-arguments, too-many-locals
    scenario, config_path, out_dir, ell_min, ell_max, ell_count, ell_spacing, oracle_check,
    tolerance, omega, R, T, tau, a, b, kappa, alpha, dump_config, workers, cache_path,
    log_level, dry_run,
):  # pylint: disable=invalid-name
    """Leading-order signaling between detectors coupled to a non-local scalar field."""
    logging.basicConfig(level=log_level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    overrides = {
        "ell_min": ell_min, "ell_max": ell_max, "ell_count": ell_count,
        "ell_spacing": ell_spacing, "oracle_check": oracle_check, "tolerance": tolerance,
        "omega": omega, "R": R, "T": T, "tau": tau, "a": a, "b": b, "kappa": kappa,
        "alpha": alpha,
    }

    def build_spec():
        if config_path:
            spec = load(config_path)
            if scenario and scenario != spec.scenario.value:
                raise SpecValidationError(
                    f"--scenario {scenario} conflicts with {spec.scenario.value} in {config_path}"
                )
        elif scenario:
            spec = SCENARIO_PRESETS[Scenario(scenario)]
        else:
            raise SpecValidationError("either --scenario or --config is required")
        resolved = spec.with_overrides(**overrides)
        if dump_config:
            dump(resolved, dump_config)
            logger.info("wrote resolved spec to %s", dump_config)
        return resolved

    try:
        worker_count = workers if workers is not None else default_workers()
    except SpecValidationError as error:
        logger.error("%s", error)
        sys.exit(EXIT_INVALID)
    cache = FileSystemOracleCache(cache_path) if cache_path else None
    sys.exit(execute(build_spec, out_dir, worker_count, cache, dry_run))


if __name__ == "__main__":
    main()  # pylint: disable=no-value-for-parameter
