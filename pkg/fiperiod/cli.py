import json
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import click

from fiperiod import cohom, fimod, gfla, oracles, periodcalc, periodet, utils
from fiperiod.errors import IncompleteShapeError, InfeasibleSizeError, SpecError
from fiperiod.fimod import FIPresentation
from fiperiod.progress_bar import print_progress
from fiperiod.series import DimensionSeries

DEFAULT_DIM_CAP: int = 200_000
DEFAULT_H1_CAP: int = 50_000_000
DEFAULT_P: int = 2
DEFAULT_JOBS: int = 1

BOUND_SCHEMA: str = "fiperiod.bound/1"
RECURSION_SCHEMA: str = "fiperiod.resolve-bound/1"

BUILTINS = ("intro-kernel", "example1", "trivial", "free")
QUANTITIES = ("dims", "h0", "h1")


class ParseFailure(click.ClickException):
    exit_code = 2


class InfeasibleFailure(click.ClickException):
    exit_code = 3


class InconclusiveFailure(click.ClickException):
    exit_code = 4


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli() -> None:
    """Cohomology dimensions of FI-modules, their periods in n and bounds on them."""


def _validate_prime(_context: click.Context, _param: click.Parameter, value: int) -> int:
    try:
        return gfla.check_prime(value)
    except ValueError as error:
        raise click.BadParameter(str(error)) from None


def _validate_positive_integer(_context: click.Context, _param: click.Parameter, value: int) -> int:
    if value is not None and value <= 0:
        raise click.BadParameter("Should be a positive integer.")

    return value


def _validate_nonnegative_integer(_context: click.Context, _param: click.Parameter, value: int) -> int:
    if value is not None and value < 0:
        raise click.BadParameter("Should be a nonnegative integer.")

    return value


def _parse_range(_context: click.Context, _param: click.Parameter, value: str):
    if value is None:
        return None
    try:
        return utils.parse_range(value)
    except ValueError as error:
        raise click.BadParameter(str(error)) from None


def _parse_degrees(_context: click.Context, _param: click.Parameter, value: str):
    if value is None:
        return None
    try:
        return utils.parse_degrees(value)
    except ValueError as error:
        raise click.BadParameter(str(error)) from None


def _load_module(spec, builtin, d, degrees, p) -> FIPresentation:
    if (spec is None) == (builtin is None):
        raise click.UsageError("Give either a SPEC file or --builtin, not both.")
    if spec is not None:
        with open(spec, encoding="utf-8") as handle:
            text = handle.read()
        try:
            return FIPresentation.from_json(text)
        except ValueError as error:
            raise ParseFailure(f"{spec}: {error}") from None

    if builtin == "intro-kernel":
        return oracles.intro_kernel_presentation()
    if builtin == "example1":
        if d is None:
            raise click.BadParameter("--builtin example1 needs --d.", param_hint="--d")
        try:
            return oracles.example1_presentation(d)
        except ValueError as error:
            raise click.BadParameter(str(error), param_hint="--d") from None
    if builtin == "trivial":
        return fimod.trivial_presentation(p)
    if degrees is None:
        raise click.BadParameter("--builtin free needs --degrees.", param_hint="--degrees")
    return fimod.free_presentation(p, degrees)


def _level_value(module: FIPresentation, what: str, n: int) -> int:
    level = fimod.evaluate(module, n)
    if what == "dims":
        return level.dim
    if what == "h0":
        return cohom.invariants_dim(level)
    return cohom.h1_dim(level)


def _emit_series(series: DimensionSeries, output_format: str, quantity: str = "") -> None:
    if output_format == "csv":
        click.echo(utils.series_to_csv(series), nl=False)
    else:
        click.echo(utils.series_to_json(series, quantity))


@click.command()
@click.argument("spec", required=False, type=click.Path(exists=True, dir_okay=False, readable=True))
@click.option("-b", "--builtin", type=click.Choice(BUILTINS), help="Use a bundled module instead of SPEC.")
@click.option("--d", type=int, help="Degree d of the example1 module.")
@click.option("--degrees", callback=_parse_degrees, help="Generator degrees of the free module, e.g. 1,3.")
@click.option(
    "-p",
    "--p",
    "p",
    type=int,
    show_default=True,
    default=DEFAULT_P,
    callback=_validate_prime,
    help="Prime of the coefficient field for the free and trivial modules.",
)
@click.option("-r", "--range", "n_range", required=True, callback=_parse_range, help="Levels lo..hi.")
@click.option("-w", "--what", type=click.Choice(QUANTITIES), show_default=True, default="dims")
@click.option("-f", "--format", "output_format", type=click.Choice(("csv", "json")), show_default=True, default="csv")
@click.option(
    "-j",
    "--jobs",
    type=int,
    show_default=True,
    default=DEFAULT_JOBS,
    callback=_validate_positive_integer,
    help="Worker processes evaluating levels in parallel.",
)
@click.option(
    "--dim-cap",
    type=int,
    envvar="FIPERIOD_DIM_CAP",
    show_default=True,
    default=DEFAULT_DIM_CAP,
    callback=_validate_positive_integer,
    help="Refuse levels whose ambient free dimension exceeds this.",
)
@click.option(
    "--h1-cap",
    type=int,
    envvar="FIPERIOD_H1_CAP",
    show_default=True,
    default=DEFAULT_H1_CAP,
    callback=_validate_positive_integer,
    help="Refuse H^1 levels whose cocycle constraints would exceed this many entries.",
)
@click.option("-v", "--verbose", is_flag=True, default=False, help="Show progress on stderr.")
def evaluate(spec, builtin, d, degrees, p, n_range, what, output_format, jobs, dim_cap, h1_cap, verbose) -> None:
    """Tabulate dimensions, H^0 or H^1 of a module over a range of levels.

    \b
    SPEC is a JSON module description.

    Examples:

    $ fiperiod eval --builtin intro-kernel --what h0 --range 2..10

    """
    module = _load_module(spec, builtin, d, degrees, p)
    levels = list(n_range)

    try:
        fimod.check_feasible(module, levels, dim_cap)
        if what == "h1":
            cohom.check_h1_feasible(module, levels, h1_cap)
    except InfeasibleSizeError as error:
        raise InfeasibleFailure(str(error)) from None
    if verbose:
        click.echo(f"Levels: {levels[0]}..{levels[-1]}", err=True)
        click.echo(f"Ambient dimension: {fimod.ambient_dim(module, levels[-1])}", err=True)

    compute = partial(_level_value, module, what)
    if jobs == 1:
        values = _collect(map(compute, levels), len(levels), verbose)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            values = _collect(executor.map(compute, levels), len(levels), verbose)

    _emit_series(DimensionSeries(levels[0], tuple(values)), output_format, what)


def _collect(results, total, verbose):
    values = []
    for value in results:
        values.append(value)
        if verbose:
            print_progress(len(values), total, prefix="Evaluating")
    return values


@click.command()
@click.option("-c", "--cover", required=True, help="Ordered cover degrees, e.g. 0,5.")
@click.option(
    "-p", "--p", "p", type=int, show_default=True, default=DEFAULT_P, callback=_validate_prime, help="Prime."
)
@click.option(
    "-t",
    "--t",
    "t",
    type=int,
    show_default=True,
    default=0,
    callback=_validate_nonnegative_integer,
    help="Cohomological degree.",
)
def bound(cover, p, t) -> None:
    """Period and stable range bounds for a filtered module on a cover.

    Examples:

    $ fiperiod bound --cover 0,5 --p 2 --t 0

    """
    try:
        shape = periodcalc.CoverShape.parse(cover, p)
    except ValueError as error:
        raise click.BadParameter(str(error), param_hint="--cover") from None
    result = periodcalc.filtered_bounds(shape, t)
    body = {
        "schema": BOUND_SCHEMA,
        "cover": list(shape.degrees),
        "p": p,
        "t": t,
        "exponent": result.exponent,
        "period": p**result.exponent,
        "stable_range": result.stable_range,
    }
    click.echo(json.dumps(body, indent=2, sort_keys=True))


@click.command()
@click.argument("shape", type=click.Path(exists=True, dir_okay=False, readable=True))
@click.option(
    "-t", "--t", "t", type=int, required=True, callback=_validate_nonnegative_integer, help="Cohomological degree."
)
@click.option("--r-max", type=int, callback=_validate_positive_integer, help="Last tabulated page; default t + 2.")
@click.option("--vector", is_flag=True, default=False, help="Use the recursion over multi-row columns.")
def resolve_bound(shape, t, r_max, vector) -> None:
    """Period exponent and stable range from a resolution shape.

    \b
    SHAPE is a JSON description of the covers, onsets and wirings.

    Examples:

    $ fiperiod resolve-bound shape.json --t 1

    """
    with open(shape, encoding="utf-8") as handle:
        text = handle.read()
    try:
        parsed = periodcalc.ResolutionShape.from_json(text)
    except ValueError as error:
        raise ParseFailure(f"{shape}: {error}") from None

    recursion = periodcalc.vector_resolution_recursion if vector else periodcalc.resolution_recursion
    try:
        result = recursion(parsed, t, r_max)
    except IncompleteShapeError as error:
        raise ParseFailure(f"{shape}: {error}") from None

    body = result.to_dict()
    ceilings = periodcalc.bound_main(parsed, t)
    body.update(
        {
            "schema": RECURSION_SCHEMA,
            "p": parsed.p,
            "recursion": "vector" if vector else "scalar",
            "bound_main": {"M": ceilings.M, "SD": ceilings.SD},
        }
    )
    click.echo(json.dumps(body, indent=2, sort_keys=True))


@click.command()
@click.argument("series", required=False, type=click.File("r"))
@click.option("-o", "--oracle", type=click.Choice(oracles.ORACLES), help="Use a closed form instead of SERIES.")
@click.option(
    "-p", "--p", "p", type=int, show_default=True, default=DEFAULT_P, callback=_validate_prime, help="Prime."
)
@click.option("--d", type=int, help="Degree d of the example1 oracle.")
@click.option("-r", "--range", "n_range", callback=_parse_range, help="Oracle levels lo..hi.")
@click.option(
    "-m",
    "--min-margin",
    type=int,
    show_default=True,
    default=periodet.DEFAULT_MIN_MARGIN,
    help="Full periods that must repeat after the onset.",
)
@click.option("-c", "--cover", help="Cover degrees; adds the bound divisibility verdict.")
@click.option(
    "-t",
    "--t",
    "t",
    type=int,
    show_default=True,
    default=0,
    callback=_validate_nonnegative_integer,
    help="Cohomological degree of the series, used with --cover.",
)
@click.option("--strict", is_flag=True, default=False, help="Exit with status 4 when inconclusive.")
def period(series, oracle, p, d, n_range, min_margin, cover, t, strict) -> None:
    """Detect the eventual period of a series.

    \b
    SERIES is a CSV file with the header n,value; - reads stdin.

    Examples:

    $ fiperiod period --oracle sphere_h1 --p 3
    $ fiperiod eval --builtin example1 --d 3 --what h0 --range 3..40 | fiperiod period -

    """
    if min_margin < 2:
        raise click.BadParameter("Should be at least 2.", param_hint="--min-margin")
    if (series is None) == (oracle is None):
        raise click.UsageError("Give either a SERIES file or --oracle, not both.")

    if series is not None:
        try:
            data = utils.read_series_csv(series)
        except SpecError as error:
            raise ParseFailure(f"{series.name}: {error}") from None
    else:
        try:
            candidate = oracles.OracleSeries(oracle, p, {} if d is None else {"d": d})
            if n_range is None:
                n_range = range(candidate.first_level, candidate.first_level + max(40, 20 * p) + 1)
            data = oracles.oracle_series(oracle, p, n_range, d)
        except ValueError as error:
            raise click.BadParameter(str(error)) from None

    report = periodet.detect_period(data, min_margin)
    body = report.to_dict()
    if not report.inconclusive:
        body["power_of_p"] = periodet.check_power_of_p(report, p)
        if cover is not None:
            try:
                shape = periodcalc.CoverShape.parse(cover, p)
            except ValueError as error:
                raise click.BadParameter(str(error), param_hint="--cover") from None
            exponent = periodcalc.filtered_bounds(shape, t).exponent
            body["exponent"] = exponent
            body["divides_bound"] = periodet.check_divides_bound(report, p, exponent)
    click.echo(json.dumps(body, indent=2, sort_keys=True))

    if strict and report.inconclusive:
        raise InconclusiveFailure("no period confirmed within the window")


@click.command()
@click.option("-n", "--name", type=click.Choice(oracles.ORACLES), required=True, help="Closed form to emit.")
@click.option(
    "-p", "--p", "p", type=int, show_default=True, default=DEFAULT_P, callback=_validate_prime, help="Prime."
)
@click.option("--d", type=int, help="Degree d of the example1 oracle.")
@click.option("-r", "--range", "n_range", required=True, callback=_parse_range, help="Levels lo..hi.")
@click.option("-f", "--format", "output_format", type=click.Choice(("csv", "json")), show_default=True, default="csv")
def oracle(name, p, d, n_range, output_format) -> None:
    """Emit a closed-form series.

    Examples:

    $ fiperiod oracle --name example1 --d 5 --range 5..200

    """
    try:
        data = oracles.oracle_series(name, p, n_range, d)
    except ValueError as error:
        raise click.BadParameter(str(error)) from None
    _emit_series(data, output_format, name)


cli.add_command(evaluate, name="eval")
cli.add_command(bound, name="bound")
cli.add_command(resolve_bound, name="resolve-bound")
cli.add_command(period, name="period")
cli.add_command(oracle, name="oracle")


if __name__ == "__main__":
    cli()  # pylint: disable=no-value-for-parameter
