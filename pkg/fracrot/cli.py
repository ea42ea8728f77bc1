"""The ``fracrot`` command line.

Settings are layered by invoke: collection defaults < /etc/fracrot.yaml < ~/.fracrot.yaml <
FRACROT_ENGINE_* environment variables < the runtime file given with ``-f`` < command-line flags.
"""

import contextlib
import logging

from invoke import Collection, Config, Exit, ParseError, Program
from invoke.tasks import task as invoke_task

from fracrot import __version__, default_settings
from fracrot.datasources import resolve_field
from fracrot.exceptions import FracrotError, ValidationError
from fracrot.models.orders import Axis, DerivKind, QuadratureSpec
from fracrot.suites import SUITES

logger = logging.getLogger("fracrot.cli")

DEFAULT_POINT = "1,1"

namespace = Collection("fracrot")
namespace.configure({"engine": dict(default_settings)})


def task(function=None, *args, **kwargs):
    """Task decorator to override the default Invoke task decorator and add each task to the namespace."""

    def task_wrapper(function=None):
        """Wrapper around invoke.task to add the task to the namespace as well."""
        if args or kwargs:
            task_func = invoke_task(*args, **kwargs)(function)
        else:
            task_func = invoke_task(function)
        namespace.add_task(task_func)
        return task_func

    if function:
        return task_wrapper(function)
    return task_wrapper


class FracrotConfig(Config):
    """Invoke configuration reading fracrot.yaml files and FRACROT_* environment variables."""

    prefix = "fracrot"


class FracrotProgram(Program):
    """Program turning argument parsing errors into usage errors (exit code 2)."""

    def parse_core(self, argv):
        """Parse the core flags, reporting parse errors as usage errors."""
        try:
            super().parse_core(argv)
        except ParseError as exc:
            raise Exit(f"fracrot: {exc}", code=2) from exc

    def parse_tasks(self):
        """Parse the task flags, reporting parse errors as usage errors."""
        try:
            super().parse_tasks()
        except ParseError as exc:
            raise Exit(f"fracrot: {exc}", code=2) from exc


@contextlib.contextmanager
def exit_codes():
    """Map Fracrot errors onto the exit code each of them carries."""
    try:
        yield
    except FracrotError as exc:
        logger.debug("Command failed", exc_info=True)
        raise Exit(f"fracrot: {exc}", code=exc.exit_code) from exc


def engine_settings(context, **flags):
    """Configured engine settings with the given (non-None) flags on top."""
    settings = {key: context.config.engine[key] for key in default_settings}
    settings.update({key: value for key, value in flags.items() if value is not None})
    return settings


def _typed(settings, key, kind):
    try:
        return kind(settings[key])
    except (TypeError, ValueError) as exc:
        raise ValidationError({key: f"invalid value {settings[key]!r}"}) from exc


def parse_point(text):
    """Parse ``x,y`` into a tuple of floats."""
    parts = str(text).split(",")
    try:
        if len(parts) != 2:
            raise ValueError(text)
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ValidationError({"point": f"expected x,y, got {text!r}"}) from exc


def parse_angles(text):
    """Parse a comma-separated list of angles."""
    try:
        return [float(part) for part in str(text).split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError({"phi": f"expected comma-separated angles, got {text!r}"}) from exc


def _choice(settings, key, enum):
    try:
        return enum(str(settings[key]).lower())
    except ValueError as exc:
        choices = ", ".join(member.value for member in enum)
        raise ValidationError({key: f"expected one of {choices}, got {settings[key]!r}"}) from exc


def _axes(value):
    if str(value).lower() == "both":
        return [Axis.X, Axis.Y]
    return [_choice({"axis": value}, "axis", Axis)]


def _quadrature(settings):
    return QuadratureSpec(
        nodes=_typed(settings, "nodes", int),
        levels=_typed(settings, "levels", int),
        panel_nodes=_typed(settings, "panel_nodes", int),
    )


def _points(point):
    return [parse_point(text) for text in (point or [DEFAULT_POINT])]


def _configure_logging(settings):
    level = str(settings["log_level"]).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ValidationError({"log_level": f"unknown level {settings['log_level']!r}"})
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("fracrot").setLevel(level)


def _field(settings):
    return resolve_field(str(settings["field"]), str(settings["library"] or ""))


def _emit(result, settings):
    output_format = str(settings["format"]).lower()
    if output_format not in ("csv", "json"):
        raise ValidationError({"format": f"expected csv or json, got {settings['format']!r}"})
    text = result.render(output_format, _typed(settings, "precision", int))
    if settings["output"]:
        with open(settings["output"], "w", encoding="utf-8") as file:
            file.write(text)
        logger.info("Wrote %d rows to %s", len(result.rows), settings["output"])
    else:
        print(text, end="")
    if not result.passed:
        raise Exit("fracrot: check failed", code=1)


COMMON_HELP = {
    "field": "Builtin field (const1, r2, r4, x3y), library name, CSV/YAML file or inline 'c,b,l;c,b,l'",
    "library": "Directory of YAML/CSV field definitions",
    "alpha": "Fractional order",
    "point": "Evaluation point x,y (repeatable, default 1,1)",
    "nodes": "Gauss-Jacobi nodes per integral",
    "format": "Output format: csv or json",
    "precision": "Significant digits of numeric output",
    "output": "Write the table to this file instead of stdout",
    "log_level": "Logging level of the fracrot loggers",
}


@task(
    auto_shortflags=False,
    iterable=["point"],
    help={**COMMON_HELP, "kind": "rl, caputo or integral", "axis": "x or y"},
)
def deriv(
    context,
    kind=None,
    alpha=None,
    axis=None,
    field=None,
    library=None,
    point=None,
    nodes=None,
    format=None,  # pylint: disable=redefined-builtin
    precision=None,
    output=None,
    log_level=None,
):
    """Compute fractional derivatives (or integrals) of a field at points."""
    with exit_codes():
        settings = engine_settings(
            context,
            kind=kind,
            alpha=alpha,
            axis=axis,
            field=field,
            library=library,
            nodes=nodes,
            format=format,
            precision=precision,
            output=output,
            log_level=log_level,
        )
        _configure_logging(settings)
        result = SUITES["deriv"]().run(
            f=_field(settings),
            kind=_choice(settings, "kind", DerivKind),
            axis=_choice(settings, "axis", Axis),
            alpha=_typed(settings, "alpha", float),
            points=_points(point),
            q=_quadrature(settings),
        )
        _emit(result, settings)


@task(
    auto_shortflags=False,
    iterable=["point"],
    help={
        **COMMON_HELP,
        "law": "rl, caputo, laplacian or conjugation",
        "axis": "x, y or both",
        "phi": "Comma-separated rotation angles; ratios are taken between consecutive angles",
    },
)
def transform_check(
    context,
    law="rl",
    alpha=None,
    axis=None,
    field=None,
    library=None,
    phi="0.04,0.02",
    point=None,
    nodes=None,
    format=None,  # pylint: disable=redefined-builtin
    precision=None,
    output=None,
    log_level=None,
):
    """Check a transformation law under rotation and report Richardson ratios."""
    with exit_codes():
        settings = engine_settings(
            context,
            alpha=alpha,
            axis=axis,
            field=field,
            library=library,
            nodes=nodes,
            format=format,
            precision=precision,
            output=output,
            log_level=log_level,
        )
        _configure_logging(settings)
        suite = SUITES["transform"]()
        if law not in suite.LAWS:
            raise ValidationError({"law": f"expected one of {', '.join(suite.LAWS)}, got {law!r}"})
        result = suite.run(
            law=law,
            f=_field(settings),
            axes=_axes(settings["axis"]),
            alpha=_typed(settings, "alpha", float),
            phis=parse_angles(phi),
            points=_points(point),
            q=_quadrature(settings),
        )
        _emit(result, settings)


@task(
    auto_shortflags=False,
    iterable=["point"],
    help={
        **COMMON_HELP,
        "expr": "Invariant expression: const-xa, const-ya, const-diff, const-sum, q1, q2, q2-literal, caputo-q1",
        "phi": "Comma-separated rotation angles (0 is the reference frame)",
        "fit_a": "Fit the constant A of Q1 + A Q2 instead of scanning an expression",
    },
)
def invariant_scan(
    context,
    expr="q1",
    fit_a=False,
    alpha=None,
    field=None,
    library=None,
    phi="0,0.02,0.04",
    point=None,
    nodes=None,
    format=None,  # pylint: disable=redefined-builtin
    precision=None,
    output=None,
    log_level=None,
):
    """Scan an invariant expression over rotated frames, or fit the combination constant."""
    with exit_codes():
        settings = engine_settings(
            context,
            alpha=alpha,
            field=field,
            library=library,
            nodes=nodes,
            format=format,
            precision=precision,
            output=output,
            log_level=log_level,
        )
        _configure_logging(settings)
        common = {
            "f": _field(settings),
            "alpha": _typed(settings, "alpha", float),
            "phis": parse_angles(phi),
            "points": _points(point),
            "q": _quadrature(settings),
        }
        if fit_a:
            result = SUITES["combination-fit"]().run(**common)
        else:
            result = SUITES["invariant-scan"]().run(expr_id=expr, **common)
        _emit(result, settings)


@task(
    auto_shortflags=False,
    help={
        "tolerance": "Relative coefficient tolerance of every identity",
        "format": COMMON_HELP["format"],
        "precision": COMMON_HELP["precision"],
        "output": COMMON_HELP["output"],
        "log_level": COMMON_HELP["log_level"],
    },
)
def identity_suite(
    context,
    tolerance=None,
    format=None,  # pylint: disable=redefined-builtin
    precision=None,
    output=None,
    log_level=None,
):
    """Run the rotation-generator identities on polynomial test fields."""
    with exit_codes():
        settings = engine_settings(
            context, tolerance=tolerance, format=format, precision=precision, output=output, log_level=log_level
        )
        _configure_logging(settings)
        result = SUITES["identity"]().run(tol=_typed(settings, "tolerance", float))
        _emit(result, settings)


program = FracrotProgram(
    namespace=namespace,
    version=__version__,
    name="fracrot",
    binary="fracrot",
    config_class=FracrotConfig,
)
