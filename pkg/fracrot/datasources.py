"""Datasources for Fracrot: builtin fields and field libraries on disk."""

import logging
import os
from collections import OrderedDict
from pathlib import Path

import yaml

from fracrot.exceptions import ValidationError
from fracrot.field import field_from_power_sum, parse_power_sum
from fracrot.models.field import PowerSum

logger = logging.getLogger("fracrot.datasources")

BUILTIN_FIELDS = OrderedDict()
BUILTIN_FIELDS["const1"] = PowerSum.constant(1.0)
BUILTIN_FIELDS["r2"] = PowerSum.from_triples([(1.0, 2.0, 0.0), (1.0, 0.0, 2.0)])
BUILTIN_FIELDS["r4"] = PowerSum.from_triples([(1.0, 4.0, 0.0), (2.0, 2.0, 2.0), (1.0, 0.0, 4.0)])
BUILTIN_FIELDS["x3y"] = PowerSum.monomial(1.0, 3.0, 1.0)

YAML_SUFFIXES = (".yml", ".yaml")
CSV_SUFFIXES = (".csv",)


def _power_sum_from_yaml(data, filename):
    if not isinstance(data, dict) or "terms" not in data:
        raise ValidationError({"library": f"{filename} must be a mapping with a 'terms' list"})
    rows = []
    for number, term in enumerate(data["terms"], start=1):
        if not isinstance(term, (list, tuple)) or len(term) != 3:
            raise ValidationError({"library": f"{filename}: term {number} must be [coeff, beta, lam], got {term}"})
        rows.append(",".join(str(value) for value in term))
    return parse_power_sum("\n".join(rows))


def retrieve_fields_from_filesystem(path):
    """Retrieve field definitions from the file system.

    YAML files hold ``name``, ``description`` and ``terms`` (a list of ``[coeff, beta, lam]``); CSV files
    hold ``coeff,beta,lam`` rows and are named after their stem.

    Args:
        path (str): Directory holding the field files, searched recursively.

    Returns:
        dict: Field name to ``{"description": str, "power_sum": PowerSum, "filename": str}``.
    """
    if not os.path.isdir(path):
        raise ValidationError({"library": f"{path} is not a directory"})
    fields = {}
    files = sorted(filename for filename in Path(path).rglob("*") if filename.suffix in YAML_SUFFIXES + CSV_SUFFIXES)
    for filename in files:
        with open(filename, encoding="utf8") as file:
            if filename.suffix in YAML_SUFFIXES:
                data = yaml.safe_load(file)
                power_sum = _power_sum_from_yaml(data, filename.name)
                name = str(data.get("name", filename.stem))
                description = str(data.get("description", ""))
            else:
                power_sum = parse_power_sum(file.read())
                name, description = filename.stem, ""
        if name in fields:
            logger.warning("Field %s in %s shadows the one in %s", name, filename.name, fields[name]["filename"])
        fields[name] = {"description": description, "power_sum": power_sum, "filename": filename.name}
    logger.debug("Loaded %d fields from %s", len(fields), path)
    return fields


def resolve_power_sum(reference, library=""):
    """Turn a field reference into a PowerSum.

    A reference is, in order of precedence: a builtin name, a name from ``library``, a path to a CSV or
    YAML file, or inline terms ``coeff,beta,lam;coeff,beta,lam``.
    """
    if reference in BUILTIN_FIELDS:
        return BUILTIN_FIELDS[reference]
    if library:
        fields = retrieve_fields_from_filesystem(library)
        if reference in fields:
            return fields[reference]["power_sum"]
    candidate = Path(reference)
    if candidate.suffix in YAML_SUFFIXES + CSV_SUFFIXES:
        if not candidate.is_file():
            raise ValidationError({"field": f"field file {reference} does not exist"})
        with open(candidate, encoding="utf8") as file:
            if candidate.suffix in YAML_SUFFIXES:
                return _power_sum_from_yaml(yaml.safe_load(file), candidate.name)
            return parse_power_sum(file.read())
    if "," in reference:
        return parse_power_sum(reference.replace(";", "\n"))
    raise ValidationError({"field": f"unknown field {reference!r}; builtins are {', '.join(BUILTIN_FIELDS)}"})


def resolve_field(reference, library=""):
    """Resolve a field reference into a ScalarField with exact partials."""
    return field_from_power_sum(resolve_power_sum(reference, library), name=reference)
