"""Tests for field datasources."""

import os
import unittest

from fracrot.datasources import BUILTIN_FIELDS, resolve_field, resolve_power_sum, retrieve_fields_from_filesystem
from fracrot.exceptions import ValidationError
from fracrot.models.field import PowerSum

FIELDS_DIR = os.path.join(os.path.dirname(__file__), "fixtures", "fields")


class TestRetrieveFields(unittest.TestCase):
    """Test loading a field library from disk."""

    def test_library(self):
        fields = retrieve_fields_from_filesystem(FIELDS_DIR)
        self.assertEqual(sorted(fields), ["monomial", "r6"])
        self.assertEqual(fields["r6"]["description"], "(x^2 + y^2)^3")
        self.assertEqual(fields["r6"]["filename"], "radial.yaml")
        self.assertEqual(len(fields["r6"]["power_sum"]), 4)
        self.assertEqual(fields["monomial"]["power_sum"], PowerSum.monomial(1.0, 1.3, 0.7))

    def test_missing_directory(self):
        with self.assertRaises(ValidationError):
            retrieve_fields_from_filesystem(os.path.join(FIELDS_DIR, "missing"))


class TestResolve(unittest.TestCase):
    """Test field references."""

    def test_builtin(self):
        self.assertIs(resolve_power_sum("r2"), BUILTIN_FIELDS["r2"])
        self.assertEqual(resolve_field("r4").name, "r4")

    def test_library_name(self):
        ps = resolve_power_sum("r6", FIELDS_DIR)
        self.assertEqual(ps.evaluate(1.0, 1.0), 8.0)

    def test_file_path(self):
        ps = resolve_power_sum(os.path.join(FIELDS_DIR, "extra", "monomial.csv"))
        self.assertEqual(ps, PowerSum.monomial(1.0, 1.3, 0.7))
        self.assertEqual(resolve_power_sum(os.path.join(FIELDS_DIR, "radial.yaml")).evaluate(1.0, 0.0), 1.0)

    def test_inline(self):
        self.assertEqual(resolve_power_sum("1,2,0;1,0,2"), BUILTIN_FIELDS["r2"])

    def test_field_has_exact_partials(self):
        f = resolve_field("1,3,1")
        self.assertEqual(f.partial_value(1, 0, 2.0, 3.0), 36.0)

    def test_unknown(self):
        with self.assertRaises(ValidationError):
            resolve_power_sum("r3")
        with self.assertRaises(ValidationError):
            resolve_power_sum(os.path.join(FIELDS_DIR, "absent.csv"))
