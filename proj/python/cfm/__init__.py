# SPDX-License-Identifier: Apache-2.0
"""Conformal moduli and maps of quadrilaterals on parameterized surfaces."""

from ._core import (
    CfmError,
    Surface,
    catalog,
    convergence,
    domain_names,
    make_surface,
    mercator_reference,
    modulus_pair,
    parse_number,
    run,
    surface_names,
)

__all__ = [
    "CfmError",
    "Surface",
    "catalog",
    "convergence",
    "domain_names",
    "make_surface",
    "mercator_reference",
    "modulus_pair",
    "parse_number",
    "run",
    "surface_names",
]
