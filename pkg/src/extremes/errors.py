# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-05 09:12:44
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-15 16:20:03
"""Exceptions raised by the extremes toolkit."""

from typing import Any, Optional


class ExtremesError(Exception):
    """Base class. Carries a dict of details that make the failure reproducible."""
    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}

    def __str__(self):
        base = super().__str__()
        if self.details:
            extras = ', '.join(f"{key}={val!r}" for key, val in self.details.items())
            return f"{base} ({extras})"
        return base


class InvalidArgumentError(ExtremesError, ValueError):
    """NaN, nonpositive, or otherwise out-of-range scalar argument."""


class DomainError(InvalidArgumentError):
    """Argument outside the domain of a special function."""


class WindowUndefinedError(InvalidArgumentError):
    """Localization window requested where ln ln u is not positive."""


class AsymptoticDomainError(InvalidArgumentError):
    """Threshold too small for the asymptotic formulas (u <= e)."""


class ModelError(ExtremesError):
    """Process specification that is inconsistent, or that produced non-finite values."""


class EmbeddingError(ExtremesError):
    """Circulant embedding has a materially negative eigenvalue."""
    def __init__(self, message: str, eigenvalue: float, details: Optional[dict[str, Any]] = None):
        details = dict(details or {})
        details['eigenvalue'] = eigenvalue
        super().__init__(message, details)
        self.eigenvalue = eigenvalue


class NotPositiveDefiniteError(ExtremesError):
    """Covariance matrix not factorizable even after the largest jitter."""
    def __init__(self, message: str, min_eigenvalue: float, details: Optional[dict[str, Any]] = None):
        details = dict(details or {})
        details['min_eigenvalue'] = min_eigenvalue
        super().__init__(message, details)
        self.min_eigenvalue = min_eigenvalue


class ConfigError(ExtremesError):
    """Experiment configuration violates the schema."""
    def __init__(self, message: str, field_path: str = '$', details: Optional[dict[str, Any]] = None):
        details = dict(details or {})
        details['field'] = field_path
        super().__init__(message, details)
        self.field_path = field_path
