"""Geometry toolkit for lifting perspective images and videos to 360-degree panoramas."""
from panolift.exceptions import EmptyMaskError, FormatError, InvalidArgumentError, PanoliftError, UsageError

__version__ = '0.1.0'

__all__ = ['EmptyMaskError', 'FormatError', 'InvalidArgumentError', 'PanoliftError', 'UsageError']
