# coding: utf-8 -*-


# imports
from . figures import *
from . report import *


# module level doc-string
__doc__ = """
Extensions contains optional reporting code: SVG renderings of a mission and the
HTML summary page. It is not required for planning and is not included in the default
import. It is used by ``export_artifacts`` and the ``render`` command.
"""
