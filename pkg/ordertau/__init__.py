import gettext as _gettext
from importlib.resources import files

# Internationalization
_ = _gettext.translation("ordertau", str(files("ordertau").joinpath("locale")), fallback=True).gettext


from ._errors import *
from .exact import BigRational, SparsePoly
from . import config, exact, product, appendix, copulas, montecarlo, records
