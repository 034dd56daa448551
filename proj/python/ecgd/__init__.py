"""ECG trace image digitization: grid detection, hedged Otsu binarization,
least-cost trace extraction and calibration."""

from ._core import *  # noqa: F401,F403
from ._core import EcgdError, __version__  # noqa: F401
